"""Closed-form checks on the economics of the sleep-to-dodge attack."""

from typing import NamedTuple


class CreditRates(NamedTuple):
    arrival: float
    debit: float


def attack_credit_rates(n_vms: int) -> CreditRates:
    """Credit flow of the victims on one PCPU, per fast tick, under a perfect attack.

    N VMs receive 100/N credits each per tick. The attacker is never debited, so every
    debit of 100 lands on one of the N-1 victims, which together receive (N-1)/N of a
    debit per tick. Rates are returned in units of one debit.
    """
    if n_vms < 2:
        raise ValueError(f"An attack needs at least one victim, got {n_vms} VMs.")
    return CreditRates(arrival=(n_vms - 1) / n_vms, debit=1.0)


def theft_condition(sleep: float, cycle: float, p_sampled: float) -> float:
    """Expected reduction of measured usage minus the time given up by sleeping, per cycle.

    A cycle-long charge is avoided with probability p_sampled by sleeping for `sleep`.
    Positive values mean the pattern steals service: the scheduler is theft-resistant
    exactly when p_sampled <= sleep / cycle.
    """
    if cycle <= 0 or not 0 <= sleep <= cycle:
        raise ValueError(f"Need 0 <= sleep <= cycle and cycle > 0, got {sleep}, {cycle}.")
    if not 0.0 <= p_sampled <= 1.0:
        raise ValueError(f"p_sampled must be a probability, got {p_sampled}.")
    return p_sampled * cycle - sleep
