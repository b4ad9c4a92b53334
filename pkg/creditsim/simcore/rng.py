"""Deterministic random streams and the two samplers the randomized schedulers draw from.

All streams derive from numpy's Philox counter-based generator, keyed by a SeedSequence
built from the scenario seed and the replica index. Child streams are keyed by a stable
tuple (for example one per PCPU), so adding a VM never shifts another VM's draws.
"""

import math

import numpy as np

# Tolerance for floating point error in -mean*ln(u), e.g. u = exp(-1) giving 9999.999...
_FLOOR_EPSILON = 1e-6


class Rng:
    """Random stream for one replica or one of its components.

    Arguments:
        seed (int): Non-negative scenario seed.
        key (int): Further non-negative integers identifying the stream (replica index).
    """

    def __init__(self, seed: int, *key: int, _sequence: np.random.SeedSequence | None = None):
        if _sequence is None:
            if seed < 0 or any(k < 0 for k in key):
                raise ValueError(f"Seeds must be non-negative, got {(seed, *key)}.")
            _sequence = np.random.SeedSequence([seed, *key])
        self.seed_sequence = _sequence
        self.generator = np.random.Generator(np.random.Philox(self.seed_sequence))

    def child(self, *key: int) -> "Rng":
        """Get an independent stream identified by key."""
        sequence = np.random.SeedSequence(
            entropy=self.seed_sequence.entropy,
            spawn_key=tuple(self.seed_sequence.spawn_key) + tuple(key),
        )
        return Rng(0, _sequence=sequence)

    def uniform_open(self) -> float:
        """Uniform draw on (0, 1)."""
        while True:
            u = self.generator.random()
            if u > 0.0:
                return float(u)

    def integer(self, low: int, high: int) -> int:
        """Uniform integer on [low, high)."""
        return int(self.generator.integers(low, high))

    def uniform(self, low: float, high: float) -> float:
        return float(self.generator.uniform(low, high))

    def normal(self, sigma: float) -> float:
        return float(self.generator.normal(0.0, sigma))


def trunc_exp_from_uniform(u: float, mean: int, maximum: int) -> int:
    """Map a uniform draw in (0, 1] to min(floor(-mean * ln u), maximum)."""
    value = -mean * math.log(u)
    return min(int(math.floor(value + _FLOOR_EPSILON)), maximum)


def _check_trunc_exp(mean: int, maximum: int) -> None:
    if mean <= 0 or maximum <= 0:
        raise ValueError(f"mean and maximum must be positive, got mean={mean}, max={maximum}.")


def _check_probability(p: float) -> None:
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must be in (0, 1], got {p}.")


def sample_trunc_exp(rng: Rng, mean: int, maximum: int) -> int:
    """Draw an exponential interval with the given mean, in µs, truncated at maximum.

    Arguments:
        rng (Rng): Stream to draw from.
        mean (int): Mean of the untruncated exponential in µs.
        maximum (int): Upper bound in µs.

    Raises:
        ValueError: If mean or maximum is not positive.

    Returns:
        int: Interval in µs, in [0, maximum].
    """
    _check_trunc_exp(mean, maximum)
    return trunc_exp_from_uniform(rng.uniform_open(), mean, maximum)


def sample_geometric_slots(rng: Rng, p: float) -> int:
    """Draw the number of slots until the next success of a Bernoulli(p) trial per slot.

    Arguments:
        rng (Rng): Stream to draw from.
        p (float): Success probability per slot, in (0, 1].

    Raises:
        ValueError: If p is outside (0, 1].

    Returns:
        int: Number of slots, at least 1.
    """
    _check_probability(p)
    if p == 1.0:
        return 1
    return int(rng.generator.geometric(p))


def sample_trunc_exp_batch(rng: Rng, mean: int, maximum: int, size: int) -> np.ndarray:
    """Vectorised sample_trunc_exp."""
    _check_trunc_exp(mean, maximum)
    u = 1.0 - rng.generator.random(size)  # (0, 1]
    values = np.floor(-mean * np.log(u) + _FLOOR_EPSILON).astype(np.int64)
    return np.minimum(values, maximum)


def sample_geometric_batch(rng: Rng, p: float, size: int) -> np.ndarray:
    """Vectorised sample_geometric_slots."""
    _check_probability(p)
    return rng.generator.geometric(p, size).astype(np.int64)


def truncated_exp_mean(mean: int, maximum: int) -> float:
    """Expected value of min(X, maximum) for X exponential with the given mean."""
    return mean * (1.0 - math.exp(-maximum / mean))
