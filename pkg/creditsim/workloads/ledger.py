class WorkLedger:
    """Abstract benchmark progress: one work unit per µs a VM's program runs.

    Arguments:
        vms (int): Number of VMs.
    """

    def __init__(self, vms: int):
        self.units = [0] * vms

    def accrue_work(self, vm: int, span: int) -> None:
        """Credit a completed scheduled interval of span µs to vm."""
        if span < 0:
            raise ValueError(f"A scheduled interval cannot be negative, got {span}.")
        self.units[vm] += span
