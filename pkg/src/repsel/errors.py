"""Exception types shared across the package."""


class RepselError(Exception):
    pass


class FormatError(RepselError):
    """Trace file is malformed: bad magic, version, header, or payload size."""


# File-system failures propagate as the builtin OSError.
IoError = OSError


class ZeroNormRow(RepselError):
    """A row norm fell below 1e-12; degenerate token that must be masked upstream."""

    def __init__(self, row: int):
        self.row = row
        super().__init__(f"row {row} has near-zero norm (< 1e-12)")


class EmptyRepSet(RepselError):
    pass


class DimensionMismatch(RepselError):
    pass


class PowerIterationDivergence(RepselError):
    """Spectral-norm iteration hit non-finite values."""


class AllPairsDegenerate(RepselError):
    """Every token pair has near-zero displacement; expansion ratio undefined."""
