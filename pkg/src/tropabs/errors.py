from pathlib import Path


class TropabsError(Exception):
    """Base class of every error raised by the library."""


class DimensionError(TropabsError, ValueError):
    pass


class NotRowFiniteError(TropabsError, ValueError):
    def __init__(self, row: int):
        self.row = row
        super().__init__(f"Row {row} has no finite entry: matrix is not row-finite.")


class InvalidCoefficientError(TropabsError, ValueError):
    pass


class UnknownCoefficientError(TropabsError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown coefficient"


class NotCanonicalError(TropabsError):
    pass


class NotPartitionedError(TropabsError):
    pass


class UnsupportedSizeError(TropabsError):
    pass


class InvariantError(TropabsError):
    """An internal invariant does not hold. Indicates a bug, not bad input."""


class ParseError(TropabsError):
    def __init__(self, path: str | Path | None, message: str):
        self.path = path
        where = f"{path}: " if path is not None else ""
        super().__init__(f"{where}{message}")
