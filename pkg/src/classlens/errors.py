"""Exception types shared by ingestion, analytics, the service, and the CLI.

Every error carries a stable ``code`` (its class name) that the HTTP layer
places in the ``{"error": {"code", "message", "line"?}}`` envelope.
"""

from __future__ import annotations


class ClasslensError(Exception):
    """Base class for all errors raised by this package."""

    @property
    def code(self) -> str:
        return type(self).__name__


# --- dataset construction ---------------------------------------------------

class EmptyDataset(ClasslensError):
    """No instances to build a dataset from."""


class DegenerateClassCount(ClasslensError):
    """Fewer than two classes: no misclassification structure exists."""


class InconsistentVectorLength(ClasslensError):
    """Prediction vectors disagree on the number of classes."""


class DuplicateInstanceId(ClasslensError):
    """The same instance id appears more than once."""

    def __init__(self, instance_id: str, line: int | None = None):
        self.instance_id = instance_id
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"duplicate instance id {instance_id!r}{where}")


# --- analytics queries ------------------------------------------------------

class ClassOutOfRange(ClasslensError):
    """A class id outside [0, K)."""


class WindowTooLarge(ClasslensError):
    """Requested detail window is wider than the window cap."""


class InvalidRange(ClasslensError):
    """Window lower bound exceeds upper bound."""


class EmptySelection(ClasslensError):
    """Chord selection contains no classes."""


class DuplicateClassInSelection(ClasslensError):
    """Chord selection lists the same class twice."""


# --- file parsing -----------------------------------------------------------

class ParseError(ClasslensError):
    """Base for parse failures; ``line`` is 1-based in the source stream."""

    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class MalformedHeader(ParseError):
    pass


class RowArityMismatch(ParseError):
    pass


class NonFiniteValue(ParseError):
    pass


class ProbabilityOutOfRange(ParseError):
    pass


class SumTolerance(ParseError):
    def __init__(self, line: int, total: float, tolerance: float):
        self.total = total
        self.tolerance = tolerance
        super().__init__(
            line, f"probabilities sum to {total!r}, more than {tolerance!r} away from 1"
        )


class TrueClassOutOfRange(ParseError):
    pass


class MalformedRow(ParseError):
    pass


class DuplicateClassId(ClasslensError):
    def __init__(self, class_id: int, line: int | None = None):
        self.class_id = class_id
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"duplicate class id {class_id}{where}")


# --- snapshots ----------------------------------------------------------------

class SnapshotError(ClasslensError):
    """Base for snapshot encoding/decoding failures."""


class BadMagic(SnapshotError):
    pass


class UnsupportedVersion(SnapshotError):
    pass


class TruncatedStream(SnapshotError):
    pass


class ChecksumMismatch(SnapshotError):
    pass


# --- synthetic data -----------------------------------------------------------

class InvalidSpec(ClasslensError):
    """Synthetic generator parameters outside their documented ranges."""
