"""Exception hierarchy. Each class maps to one CLI exit code."""


class FFDistError(Exception):
    exit_code = 1


class UsageError(FFDistError, ValueError):
    """Bad arguments: mismatched fields, invalid parameters, malformed files."""

    exit_code = 1


class CapacityError(FFDistError):
    """A dense table would exceed the memory envelope."""

    exit_code = 2


class ConsistencyError(FFDistError, AssertionError):
    """An exact identity that must always hold was violated (implementation bug)."""

    exit_code = 3
