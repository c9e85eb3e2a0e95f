"""Exception types shared across the toolkit.

Each class carries a machine-readable ``kind`` that the CLI maps onto its
JSON error channel.
"""


class ToolkitError(ValueError):
    """Base class for all toolkit errors."""

    kind = "argument"


class ArgumentError(ToolkitError):
    """An argument is outside its documented domain."""

    kind = "argument"


class ZeroOverlapError(ToolkitError):
    """An overlap with the referential state is (numerically) zero.

    The protocols require nonzero prior overlaps; anything below the
    overlap threshold violates that precondition.
    """

    kind = "zero-overlap"


class DegenerateInputError(ToolkitError):
    """An input is degenerate (e.g. a zero-trace block or vanished branch)."""

    kind = "degenerate-input"
