"""Exception types raised across the package."""


class GroupError(ValueError):
    """Bad group spec, malformed Cayley table, or failed group axioms."""


class GroupMismatchError(ValueError):
    """Operands belong to different groups."""


class EmptySetError(ValueError):
    """An operation that needs a non-empty set received an empty one."""


class CapExceededError(ValueError):
    """Group order is above the configured limit for an operation."""


class NotApplicableError(ValueError):
    """Hypotheses of a detector or pipeline are not met by the input."""
