class WindowError(ValueError):
    """An operator was applied to a basis vector whose image leaves the finite window."""


class PreconditionError(ValueError):
    """Input violates a documented precondition."""
