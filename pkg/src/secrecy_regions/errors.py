"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input failed a structural or numerical validity check."""


class CapExceededError(RuntimeError):
    """A configured size/budget cap would be exceeded; nothing was computed."""


class UnboundedPolytopeError(RuntimeError):
    """A rate polytope escaped the sanity box and is treated as unbounded."""
