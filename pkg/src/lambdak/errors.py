"""Exception types shared across the package."""


class PreconditionError(ValueError):
    """A mathematical precondition of an operation does not hold."""


class SchemaError(ValueError):
    """Malformed fixture or input description."""
