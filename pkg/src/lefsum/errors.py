"""Exception types shared across the package."""


class PreconditionError(ValueError):
    """A mathematical precondition of an operation is violated."""


class LatticeError(PreconditionError):
    """Raised for malformed lattices or vectors, or cross-lattice arithmetic."""


class UnclassifiedFormError(LatticeError):
    """The form is definite or degenerate; no indefinite descriptor exists."""
