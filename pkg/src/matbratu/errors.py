"""Shared exception types."""


class ValidationError(ValueError):
    """Input violates a structural contract (shape, symmetry, finiteness)."""


class PreconditionError(ValidationError):
    """Operation was called outside its stated domain of validity."""


class PointAtInfinityError(ValueError):
    """Projective point cannot be normalized against the reference frame."""


class ConsistencyError(RuntimeError):
    """An internal identity failed on data that passed validation."""


class SpdLossError(RuntimeError):
    """Integration state left the positive-definite cone.

    Carries ``last_valid_s``, the last grid value at which the state was
    still accepted.
    """

    def __init__(self, message, last_valid_s):
        super().__init__(message)
        self.last_valid_s = last_valid_s
