"""Exception types shared across the toolkit."""


class InvalidInputError(ValueError):
    """Malformed sentence, profile, or parameter."""


class InvalidAssignmentError(ValueError):
    """Substitution assignment references a word outside its candidate set."""


class CapabilityError(RuntimeError):
    """A white-box operation was requested from a black-box classifier."""


class BackendError(RuntimeError):
    """An external classifier backend failed or replied out of contract."""


class AlreadyMisclassifiedError(RuntimeError):
    """Attack/certification precondition violated: the base text is already
    not predicted as its gold label."""


class InfeasibleError(RuntimeError):
    """Exact computation refused because the space exceeds the enumeration
    ceiling; callers should fall back to the estimator."""


class PairingError(ValueError):
    """Two result files do not cover the same instance ids."""
