"""Exception hierarchy shared by all modules."""


class SandwichFormsError(Exception):
    """Base class for library errors."""


class DomainViolation(SandwichFormsError, ValueError):
    """A function does not vanish off the support of a form."""


class RangeViolation(SandwichFormsError, ValueError):
    """A cut-off function leaves [0, 1] or breaks a required ordering."""


class NotMarkovian(SandwichFormsError, ValueError):
    """A form fails the Markov (second Beurling-Deny) criterion."""


class SpaceMismatch(SandwichFormsError, ValueError):
    """Two forms live on different measure spaces."""


class NegativeTime(SandwichFormsError, ValueError):
    pass


class Infeasible(SandwichFormsError, ValueError):
    """A capacity problem has no admissible function."""


class NotRepresentable(SandwichFormsError, ValueError):
    """A form is not given by a measure; ``witness`` is the offending entry."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotAdmissible(SandwichFormsError, ValueError):
    pass


class NotSandwiched(SandwichFormsError, ValueError):
    pass


class TooLarge(SandwichFormsError, ValueError):
    pass


class BadDimension(SandwichFormsError, ValueError):
    pass


class NegativeRobin(SandwichFormsError, ValueError):
    pass


class BadExponent(SandwichFormsError, ValueError):
    pass


class InternalInvariantViolation(SandwichFormsError, AssertionError):
    """A theorem-backed guard failed; this signals a bug, not bad input."""
