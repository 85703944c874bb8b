"""Exception and warning types shared across the package."""


class Bec2ModelError(Exception):
    """Base class for all errors raised by bec2model."""


class InvalidBasis(Bec2ModelError, ValueError):
    """A Fock label or sector index violates the |N, m> parity/range rules."""


class NotNormalOrdered(Bec2ModelError, ValueError):
    pass


class AmbiguousMinimum(Bec2ModelError, ValueError):
    """Two allowed states tie for the ground state."""


class UnsupportedParameters(Bec2ModelError, ValueError):
    pass


class DegenerateState(Bec2ModelError, ValueError):
    """Non-degenerate perturbation theory was requested for a degenerate level."""


class NotDegenerate(Bec2ModelError, ValueError):
    pass


class NegativeProbability(Bec2ModelError, ValueError):
    pass


class InvalidState(Bec2ModelError, ValueError):
    pass


class InvalidOperator(Bec2ModelError, ValueError):
    pass


class InvalidDegree(Bec2ModelError, ValueError):
    pass


class ResourceLimit(Bec2ModelError, RuntimeError):
    pass


class PerturbationBreakdownWarning(UserWarning):
    """First-order coefficients are large enough that the expansion is unreliable."""
