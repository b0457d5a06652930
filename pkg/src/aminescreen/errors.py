"""Exception hierarchy shared across the package."""


class AmineScreenError(Exception):
    """Base class for every error raised by this package."""


# -- chemistry --------------------------------------------------------------


class SmilesError(AmineScreenError, ValueError):
    """Malformed or unsupported SMILES input.

    ``position`` is the 0-based character offset the problem was detected at.
    """

    def __init__(self, message, position=None, text=None):
        self.position = position
        self.text = text
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class UnbalancedBranch(SmilesError):
    pass


class UnclosedRingBond(SmilesError):
    pass


class UnknownElement(SmilesError):
    pass


class ValenceViolation(SmilesError):
    pass


class MultipleComponents(SmilesError):
    pass


# -- fingerprint / PCA -------------------------------------------------------


class EmptyInput(AmineScreenError, ValueError):
    pass


class DegenerateData(AmineScreenError, ValueError):
    pass


# -- labels -----------------------------------------------------------------


class NoAmine(AmineScreenError, ValueError):
    """Molecule has no nitrogen that can capture CO2 by a known route."""


# -- learning ---------------------------------------------------------------


class SingleClassTraining(AmineScreenError, ValueError):
    pass


class NonFiniteFeature(AmineScreenError, ValueError):
    pass


class DimensionMismatch(AmineScreenError, ValueError):
    pass


class LengthMismatch(AmineScreenError, ValueError):
    pass


class NotFittedError(AmineScreenError, AttributeError):
    pass


# -- signal -----------------------------------------------------------------


class ZeroReference(AmineScreenError, ValueError):
    pass


class NeverExceeds(AmineScreenError):
    """Roll-off criterion never met anywhere in the trace."""


class NonConvergence(AmineScreenError, RuntimeError):
    pass


class AbsorbanceExceedsA(AmineScreenError, ValueError):
    pass


# -- pipeline ---------------------------------------------------------------


class UsageError(AmineScreenError, ValueError):
    """Invalid configuration or command-line usage."""
