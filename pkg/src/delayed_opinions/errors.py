"""Exception hierarchy.

Input problems derive from :class:`InputError` (CLI exit status 3); numerical
failures derive from :class:`NumericalError` (CLI exit status 4).
"""


class DelayedOpinionsError(Exception):
    """Base class for every error raised by this package."""


class InputError(DelayedOpinionsError, ValueError):
    """Malformed or inconsistent input."""


class NumericalError(DelayedOpinionsError, ArithmeticError):
    """A computation could not produce a trustworthy result."""


class InvalidMatrix(InputError):
    pass


class InvalidPartition(InputError):
    pass


class InvalidProportions(InputError):
    pass


class MixedSignCrossing(InputError):
    """Arcs between two blocks of a partition disagree in sign.

    ``arcs`` holds the sign-free block adjacency, which is well defined even
    when the signed compression is not.
    """

    def __init__(self, message, arcs=None, blocks=None):
        super().__init__(message)
        self.arcs = arcs
        self.blocks = blocks


class ZeroRow(NumericalError):
    """A node has no in-neighbours, so its row cannot be normalized."""


class NoConvergence(NumericalError):
    pass


class DegenerateMean(NumericalError):
    pass


class NotConvergent(NumericalError):
    """The discrete system has spectral radius (numerically) equal to one or more."""


class StepTooLarge(InputError):
    pass


class PoorFit(NumericalError):
    pass


class PositiveRealPart(InputError):
    """An eigenvalue sits in the open right half plane (or on the imaginary axis
    where the quantity is undefined)."""


class DelayOutOfRange(InputError):
    pass


class NoCrossover(NumericalError):
    pass
