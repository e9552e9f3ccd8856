"""Exception types raised by the library.

Every error derives from :class:`EvoRankError` so callers (notably the CLI)
can catch domain failures in one place and map them to exit codes.
"""


class EvoRankError(Exception):
    """Base class for all library errors."""


class ShapeMismatch(EvoRankError):
    """Payoff tensors, labels, or vectors have inconsistent shapes."""


class NonFinitePayoff(EvoRankError):
    """A payoff entry is NaN or infinite."""


class SymmetryViolation(EvoRankError):
    """A game declared symmetric fails the permutation check."""


class IndexOutOfRange(EvoRankError):
    """A strategy, population, or state index is out of bounds."""


class NotSquare(EvoRankError):
    """A win-rate matrix is not square."""


class OutOfRangeEntry(EvoRankError):
    """A win-rate entry lies outside [0, 1]."""


class ReducibleChain(EvoRankError):
    """The Markov chain has more than one closed communicating class."""


class NoConvergence(EvoRankError):
    """An iterative solver hit its iteration cap before reaching tolerance."""


class EpsilonOutOfRange(EvoRankError):
    """The equal-payoff transition weight must lie strictly in (0, 1)."""


class StepUnstable(EvoRankError):
    """An integration step left the admissible neighborhood of the simplex."""


class SizeMismatch(EvoRankError):
    """Two objects that must agree in size (e.g. chain and distribution) do not."""
