"""Exception taxonomy shared across the package.

Every error raised by a public function is a subclass of :class:`MdsenseError`,
so callers (the CLI in particular) can distinguish toolkit failures from
programming errors with a single except clause.
"""

from __future__ import annotations


class MdsenseError(Exception):
    """Base class for all toolkit errors."""


class NonSquareError(MdsenseError):
    """A square matrix was required but rows != cols."""


class AsymmetricInputError(MdsenseError):
    """Symmetry violated beyond the accepted tolerance."""


class NumericalFailure(MdsenseError):
    """An underlying factorization failed to converge."""


class DomainError(MdsenseError):
    """A spectral function was evaluated outside its domain."""


class NotPSDError(MdsenseError):
    """A matrix required to be positive semidefinite is not."""


class NotPDError(MdsenseError):
    """A matrix required to be strictly positive definite is not."""


class SpectralOverflowError(MdsenseError):
    """A spectral argument is large enough to overflow exp/sinh."""


class ShapeMismatchError(MdsenseError):
    """Operand shapes are incompatible."""


class InvalidRankError(MdsenseError):
    """A rank parameter is outside [1, min(n, n')]."""


class TooManySamplesError(MdsenseError):
    """More without-replacement samples requested than entries exist."""


class NotOrthonormalError(MdsenseError):
    """A basis matrix does not have orthonormal columns."""


class ZeroMatrixError(MdsenseError):
    """The zero matrix is outside the domain of this operation."""


class ParameterOutOfRangeError(MdsenseError):
    """A scalar parameter violates its documented range."""


class DivergenceError(MdsenseError):
    """An iteration's risk exceeded the divergence guard."""


class MaxItersExceeded(MdsenseError):
    """Iteration budget exhausted before the tolerance was met.

    The best iterate seen so far is attached as ``best``.
    """

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


class ConfigError(MdsenseError):
    """An experiment configuration file is malformed or inconsistent."""


class RankDeficientGramWarning(UserWarning):
    """The Gram matrix of the sensing operator was numerically singular."""
