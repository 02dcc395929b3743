"""Spectral entropy and spectral hypentropy mirror maps.

The two geometries behind the package. The hypentropy map

    Phi_beta(X) = sum_i sigma_i * arcsinh(sigma_i / beta) - sqrt(sigma_i^2 + beta^2)

is defined for any real matrix through its singular values and interpolates
between nuclear-norm geometry (beta -> 0) and Frobenius geometry
(beta -> infinity). The entropy map

    Phi(X) = tr(X log X - X)

lives on symmetric PSD matrices, with the convention 0 log 0 = 0.

Spectral sums always run over all min(n, n') singular values (zero singular
values contribute their closed-form terms). The hypentropy value is computed
via the arcsinh form and the potential via the equivalent log form; keeping
the two implementations separate is a deliberate cross-check, their equality
is asserted in the test suite rather than enforced by sharing code.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    NotPDError,
    NotPSDError,
    ParameterOutOfRangeError,
    SpectralOverflowError,
)
from .linalg import as_matrix, sym_eig, sym_eigvals, svd, singular_values

# exp/sinh overflow guard; double precision overflows near 709
OVERFLOW_ARG = 700.0

# strict-interior eigenvalue floor for the entropy map (relative to max(1, ||X||_2));
# iterates are exponentials and stay PD in exact arithmetic, so anything at or
# below the floor signals numerical collapse rather than a valid state
PD_FLOOR = 1e-250


def _psd_eigenvalues(X, what: str) -> np.ndarray:
    """Eigenvalues of a PSD matrix, descending, tiny negatives clamped to 0."""
    vals = sym_eigvals(X)
    spectral = float(np.max(np.abs(vals))) if vals.size else 0.0
    if vals[-1] < -1e-10 * spectral:
        raise NotPSDError(
            f"{what}: eigenvalue {vals[-1]:.6e} below PSD clamp threshold"
        )
    return np.maximum(vals, 0.0)


def _xlogx(lam: np.ndarray) -> np.ndarray:
    """lambda * log(lambda) with the 0 log 0 = 0 convention."""
    out = np.zeros_like(lam)
    pos = lam > 0.0
    out[pos] = lam[pos] * np.log(lam[pos])
    return out


def _check_beta(beta: float) -> float:
    beta = float(beta)
    if not (beta > 0.0 and np.isfinite(beta)):
        raise ParameterOutOfRangeError(f"beta must be a positive real, got {beta!r}")
    return beta


def hypentropy_value(X, beta: float) -> float:
    """Phi_beta(X), summed over all min(n, n') singular values."""
    beta = _check_beta(beta)
    s = singular_values(X)
    return float(np.sum(s * np.arcsinh(s / beta) - np.hypot(s, beta)))


def hypentropy_potential(X, beta: float) -> float:
    """The implicit-bias potential of the hypentropy map, in log form.

    Equals hypentropy_value(X, beta) exactly via arcsinh(x) = log(x + sqrt(x^2+1));
    implemented independently as a transcription cross-check.
    """
    beta = _check_beta(beta)
    s = singular_values(X)
    root = np.hypot(s, beta)
    return float(np.sum(s * np.log(1.0 / beta) + s * np.log(s + root) - root))


def entropy_value(X) -> float:
    """Phi(X) = tr(X log X - X) = sum_i lambda_i log lambda_i - lambda_i."""
    lam = _psd_eigenvalues(X, "entropy_value")
    return float(np.sum(_xlogx(lam) - lam))


def entropy_potential(X, alpha: float) -> float:
    """The implicit-bias potential of the entropy map started at alpha*I.

    sum_i (log(1/alpha) - 1) * lambda_i + lambda_i log lambda_i; equals
    bregman(entropy, X, alpha*I) minus the constant n*alpha.
    """
    alpha = float(alpha)
    if not (alpha > 0.0 and np.isfinite(alpha)):
        raise ParameterOutOfRangeError(f"alpha must be a positive real, got {alpha!r}")
    lam = _psd_eigenvalues(X, "entropy_potential")
    return float(np.sum((np.log(1.0 / alpha) - 1.0) * lam + _xlogx(lam)))


class MirrorMap:
    """Shared interface: value, grad, grad_inverse, and the Bregman divergence."""

    kind: str = ""
    domain: str = ""

    def value(self, X) -> float:
        raise NotImplementedError

    def grad(self, X) -> np.ndarray:
        raise NotImplementedError

    def grad_inverse(self, Z) -> np.ndarray:
        raise NotImplementedError

    def bregman(self, X, Y) -> float:
        """D(X, Y) = value(X) - value(Y) - <grad(Y), X - Y>."""
        X = as_matrix(X)
        Y = as_matrix(Y)
        gy = self.grad(Y)
        return float(self.value(X) - self.value(Y) - np.sum(gy * (X - Y)))

    def inverse_with_spectrum(self, Z) -> tuple[np.ndarray, np.ndarray | None]:
        """grad_inverse(Z) along with the result's singular values, if free.

        The descent loop logs spectral diagnostics every iteration; maps that
        factor Z anyway hand the spectrum back so it is not recomputed.
        """
        return self.grad_inverse(Z), None


class EntropyMap(MirrorMap):
    """Spectral entropy on symmetric PSD matrices."""

    kind = "entropy"
    domain = "psd"

    def value(self, X) -> float:
        return entropy_value(X)

    def grad(self, X) -> np.ndarray:
        """log X; requires X strictly inside the PSD cone."""
        vals, vecs = sym_eig(X)
        floor = PD_FLOOR * max(1.0, float(np.max(np.abs(vals))))
        if vals[-1] <= floor:
            raise NotPDError(
                f"entropy grad: eigenvalue {vals[-1]:.6e} at or below interior floor"
            )
        G = (vecs * np.log(vals)) @ vecs.T
        return (G + G.T) / 2.0

    def grad_inverse(self, Z) -> np.ndarray:
        """exp Z for symmetric Z."""
        return self.inverse_with_spectrum(Z)[0]

    def inverse_with_spectrum(self, Z) -> tuple[np.ndarray, np.ndarray]:
        vals, vecs = sym_eig(Z)
        if float(np.max(np.abs(vals))) > OVERFLOW_ARG:
            raise SpectralOverflowError(
                f"entropy grad_inverse: spectral argument {vals[0]:.3e} beyond exp range"
            )
        lam = np.exp(vals)
        X = (vecs * lam) @ vecs.T
        return (X + X.T) / 2.0, lam

    def __repr__(self) -> str:
        return "EntropyMap()"


class HypentropyMap(MirrorMap):
    """Spectral hypentropy with scale beta, on arbitrary real matrices."""

    kind = "hypentropy"
    domain = "rectangular"

    def __init__(self, beta: float):
        self.beta = _check_beta(beta)

    def value(self, X) -> float:
        return hypentropy_value(X, self.beta)

    def grad(self, X) -> np.ndarray:
        """U diag(arcsinh(sigma_i / beta)) V^T."""
        u, s, v = svd(X)
        return (u * np.arcsinh(s / self.beta)) @ v.T

    def grad_inverse(self, Z) -> np.ndarray:
        """beta * sinh applied to the singular values of Z.

        For symmetric Z this coincides with beta*(e^Z - e^-Z)/2 because sinh
        is odd, so the SVD sign ambiguity cancels.
        """
        return self.inverse_with_spectrum(Z)[0]

    def inverse_with_spectrum(self, Z) -> tuple[np.ndarray, np.ndarray]:
        u, s, v = svd(Z)
        if s.size and float(s[0]) > OVERFLOW_ARG:
            raise SpectralOverflowError(
                f"hypentropy grad_inverse: spectral argument {s[0]:.3e} beyond sinh range"
            )
        w = self.beta * np.sinh(s)
        if not np.all(np.isfinite(w)):
            raise SpectralOverflowError(
                "hypentropy grad_inverse: beta * sinh overflowed"
            )
        return (u * w) @ v.T, w

    def __repr__(self) -> str:
        return f"HypentropyMap(beta={self.beta!r})"


def make_map(kind: str, beta: float | None = None) -> MirrorMap:
    """Construct a mirror map from its config-file spelling."""
    kind = kind.strip().lower()
    if kind == "entropy":
        return EntropyMap()
    if kind == "hypentropy":
        if beta is None:
            raise ParameterOutOfRangeError("hypentropy map requires beta")
        return HypentropyMap(beta)
    raise ParameterOutOfRangeError(f"unknown mirror map kind {kind!r}")
