"""Dense spectral primitives: symmetric eigendecomposition, SVD, spectral lifts.

Conventions used throughout the package:

* matrices are real float64 2-d arrays with finite entries,
* eigenvalues and singular values are returned in descending order,
* thin SVD factors are used everywhere; this is exact for lifted functions
  with f(0) = 0, which is the only kind the package lifts through an SVD,
* symmetric inputs within ``SYM_TOL`` relative asymmetry are silently
  symmetrized as (S + S^T)/2 before factoring; anything worse is an error,
  since floating drift in iterates is expected but genuine asymmetry is a bug.

All functions are pure and thread-safe. Everything is computed by full
factorization (no Pade or scaling-squaring): matrices in scope are at most a
few hundred rows and the spectral form is needed anyway for potentials.
"""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from .errors import (
    AsymmetricInputError,
    DomainError,
    NonSquareError,
    NumericalFailure,
)

# relative asymmetry accepted by symmetric routines
SYM_TOL = 1e-8


class SymEig(NamedTuple):
    """Eigendecomposition of a symmetric matrix, eigenvalues descending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


class Svd(NamedTuple):
    """Thin SVD; ``right`` holds right singular vectors as columns."""

    left: np.ndarray
    singulars: np.ndarray
    right: np.ndarray


def as_matrix(a) -> np.ndarray:
    """Validate and return ``a`` as a finite float64 2-d array."""
    x = np.asarray(a, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {x.shape}")
    if x.shape[0] < 1 or x.shape[1] < 1:
        raise ValueError(f"matrix dimensions must be positive, got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("matrix entries must be finite")
    return x


def symmetrize(S) -> np.ndarray:
    """Return (S + S^T)/2 after checking squareness and asymmetry tolerance."""
    S = as_matrix(S)
    n, m = S.shape
    if n != m:
        raise NonSquareError(f"expected a square matrix, got {n}x{m}")
    asym = np.linalg.norm(S - S.T)
    if asym > SYM_TOL * max(1.0, np.linalg.norm(S)):
        raise AsymmetricInputError(
            f"asymmetry {asym:.3e} exceeds tolerance {SYM_TOL:.0e} relative"
        )
    return (S + S.T) / 2.0


def sym_eig(S) -> SymEig:
    """Eigendecompose a (tolerantly) symmetric matrix.

    Returns eigenvalues in descending order with correspondingly ordered
    orthonormal eigenvector columns.
    """
    H = symmetrize(S)
    try:
        vals, vecs = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigendecomposition failed: {exc}") from exc
    order = slice(None, None, -1)  # eigh is ascending
    return SymEig(vals[order].copy(), vecs[:, order].copy())


def svd(X) -> Svd:
    """Thin SVD with nonincreasing, nonnegative singular values."""
    X = as_matrix(X)
    try:
        u, s, vt = np.linalg.svd(X, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"SVD failed: {exc}") from exc
    return Svd(u, s, vt.T)


def singular_values(X) -> np.ndarray:
    """Singular values only (descending), skipping the vector computation."""
    X = as_matrix(X)
    try:
        return np.linalg.svd(X, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"SVD failed: {exc}") from exc


def sym_eigvals(S) -> np.ndarray:
    """Eigenvalues only of a (tolerantly) symmetric matrix, descending."""
    H = symmetrize(S)
    try:
        vals = np.linalg.eigvalsh(H)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigendecomposition failed: {exc}") from exc
    return vals[::-1].copy()


def _apply_scalar(f: Callable[[np.ndarray], np.ndarray], x: np.ndarray, what: str) -> np.ndarray:
    """Evaluate a scalar function elementwise on a spectrum, checking domain."""
    with np.errstate(all="ignore"):
        try:
            y = np.asarray(f(x), dtype=np.float64)
        except TypeError:
            y = None  # f rejects arrays; evaluate per value below
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"{what}: function undefined on spectrum: {exc}") from exc
    if y is None or y.shape != x.shape:
        with np.errstate(all="ignore"):
            try:
                y = np.array([float(f(v)) for v in x], dtype=np.float64)
            except (ValueError, ZeroDivisionError, TypeError) as exc:
                raise DomainError(
                    f"{what}: function undefined on spectrum: {exc}"
                ) from exc
    bad = ~np.isfinite(y)
    if np.any(bad):
        raise DomainError(
            f"{what}: function undefined at spectral value {x[bad][0]!r}"
        )
    return y


def lift_sym(S, f: Callable) -> np.ndarray:
    """Lift a scalar function through the eigendecomposition: Q diag(f(lambda)) Q^T."""
    vals, vecs = sym_eig(S)
    w = _apply_scalar(f, vals, "lift_sym")
    H = (vecs * w) @ vecs.T
    return (H + H.T) / 2.0


def lift_rect(X, f: Callable) -> np.ndarray:
    """Lift a scalar function with f(0) = 0 through the SVD: U diag(f(sigma)) V^T.

    The f(0) = 0 requirement makes the thin/full SVD distinction immaterial.
    """
    f0 = float(f(0.0))
    if f0 != 0.0:
        raise DomainError(f"lift_rect requires f(0) = 0, got f(0) = {f0!r}")
    u, s, v = svd(X)
    w = _apply_scalar(f, s, "lift_rect")
    return (u * w) @ v.T
