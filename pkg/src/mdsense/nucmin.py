"""Minimum-nuclear-norm interpolation baseline via ADMM.

Solves min ||X||_* s.t. <A_i, X> = y_i (optionally also X psd) by operator
splitting: a singular-value soft-threshold block, an affine-projection block,
and for the psd variant an eigenvalue-clip block in consensus form. The
returned estimate is the affine block, so it satisfies the measurements to
projection accuracy regardless of where the splitting stopped.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import MaxItersExceeded, RankDeficientGramWarning
from .linalg import as_matrix, svd, sym_eig
from .sensing import KIND_COMPLETION, SensingEnsemble, measure


@dataclass
class NucminConfig:
    penalty: float = 1.0
    max_iters: int = 20000
    primal_tol: float = 1e-9
    dual_tol: float = 1e-9
    psd: bool = False


@dataclass
class NucminResult:
    estimate: np.ndarray
    iters_run: int
    primal_residual: float
    dual_residual: float
    converged: bool


def svt_prox(Z, threshold: float) -> np.ndarray:
    """Singular-value soft threshold: shrink each singular value by threshold."""
    Z = as_matrix(Z)
    u, s, v = svd(Z)
    shrunk = np.maximum(s - threshold, 0.0)
    return (u * shrunk) @ v.T


def _psd_clip(Z: np.ndarray) -> np.ndarray:
    vals, vecs = sym_eig((Z + Z.T) / 2.0)
    clipped = np.maximum(vals, 0.0)
    out = (vecs * clipped) @ vecs.T
    return (out + out.T) / 2.0


class AffineProjector:
    """Euclidean projection onto {X : <A_i, X> = y_i}.

    Dense ensembles use the Gram system of the flattened measurements, solved
    through a cached Cholesky factor; a singular Gram matrix falls back to a
    ridge-stabilized factor with a RankDeficientGramWarning. Completion
    ensembles project by overwriting the observed entries (duplicate indices
    must agree, which holds for measurements of any single matrix).
    """

    def __init__(self, ens: SensingEnsemble, y: np.ndarray):
        self.ens = ens
        self.y = np.asarray(y, dtype=np.float64)
        if ens.kind == KIND_COMPLETION:
            self._chol = None
        else:
            flat = ens.flat()
            gram = flat @ flat.T
            try:
                self._chol = np.linalg.cholesky(gram)
            except np.linalg.LinAlgError:
                warnings.warn(
                    "measurement Gram matrix is rank deficient; projecting "
                    "through a ridge-stabilized factor",
                    RankDeficientGramWarning,
                )
                ridge = 1e-10 * max(1.0, float(np.trace(gram)) / gram.shape[0])
                self._chol = np.linalg.cholesky(
                    gram + ridge * np.eye(gram.shape[0])
                )

    def project(self, X) -> np.ndarray:
        X = as_matrix(X)
        if self.ens.kind == KIND_COMPLETION:
            out = X.copy()
            rows = self.ens.indices[:, 0]
            cols = self.ens.indices[:, 1]
            out[rows, cols] = self.y
            return out
        resid = measure(self.ens, X) - self.y
        w = np.linalg.solve(self._chol, resid)
        w = np.linalg.solve(self._chol.T, w)
        correction = (self.ens.flat().T @ w).reshape(X.shape)
        return X - correction


def affine_project(ens: SensingEnsemble, y, X) -> np.ndarray:
    """One-shot projection onto the measurement-consistent affine set."""
    return AffineProjector(ens, y).project(X)


def nucmin(
    ens: SensingEnsemble, y, config: NucminConfig | None = None
) -> NucminResult:
    """Minimum nuclear norm subject to the measurements (psd-constrained
    when config.psd). Raises MaxItersExceeded with the best iterate attached
    if the splitting does not reach its tolerances.
    """
    cfg = config or NucminConfig()
    y = np.asarray(y, dtype=np.float64)
    proj = AffineProjector(ens, y)
    n, nprime = ens.n, ens.nprime
    rho = cfg.penalty
    scale = max(1.0, float(np.linalg.norm(y)))

    if not cfg.psd:
        # two blocks: X = svt(Z - W), Z = proj(X + W)
        Z = proj.project(np.zeros((n, nprime)))
        W = np.zeros((n, nprime))
        for t in range(1, cfg.max_iters + 1):
            X = svt_prox(Z - W, 1.0 / rho)
            Z_old = Z
            Z = proj.project(X + W)
            W = W + X - Z
            primal = float(np.linalg.norm(X - Z))
            dual = rho * float(np.linalg.norm(Z - Z_old))
            if primal <= cfg.primal_tol * scale and dual <= cfg.dual_tol * scale:
                return NucminResult(Z, t, primal, dual, True)
        result = NucminResult(Z, cfg.max_iters, primal, dual, False)
        err = MaxItersExceeded(
            f"nucmin: residuals ({primal:.3e}, {dual:.3e}) above tolerance "
            f"after {cfg.max_iters} iterations"
        )
        err.best = result
        raise err

    # three blocks in consensus form: svt / affine / psd clip
    X1 = np.zeros((n, nprime))
    X2 = proj.project(np.zeros((n, nprime)))
    X3 = _psd_clip(X2)
    W1 = np.zeros((n, nprime))
    W2 = np.zeros((n, nprime))
    W3 = np.zeros((n, nprime))
    Zbar = (X1 + X2 + X3) / 3.0
    for t in range(1, cfg.max_iters + 1):
        X1 = svt_prox(Zbar - W1, 3.0 / rho)
        X2 = proj.project(Zbar - W2)
        X3 = _psd_clip(Zbar - W3)
        Zbar_old = Zbar
        Zbar = (X1 + X2 + X3) / 3.0
        W1 = W1 + X1 - Zbar
        W2 = W2 + X2 - Zbar
        W3 = W3 + X3 - Zbar
        primal = float(
            math.sqrt(
                np.linalg.norm(X1 - Zbar) ** 2
                + np.linalg.norm(X2 - Zbar) ** 2
                + np.linalg.norm(X3 - Zbar) ** 2
            )
        )
        dual = rho * float(np.linalg.norm(Zbar - Zbar_old)) * math.sqrt(3.0)
        if primal <= cfg.primal_tol * scale and dual <= cfg.dual_tol * scale:
            return NucminResult(X2, t, primal, dual, True)
    result = NucminResult(X2, cfg.max_iters, primal, dual, False)
    err = MaxItersExceeded(
        f"nucmin: residuals ({primal:.3e}, {dual:.3e}) above tolerance "
        f"after {cfg.max_iters} iterations"
    )
    err.best = result
    raise err
