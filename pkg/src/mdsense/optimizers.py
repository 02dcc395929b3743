"""The four iterative algorithms plus the safe step-size bound.

* mirror_descent: grad(X_{t+1}) = grad(X_t) - eta * risk_grad(X_t), run in
  mirror coordinates (the dual iterate Z_t is maintained and X_t recovered
  through grad_inverse), which is the same recursion with one factorization
  per step instead of two.
* exp_gradient: the symmetrized multiplicative update on a factor pair
  U_t - V_t, with matrix exponentials of the (symmetrized) risk gradient.
* gd_factored_psd / gd_factored_sym: plain gradient descent on the factor
  parametrizations X = U U^T and X = U U^T - V V^T via the chain rule,
  U_{t+1} = U_t - eta * (G + G^T) U_t (= U_t - 2 eta G U_t for symmetric G).

Symmetric problems keep symmetric iterates: the gradient is replaced by its
symmetric part (equivalent, since <A, X> = <sym(A), X> for symmetric X) and
iterates are re-symmetrized every step to stop floating drift.

Every run produces a Trajectory with per-iteration scalar diagnostics and
optional dense snapshots. Convergence is declared at risk <= risk_tol; risk
exceeding 1e6 times its initial value raises DivergenceError.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AsymmetricInputError,
    DivergenceError,
    NonSquareError,
    ParameterOutOfRangeError,
)
from .linalg import as_matrix, symmetrize
from .metrics import nuclear_norm
from .mirror_maps import MirrorMap
from .sensing import SensingEnsemble, risk, risk_grad

ALG_MIRROR_DESCENT = "mirror_descent"
ALG_EXP_GRADIENT = "exp_gradient"
ALG_GD_FACTORED_PSD = "gd_factored_psd"
ALG_GD_FACTORED_SYM = "gd_factored_sym"

ALGORITHMS = (
    ALG_MIRROR_DESCENT,
    ALG_EXP_GRADIENT,
    ALG_GD_FACTORED_PSD,
    ALG_GD_FACTORED_SYM,
)

DIVERGENCE_FACTOR = 1e6


@dataclass
class RunConfig:
    """Settings for a single optimizer run."""

    algorithm: str
    step: float
    max_iters: int
    map: MirrorMap | None = None
    risk_tol: float = 1e-12
    init_alpha: float = 0.0
    snapshot_every: int = 0

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ParameterOutOfRangeError(f"unknown algorithm {self.algorithm!r}")
        if not (self.step > 0.0 and math.isfinite(self.step)):
            raise ParameterOutOfRangeError(f"step must be positive, got {self.step}")
        if self.max_iters < 1:
            raise ParameterOutOfRangeError("max_iters must be >= 1")
        if self.risk_tol < 0.0:
            raise ParameterOutOfRangeError("risk_tol must be nonnegative")
        if self.snapshot_every < 0:
            raise ParameterOutOfRangeError("snapshot_every must be nonnegative")


@dataclass
class Trajectory:
    """Per-iteration diagnostics of one run; row t describes iterate X_t.

    All columns have length iters_run + 1 (the t = 0 row included). The
    effective-rank column is nan at a zero iterate, and recon_errors is nan
    throughout when no ground truth was supplied. bregman_to_final holds
    D(X_final, X_t) at t = 0, at the final row, and at snapshot rows (nan
    elsewhere, and for map-free algorithms); it is filled after the run.
    """

    iters: np.ndarray
    risks: np.ndarray
    nuclear_norms: np.ndarray
    effective_ranks: np.ndarray
    recon_errors: np.ndarray
    bregman_to_final: np.ndarray
    final_iterate: np.ndarray
    converged: bool
    iters_run: int
    snapshots: dict[int, np.ndarray] = field(default_factory=dict)
    factor_snapshots: dict[int, tuple[np.ndarray, ...]] = field(default_factory=dict)


def _effrank_from_singulars(s: np.ndarray) -> float:
    total = float(np.sum(s))
    if total <= 0.0:
        return math.nan
    p = s[s > 0.0] / total
    return float(np.exp(-np.sum(p * np.log(p))))


class _Recorder:
    """Accumulates per-iteration rows and assembles the Trajectory."""

    def __init__(self, cfg: RunConfig, ground_truth: np.ndarray | None):
        self.cfg = cfg
        self.truth = None if ground_truth is None else as_matrix(ground_truth)
        self.rows: list[tuple[int, float, float, float, float]] = []
        self.snapshots: dict[int, np.ndarray] = {}
        self.factor_snapshots: dict[int, tuple[np.ndarray, ...]] = {}
        self.x0: np.ndarray | None = None

    def log(self, t: int, X: np.ndarray, risk_value: float,
            singulars: np.ndarray | None = None,
            factors: tuple[np.ndarray, ...] | None = None) -> None:
        if singulars is None:
            singulars = np.linalg.svd(X, compute_uv=False)
        nuc = float(np.sum(singulars))
        eff = _effrank_from_singulars(singulars)
        rec = math.nan if self.truth is None else float(np.linalg.norm(X - self.truth))
        self.rows.append((t, risk_value, nuc, eff, rec))
        if t == 0:
            self.x0 = X.copy()
        every = self.cfg.snapshot_every
        if every > 0 and t % every == 0:
            self.snapshots[t] = X.copy()
            if factors is not None:
                self.factor_snapshots[t] = tuple(f.copy() for f in factors)

    def finish(self, X: np.ndarray, converged: bool, iters_run: int) -> Trajectory:
        cols = np.array(self.rows, dtype=np.float64)
        bref = np.full(len(self.rows), math.nan)
        mirror = self.cfg.map
        if mirror is not None:
            # best effort: snapshot rows whose divergence to the final iterate
            # is representable; degenerate rows keep nan
            targets = dict(self.snapshots)
            targets[0] = self.x0
            targets[iters_run] = X
            for t, Xt in targets.items():
                try:
                    bref[t] = mirror.bregman(X, Xt)
                except Exception:
                    pass
        if self.cfg.snapshot_every > 0:
            self.snapshots[iters_run] = X.copy()
        return Trajectory(
            iters=cols[:, 0].astype(np.int64),
            risks=cols[:, 1],
            nuclear_norms=cols[:, 2],
            effective_ranks=cols[:, 3],
            recon_errors=cols[:, 4],
            bregman_to_final=bref,
            final_iterate=X,
            converged=converged,
            iters_run=iters_run,
            snapshots=self.snapshots,
            factor_snapshots=self.factor_snapshots,
        )


def _guard(risk_value: float, risk0: float, t: int) -> None:
    if not math.isfinite(risk_value) or (
        risk0 > 0.0 and risk_value > DIVERGENCE_FACTOR * risk0
    ):
        raise DivergenceError(
            f"risk {risk_value:.6e} at iteration {t} exceeds {DIVERGENCE_FACTOR:.0e} "
            f"times the initial risk {risk0:.6e}"
        )


def mirror_descent(
    map_: MirrorMap,
    ens: SensingEnsemble,
    y: np.ndarray,
    X0,
    cfg: RunConfig,
    ground_truth: np.ndarray | None = None,
) -> Trajectory:
    """Mirror descent under the given map: dual update Z -= eta * grad f.

    Entropy runs treat measurements through their symmetric part (equivalent
    on the symmetric domain); square-symmetric hypentropy problems keep their
    iterates symmetric the same way.
    """
    X = as_matrix(X0).copy()
    y = np.asarray(y, dtype=np.float64)
    sym_mode = map_.kind == "entropy" or (
        ens.n == ens.nprime
        and ens.is_symmetric()
        and np.array_equal(X, X.T)
    )
    rec = _Recorder(cfg, ground_truth)
    risk0 = risk(ens, y, X)
    rec.log(0, X, risk0)
    converged = risk0 <= cfg.risk_tol
    iters_run = 0
    if not converged:
        Z = None
        for t in range(1, cfg.max_iters + 1):
            G = risk_grad(ens, y, X)
            if sym_mode:
                G = (G + G.T) / 2.0
            if Z is None:
                Z = map_.grad(X)
            Z -= cfg.step * G
            if sym_mode:
                Z = (Z + Z.T) / 2.0
            X, spectrum = map_.inverse_with_spectrum(Z)
            if sym_mode:
                X = (X + X.T) / 2.0
            r = risk(ens, y, X)
            _guard(r, risk0, t)
            rec.log(t, X, r, singulars=spectrum)
            iters_run = t
            if r <= cfg.risk_tol:
                converged = True
                break
    return rec.finish(X, converged, iters_run)


def exp_gradient(
    ens: SensingEnsemble,
    y: np.ndarray,
    U0,
    V0,
    cfg: RunConfig,
    ground_truth: np.ndarray | None = None,
) -> Trajectory:
    """Symmetrized multiplicative update on X_t = U_t - V_t.

    U_{t+1} = (U e^{-eta G} + e^{-eta G} U)/2 and V_{t+1} the same with +eta,
    where G is the risk gradient at X_t. Requires a square symmetric ensemble.
    """
    from .linalg import sym_eig
    from .mirror_maps import OVERFLOW_ARG
    from .errors import SpectralOverflowError

    U = symmetrize(U0)
    V = symmetrize(V0)
    if not ens.is_symmetric():
        raise AsymmetricInputError("exp_gradient requires a symmetric dense ensemble")
    y = np.asarray(y, dtype=np.float64)
    rec = _Recorder(cfg, ground_truth)
    X = U - V
    risk0 = risk(ens, y, X)
    rec.log(0, X, risk0, factors=(U, V))
    converged = risk0 <= cfg.risk_tol
    iters_run = 0
    if not converged:
        for t in range(1, cfg.max_iters + 1):
            G = risk_grad(ens, y, X)
            G = (G + G.T) / 2.0
            vals, vecs = sym_eig(G)
            if cfg.step * float(np.max(np.abs(vals))) > OVERFLOW_ARG:
                raise SpectralOverflowError(
                    f"exp_gradient: step * gradient spectrum exceeds {OVERFLOW_ARG}"
                )
            eminus = (vecs * np.exp(-cfg.step * vals)) @ vecs.T
            eplus = (vecs * np.exp(cfg.step * vals)) @ vecs.T
            U = (U @ eminus + eminus @ U) / 2.0
            U = (U + U.T) / 2.0
            V = (V @ eplus + eplus @ V) / 2.0
            V = (V + V.T) / 2.0
            X = U - V
            r = risk(ens, y, X)
            _guard(r, risk0, t)
            rec.log(t, X, r, factors=(U, V))
            iters_run = t
            if r <= cfg.risk_tol:
                converged = True
                break
    return rec.finish(X, converged, iters_run)


def gd_factored_psd(
    ens: SensingEnsemble,
    y: np.ndarray,
    U0,
    cfg: RunConfig,
    ground_truth: np.ndarray | None = None,
) -> Trajectory:
    """Gradient descent on X = U U^T: U_{t+1} = U_t - eta (G + G^T) U_t."""
    U = as_matrix(U0).copy()
    if ens.n != ens.nprime:
        raise NonSquareError("gd_factored_psd requires a square problem")
    y = np.asarray(y, dtype=np.float64)
    rec = _Recorder(cfg, ground_truth)
    X = U @ U.T
    X = (X + X.T) / 2.0
    risk0 = risk(ens, y, X)
    rec.log(0, X, risk0, factors=(U,))
    converged = risk0 <= cfg.risk_tol
    iters_run = 0
    if not converged:
        for t in range(1, cfg.max_iters + 1):
            G = risk_grad(ens, y, X)
            U = U - cfg.step * ((G + G.T) @ U)
            X = U @ U.T
            X = (X + X.T) / 2.0
            r = risk(ens, y, X)
            _guard(r, risk0, t)
            rec.log(t, X, r, factors=(U,))
            iters_run = t
            if r <= cfg.risk_tol:
                converged = True
                break
    return rec.finish(X, converged, iters_run)


def gd_factored_sym(
    ens: SensingEnsemble,
    y: np.ndarray,
    U0,
    V0,
    cfg: RunConfig,
    ground_truth: np.ndarray | None = None,
) -> Trajectory:
    """Gradient descent on X = U U^T - V V^T (chain-rule updates).

    U_{t+1} = U_t - eta (G + G^T) U_t and V_{t+1} = V_t + eta (G + G^T) V_t,
    which is U_{t+1} = U_t - 2 eta G U_t for a symmetric gradient.
    """
    U = as_matrix(U0).copy()
    V = as_matrix(V0).copy()
    if ens.n != ens.nprime:
        raise NonSquareError("gd_factored_sym requires a square problem")
    y = np.asarray(y, dtype=np.float64)
    rec = _Recorder(cfg, ground_truth)
    X = U @ U.T - V @ V.T
    X = (X + X.T) / 2.0
    risk0 = risk(ens, y, X)
    rec.log(0, X, risk0, factors=(U, V))
    converged = risk0 <= cfg.risk_tol
    iters_run = 0
    if not converged:
        for t in range(1, cfg.max_iters + 1):
            G = risk_grad(ens, y, X)
            S = G + G.T
            U = U - cfg.step * (S @ U)
            V = V + cfg.step * (S @ V)
            X = U @ U.T - V @ V.T
            X = (X + X.T) / 2.0
            r = risk(ens, y, X)
            _guard(r, risk0, t)
            rec.log(t, X, r, factors=(U, V))
            iters_run = t
            if r <= cfg.risk_tol:
                converged = True
                break
    return rec.finish(X, converged, iters_run)


def safe_step_bound(
    ens: SensingEnsemble, y: np.ndarray, X, map_: MirrorMap
) -> float:
    """Largest step size the descent analysis certifies at the iterate X.

    min of the two conditions: (1/(8 sqrt 2)) * (S * f(X))^(-1/2) and
    (1/4) * (S * (||X||_* + beta*n))^(-1), where S = (1/m) sum ||A_i||_2^2;
    the entropy map drops the beta*n term. Vacuous conditions (zero risk,
    zero norm) contribute +inf, so the result can be the +inf sentinel.
    """
    X = as_matrix(X)
    sbar = ens.spectral_sq_mean()
    f = risk(ens, y, X)
    eq15 = math.inf
    if f > 0.0 and sbar > 0.0:
        eq15 = (1.0 / (8.0 * math.sqrt(2.0))) / math.sqrt(sbar * f)
    tau = nuclear_norm(X)
    if map_.kind == "hypentropy":
        tau += map_.beta * min(ens.n, ens.nprime)
    eq16 = math.inf
    if tau > 0.0 and sbar > 0.0:
        eq16 = 0.25 / (sbar * tau)
    return min(eq15, eq16)
