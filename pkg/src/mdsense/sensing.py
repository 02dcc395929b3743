"""Ground-truth generation, measurement ensembles, risk, and RIP/coherence.

Measurements are y_i = <A_i, X>, and the empirical risk is

    f(X) = (1/2m) * sum_i (<A_i, X> - y_i)^2,
    grad f(X) = (1/m) * sum_i (<A_i, X> - y_i) A_i.

Two ensemble kinds exist: dense sensing matrices stored as an (m, n, n')
stack, and completion masks that store only the m observed (row, col) index
pairs. Completion masks never materialize dense A_i; measure and risk_grad
take specialized O(m) paths (each <A_i, X> is a single entry lookup), and
``fast_path_calls`` counts how often those paths ran, as a diagnostic.

All generators draw from named counter-based streams (see rng.stream), so
every artifact is a pure function of (seed, parameters). Symmetric ensembles
use A_i = (B_i + B_i^T)/2 with standard normal B_i and no 1/sqrt(m) scaling;
the 1/m inside the risk handles averaging.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InvalidRankError,
    NotOrthonormalError,
    ShapeMismatchError,
    TooManySamplesError,
)
from .linalg import as_matrix, singular_values
from .rng import stream

KIND_DENSE = "dense"
KIND_COMPLETION = "completion"


@dataclass
class SensingEnsemble:
    """A measurement operator: dense matrix stack or completion index mask.

    Data fields are immutable after construction; ``fast_path_calls`` is a
    mutable diagnostic counter and takes no part in equality or hashing.
    """

    kind: str
    n: int
    nprime: int
    seed: int = 0
    matrices: np.ndarray | None = None  # (m, n, nprime), dense kind
    indices: np.ndarray | None = None  # (m, 2) int64, completion kind
    fast_path_calls: int = field(default=0, compare=False, repr=False)
    _flat: np.ndarray | None = field(default=None, init=False, repr=False, compare=False)
    _spec_sq_mean: float | None = field(default=None, init=False, repr=False, compare=False)
    _symmetric: bool | None = field(default=None, init=False, repr=False, compare=False)

    @property
    def m(self) -> int:
        if self.kind == KIND_DENSE:
            return int(self.matrices.shape[0])
        return int(self.indices.shape[0])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n, self.nprime)

    def flat(self) -> np.ndarray:
        """Dense matrices reshaped to (m, n*nprime), cached."""
        if self._flat is None:
            self._flat = np.ascontiguousarray(self.matrices).reshape(self.m, -1)
        return self._flat

    def spectral_sq_mean(self) -> float:
        """(1/m) * sum_i ||A_i||_2^2, cached; exactly 1 for completion masks."""
        if self._spec_sq_mean is None:
            if self.kind == KIND_COMPLETION:
                self._spec_sq_mean = 1.0
            else:
                tops = np.array(
                    [np.linalg.svd(A, compute_uv=False)[0] for A in self.matrices]
                )
                self._spec_sq_mean = float(np.mean(tops**2))
        return self._spec_sq_mean

    def is_symmetric(self) -> bool:
        """True when every sensing matrix is symmetric (dense square kind only)."""
        if self._symmetric is None:
            if self.kind != KIND_DENSE or self.n != self.nprime:
                self._symmetric = False
            else:
                swapped = self.matrices.transpose(0, 2, 1)
                self._symmetric = bool(
                    np.max(np.abs(self.matrices - swapped)) <= 1e-12
                )
        return self._symmetric


@dataclass
class GroundTruth:
    """A planted low-rank matrix with its rank and PSD flag."""

    matrix: np.ndarray
    rank: int
    psd: bool
    seed: int = 0


def _check_rank(r: int, n: int, nprime: int) -> None:
    if not 1 <= r <= min(n, nprime):
        raise InvalidRankError(f"rank {r} outside [1, {min(n, nprime)}]")


def gen_lowrank_psd(n: int, r: int, seed: int) -> GroundTruth:
    """X* = U U^T with iid N(0,1) factor, normalized to nuclear norm 1."""
    _check_rank(r, n, n)
    U = stream(seed, "ground-truth-psd").standard_normal((n, r))
    X = U @ U.T
    X /= np.trace(X)  # nuclear norm of a PSD matrix is its trace
    X = (X + X.T) / 2.0
    return GroundTruth(matrix=X, rank=r, psd=True, seed=seed)


def gen_lowrank_rect(n: int, nprime: int, r: int, seed: int) -> GroundTruth:
    """X* = U V^T with iid N(0,1) factors, normalized to nuclear norm 1."""
    _check_rank(r, n, nprime)
    g = stream(seed, "ground-truth-rect")
    U = g.standard_normal((n, r))
    V = g.standard_normal((nprime, r))
    X = U @ V.T
    X /= np.sum(singular_values(X))
    return GroundTruth(matrix=X, rank=r, psd=False, seed=seed)


def gen_gaussian_sym(n: int, m: int, seed: int) -> SensingEnsemble:
    """m symmetric sensing matrices A_i = (B_i + B_i^T)/2, B_i iid N(0,1)."""
    B = stream(seed, "ensemble-gaussian-sym").standard_normal((m, n, n))
    A = (B + B.transpose(0, 2, 1)) / 2.0
    return SensingEnsemble(kind=KIND_DENSE, n=n, nprime=n, seed=seed, matrices=A)


def gen_gaussian_rect(n: int, nprime: int, m: int, seed: int) -> SensingEnsemble:
    """m unsymmetrized iid N(0,1) sensing matrices of shape (n, nprime)."""
    A = stream(seed, "ensemble-gaussian-rect").standard_normal((m, n, nprime))
    return SensingEnsemble(kind=KIND_DENSE, n=n, nprime=nprime, seed=seed, matrices=A)


def gen_completion(
    n: int, nprime: int, m: int, seed: int, replacement: bool = False
) -> SensingEnsemble:
    """m observed-entry locations, uniform; default is without replacement."""
    total = n * nprime
    g = stream(seed, "ensemble-completion")
    if replacement:
        raw = g.integers(0, total, size=m)
    else:
        if m > total:
            raise TooManySamplesError(
                f"cannot draw {m} distinct entries from a {n}x{nprime} matrix"
            )
        raw = g.choice(total, size=m, replace=False)
    rows, cols = np.unravel_index(raw, (n, nprime))
    idx = np.column_stack([rows, cols]).astype(np.int64)
    return SensingEnsemble(kind=KIND_COMPLETION, n=n, nprime=nprime, seed=seed, indices=idx)


def _check_shape(ens: SensingEnsemble, X: np.ndarray) -> None:
    if X.shape != ens.shape:
        raise ShapeMismatchError(f"matrix shape {X.shape} != ensemble shape {ens.shape}")


def measure(ens: SensingEnsemble, X) -> np.ndarray:
    """y_i = <A_i, X>; O(1) per entry for completion masks."""
    X = as_matrix(X)
    _check_shape(ens, X)
    if ens.kind == KIND_COMPLETION:
        ens.fast_path_calls += 1
        return X[ens.indices[:, 0], ens.indices[:, 1]].copy()
    return ens.flat() @ X.ravel()


def risk(ens: SensingEnsemble, y: np.ndarray, X) -> float:
    """f(X) = (1/2m) * sum_i (<A_i, X> - y_i)^2."""
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (ens.m,):
        raise ShapeMismatchError(f"observations length {y.shape} != m = {ens.m}")
    resid = measure(ens, X) - y
    return float(0.5 * np.mean(resid**2))


def risk_grad(ens: SensingEnsemble, y: np.ndarray, X) -> np.ndarray:
    """grad f(X) = (1/m) * sum_i (<A_i, X> - y_i) A_i."""
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (ens.m,):
        raise ShapeMismatchError(f"observations length {y.shape} != m = {ens.m}")
    resid = measure(ens, X) - y
    if ens.kind == KIND_COMPLETION:
        ens.fast_path_calls += 1
        G = np.zeros(ens.shape)
        # duplicates (with-replacement masks) accumulate, matching the sum
        np.add.at(G, (ens.indices[:, 0], ens.indices[:, 1]), resid)
        return G / ens.m
    return (ens.flat().T @ resid).reshape(ens.shape) / ens.m


def rip_estimate(ens: SensingEnsemble, r: int, trials: int, seed: int) -> float:
    """Monte Carlo lower bound on the RIP constant of the ensemble.

    Maximizes |sqrt((1/m) sum <A_i, X>^2) - 1| over random rank-<=r probes
    X = G H^T / ||G H^T||_F. A lower bound only: the true constant maximizes
    over all rank-<=r matrices. Trials draw sequentially from one stream, so
    a longer run's probe set contains a shorter run's (estimates are monotone
    in trials for fixed seed).
    """
    _check_rank(r, ens.n, ens.nprime)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    g = stream(seed, "rip-probe")
    worst = 0.0
    for _ in range(trials):
        G = g.standard_normal((ens.n, r))
        H = g.standard_normal((ens.nprime, r))
        X = G @ H.T
        X /= np.linalg.norm(X)
        s = float(np.sqrt(np.mean(measure(ens, X) ** 2)))
        worst = max(worst, abs(s - 1.0))
    return worst


def coherence(basis) -> float:
    """(n/r) * max_i ||P_U e_i||^2 for a basis with orthonormal columns."""
    B = as_matrix(basis)
    n, r = B.shape
    gram_err = np.linalg.norm(B.T @ B - np.eye(r))
    if gram_err > 1e-8:
        raise NotOrthonormalError(
            f"columns not orthonormal: ||B^T B - I||_F = {gram_err:.3e}"
        )
    # ||P_U e_i||^2 = ||B^T e_i||^2 = squared norm of row i of B
    return float(n / r * np.max(np.sum(B**2, axis=1)))


# ---------------------------------------------------------------------------
# text serialization
#
# One header line "<kind> <n> <nprime> <m> <seed>", then rows of numbers:
#   dense       m blocks of n lines, nprime values each (matrix rows)
#   completion  m lines "row col"
#   truth-psd / truth-rect
#               header's m slot holds the rank; n lines of nprime values
# Floats are written with %.17g, which round-trips float64 exactly.
# ---------------------------------------------------------------------------


def _fmt_row(row: np.ndarray) -> str:
    return " ".join(f"{v:.17g}" for v in row)


def save_ensemble(ens: SensingEnsemble, path) -> None:
    lines = [f"{ens.kind} {ens.n} {ens.nprime} {ens.m} {ens.seed}"]
    if ens.kind == KIND_COMPLETION:
        lines.extend(f"{a} {b}" for a, b in ens.indices)
    else:
        for A in ens.matrices:
            lines.extend(_fmt_row(row) for row in A)
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def load_ensemble(path) -> SensingEnsemble:
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln for ln in (raw.strip() for raw in fh) if ln]
    kind, n, nprime, m, seed = lines[0].split()
    n, nprime, m, seed = int(n), int(nprime), int(m), int(seed)
    body = lines[1:]
    if kind == KIND_COMPLETION:
        if len(body) != m:
            raise ValueError(f"expected {m} index lines, got {len(body)}")
        idx = np.array([[int(t) for t in ln.split()] for ln in body], dtype=np.int64)
        return SensingEnsemble(kind=kind, n=n, nprime=nprime, seed=seed, indices=idx)
    if kind == KIND_DENSE:
        if len(body) != m * n:
            raise ValueError(f"expected {m * n} matrix rows, got {len(body)}")
        flat = np.array([[float(t) for t in ln.split()] for ln in body])
        return SensingEnsemble(
            kind=kind, n=n, nprime=nprime, seed=seed,
            matrices=flat.reshape(m, n, nprime),
        )
    raise ValueError(f"unknown ensemble kind {kind!r}")


def save_ground_truth(gt: GroundTruth, path) -> None:
    kind = "truth-psd" if gt.psd else "truth-rect"
    n, nprime = gt.matrix.shape
    lines = [f"{kind} {n} {nprime} {gt.rank} {gt.seed}"]
    lines.extend(_fmt_row(row) for row in gt.matrix)
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def load_ground_truth(path) -> GroundTruth:
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln for ln in (raw.strip() for raw in fh) if ln]
    kind, n, nprime, rank, seed = lines[0].split()
    n, nprime, rank, seed = int(n), int(nprime), int(rank), int(seed)
    if kind not in ("truth-psd", "truth-rect"):
        raise ValueError(f"unknown ground-truth kind {kind!r}")
    body = lines[1:]
    if len(body) != n:
        raise ValueError(f"expected {n} matrix rows, got {len(body)}")
    X = np.array([[float(t) for t in ln.split()] for ln in body])
    if X.shape != (n, nprime):
        raise ValueError(f"matrix shape {X.shape} does not match header")
    return GroundTruth(matrix=X, rank=rank, psd=(kind == "truth-psd"), seed=seed)
