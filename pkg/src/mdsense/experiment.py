"""Declarative experiment runner: alpha sweeps, single runs, invariant suite.

A flat key = value config file describes one experiment. The sweep runs every
(alpha, algorithm) cell against one shared ensemble and planted matrix, adds
two reference rows (ground truth and the nuclear-norm baseline), and writes
results.csv plus optional SVG charts. Cell failures (divergence, domain
errors) become rows of nan metrics; the sweep itself never aborts.

All randomness is drawn from purpose-keyed streams of the config seed, so a
config determines results.csv byte for byte (wall_ms excepted).
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, MaxItersExceeded, MdsenseError
from .metrics import effective_rank, nuclear_norm, recon_error
from .mirror_maps import make_map
from .nucmin import NucminConfig, nucmin
from .optimizers import (
    ALG_EXP_GRADIENT,
    ALG_GD_FACTORED_PSD,
    ALG_GD_FACTORED_SYM,
    ALG_MIRROR_DESCENT,
    RunConfig,
    exp_gradient,
    gd_factored_psd,
    gd_factored_sym,
    mirror_descent,
)
from .sensing import (
    SensingEnsemble,
    gen_completion,
    gen_gaussian_rect,
    gen_gaussian_sym,
    gen_lowrank_psd,
    gen_lowrank_rect,
    measure,
    risk,
)

EXPERIMENTS = ("AlphaSweep", "SingleRun", "InvariantSuite")
ENSEMBLES = ("GaussianSym", "GaussianRect", "Completion")

CSV_HEADER = (
    "alpha,algorithm,final_risk,nuclear_norm,effective_rank,"
    "recon_error,iters_run,wall_ms"
)

ROW_GROUND_TRUTH = "ground_truth"
ROW_NUCMIN = "nucmin"


@dataclass
class AlgorithmSpec:
    """One algorithm template of a sweep; alpha is bound per cell."""

    name: str
    step: float
    max_iters: int
    map_kind: str | None = None
    beta: float | None = None
    risk_tol: float = 1e-12


@dataclass
class ExperimentConfig:
    experiment: str
    n: int
    nprime: int
    r: int
    m: int
    ensemble: str
    algorithms: list[AlgorithmSpec]
    alpha_grid: list[float]
    seed: int = 0
    output_dir: str = "."
    emit_svg: bool = True


@dataclass
class ResultRow:
    alpha: float
    algorithm: str
    final_risk: float
    nuclear_norm: float
    effective_rank: float
    recon_error: float
    iters_run: int
    wall_ms: float


_BOOLS = {
    "true": True, "false": False, "1": True, "0": False,
    "yes": True, "no": False,
}


def _parse_algorithm_token(token: str) -> AlgorithmSpec:
    parts = [p.strip() for p in token.split(":")]
    name = parts[0]
    known = (
        ALG_MIRROR_DESCENT, ALG_EXP_GRADIENT,
        ALG_GD_FACTORED_PSD, ALG_GD_FACTORED_SYM,
    )
    if name not in known:
        raise ConfigError(f"unknown algorithm {name!r}")
    fields: dict[str, str] = {}
    for part in parts[1:]:
        if not part:
            continue
        if "=" not in part:
            raise ConfigError(f"algorithm option {part!r} is not key=value")
        k, v = part.split("=", 1)
        fields[k.strip()] = v.strip()
    try:
        step = float(fields.pop("step"))
        max_iters = int(fields.pop("max_iters"))
    except KeyError as exc:
        raise ConfigError(f"algorithm {name!r} needs step and max_iters") from exc
    except ValueError as exc:
        raise ConfigError(f"algorithm {name!r}: bad numeric option") from exc
    map_kind = fields.pop("map", None)
    beta = fields.pop("beta", None)
    risk_tol = fields.pop("risk_tol", None)
    if fields:
        raise ConfigError(
            f"algorithm {name!r}: unknown options {sorted(fields)}"
        )
    if name == ALG_MIRROR_DESCENT and map_kind is None:
        raise ConfigError("mirror_descent needs map=entropy or map=hypentropy")
    if map_kind is not None and map_kind not in ("entropy", "hypentropy"):
        raise ConfigError(f"unknown map {map_kind!r}")
    try:
        return AlgorithmSpec(
            name=name,
            step=step,
            max_iters=max_iters,
            map_kind=map_kind,
            beta=None if beta is None else float(beta),
            risk_tol=1e-12 if risk_tol is None else float(risk_tol),
        )
    except ValueError as exc:
        raise ConfigError(f"algorithm {name!r}: bad numeric option") from exc


def parse_config_text(text: str) -> ExperimentConfig:
    """Parse the flat key = value format (# comments, comma lists)."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = body.split("=", 1)
        key = key.strip()
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value.strip()

    def take(key: str, default: str | None = None) -> str:
        if key in raw:
            return raw.pop(key)
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default

    def to_int(key: str, value: str) -> int:
        try:
            return int(value)
        except ValueError as exc:
            raise ConfigError(f"key {key!r}: {value!r} is not an integer") from exc

    experiment = take("experiment")
    if experiment not in EXPERIMENTS:
        raise ConfigError(
            f"experiment must be one of {EXPERIMENTS}, got {experiment!r}"
        )
    n = to_int("n", take("n"))
    nprime = to_int("nprime", take("nprime", str(n)))
    r = to_int("r", take("r"))
    m = to_int("m", take("m"))
    ensemble = take("ensemble")
    if ensemble not in ENSEMBLES:
        raise ConfigError(f"ensemble must be one of {ENSEMBLES}, got {ensemble!r}")
    alg_text = take("algorithms")
    algorithms = [
        _parse_algorithm_token(tok)
        for tok in alg_text.split(",")
        if tok.strip()
    ]
    if not algorithms:
        raise ConfigError("algorithms list is empty")
    names = [a.name for a in algorithms]
    if len(set(names)) != len(names):
        raise ConfigError("duplicate algorithm names (one row per algorithm)")
    grid_text = take("alpha_grid", "")
    alpha_grid = []
    for tok in grid_text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        try:
            alpha = float(tok)
        except ValueError as exc:
            raise ConfigError(f"alpha_grid entry {tok!r} is not a number") from exc
        if not alpha > 0.0:
            raise ConfigError("alpha_grid entries must be positive")
        alpha_grid.append(alpha)
    seed = to_int("seed", take("seed", "0"))
    output_dir = take("output_dir", ".")
    emit_raw = take("emit_svg", "true").lower()
    if emit_raw not in _BOOLS:
        raise ConfigError(f"emit_svg: {emit_raw!r} is not a boolean")
    emit_svg = _BOOLS[emit_raw]
    if raw:
        raise ConfigError(f"unknown keys {sorted(raw)}")

    if experiment == "AlphaSweep" and not alpha_grid:
        raise ConfigError("AlphaSweep needs a nonempty alpha_grid")
    if ensemble == "GaussianSym" and n != nprime:
        raise ConfigError("GaussianSym requires n == nprime")
    if min(n, nprime, r, m) < 1:
        raise ConfigError("n, nprime, r, m must all be positive")
    if r > min(n, nprime):
        raise ConfigError("r cannot exceed min(n, nprime)")
    return ExperimentConfig(
        experiment=experiment, n=n, nprime=nprime, r=r, m=m,
        ensemble=ensemble, algorithms=algorithms, alpha_grid=alpha_grid,
        seed=seed, output_dir=output_dir, emit_svg=emit_svg,
    )


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text)


def build_problem(cfg: ExperimentConfig):
    """Planted matrix, ensemble, and measurements for the config seed."""
    if cfg.ensemble == "GaussianRect":
        truth = gen_lowrank_rect(cfg.n, cfg.nprime, cfg.r, seed=cfg.seed)
    else:
        truth = gen_lowrank_psd(cfg.n, cfg.r, seed=cfg.seed)
    if cfg.ensemble == "GaussianSym":
        ens = gen_gaussian_sym(cfg.n, cfg.m, seed=cfg.seed)
    elif cfg.ensemble == "GaussianRect":
        ens = gen_gaussian_rect(cfg.n, cfg.nprime, cfg.m, seed=cfg.seed)
    else:
        ens = gen_completion(cfg.n, cfg.nprime, cfg.m, seed=cfg.seed)
    y = measure(ens, truth.matrix)
    return truth, ens, y


def _run_cell(
    spec: AlgorithmSpec,
    alpha: float,
    ens: SensingEnsemble,
    y: np.ndarray,
    xstar: np.ndarray,
) -> ResultRow:
    n, nprime = ens.n, ens.nprime
    cfg = RunConfig(
        algorithm=spec.name,
        step=spec.step,
        max_iters=spec.max_iters,
        risk_tol=spec.risk_tol,
        init_alpha=alpha,
    )
    start = time.perf_counter()
    try:
        if spec.name == ALG_MIRROR_DESCENT:
            if spec.map_kind == "hypentropy" and spec.beta is None:
                # alpha plays the role of the map scale: start at zero and
                # let beta set the initialization size
                mirror = make_map("hypentropy", beta=alpha)
                x0 = np.zeros((n, nprime))
            else:
                beta = spec.beta if spec.beta is not None else 0.0
                mirror = (
                    make_map("hypentropy", beta=beta)
                    if spec.map_kind == "hypentropy"
                    else make_map("entropy")
                )
                x0 = alpha * np.eye(n, nprime)
            cfg.map = mirror
            traj = mirror_descent(mirror, ens, y, x0, cfg)
        elif spec.name == ALG_GD_FACTORED_PSD:
            u0 = math.sqrt(alpha) * np.eye(n)
            traj = gd_factored_psd(ens, y, u0, cfg)
        elif spec.name == ALG_GD_FACTORED_SYM:
            u0 = math.sqrt(alpha / 2.0) * np.eye(n)
            traj = gd_factored_sym(ens, y, u0, u0.copy(), cfg)
        else:
            u0 = (alpha / 2.0) * np.eye(n)
            traj = exp_gradient(ens, y, u0, np.zeros((n, n)), cfg)
    except (MdsenseError, np.linalg.LinAlgError):
        wall = (time.perf_counter() - start) * 1e3
        return ResultRow(
            alpha, spec.name, math.nan, math.nan, math.nan, math.nan, 0, wall
        )
    wall = (time.perf_counter() - start) * 1e3
    final = traj.final_iterate
    return ResultRow(
        alpha=alpha,
        algorithm=spec.name,
        final_risk=float(traj.risks[-1]),
        nuclear_norm=nuclear_norm(final),
        effective_rank=effective_rank(final),
        recon_error=recon_error(final, xstar),
        iters_run=traj.iters_run,
        wall_ms=wall,
    )


def reference_rows(
    ens: SensingEnsemble, y: np.ndarray, xstar: np.ndarray, psd: bool = False
) -> list[ResultRow]:
    """Ground-truth and nucmin rows; independent of the alpha grid.

    When the planted matrix is positive semidefinite the baseline solves
    the cone-constrained problem argmin{nuclear norm : feasible, X >= 0};
    the constraint matters in the completion regime, where the
    unconstrained minimizer can have strictly smaller nuclear norm than
    the planted matrix.
    """
    rows = []
    start = time.perf_counter()
    rows.append(ResultRow(
        alpha=0.0,
        algorithm=ROW_GROUND_TRUTH,
        final_risk=risk(ens, y, xstar),
        nuclear_norm=nuclear_norm(xstar),
        effective_rank=effective_rank(xstar),
        recon_error=0.0,
        iters_run=0,
        wall_ms=(time.perf_counter() - start) * 1e3,
    ))
    start = time.perf_counter()
    try:
        result = nucmin(ens, y, NucminConfig(psd=psd))
    except MaxItersExceeded as exc:
        # splitting residuals above tolerance: report the best iterate,
        # which is still affine-feasible
        result = exc.best
    wall = (time.perf_counter() - start) * 1e3
    est = result.estimate
    rows.append(ResultRow(
        alpha=0.0,
        algorithm=ROW_NUCMIN,
        final_risk=risk(ens, y, est),
        nuclear_norm=nuclear_norm(est),
        effective_rank=effective_rank(est),
        recon_error=recon_error(est, xstar),
        iters_run=result.iters_run,
        wall_ms=wall,
    ))
    return rows


def thread_count() -> int:
    raw = os.environ.get("MDSENSE_THREADS", "1")
    try:
        count = int(raw)
    except ValueError as exc:
        raise ConfigError(f"MDSENSE_THREADS={raw!r} is not an integer") from exc
    if count < 1:
        raise ConfigError("MDSENSE_THREADS must be >= 1")
    return count


def run_alpha_sweep(cfg: ExperimentConfig) -> list[ResultRow]:
    """All (alpha, algorithm) cells plus the two reference rows, sorted."""
    truth, ens, y = build_problem(cfg)
    xstar = truth.matrix
    cells = [
        (spec, alpha) for spec in cfg.algorithms for alpha in cfg.alpha_grid
    ]
    workers = thread_count()
    if workers > 1 and len(cells) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(
                lambda cell: _run_cell(cell[0], cell[1], ens, y, xstar), cells
            ))
    else:
        rows = [_run_cell(spec, alpha, ens, y, xstar) for spec, alpha in cells]
    rows.extend(reference_rows(ens, y, xstar, psd=truth.psd))
    rows.sort(key=lambda row: (row.algorithm, -row.alpha))
    return rows


def run_single(cfg: ExperimentConfig) -> list[ResultRow]:
    """First algorithm at the first alpha, plus the reference rows."""
    if not cfg.alpha_grid:
        raise ConfigError("SingleRun needs at least one alpha_grid entry")
    narrowed = ExperimentConfig(
        experiment="AlphaSweep",
        n=cfg.n, nprime=cfg.nprime, r=cfg.r, m=cfg.m,
        ensemble=cfg.ensemble,
        algorithms=cfg.algorithms[:1],
        alpha_grid=cfg.alpha_grid[:1],
        seed=cfg.seed,
        output_dir=cfg.output_dir,
        emit_svg=cfg.emit_svg,
    )
    return run_alpha_sweep(narrowed)


def format_row(row: ResultRow) -> str:
    return ",".join([
        "%.16e" % row.alpha,
        row.algorithm,
        "%.16e" % row.final_risk,
        "%.16e" % row.nuclear_norm,
        "%.16e" % row.effective_rank,
        "%.16e" % row.recon_error,
        str(row.iters_run),
        "%.16e" % row.wall_ms,
    ])


def render_csv(rows: list[ResultRow]) -> str:
    lines = [CSV_HEADER]
    lines.extend(format_row(row) for row in rows)
    return "\n".join(lines) + "\n"


def parse_csv(text: str) -> list[ResultRow]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != CSV_HEADER:
        raise ConfigError("results.csv: unrecognized header")
    rows = []
    for line in lines[1:]:
        parts = line.split(",")
        if len(parts) != 8:
            raise ConfigError(f"results.csv: malformed line {line!r}")
        rows.append(ResultRow(
            alpha=float(parts[0]),
            algorithm=parts[1],
            final_risk=float(parts[2]),
            nuclear_norm=float(parts[3]),
            effective_rank=float(parts[4]),
            recon_error=float(parts[5]),
            iters_run=int(parts[6]),
            wall_ms=float(parts[7]),
        ))
    return rows


def emit_outputs(rows: list[ResultRow], cfg: ExperimentConfig) -> list[str]:
    """Write results.csv (and the three SVG charts when emit_svg)."""
    if not rows:
        raise ConfigError("no rows to emit")
    outdir = Path(cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    csv_path = outdir / "results.csv"
    csv_path.write_text(render_csv(rows), encoding="utf-8")
    written.append(str(csv_path))
    if cfg.emit_svg:
        from .plots import render_sweep_charts

        written.extend(render_sweep_charts(rows, outdir))
    return written


# ---------------------------------------------------------------------------
# invariant suite


@dataclass
class InvariantResult:
    name: str
    passed: bool
    residual: float
    tolerance: float


@dataclass
class InvariantReport:
    results: list[InvariantResult] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results)

    def lines(self) -> list[str]:
        out = []
        for r in self.results:
            status = "PASS" if r.passed else "FAIL"
            out.append(
                f"{status} {r.name} residual={r.residual:.3e} tol={r.tolerance:.1e}"
            )
        out.append(
            ("OK" if self.all_passed else "FAILED")
            + f" {sum(r.passed for r in self.results)}/{len(self.results)}"
        )
        return out


def _check(report, name, residual, tolerance):
    residual = float(residual)
    ok = math.isfinite(residual) and residual <= tolerance
    report.results.append(InvariantResult(name, ok, residual, tolerance))


def run_invariant_suite(seed: int = 0) -> InvariantReport:
    """Cross-module identity checks on small seeded instances."""
    from . import rng
    from .mirror_maps import EntropyMap, HypentropyMap

    report = InvariantReport()
    n = 5
    m = 8

    # mirror-descent evolution identity and reference independence, 200 iters
    truth = gen_lowrank_psd(n, 2, seed=seed)
    ens = gen_gaussian_sym(n, m, seed=seed + 1)
    y = measure(ens, truth.matrix)
    mirror = HypentropyMap(beta=0.5)
    eta = 0.05
    X = 0.3 * np.eye(n)
    # two distinct zero-risk references: truth and its affine reprojection
    # of a perturbed point
    from .nucmin import affine_project

    ref1 = truth.matrix
    ref2 = affine_project(ens, y, truth.matrix + 0.5 * np.eye(n))
    worst_identity = 0.0
    worst_refs = 0.0
    from .sensing import risk_grad

    Z = mirror.grad(X)
    for _ in range(200):
        G = risk_grad(ens, y, X)
        G = (G + G.T) / 2.0
        Znew = Z - eta * G
        Xnew = mirror.grad_inverse(Znew)
        for ref in (ref1, ref2):
            lhs = mirror.bregman(ref, X) - mirror.bregman(ref, Xnew)
            rhs = mirror.bregman(Xnew, X) + eta * float(
                np.sum(G * (Xnew - ref))
            )
            scale = max(1.0, abs(lhs), abs(rhs))
            worst_identity = max(worst_identity, abs(lhs - rhs) / scale)
        d1 = mirror.bregman(ref1, X) - mirror.bregman(ref1, Xnew)
        d2 = mirror.bregman(ref2, X) - mirror.bregman(ref2, Xnew)
        worst_refs = max(
            worst_refs, abs(d1 - d2) / max(1.0, abs(d1), abs(d2))
        )
        Z, X = Znew, Xnew
    _check(report, "bregman_evolution_identity", worst_identity, 1e-8)
    _check(report, "bregman_reference_independence", worst_refs, 1e-8)

    # multiplicative-update equivalence on a commuting instance, 100 iters
    gen = rng.stream(seed, "suite-commuting")
    nd = 6
    diag_mats = np.zeros((4, nd, nd))
    for i in range(4):
        diag_mats[i] = np.diag(gen.standard_normal(nd))
    ens_d = SensingEnsemble(kind="dense", n=nd, nprime=nd, matrices=diag_mats)
    xstar_d = np.diag(np.abs(gen.standard_normal(nd)))
    y_d = measure(ens_d, xstar_d)
    alpha = 0.1
    steps = 100
    eta_d = 0.05
    map_e = EntropyMap()
    cfg_md = RunConfig(
        algorithm=ALG_MIRROR_DESCENT, step=eta_d, max_iters=steps,
        map=map_e, risk_tol=0.0, snapshot_every=1,
    )
    traj_md = mirror_descent(
        map_e, ens_d, y_d, alpha * np.eye(nd), cfg_md
    )
    cfg_eg = RunConfig(
        algorithm=ALG_EXP_GRADIENT, step=eta_d, max_iters=steps,
        risk_tol=0.0, snapshot_every=1,
    )
    traj_eg = exp_gradient(
        ens_d, y_d, alpha * np.eye(nd), np.zeros((nd, nd)), cfg_eg
    )
    worst_dev = 0.0
    for t in range(steps + 1):
        worst_dev = max(worst_dev, float(np.linalg.norm(
            traj_md.snapshots[t] - traj_eg.snapshots[t]
        )))
    _check(report, "multiplicative_update_equivalence", worst_dev, 1e-10)

    # effective-rank scale invariance
    gen = rng.stream(seed, "suite-effrank")
    A = gen.standard_normal((6, 4))
    worst = 0.0
    for c in (1e-6, 0.5, 3.0, 1e6):
        worst = max(worst, abs(effective_rank(c * A) - effective_rank(A)))
    _check(report, "effective_rank_scale_invariance", worst, 1e-10)

    # last-iterate risk bound on a converged small run
    from .optimizers import safe_step_bound

    mirror_h = HypentropyMap(beta=1e-3)
    ens_s = gen_gaussian_sym(4, 6, seed=seed + 2)
    truth_s = gen_lowrank_psd(4, 1, seed=seed + 3)
    y_s = measure(ens_s, truth_s.matrix)
    x0 = np.zeros((4, 4))
    eta_s = min(1.0, safe_step_bound(ens_s, y_s, truth_s.matrix, mirror_h))
    cfg_s = RunConfig(
        algorithm=ALG_MIRROR_DESCENT, step=eta_s, max_iters=4000,
        map=mirror_h, risk_tol=1e-14,
    )
    traj_s = mirror_descent(mirror_h, ens_s, y_s, x0, cfg_s)
    final = traj_s.final_iterate
    d0 = mirror_h.bregman(final, x0)
    worst_slack = 0.0
    for t in range(1, traj_s.iters_run + 1):
        bound = d0 / (eta_s * t)
        if traj_s.risks[t] > bound:
            worst_slack = max(
                worst_slack, traj_s.risks[t] / bound - 1.0
            )
    _check(report, "last_iterate_risk_bound", worst_slack, 1e-6)
    return report
