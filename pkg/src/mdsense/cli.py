"""Command-line front end.

Subcommands: sweep (full alpha grid), run (first cell only), check (invariant
suite), bounds (recovery-bound values for a config). MDSENSE_THREADS caps
sweep parallelism. Exit codes: 0 success, 1 invariant failure, 2 config
error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .errors import ConfigError
from .metrics import BoundInputs, nuclear_norm, theorem3_bound, theorem4_bound

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mdsense",
        description=(
            "matrix-sensing experiments: mirror descent, factored gradient "
            "descent, and a nuclear-norm baseline"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sweep = sub.add_parser("sweep", help="run the full alpha sweep")
    sweep.add_argument("--config", required=True, help="config file path")
    single = sub.add_parser(
        "run", help="run the first algorithm at the first alpha only"
    )
    single.add_argument("--config", required=True, help="config file path")
    check = sub.add_parser("check", help="run the invariant suite")
    check.add_argument("--seed", type=int, default=0)
    bounds = sub.add_parser(
        "bounds", help="print recovery-bound values for the config"
    )
    bounds.add_argument("--config", required=True, help="config file path")
    bounds.add_argument(
        "--delta", type=float, default=0.1,
        help="isometry distortion for the deterministic bound (default 0.1)",
    )
    return parser


def _cmd_sweep(config_path: str, single: bool) -> int:
    from .experiment import emit_outputs, load_config, run_alpha_sweep, run_single

    cfg = load_config(config_path)
    rows = run_single(cfg) if single else run_alpha_sweep(cfg)
    written = emit_outputs(rows, cfg)
    for path in written:
        print(path)
    return EXIT_OK


def _cmd_check(seed: int) -> int:
    from .experiment import run_invariant_suite

    report = run_invariant_suite(seed=seed)
    for line in report.lines():
        print(line)
    return EXIT_OK if report.all_passed else EXIT_INVARIANT


def _fmt_bound_fields(**fields) -> str:
    parts = []
    for key, val in fields.items():
        if isinstance(val, bool):
            parts.append(f"{key}={str(val).lower()}")
        elif isinstance(val, float):
            parts.append(f"{key}={val:.12e}")
        else:
            parts.append(f"{key}={val}")
    return " ".join(parts)


def _cmd_bounds(config_path: str, delta: float) -> int:
    from .experiment import build_problem, load_config
    from .sensing import coherence

    cfg = load_config(config_path)
    truth, ens, y = build_problem(cfg)
    xstar = truth.matrix
    nu = nuclear_norm(xstar)
    scale = min(cfg.alpha_grid) if cfg.alpha_grid else 1e-8
    u, s, vt = np.linalg.svd(xstar)
    r = cfg.r
    ubasis = u[:, :r]
    vbasis = vt[:r, :].T
    mu0 = max(coherence(ubasis), coherence(vbasis))
    cross = ubasis @ vbasis.T
    mu1 = float(np.max(cross**2)) * cfg.n * cfg.nprime / r
    print(_fmt_bound_fields(
        n=cfg.n, nprime=cfg.nprime, r=r, m=cfg.m,
        nuclear_norm=nu, scale=scale, delta=delta, mu0=mu0, mu1=mu1,
    ))
    psd_inputs = BoundInputs(
        nuclear_star=nu, n=cfg.n, nprime=cfg.nprime, r=r,
        delta=delta, alpha=scale, m=cfg.m, mu0=mu0, mu1=mu1,
    )
    rect_inputs = BoundInputs(
        nuclear_star=nu, n=cfg.n, nprime=cfg.nprime, r=r,
        delta=delta, beta=scale, m=cfg.m, mu0=mu0, mu1=mu1,
    )
    for name, inputs, psd_form in (
        ("theorem3_psd", psd_inputs, True),
        ("theorem3_rect", rect_inputs, False),
    ):
        if psd_form and truth.psd is False:
            continue
        try:
            bound = theorem3_bound(inputs, psd_form=psd_form)
            print(f"{name} " + _fmt_bound_fields(
                value=bound.value, valid=bound.valid
            ))
        except ConfigError:
            raise
        except Exception as exc:
            print(f"{name} error={type(exc).__name__}")
    for name, inputs, psd_form in (
        ("theorem4_psd", psd_inputs, True),
        ("theorem4_rect", rect_inputs, False),
    ):
        if psd_form and truth.psd is False:
            continue
        try:
            cb = theorem4_bound(inputs, psd_form=psd_form)
            print(f"{name} " + _fmt_bound_fields(
                value=cb.value,
                sample_requirement=cb.sample_requirement,
                probability=cb.probability,
                m_sufficient=cb.m_sufficient,
                valid=cb.valid,
            ))
        except ConfigError:
            raise
        except Exception as exc:
            print(f"{name} error={type(exc).__name__}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "sweep":
            return _cmd_sweep(args.config, single=False)
        if args.command == "run":
            return _cmd_sweep(args.config, single=True)
        if args.command == "check":
            return _cmd_check(args.seed)
        if args.command == "bounds":
            return _cmd_bounds(args.config, args.delta)
        parser.error(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:
        print(f"runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
