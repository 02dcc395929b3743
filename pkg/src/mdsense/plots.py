"""Static SVG charts for sweep results.

Three line charts (nuclear norm, effective rank, reconstruction error
against initialization size on a log x-axis), one series per algorithm and a
horizontal line per reference row. Fixed 800x500 canvas, text rendered as
paths so the files view identically without the original fonts installed.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .experiment import ROW_GROUND_TRUTH, ROW_NUCMIN, ResultRow

_PANELS = (
    ("nuclear_norm", "nuclear norm"),
    ("effective_rank", "effective rank"),
    ("recon_error", "reconstruction error"),
)

_REFERENCE_STYLE = {
    ROW_GROUND_TRUTH: {"color": "black", "linestyle": "--"},
    ROW_NUCMIN: {"color": "gray", "linestyle": ":"},
}


def render_sweep_charts(rows: list[ResultRow], outdir) -> list[str]:
    """Write one SVG per panel into outdir; returns the paths written."""
    outdir = Path(outdir)
    sweeps: dict[str, list[ResultRow]] = {}
    references: dict[str, ResultRow] = {}
    for row in rows:
        if row.algorithm in _REFERENCE_STYLE:
            references[row.algorithm] = row
        else:
            sweeps.setdefault(row.algorithm, []).append(row)
    written = []
    with plt.rc_context({"svg.fonttype": "path"}):
        for field, label in _PANELS:
            fig, ax = plt.subplots(figsize=(8.0, 5.0), dpi=100)
            try:
                for name in sorted(sweeps):
                    series = sorted(sweeps[name], key=lambda r: r.alpha)
                    ax.plot(
                        [r.alpha for r in series],
                        [getattr(r, field) for r in series],
                        marker="o",
                        label=name,
                    )
                for name, row in sorted(references.items()):
                    ax.axhline(
                        getattr(row, field),
                        label=name,
                        **_REFERENCE_STYLE[name],
                    )
                ax.set_xscale("log")
                ax.set_xlabel("initialization size")
                ax.set_ylabel(label)
                ax.legend(fontsize=8)
                ax.grid(True, alpha=0.3)
                path = outdir / f"{field}.svg"
                fig.savefig(path, format="svg")
                written.append(str(path))
            finally:
                plt.close(fig)
    return written
