"""Figure rendering for solve outputs.

Deliberately downstream of the data files: functions here consume the
JSON report and the delimited trace, never live solver objects, so the
same figures can be regenerated later from stored outputs.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def render_solve_figures(report: dict, rows: list[dict], outdir: str) -> list[str]:
    """Write trajectory and decay plots next to the delimited output.

    rows are parsed trace rows (n, x_n, y_n, step_dplus, residual) with
    None for absent cells.  Returns the paths written.
    """
    os.makedirs(outdir, exist_ok=True)
    paths = []

    ns = [r["n"] for r in rows]
    xs = [r["x_n"] for r in rows]
    ys = [r["y_n"] for r in rows]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(ns, xs, marker=".", lw=1.0, label="first coordinate")
    ax.plot(ns, ys, marker=".", lw=1.0, label="second coordinate")
    ax.set_xlabel("iteration")
    ax.set_ylabel("coordinate value")
    status = report.get("status", "?")
    ax.set_title(f"coupled iteration trace (status: {status})")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    p = os.path.join(outdir, "trace.png")
    fig.savefig(p, dpi=150)
    plt.close(fig)
    paths.append(p)

    steps = [(r["n"], r["step_dplus"]) for r in rows if r["step_dplus"] not in (None, 0.0)]
    residuals = [(r["n"], r["residual"]) for r in rows if r["residual"] not in (None, 0.0)]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    if steps:
        ax.semilogy([n for n, _ in steps], [v for _, v in steps], marker=".", lw=1.0, label="pair step")
    if residuals:
        ax.semilogy(
            [n for n, _ in residuals], [v for _, v in residuals], marker="x", lw=0.8, ls="--", label="residual"
        )
    k = None
    hyp = report.get("hypothesis_checks") or {}
    contraction = hyp.get("contraction") or {}
    if isinstance(contraction.get("declared_k"), (int, float)):
        k = float(contraction["declared_k"])
    if k and 0 < k < 1 and steps:
        n0, v0 = steps[0]
        ref_ns = [n for n, _ in steps]
        ax.semilogy(ref_ns, [v0 * k ** (n - n0) for n in ref_ns], lw=1.0, color="gray", label=f"k^n reference (k={k:.4g})")
    ax.set_xlabel("iteration")
    ax.set_ylabel("pair distance")
    ax.set_title("step and residual decay")
    if steps or residuals:
        ax.legend()
    ax.grid(alpha=0.3, which="both")
    fig.tight_layout()
    p = os.path.join(outdir, "decay.png")
    fig.savefig(p, dpi=150)
    plt.close(fig)
    paths.append(p)
    return paths
