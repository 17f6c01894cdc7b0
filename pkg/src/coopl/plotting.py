"""Figures for experiment reports.

Rendering stays out of the experiment code: these functions take a
finished :class:`~coopl.harness.MetricsReport` and write PNG files.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "font.size": 10,
    "axes.labelsize": 10,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "legend.frameon": False,
    "savefig.dpi": 120,
}


def _save(fig, path: str) -> str:
    # Drop the Software tag so repeated renders produce identical bytes.
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
    return path


def plot_rates(report, path: str) -> str:
    """Per-trial held-out error (or violation) rate against the epsilon line."""
    eps = report.config["epsilon"]
    rates = [r["rate"] for r in report.rows]
    colors = ["tab:blue" if r["success"] else "tab:red" for r in report.rows]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6.4, 3.2))
        ax.bar(range(len(rates)), rates, color=colors, width=0.8)
        ax.axhline(eps, color="k", ls="--", lw=1, label=f"epsilon = {eps:g}")
        ax.set_xlabel("trial")
        ax.set_ylabel("violation rate" if report.kind == "stability" else "held-out error")
        ax.set_title(f"{report.successes}/{report.trials} trials below epsilon (m = {report.m})")
        ax.legend(loc="upper right")
        fig.tight_layout()
        return _save(fig, path)


def plot_payments(report, path: str) -> str:
    """Sampled-program payment against the all-coalition optimum, per trial."""
    rows = [r for r in report.rows if "lp_full_optimum" in r]
    xs = [r["lp_full_optimum"] for r in rows]
    ys = [r["total_payment"] for r in rows]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.0, 4.0))
        ax.scatter(xs, ys, s=12, color="tab:blue")
        hi = max(xs + ys + [1.0])
        ax.plot([0, hi], [0, hi], color="k", lw=1, ls=":")
        ax.set_xlabel("optimum over all coalitions")
        ax.set_ylabel("payment from samples")
        fig.tight_layout()
        return _save(fig, path)


def render_report_figures(report, prefix: str) -> list:
    """Write every figure that applies to ``report``; returns the paths."""
    out_dir = os.path.dirname(prefix)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    paths = [plot_rates(report, prefix + "_rates.png")]
    if report.kind == "stability" and any("lp_full_optimum" in r for r in report.rows):
        paths.append(plot_payments(report, prefix + "_payments.png"))
    return paths
