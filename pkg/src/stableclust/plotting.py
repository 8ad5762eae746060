"""Figures written next to the CSV reports."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

plt.rcParams.update({
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "figure.figsize": (4.5, 3.0),
    "savefig.dpi": 150,
})


def plot_stability(trace, path) -> str:
    """F1h of each perturbation stage against the previous one."""
    frac = [100 * s.fraction for s in trace.stages]
    mean = np.array([s.f1h_mean for s in trace.stages])
    std = np.array([s.f1h_std for s in trace.stages])
    fig, ax = plt.subplots()
    ax.errorbar(frac, mean, yerr=std, marker="o", ms=3, capsize=2, lw=1.2)
    ax.set_xlabel("links removed, %")
    ax.set_ylabel("F1h vs previous stage")
    ax.set_xticks(frac)
    ax.set_ylim(0, 1.02)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return str(path)


def plot_scaling(rows, path, slope: float | None = None) -> str:
    m = np.array([r.links for r in rows], dtype=float)
    t = np.array([r.time_ms for r in rows], dtype=float) / 1000.0
    fig, ax = plt.subplots()
    ax.loglog(m, t, "o-", ms=3, lw=1.2, label="measured")
    ref = t[0] * (m * np.log(m)) / (m[0] * np.log(m[0]))
    ax.loglog(m, ref, "--", lw=0.8, color="grey", label="m log m")
    ax.set_xlabel("links m")
    ax.set_ylabel("time, s")
    if slope is not None:
        ax.set_title(f"slope {slope:.2f}")
    ax.legend()
    ax.grid(alpha=0.3, which="both")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return str(path)
