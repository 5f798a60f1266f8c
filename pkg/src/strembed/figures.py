"""Figure rendering for the report-producing commands.

All plots go straight to files via the Agg backend; nothing opens a window.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def plot_convergence(report, path):
    """Log-log max/mean kernel-estimate error vs bank size, with the fitted
    rate and the reference -1/2 slope."""
    fig, ax = plt.subplots(figsize=(5, 4))
    r = np.asarray(report.r_grid, dtype=float)
    ax.loglog(r, report.max_abs_error, "o-", label="max error")
    ax.loglog(r, report.mean_abs_error, "s--", label="mean error")
    anchor = report.max_abs_error[0] * (r / r[0]) ** -0.5
    ax.loglog(r, anchor, ":", color="gray", label="slope -1/2")
    ax.set_xlabel("bank size R")
    ax.set_ylabel("|estimate - reference|")
    ax.set_title(f"fitted rate {report.fitted_rate:.3f}")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_scaling(run, path):
    """Log-log embedding wall time vs swept size with the fitted slope."""
    fig, ax = plt.subplots(figsize=(5, 4))
    g = np.asarray(run.grid, dtype=float)
    t = np.asarray(run.wall_times, dtype=float)
    ax.loglog(g, t, "o-", label="median time")
    anchor = t[0] * (g / g[0])
    ax.loglog(g, anchor, ":", color="gray", label="linear")
    ax.set_xlabel(f"size ({run.axis})")
    ax.set_ylabel("seconds")
    ax.set_title(f"slope {run.fitted_slope:.3f}, R^2 {run.r_squared:.4f}")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_eigenvalues(eigenvalues, path, title="Gram spectrum"):
    """Sorted eigenvalue spectrum on a symlog axis (negative values matter
    for definiteness checks)."""
    fig, ax = plt.subplots(figsize=(5, 4))
    vals = np.sort(np.asarray(eigenvalues))[::-1]
    ax.plot(vals, ".-")
    ax.set_yscale("symlog", linthresh=1e-10)
    ax.axhline(0.0, color="gray", lw=0.5)
    ax.set_xlabel("index")
    ax.set_ylabel("eigenvalue")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_variants(rows, path):
    """Bar chart of test accuracy for each sampling/feature combination."""
    fig, ax = plt.subplots(figsize=(7, 4))
    names = [f"{r['strategy']}-{r['feature']}" for r in rows]
    accs = [r["accuracy"] for r in rows]
    ax.bar(range(len(rows)), accs)
    ax.set_xticks(range(len(rows)), names, rotation=45, ha="right")
    ax.set_ylabel("test accuracy")
    ax.set_ylim(0, 1)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
