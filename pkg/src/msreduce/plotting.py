"""Report figures rendered alongside the delimited output files."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _save(fig, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_eigencompare(columns, rows, path: str | Path) -> Path:
    """Exact vs approximated eigenvalue tracks and their absolute error."""
    path = Path(path)
    x, idx = rows[:, 0], rows[:, 1].astype(int)
    fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(9, 3.6))
    for i in sorted(set(idx)):
        m = idx == i
        ax0.plot(x[m], rows[m, 2], "-", label=f"exact {i}")
        ax0.plot(x[m], rows[m, 3], "--", label=f"approx {i}")
        err = rows[m, 4]
        pos = err > 0
        if np.any(pos):
            ax1.loglog(x[m][pos], err[pos], ".-", label=f"index {i}")
    ax0.set_xlabel(r"$\delta/\Omega_{rms}$")
    ax0.set_ylabel("eigenvalue [1/T]")
    ax0.legend(fontsize=6, ncol=2)
    ax1.set_xlabel(r"$\delta/\Omega_{rms}$")
    ax1.set_ylabel("|error| [1/T]")
    ax1.legend(fontsize=6)
    return _save(fig, path)


def plot_propagation(columns, rows, path: str | Path) -> Path:
    """Population time series, one line style per Hamiltonian selection."""
    path = Path(path)
    t = rows[:, 0]
    fig, ax = plt.subplots(figsize=(6, 3.6))
    styles = {"full": "-", "effective": "--", "degenerate": ":"}
    for j, name in enumerate(columns[1:], start=1):
        which = name.split("_")[1]
        ax.plot(t, rows[:, j], styles.get(which, "-"), label=name, lw=1.2)
    ax.set_xlabel("t [T]")
    ax.set_ylabel("population")
    ax.legend(fontsize=6, ncol=2)
    return _save(fig, path)


def plot_sweep(columns, rows, path: str | Path) -> Path:
    """Error-vs-shift scaling on log-log axes."""
    path = Path(path)
    x = rows[:, 0]
    fig, ax = plt.subplots(figsize=(5, 3.6))
    for j, name in enumerate(columns[1:], start=1):
        y = rows[:, j]
        m = (x > 0) & (y > 0)
        if np.any(m):
            ax.loglog(x[m], y[m], ".-", label=name)
    ax.set_xlabel(r"$\delta/\Omega_{rms}$")
    ax.set_ylabel("error")
    ax.legend(fontsize=7)
    return _save(fig, path)
