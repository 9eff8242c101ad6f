"""Matplotlib rendering of traces and derivative evidence to image files.

Figures are written next to the delimited outputs by the CLI; the library
functions take explicit paths and never open interactive windows.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .dynamics import Trace
from .fdi import derivative_estimates

__all__ = ["save_trace_figure", "save_derivative_figure"]


def save_trace_figure(trace: Trace, path, sensors=None) -> None:
    """Plot agent responses over time; a dashed line marks the failure."""
    fig, ax = plt.subplots(figsize=(7, 4))
    picks = sorted(sensors) if sensors else range(1, trace.n + 1)
    for v in picks:
        ax.plot(trace.times, trace.for_sensor(v), lw=1.2, label=f"$x_{{{v}}}$")
    if trace.t_fail is not None:
        ax.axvline(trace.t_fail, color="gray", ls="--", lw=0.8)
    ax.set_xlabel("t")
    ax.set_ylabel("state")
    ax.legend(loc="best", fontsize=8, ncol=2)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_derivative_figure(trace: Trace, sensors, path, orders=(1, 2), t_star: float | None = None) -> None:
    """Plot sliding derivative estimates per sensor and order.

    Jumps show up as steps at the failure instant; the estimates are
    right-facing, so the step lands exactly on the instant.
    """
    sensors = sorted(set(int(p) for p in sensors))
    orders = tuple(orders)
    fig, axes = plt.subplots(
        len(orders), 1, figsize=(7, 2.6 * len(orders)), sharex=True, squeeze=False
    )
    for row, k in enumerate(orders):
        ax = axes[row][0]
        for v in sensors:
            t, est = derivative_estimates(trace, v, k)
            ax.plot(t, est, lw=1.0, label=f"$d^{{{k}}} x_{{{v}}}/dt^{{{k}}}$")
        mark = t_star if t_star is not None else trace.t_fail
        if mark is not None:
            ax.axvline(mark, color="gray", ls="--", lw=0.8)
        ax.set_ylabel(f"order {k}")
        ax.legend(loc="best", fontsize=8)
    axes[-1][0].set_xlabel("t")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
