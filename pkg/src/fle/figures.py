"""Deterministic SVG rendering for the command line report files.

Every figure goes through the Agg backend with a pinned hash salt and
stripped timestamps, so rerunning a command writes byte-identical files.
Rendering never opens a window and each function closes its figure.
"""

import math
import os

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "fle"

import matplotlib.pyplot as plt
import numpy as np


def _save(fig, path):
    tmp = f"{path}.tmp"
    fig.savefig(tmp, format="svg", metadata={"Date": None})
    plt.close(fig)
    os.replace(tmp, path)


def render_region(p_grid, q_critical, q_reciprocal, asymptote_pair, marker, path):
    """Existence-region picture: critical curve, pq = 1 curve, asymptotes.

    q_critical may contain NaN left of the vertical asymptote; those
    samples are simply not drawn.  The marker, when present, is the
    first-quadrant meeting point of the two curves.
    """
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    q_critical = np.asarray(q_critical, dtype=float)
    shown = np.isfinite(q_critical)
    ax.plot(p_grid[shown], q_critical[shown], color="#1f77b4",
            label="critical curve")
    ax.plot(p_grid, q_reciprocal, color="#2ca02c", linestyle="--",
            label="pq = 1")
    vertical, horizontal = asymptote_pair
    if vertical > 0.0:
        ax.axvline(vertical, color="#999999", linewidth=0.8, linestyle=":")
    if horizontal > 0.0:
        ax.axhline(horizontal, color="#999999", linewidth=0.8, linestyle=":")
    if marker is not None:
        ax.plot([marker[0]], [marker[1]], marker="o", color="#d62728",
                label="curves meet")
    finite_q = q_critical[shown & (q_critical < 50.0)]
    top = float(np.max(finite_q)) if finite_q.size else 5.0
    ax.set_xlim(float(p_grid[0]), float(p_grid[-1]))
    ax.set_ylim(0.0, max(3.0, min(top, 50.0)))
    ax.set_xlabel("p")
    ax.set_ylabel("q")
    ax.legend(loc="upper right")
    fig.tight_layout()
    _save(fig, path)


def render_fields(grid, u, v, path):
    """Solution profiles: line plots on the interval, images on the square."""
    grid = np.asarray(grid, dtype=float)
    if grid.ndim == 1:
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        ax.plot(grid, u, color="#1f77b4", label="u")
        ax.plot(grid, v, color="#d62728", linestyle="--", label="v")
        ax.axhline(0.0, color="#999999", linewidth=0.6)
        ax.set_xlabel("x")
        ax.legend(loc="upper right")
    else:
        side = math.isqrt(grid.shape[0])
        fig, axes = plt.subplots(1, 2, figsize=(8.0, 3.6))
        for ax, values, name in zip(axes, (u, v), ("u", "v")):
            image = ax.imshow(
                np.asarray(values, dtype=float).reshape(side, side).T,
                origin="lower", extent=(-1.0, 1.0, -1.0, 1.0),
                cmap="viridis",
            )
            ax.set_title(name)
            fig.colorbar(image, ax=ax, shrink=0.85)
    fig.tight_layout()
    _save(fig, path)


def render_sweep(rows, path):
    """Size measures along the exponent ray; failed rows leave gaps."""
    ps = np.array([row.p for row in rows], dtype=float)
    theta = np.array([row.theta_norm_u for row in rows], dtype=float)
    sup = np.array([row.sup_u for row in rows], dtype=float)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ok = np.isfinite(theta)
    ax.plot(ps[ok], theta[ok], marker="o", color="#1f77b4",
            label="energy norm of u")
    ax.plot(ps[ok], sup[ok], marker="s", color="#d62728",
            label="sup of u")
    ax.set_xlabel("p along the ray")
    ax.legend(loc="best")
    fig.tight_layout()
    _save(fig, path)
