"""Render report figures to files alongside the delimited outputs."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "save_hazard_profile",
    "save_contour",
    "save_km_plot",
    "save_probability_plot",
]


def _finish(fig, path: str) -> None:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_hazard_profile(profile: np.ndarray, path: str, label: str | None = None) -> None:
    """Plot (t, h(t)) rows from hazard_profile."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.plot(profile[:, 0], profile[:, 1], lw=1.6, color="tab:blue")
    ax.set_xlabel("time")
    ax.set_ylabel("hazard rate")
    if label:
        ax.set_title(label)
    ax.set_xscale("log")
    _finish(fig, path)


def save_contour(grid, path: str, optimum=None) -> None:
    """Contours of the asymptotic sd over (xi_low, pi)."""
    fig, ax = plt.subplots(figsize=(6.0, 5.0))
    sd = np.where(np.isfinite(grid.sd), grid.sd, np.nan)
    X, Y = np.meshgrid(grid.xi, grid.pi, indexing="ij")
    cs = ax.contour(X, Y, sd, levels=15, colors="tab:blue", linewidths=0.9)
    ax.clabel(cs, inline=True, fontsize=7, fmt="%.2f")
    if optimum is not None:
        ax.plot([optimum[0]], [optimum[1]], marker="*", ms=12, color="tab:red")
    ax.set_xlabel("lower standardized stress")
    ax.set_ylabel("allocation to lower stress")
    _finish(fig, path)


def save_km_plot(km, path: str) -> None:
    """Step plot of the product-limit survival estimate with its CI band."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    if km.times.size:
        t = np.concatenate([[0.0], km.times])
        s = np.concatenate([[1.0], km.survival])
        ax.step(t, s, where="post", color="tab:blue", lw=1.6, label="product-limit")
        ax.step(
            np.concatenate([[0.0], km.times]),
            np.concatenate([[1.0], km.ci_lower]),
            where="post",
            color="tab:blue",
            lw=0.8,
            ls="--",
        )
        ax.step(
            np.concatenate([[0.0], km.times]),
            np.concatenate([[1.0], km.ci_upper]),
            where="post",
            color="tab:blue",
            lw=0.8,
            ls="--",
            label="95% pointwise",
        )
        ax.legend(frameon=False)
    ax.set_xlabel("time")
    ax.set_ylabel("survival")
    ax.set_ylim(-0.02, 1.02)
    _finish(fig, path)


def save_probability_plot(sample, fits, path: str) -> None:
    """Probability plot on Weibull axes: product-limit points plus fitted cdfs.

    ``fits`` is a sequence of (label, cdf callable) pairs evaluated over the
    data's time range.
    """
    from .inference import kaplan_meier

    km = kaplan_meier(sample)
    fig, ax = plt.subplots(figsize=(6.0, 4.6))
    mask = (km.survival > 0) & (km.survival < 1)
    if np.any(mask):
        x = np.log(km.times[mask])
        y = np.log(-np.log(km.survival[mask]))
        ax.plot(x, y, "o", ms=5, color="black", label="nonparametric")
    lo, hi = sample.times.min() * 0.5, sample.times.max() * 1.5
    grid = np.geomspace(lo, hi, 200)
    for label, cdf in fits:
        p = np.clip(np.asarray(cdf(grid), dtype=float), 1e-12, 1 - 1e-12)
        ax.plot(np.log(grid), np.log(-np.log1p(-p)), lw=1.4, label=label)
    ax.set_xlabel("log time")
    ax.set_ylabel("log(-log survival)")
    ax.legend(frameon=False, fontsize=8)
    _finish(fig, path)
