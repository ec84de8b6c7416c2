"""Matplotlib rendering of the bound surfaces next to their CSV dumps."""

from __future__ import annotations

from pathlib import Path

import numpy as np


def _plt():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def _surface_axes(plt, xlabel: str, ylabel: str, zlabel: str):
    fig = plt.figure(figsize=(7, 5.2))
    ax = fig.add_subplot(111, projection="3d")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_zlabel(zlabel)
    return fig, ax


def _mesh(x1: np.ndarray, x2: np.ndarray):
    return np.meshgrid(x1, x2, indexing="ij")


def render_example1_bounds(alphas, gammas, lhs, bound_new, bound_prior,
                           path) -> Path:
    plt = _plt()
    fig, ax = _surface_axes(plt, "alpha", "gamma", "value")
    a, g = _mesh(alphas, gammas)
    ax.plot_surface(a, g, lhs, color="tab:red", alpha=0.75)
    ax.plot_surface(a, g, bound_new, color="tab:green", alpha=0.75)
    ax.plot_surface(a, g, bound_prior, color="tab:blue", alpha=0.6)
    ax.set_title("joint-cut concurrence power (red), new bound (green), "
                 "prior bound (blue)", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def render_example1_gap(alphas, gammas, z, path) -> Path:
    plt = _plt()
    fig, ax = _surface_axes(plt, "alpha", "gamma", "z")
    a, g = _mesh(alphas, gammas)
    ax.plot_surface(a, g, z, color="tab:red", alpha=0.8)
    ax.plot_surface(a, g, np.zeros_like(z), color="tab:blue", alpha=0.35)
    ax.set_title("bound improvement over the fixed-coefficient comparator",
                 fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def render_example3(betas, deltas, lhs, bound, path) -> Path:
    plt = _plt()
    fig, ax = _surface_axes(plt, "beta", "delta", "value")
    b, d = _mesh(betas, deltas)
    ax.plot_surface(b, d, lhs, color="tab:red", alpha=0.8)
    ax.plot_surface(b, d, bound, color="tab:blue", alpha=0.55)
    ax.set_title("assisted squared negativity power (red) and its upper "
                 "bound (blue)", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def render_sweep(x1, x2, lhs, bound, mode: str, measure: str, path) -> Path:
    plt = _plt()
    fig, ax = _surface_axes(plt, "x1", "x2", "value")
    a, g = _mesh(x1, x2)
    ax.plot_surface(a, g, lhs, color="tab:red", alpha=0.8)
    ax.plot_surface(a, g, bound, color="tab:blue", alpha=0.55)
    kindword = "lower" if mode == "monogamy" else "upper"
    ax.set_title(f"{measure}: joint-cut power (red) vs {kindword} bound "
                 f"(blue)", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)
