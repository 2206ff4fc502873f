"""PNG companions to the delimited report tables.

Renderers take already-computed data and never recompute; the CLI calls
them when asked for figures and writes them next to the CSV output.
Backend is forced to Agg so runs stay headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .model import ModelSpec  # noqa: E402

__all__ = [
    "profile_figure",
    "residual_figure",
    "trajectory_figure",
    "matrix_figure",
]

_DPI = 130


def profile_figure(model: ModelSpec, path) -> str:
    """f over two periods next to the spectrum of A."""
    fig, (ax_f, ax_a) = plt.subplots(1, 2, figsize=(8.4, 3.0))
    t = np.linspace(0.0, 2.0 * model.period, 600)
    ax_f.plot(t, model.f(t), lw=1.2)
    ax_f.axhline(0.0, color="0.7", lw=0.6)
    ax_f.set_xlabel("t")
    ax_f.set_ylabel("f(t)")
    ax_f.set_title(f"profile, period {model.period:g}")
    lams = model.eigenvalues
    ax_a.stem(np.arange(1, lams.size + 1), lams)
    ax_a.axhline(0.0, color="0.7", lw=0.6)
    ax_a.set_xlabel("eigenvalue index")
    ax_a.set_ylabel("lambda")
    ax_a.set_title("spectrum of A")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return str(path)


def residual_figure(checks, path, title: str = "check residuals") -> str:
    """Horizontal log-scale bars: residual vs tolerance per check."""
    names = [c.name for c in checks]
    res = np.array([max(c.max_residual, 1e-17) for c in checks])
    tol = np.array([max(c.tolerance, 1e-17) for c in checks])
    y = np.arange(len(names))
    fig, ax = plt.subplots(figsize=(7.2, 0.6 + 0.38 * len(names)))
    ax.barh(y, res, height=0.55,
            color=["#2b7a3e" if r <= t else "#b03030" for r, t in zip(res, tol)])
    ax.scatter(tol, y, marker="|", s=220, color="0.2", zorder=3, label="tolerance")
    ax.set_xscale("log")
    ax.set_yticks(y, names, fontsize=8)
    ax.invert_yaxis()
    ax.set_xlabel("max residual")
    ax.set_title(title)
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return str(path)


def trajectory_figure(taus, vs, energies, path) -> str:
    """Transverse components and energy drift of one sample geodesic."""
    vs = np.asarray(vs)
    fig, (ax_v, ax_e) = plt.subplots(2, 1, figsize=(7.2, 4.6), sharex=True)
    for i in range(vs.shape[1]):
        ax_v.plot(taus, vs[:, i], lw=0.9, label=f"v{i + 1}")
    ax_v.set_ylabel("v components")
    ax_v.legend(fontsize=7, ncol=min(4, vs.shape[1]))
    drift = np.abs(np.asarray(energies) - energies[0])
    ax_e.semilogy(taus, np.maximum(drift, 1e-18), lw=0.9)
    ax_e.set_xlabel("tau")
    ax_e.set_ylabel("|energy drift|")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return str(path)


def matrix_figure(matrices: dict, path, title: str = "transport matrices") -> str:
    """Heatmaps of named matrices on a shared symmetric color scale."""
    items = list(matrices.items())
    vmax = max(float(np.max(np.abs(M))) for _, M in items) or 1.0
    fig, axes = plt.subplots(1, len(items), figsize=(3.1 * len(items), 3.0))
    if len(items) == 1:
        axes = [axes]
    for ax, (name, M) in zip(axes, items):
        im = ax.imshow(M, cmap="RdBu_r", vmin=-vmax, vmax=vmax)
        ax.set_title(name, fontsize=9)
        ax.set_xticks([])
        ax.set_yticks([])
    fig.colorbar(im, ax=axes, shrink=0.85)
    fig.suptitle(title, fontsize=10)
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)
    return str(path)
