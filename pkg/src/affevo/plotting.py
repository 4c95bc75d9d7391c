"""Matplotlib figures written next to the CLI's delimited output.

Uses the non-interactive Agg backend and strips PNG metadata, so figure
bytes depend only on the data.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "font.size": 9,
    "font.family": "DejaVu Sans",
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 150,
    "path.simplify": False,
    "svg.hashsalt": "affevo",
}

CURVE_COLOR = "black"
EVO_COLOR = "#c0392b"
CUSP_COLOR = "#2471a3"


def _close_loop(P):
    return np.vstack([P, P[:1]])


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
    return path


def plot_evolutoid(jets, curve, records, path, title: str | None = None) -> Path:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5, 5))
        G = _close_loop(jets.gamma)
        X = _close_loop(curve.X)
        ax.plot(G[:, 0], G[:, 1], color=CURVE_COLOR, lw=1.0, label=r"$\gamma$")
        ax.plot(X[:, 0], X[:, 1], color=EVO_COLOR, lw=1.0, label=rf"$E_{{{curve.alpha:g}}}$")
        if records:
            P = np.array([r.X0 for r in records])
            ax.scatter(P[:, 0], P[:, 1], s=18, color=CUSP_COLOR, zorder=3, label="cusps")
        ax.set_aspect("equal", adjustable="datalim")
        ax.legend(loc="upper right", frameon=False)
        ax.set_title(title or rf"evolutoid, $\alpha = {curve.alpha:g}$")
        return _save(fig, path)


def plot_discriminant(mesh, path, max_levels: int = 40) -> Path:
    """Level sets of the discriminant stacked in (x, y, alpha) with edges and A3 points."""
    with plt.rc_context(STYLE):
        fig = plt.figure(figsize=(6, 5))
        ax = fig.add_subplot(projection="3d")
        n_a = mesh.alphas.size
        for j in np.unique(np.linspace(0, n_a - 1, min(n_a, max_levels)).round().astype(int)):
            P = _close_loop(mesh.vertices[:, j])
            ax.plot(P[:, 0], P[:, 1], P[:, 2], color="0.6", lw=0.4)
        for edge in mesh.cuspidal_edges:
            P = edge.xyz
            ax.plot(P[:, 0], P[:, 1], P[:, 2], color=EVO_COLOR, lw=1.2)
        if mesh.swallowtails:
            S = np.array([[*r.X0, r.alpha0] for r in mesh.swallowtails])
            ax.scatter(S[:, 0], S[:, 1], S[:, 2], color=CUSP_COLOR, s=20, depthshade=False)
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        ax.set_zlabel(r"$\alpha$")
        ax.view_init(elev=22, azim=-60)
        ax.set_title("discriminant surface")
        return _save(fig, path)


def plot_sweep(alphas, counts, path, alpha_star: float | None = None) -> Path:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5, 3))
        ax.step(alphas, counts, where="mid", color=EVO_COLOR, lw=1.0)
        if alpha_star is not None:
            ax.axvline(alpha_star, color="0.5", ls="--", lw=0.8)
        ax.set_xlabel(r"$\alpha$")
        ax.set_ylabel("singular points")
        ax.set_xlim(alphas[0], alphas[-1])
        return _save(fig, path)
