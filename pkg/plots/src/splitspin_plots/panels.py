"""Small matplotlib building blocks shared by the preset renderers."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .projection import project_field

PNG_META = {"Software": "splitspin-plots"}


def save(fig, path):
    fig.savefig(path, dpi=150, metadata=PNG_META)
    plt.close(fig)
    return path


def group_indices(cols, mask, keys):
    """Distinct key tuples (in first-seen order) -> row index arrays."""
    rows = np.nonzero(mask)[0]
    seen = {}
    for i in rows:
        key = tuple(cols[k][i] for k in keys)
        seen.setdefault(key, []).append(i)
    return {k: np.array(v) for k, v in seen.items()}


def line_panel(ax, cols, mask, x, y, keys, label_fn, **plot_kw):
    for key, idx in group_indices(cols, mask, keys).items():
        order = idx[np.argsort(cols[x][idx], kind="stable")]
        xs, ys = cols[x][order], cols[y][order]
        keep = ~np.isnan(ys)
        ax.plot(xs[keep], ys[keep], label=label_fn(key), **plot_kw)
    ax.set_xlabel(x)
    ax.set_ylabel(y)
    ax.legend(fontsize=7)


def bar_panel(ax, cols, mask, x, y, keys, label_fn):
    groups = group_indices(cols, mask, keys)
    width = 0.8 / max(len(groups), 1)
    for g, (key, idx) in enumerate(groups.items()):
        order = idx[np.argsort(cols[x][idx], kind="stable")]
        xs, ys = cols[x][order], cols[y][order]
        keep = ~np.isnan(ys)
        ax.bar(xs[keep] + (g - (len(groups) - 1) / 2) * width, ys[keep],
               width=width, label=label_fn(key))
    ax.set_xlabel(x)
    ax.set_ylabel(y)
    ax.legend(fontsize=7)


def wigner_disc(ax, theta, phi, w, vmax=None):
    """Orthographic +x view; diverging map centered at zero so negative
    fringes read as the opposite color family."""
    u, v, vals = project_field(theta, phi, w)
    if vmax is None:
        vmax = float(np.max(np.abs(vals))) or 1.0
    tri = ax.tripcolor(u, v, vals, shading="gouraud", cmap="RdBu_r",
                       vmin=-vmax, vmax=vmax)
    ring = np.linspace(0, 2 * np.pi, 200)
    ax.plot(np.cos(ring), np.sin(ring), color="0.3", lw=0.6)
    ax.set_xlim(-1.05, 1.05)
    ax.set_ylim(-1.05, 1.05)
    ax.set_aspect("equal")
    ax.set_xticks([])
    ax.set_yticks([])
    return tri
