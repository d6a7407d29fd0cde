"""One renderer per sweep preset.

Every renderer takes the parsed row columns, the field-file map, and the
requested output path, and returns the list of written images.  Multi-panel
presets insert the panel letter before the extension: fig4.png becomes
fig4.a.png ... fig4.d.png.
"""

import os

import matplotlib.pyplot as plt
import numpy as np

from .panels import bar_panel, group_indices, line_panel, save, wigner_disc
from .reading import read_field


class PresetError(Exception):
    pass


def _panel_path(out, letter):
    stem, ext = os.path.splitext(out)
    return f"{stem}.{letter}{ext or '.png'}"


def _starts(cols, prefix):
    return np.array([s.startswith(prefix) for s in cols["series"]])


def _eq(cols, name, value):
    return np.array([s == value for s in cols[name]])


def _fig(w=4.2, h=3.2):
    return plt.subplots(figsize=(w, h), constrained_layout=True)


def render_fig2a(cols, fields, out):
    fig, ax = _fig()
    line_panel(ax, cols, _starts(cols, "a:"), "theta_a", "fq_density",
               ("mu",), lambda k: f"mu={k[0]:g}", marker=".", ms=3)
    ax.set_title("conditional QFI vs measurement angle")
    return [save(fig, out)]


def _la_panels(cols, out, y, letters, as_bars):
    paths = []
    for letter in letters:
        fig, ax = _fig()
        draw = bar_panel if as_bars else line_panel
        kw = {} if as_bars else {"marker": ".", "ms": 3}
        draw(ax, cols, _eq(cols, "series", letter), "la_star", y,
             ("mu",), lambda k: f"mu={k[0]:g}", **kw)
        axis = cols["axis"][_eq(cols, "series", letter)][0]
        ax.set_title(f"panel {letter}: axis {axis}")
        paths.append(save(fig, _panel_path(out, letter)))
    return paths


def render_fig2bc(cols, fields, out):
    return _la_panels(cols, out, "prob", ("b", "c"), as_bars=True)


def render_fig2de(cols, fields, out):
    return _la_panels(cols, out, "fq_density", ("d", "e"), as_bars=False)


def render_fig2f(cols, fields, out):
    fig, ax = _fig()
    line_panel(ax, cols, np.ones(len(cols["series"]), bool), "mu",
               "fq_density", ("series",), lambda k: k[0].split(":", 1)[1])
    ax.set_title("conditional vs unsplit baseline")
    return [save(fig, out)]


def render_fig3abd(cols, fields, out):
    paths = _la_panels(cols, out, "prob", ("a",), as_bars=True)
    paths += _la_panels(cols, out, "fq_density", ("b",), as_bars=False)
    fig, ax = _fig()
    line_panel(ax, cols, _starts(cols, "d:"), "mu", "fq_density",
               ("series",), lambda k: k[0].split(":", 1)[1])
    paths.append(save(fig, _panel_path(out, "d")))
    return paths


def render_fig4(cols, fields, out):
    paths = []
    for letter, x in (("a", "sigma"), ("c", "sigma")):
        fig, ax = _fig()
        line_panel(ax, cols, _starts(cols, f"{letter}:"), x, "fq_density",
                   ("series", "mu"),
                   lambda k: f"{k[0].split(':', 1)[1]} mu={k[1]:g}")
        paths.append(save(fig, _panel_path(out, letter)))
    for letter in ("b", "d"):
        fig, ax = _fig()
        line_panel(ax, cols, _starts(cols, f"{letter}:"), "mu", "fq_density",
                   ("series", "sigma"),
                   lambda k: f"{k[0].split(':', 1)[1]} sigma={k[1]:g}")
        paths.append(save(fig, _panel_path(out, letter)))
    return paths


def render_fig5(cols, fields, out):
    if not fields:
        raise PresetError("fig5 needs the companion .field.*.csv inputs")
    las = sorted({la for la, _, _ in fields})
    sigmas = sorted({s for _, _, s in fields})
    fig, axes = plt.subplots(len(las), len(sigmas),
                             figsize=(1.9 * len(sigmas), 2.1 * len(las)),
                             constrained_layout=True, squeeze=False)
    for r, la in enumerate(las):
        for c, sigma in enumerate(sigmas):
            key = next(k for k in fields if k[0] == la and k[2] == sigma)
            theta, phi, w = read_field(fields[key])
            wigner_disc(axes[r][c], theta, phi, w)
            axes[r][c].set_title(f"l_A={la}, sigma={sigma:g}", fontsize=7)
    paths = [save(fig, _panel_path(out, "a"))]
    fig, ax = _fig()
    line_panel(ax, cols, _starts(cols, "b:"), "sigma", "negativity",
               ("series",), lambda k: k[0].split(":", 1)[1], marker=".")
    ax.set_title("fringe negativity washing out with read-out noise")
    paths.append(save(fig, _panel_path(out, "b")))
    return paths


def render_s1b(cols, fields, out):
    fig, ax = _fig()
    line_panel(ax, cols, np.ones(len(cols["series"]), bool), "mu",
               "fq_density", ("series",), lambda k: k[0])
    ax.set_title("unsplit baseline over a full twisting period")
    return [save(fig, out)]


def render_s3(cols, fields, out):
    paths = []
    for letter in ("a", "b"):
        fig, ax = _fig()
        mask = _starts(cols, f"{letter}:") | _eq(cols, "series", "oat")
        line_panel(ax, cols, mask, "mu", "fq_density", ("series",),
                   lambda k: k[0].split(":", 1)[-1])
        paths.append(save(fig, _panel_path(out, letter)))
    return paths


RENDERERS = {
    "fig2a": render_fig2a,
    "fig2bc": render_fig2bc,
    "fig2de": render_fig2de,
    "fig2f": render_fig2f,
    "fig3abd": render_fig3abd,
    "fig4": render_fig4,
    "fig5": render_fig5,
    "s1b": render_s1b,
    "s3": render_s3,
}
