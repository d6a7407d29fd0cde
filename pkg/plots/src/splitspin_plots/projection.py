"""Orthographic view of a spherical field, seen from the +x axis.

The herald axis is x, so cat-state fringes live in the y-z plane; the +x
viewpoint puts them face-on.  Screen coordinates: horizontal = y,
vertical = z, visible hemisphere x > 0.
"""

import numpy as np


def orthographic_points(theta, phi):
    """Screen (u, v) and visibility for a theta x phi grid, flattened."""
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    x = np.sin(tt) * np.cos(pp)
    u = np.sin(tt) * np.sin(pp)
    v = np.cos(tt)
    return u.ravel(), v.ravel(), (x > 0.0).ravel()


def project_field(theta, phi, w):
    """(u, v, values) for the visible hemisphere."""
    u, v, vis = orthographic_points(theta, phi)
    return u[vis], v[vis], np.asarray(w).ravel()[vis]
