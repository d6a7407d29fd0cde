"""One-axis-twisted states, the squeezing frame, and 50:50 mode splitting.

The OAT state of n spins after twisting strength mu = 2*chi*t is

    |psi(mu)> = 2^(-n/2) sum_k sqrt(C(n,k)) exp(-i (mu/2) (n/2 - k)^2) |k>,

i.e. the +x coherent state propagated by the diagonal phase exp(-i (mu/2) sz^2).
Splitting through a balanced beam splitter distributes the n spins binomially
over two modes A and B while the twisting phase stays a function of the total
excitation number k_A + k_B only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dicke import DickeState, log_binomial

LN2 = np.log(2.0)


@dataclass
class OATParameters:
    n: int
    mu: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one particle")
        if not np.isfinite(self.mu):
            raise ValueError("twisting strength must be finite")


def oat_state(p):
    """amp[k] = 2^(-n/2) sqrt(C(n,k)) exp(-i (mu/2) (n/2 - k)^2)."""
    n, mu = p.n, p.mu
    k = np.arange(n + 1)
    logb = np.array([log_binomial(n, ki) for ki in k])
    mag = np.exp(0.5 * logb - 0.5 * n * LN2)
    phase = np.exp(-1j * (mu / 2.0) * (n / 2.0 - k) ** 2)
    return DickeState(n, mag * phase)


def theta_star(p):
    """Squeezing-frame angle: theta* = (1/2) atan2(4 sin(mu/2) cos^(n-2)(mu/2),
    1 - cos^(n-2)(mu)).

    The two-argument arctangent selects the branch that minimizes the collective
    spin variance along z' = -sin(theta*) y + cos(theta*) z (checked against a
    dense grid in the tests).  For the degenerate mu -> 0 limit both arguments
    vanish and the limiting value pi/4 is returned.  The result lies in
    (0, pi/2] whenever n is even or mu <= pi; for odd n with mu in (pi, 2pi) the
    true minimizer falls in (3pi/4, pi) and is returned as-is (mod pi) rather
    than being forced onto the anti-squeezing branch.
    """
    n, mu = p.n, p.mu
    if n < 2:
        raise ValueError("frame undefined")
    num = 4.0 * np.sin(mu / 2.0) * np.cos(mu / 2.0) ** (n - 2)
    den = 1.0 - np.cos(mu) ** (n - 2)
    if abs(num) < 1e-300 and abs(den) < 1e-300:
        return np.pi / 4.0
    return float(0.5 * np.arctan2(num, den)) % np.pi


@dataclass
class MeasurementFrame:
    """Squeezing frame of the OAT state: x' = x, z' (squeezed), y' (anti-squeezed),
    plus an in-plane angle theta_A for measurement directions
    sin(theta_A) y' + cos(theta_A) z'."""

    theta_star: float
    theta_a: float = 0.0
    x_axis: np.ndarray = field(init=False)
    y_axis: np.ndarray = field(init=False)
    z_axis: np.ndarray = field(init=False)

    def __post_init__(self):
        ts = self.theta_star
        self.x_axis = np.array([1.0, 0.0, 0.0])
        self.z_axis = np.array([0.0, -np.sin(ts), np.cos(ts)])
        self.y_axis = np.array([0.0, np.cos(ts), np.sin(ts)])

    @classmethod
    def for_parameters(cls, p, theta_a=0.0):
        return cls(theta_star(p), theta_a)

    def measurement_vector(self):
        return np.sin(self.theta_a) * self.y_axis + np.cos(self.theta_a) * self.z_axis


@dataclass
class SplitState:
    """Balanced split of an OAT state over modes A and B.

    amp3[nA][kA][kB] = 2^(-n) sqrt(C(n,nA) C(nA,kA) C(nB,kB))
                       * exp(-i (mu/2) (n/2 - kA - kB)^2),  nB = n - nA,

    stored as one (nA+1) x (nB+1) complex matrix per nA (ragged).
    """

    n: int
    mu: float
    amp3: list

    def block(self, n_a):
        return self.amp3[n_a]


def split_state(p):
    n, mu = p.n, p.mu
    blocks = []
    for n_a in range(n + 1):
        n_b = n - n_a
        k_a = np.arange(n_a + 1)
        k_b = np.arange(n_b + 1)
        log_mag = 0.5 * (
            log_binomial(n, n_a)
            + np.array([log_binomial(n_a, k) for k in k_a])[:, None]
            + np.array([log_binomial(n_b, k) for k in k_b])[None, :]
        ) - n * LN2
        tot = n / 2.0 - (k_a[:, None] + k_b[None, :])
        blocks.append(np.exp(log_mag) * np.exp(-1j * (mu / 2.0) * tot**2))
    return SplitState(n, mu, blocks)


def splitting_distribution(n):
    """Mode-occupation probabilities p(N_A) = 2^(-n) C(n, N_A)."""
    return np.exp([log_binomial(n, k) - n * LN2 for k in range(n + 1)])
