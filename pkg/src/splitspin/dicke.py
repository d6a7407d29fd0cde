"""Dicke-basis linear algebra for symmetric N-spin systems.

Conventions used throughout the package:

* basis index k = number of excitations, ascending 0 .. n ("all down" to "all up");
* sz|k> = (k - n/2)|k>, so sz = diag(-j, ..., +j) with j = n/2;
* rotations are z-y-z Euler with third angle 0:  D(phi, theta, 0) =
  exp(-i phi sz) exp(-i theta sy).  Global phases of rotated basis vectors are
  convention-dependent; every equality contract downstream is stated up to a
  global phase (overlap modulus).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import eval_jacobi, gammaln


def log_binomial(n, k):
    """ln C(n, k); -inf for k outside [0, n]."""
    if k < 0 or k > n:
        return -np.inf
    return float(gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1))


@dataclass
class DickeState:
    """Pure symmetric n-spin state: complex amplitudes over excitation number k."""

    n: int
    amp: np.ndarray

    def __post_init__(self):
        self.amp = np.asarray(self.amp, dtype=complex)
        if self.amp.shape != (self.n + 1,):
            raise ValueError(f"amplitude vector must have length n+1 = {self.n + 1}")

    def norm(self):
        return float(np.linalg.norm(self.amp))

    def normalized(self):
        nrm = self.norm()
        if nrm == 0.0:
            raise ValueError("cannot normalize zero vector")
        return DickeState(self.n, self.amp / nrm)

    def overlap(self, other):
        """<self|other> (states must share n)."""
        if other.n != self.n:
            raise ValueError("particle numbers differ")
        return complex(np.vdot(self.amp, other.amp))

    def projector(self):
        return np.outer(self.amp, self.amp.conj())


@dataclass
class RotationSpec:
    """Measurement axis as a unit vector: polar angle theta in [0, pi],
    azimuth phi in [0, 2pi)."""

    theta: float
    phi: float

    def __post_init__(self):
        if not (0.0 <= self.theta <= np.pi + 1e-12):
            raise ValueError("polar angle must lie in [0, pi]")
        self.phi = float(self.phi) % (2 * np.pi)

    @classmethod
    def z_axis(cls):
        return cls(0.0, 0.0)

    @classmethod
    def x_axis(cls):
        return cls(np.pi / 2, 0.0)

    @classmethod
    def from_vector(cls, v):
        v = np.asarray(v, dtype=float)
        r = np.linalg.norm(v)
        if r == 0:
            raise ValueError("zero direction vector")
        v = v / r
        theta = float(np.arccos(np.clip(v[2], -1.0, 1.0)))
        phi = float(np.arctan2(v[1], v[0]))
        return cls(theta, phi)

    def unit_vector(self):
        st = np.sin(self.theta)
        return np.array([st * np.cos(self.phi), st * np.sin(self.phi), np.cos(self.theta)])


class SpinOperatorTriple(NamedTuple):
    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray


def collective_spin_ops(n):
    """Collective spin matrices (sx, sy, sz) in the Dicke basis for j = n/2.

    s+|k> = sqrt((j - m)(j + m + 1)) |k+1> with m = k - n/2; sz diagonal.
    """
    if n == 0:
        raise ValueError("empty ensemble")
    j = n / 2.0
    m = np.arange(n + 1) - j
    up = np.sqrt((j - m[:-1]) * (j + m[:-1] + 1.0))
    sp = np.zeros((n + 1, n + 1), dtype=complex)
    sp[np.arange(1, n + 1), np.arange(n)] = up
    sm = sp.conj().T
    sx = (sp + sm) / 2.0
    sy = (sp - sm) / 2.0j
    sz = np.diag(m.astype(complex))
    return SpinOperatorTriple(sx, sy, sz)


def _wigner_d_element(j, mp, m, beta):
    """d^j_{m',m}(beta) via the Jacobi-polynomial closed form.

    Binomial prefactors are kept in log space and the sin/cos powers carry
    explicit signs, so the element neither overflows nor loses sign for any
    angle; validated against exp(-i beta sy) up to j = 100.
    """
    k = min(j + m, j - m, j + mp, j - mp)
    if k == j + m:
        a, lam = mp - m, mp - m
    elif k == j - m:
        a, lam = m - mp, 0
    elif k == j + mp:
        a, lam = m - mp, 0
    else:
        a, lam = mp - m, mp - m
    a = int(round(a))
    k = int(round(k))
    b = int(round(2 * j - 2 * k - a))
    sign = -1.0 if int(round(lam)) % 2 else 1.0
    s = math.sin(beta / 2.0)
    c = math.cos(beta / 2.0)
    pk = float(eval_jacobi(k, a, b, math.cos(beta)))
    if pk == 0.0:
        return 0.0
    log_mag = 0.5 * (log_binomial(2 * j - k, k + a) - log_binomial(k + b, b))
    sign *= math.copysign(1.0, pk)
    log_mag += math.log(abs(pk))
    if a > 0:
        if s == 0.0:
            return 0.0
        sign *= math.copysign(1.0, s) ** a
        log_mag += a * math.log(abs(s))
    if b > 0:
        if c == 0.0:
            return 0.0
        sign *= math.copysign(1.0, c) ** b
        log_mag += b * math.log(abs(c))
    return sign * math.exp(log_mag)


def _check_half_integer(j, name="j"):
    if not np.isfinite(j) or abs(2 * j - round(2 * j)) > 1e-9 or j < 0:
        raise ValueError(f"{name} must be a non-negative half-integer")


def wigner_d_matrix(j, beta):
    """Small Wigner d-matrix d^j_{m',m}(beta), rows m' and columns m ascending
    from -j to +j.  Convention: d^{1/2}_{1/2,1/2} = cos(beta/2),
    d^{1/2}_{1/2,-1/2} = -sin(beta/2), i.e. d = exp(-i beta sy) restricted to spin j.
    """
    _check_half_integer(j)
    if not np.isfinite(beta):
        raise ValueError("angle must be finite")
    dim = int(round(2 * j)) + 1
    out = np.empty((dim, dim))
    for r in range(dim):
        for c in range(dim):
            out[r, c] = _wigner_d_element(j, r - j, c - j, beta)
    return out


def _wigner_d_column(j, m, beta):
    """Column of d^j at fixed second index m: d^j_{m', m}(beta) over all m'."""
    dim = int(round(2 * j)) + 1
    return np.array([_wigner_d_element(j, mp, m, beta) for mp in (np.arange(dim) - j)])


def rotated_dicke_bra(n, l, direction):
    """<l| in the basis rotated so the z-axis maps onto `direction`.

    The rotated kets are |l>_dir = D(phi, theta, 0)|l> with
    D = exp(-i phi sz) exp(-i theta sy); the returned row vector holds
    <l|_dir expanded over the standard basis, i.e. conj(D[k, l]) for each k.
    """
    if not (0 <= l <= n):
        raise ValueError("excitation index out of range")
    j = n / 2.0
    col = _wigner_d_column(j, l - j, direction.theta)
    m = np.arange(n + 1) - j
    # conj(exp(-i phi m) * d_{m, m_l}) = exp(+i phi m) * d
    return np.exp(1j * direction.phi * m) * col


def rotation_matrix(n, direction):
    """Dense (n+1)x(n+1) rotation D(phi, theta, 0) mapping z onto `direction`."""
    j = n / 2.0
    d = wigner_d_matrix(j, direction.theta)
    m = np.arange(n + 1) - j
    return np.exp(-1j * direction.phi * m)[:, None] * d


@dataclass
class SpinDensity:
    """Mixed state of a fixed-n ensemble: Hermitian PSD matrix, unit trace."""

    n: int
    rho: np.ndarray

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=complex)
        if self.rho.shape != (self.n + 1, self.n + 1):
            raise ValueError("density matrix shape must be (n+1, n+1)")
        self._spectral = None

    @classmethod
    def from_pure(cls, state):
        return cls(state.n, state.projector())

    def validate(self, herm_tol=1e-12, trace_tol=1e-10, psd_tol=1e-10):
        if np.max(np.abs(self.rho - self.rho.conj().T)) > herm_tol:
            raise ValueError("invalid density")
        if abs(np.trace(self.rho).real - 1.0) > trace_tol:
            raise ValueError("invalid density")
        if self.eig()[0][0] < -psd_tol:
            raise ValueError("invalid density")
        return self

    def eig(self):
        """Cached spectral decomposition (ascending eigenvalues)."""
        if self._spectral is None:
            w, v = np.linalg.eigh((self.rho + self.rho.conj().T) / 2.0)
            self._spectral = (w, v)
        return self._spectral


def state_to_obj(state, **extra):
    """JSON-ready dict {"n", "amp": [[re, im], ...], **extra}.

    Floats are emitted through repr (json default), which round-trips doubles
    bit-exactly.
    """
    obj = {"n": int(state.n)}
    obj.update(extra)
    obj["amp"] = [[float(a.real), float(a.imag)] for a in state.amp]
    return obj


def state_from_obj(obj):
    amp = np.array([complex(re, im) for re, im in obj["amp"]])
    return DickeState(int(obj["n"]), amp)


def dump_state(state, path, **extra):
    with open(path, "w") as fh:
        json.dump(state_to_obj(state, **extra), fh)


def load_state(path):
    with open(path) as fh:
        return state_from_obj(json.load(fh))
