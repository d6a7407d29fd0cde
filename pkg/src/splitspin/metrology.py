"""Quantum Fisher information over the collective-spin generator span.

For a pure state the QFI under rotation exp(-i theta S_n) is 4 Var(S_n);
maximizing over unit vectors n gives F_Q = 4 lambda_max(Gamma) with Gamma the
3x3 symmetrized covariance matrix of (sx, sy, sz).  For mixed states the
spectral form

    [Gamma_Q]_ij = 2 sum_{q_k + q_k' > eps} (q_k - q_k')^2 / (q_k + q_k')
                   <k'|S_i|k><k|S_j|k'>

yields F_Q = lambda_max(Gamma_Q); on a rank-1 density Gamma_Q = 4 Gamma, which
is the normalization adopted here (the factor 4 keeps pure and mixed paths
consistent with F_Q = 4 Var).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dicke import SpinDensity, collective_spin_ops

SPECTRAL_CUTOFF = 1e-12


@dataclass
class QfiResult:
    fq: float
    axis: np.ndarray       # optimal generator direction, coefficients over (sx, sy, sz)
    gamma: np.ndarray      # Gamma (pure input) or Gamma_Q (mixed input)
    density: Optional[float] = None  # fq / mean particle number, for block mixtures


@dataclass
class BlockMixture:
    """Probability-weighted direct sum of fixed-n densities (number fluctuations)."""

    weights: np.ndarray
    blocks: list  # SpinDensity per block

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        if len(self.weights) != len(self.blocks):
            raise ValueError("one weight per block required")
        if len(self.blocks) == 0:
            raise ValueError("empty mixture")
        if abs(self.weights.sum() - 1.0) > 1e-10:
            raise ValueError("block weights must sum to 1")


def covariance_matrix(state):
    """Gamma_ij = (1/2)<S_i S_j + S_j S_i> - <S_i><S_j> for a pure state."""
    ops = collective_spin_ops(state.n)
    psi = state.amp
    applied = [op @ psi for op in ops]
    means = np.array([np.vdot(psi, a).real for a in applied])
    gamma = np.empty((3, 3))
    for i in range(3):
        for j_ in range(i, 3):
            sym = np.vdot(applied[i], applied[j_]).real
            gamma[i, j_] = gamma[j_, i] = sym - means[i] * means[j_]
    return gamma


def _top_eig(gamma):
    w, v = np.linalg.eigh(gamma)
    return float(w[-1]), v[:, -1]


def qfi_pure(state):
    gamma = covariance_matrix(state)
    top, axis = _top_eig(gamma)
    return QfiResult(4.0 * top, axis, gamma)


def gamma_q(rho):
    """The 3x3 Gamma_Q matrix of a SpinDensity (Hermitian part, real symmetric)."""
    rho.validate()
    w, v = rho.eig()
    ops = collective_spin_ops(rho.n)
    # spin operators in the eigenbasis
    a = [v.conj().T @ (op @ v) for op in ops]
    qsum = w[:, None] + w[None, :]
    qdiff = w[:, None] - w[None, :]
    mask = qsum > SPECTRAL_CUTOFF
    weight = np.zeros_like(qsum)
    weight[mask] = qdiff[mask] ** 2 / qsum[mask]
    out = np.empty((3, 3))
    for i in range(3):
        for j_ in range(i, 3):
            val = 2.0 * np.sum(weight * a[i] * a[j_].conj()).real
            out[i, j_] = out[j_, i] = val
    return out


def qfi_mixed(rho):
    gq = gamma_q(rho)
    top, axis = _top_eig(gq)
    return QfiResult(top, axis, gq)


def qfi_block_mixture(mixture):
    """QFI of the direct sum over particle-number blocks.

    Collective spin preserves particle number, so Gamma_Q of the direct sum is
    the weight-scaled sum of per-block Gamma_Q matrices.  The returned density
    divides by the mean particle number sum_b w_b n_b.
    """
    total = np.zeros((3, 3))
    mean_n = 0.0
    for wgt, blk in zip(mixture.weights, mixture.blocks):
        total += wgt * gamma_q(blk)
        mean_n += wgt * blk.n
    top, axis = _top_eig(total)
    density = top / mean_n if mean_n > 0 else 0.0
    return QfiResult(top, axis, total, density=density)


def cramer_rao(fq, v=1):
    """Phase uncertainty bound 1/sqrt(v * F_Q) for v independent measurements."""
    if fq <= 0:
        raise ValueError("no sensitivity")
    if v < 1:
        raise ValueError("need at least one measurement")
    return 1.0 / np.sqrt(v * fq)
