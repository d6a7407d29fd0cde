"""Number fluctuations and Gaussian detection noise: every averaged QFI.

Two imperfections are modeled on top of the ideal heralding protocol:

* binomial fluctuations of the mode-A particle number N_A from the 50:50 split,
  handled as direct sums over fixed-N_B blocks (collective spin preserves
  particle number, so Gamma_Q adds blockwise);
* Gaussian read-out noise of width sigma on the measured excitation number l_A
  (and optionally on N_A itself), which replaces pure heralded states by
  mixtures of neighboring heralds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .dicke import RotationSpec, SpinDensity
from .conditioning import ZERO_PROB_CUTOFF, outcome_table
from .metrology import BlockMixture, qfi_block_mixture, qfi_mixed, qfi_pure
from .oat import MeasurementFrame, split_state, splitting_distribution


@dataclass
class DetectionNoise:
    """Gaussian read-out error on excitation counts.

    sigma applies to l_A; sigma_number (defaulting to sigma) applies to N_A
    when number read-out noise is requested.  The paper uses a single width for
    both; independent values are exposed because the intent is unstated.
    """

    sigma: float
    sigma_number: float = None

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("noise width must be non-negative")
        if self.sigma_number is None:
            self.sigma_number = self.sigma
        elif self.sigma_number < 0:
            raise ValueError("noise width must be non-negative")


@dataclass
class HeraldRule:
    """Post-selected outcome l_A as a function of N_A, clamped to [0, N_A]."""

    fn: Callable[[int], int]
    label: str = "custom"

    def __call__(self, n_a):
        l = int(self.fn(n_a))
        return min(max(l, 0), n_a)

    @classmethod
    def half_ceil(cls):
        return cls(lambda n_a: math.ceil(n_a / 2), "ceil(NA/2)")

    @classmethod
    def half_floor(cls):
        return cls(lambda n_a: n_a // 2, "NA/2")

    @classmethod
    def offset(cls, d):
        return cls(lambda n_a: n_a + d, f"NA{d:+d}")

    @classmethod
    def fixed(cls, l):
        return cls(lambda n_a: l, f"l={l}")


AxisLike = Union[str, float, RotationSpec]


def resolve_axis(axis, p):
    """Turn an axis policy into a RotationSpec.

    Accepted: a RotationSpec (used verbatim); "x" / "z"; "yprime" / "zprime"
    (anti-squeezing / squeezing axes of the frame for parameters p); or a float,
    read as the in-plane angle theta_A measured from z' toward y'.
    """
    if isinstance(axis, RotationSpec):
        return axis
    if isinstance(axis, str):
        if axis == "x":
            return RotationSpec.x_axis()
        if axis == "z":
            return RotationSpec.z_axis()
        frame = MeasurementFrame.for_parameters(p)
        if axis == "zprime":
            return RotationSpec.from_vector(frame.z_axis)
        if axis == "yprime":
            return RotationSpec.from_vector(frame.y_axis)
        raise ValueError(f"unknown axis policy {axis!r}")
    frame = MeasurementFrame.for_parameters(p, theta_a=float(axis))
    return RotationSpec.from_vector(frame.measurement_vector())


def detection_weights(l_a_star, n_a, noise):
    """p(true l_A | observed l_A*): Gaussian truncated to [0, n_a], renormalized.

    sigma = 0 degenerates to the indicator at l_A*.
    """
    if not (0 <= l_a_star <= n_a):
        raise ValueError("observed value out of range")
    l = np.arange(n_a + 1)
    if noise.sigma == 0.0:
        w = (l == l_a_star).astype(float)
        return w
    w = np.exp(-((l_a_star - l) ** 2) / (2.0 * noise.sigma**2))
    return w / w.sum()


def _gauss_factor(center, values, sigma):
    """Unnormalized Gaussian factors exp(-(center - v)^2 / 2 sigma^2); indicator
    at sigma = 0.  Constant prefactors cancel in the global normalization."""
    values = np.asarray(values)
    if sigma == 0.0:
        return (values == center).astype(float)
    return np.exp(-((center - values) ** 2) / (2.0 * sigma**2))


def noisy_conditional_state(split, n_a, l_a_star, direction, noise):
    """Eq.-(8)-style mixture: conditional pure states weighted by occurrence
    probability times detection weight, trace-normalized."""
    table = outcome_table(split, n_a, direction)
    gauss = _gauss_factor(l_a_star, np.arange(n_a + 1), noise.sigma)
    resolvable = np.array([o.state_b is not None for o in table.outcomes])
    weights = np.where(resolvable, table.p_given_na * gauss, 0.0)
    total = weights.sum()
    if total < 1e-14:
        raise ValueError("no herald mass: all outcome weights vanish")
    n_b = split.n - n_a
    rho = np.zeros((n_b + 1, n_b + 1), dtype=complex)
    for l_a, w in enumerate(weights):
        if w <= 0.0:
            continue
        rho += (w / total) * table.outcomes[l_a].state_b.projector()
    return SpinDensity(n_b, rho)


def avg_qfi_detection(split, n_a, l_a_star, direction, noise):
    """Eq. (7): QFI density of the detection-noise mixture at fixed N_A."""
    rho = noisy_conditional_state(split, n_a, l_a_star, direction, noise)
    n_b = split.n - n_a
    if n_b == 0:
        raise ValueError("empty probe mode")
    return qfi_mixed(rho).fq / n_b


def avg_qfi_number_fluct(p, rule, axis):
    """Eq. (6): binomial average of pure-herald QFI densities over N_B.

    Blocks with N_B = 0 or a herald below the probability cutoff are excluded
    and the remaining weights renormalized.
    """
    split = split_state(p)
    direction = resolve_axis(axis, p)
    p_na = splitting_distribution(p.n)
    acc = 0.0
    wsum = 0.0
    for n_a in range(p.n + 1):
        n_b = p.n - n_a
        if n_b == 0:
            continue
        table = outcome_table(split, n_a, direction)
        out = table.outcomes[rule(n_a)]
        if out.state_b is None:
            continue
        acc += p_na[n_a] * qfi_pure(out.state_b).fq / n_b
        wsum += p_na[n_a]
    if wsum == 0.0:
        raise ValueError("no herald mass: every block has zero probability")
    return acc / wsum


def _pure_block_mixture(p, rule, direction):
    """Blocks of pure heralded states weighted by p(N_A), for Eq. (S9)."""
    split = split_state(p)
    p_na = splitting_distribution(p.n)
    weights, blocks = [], []
    for n_a in range(p.n + 1):
        n_b = p.n - n_a
        if n_b == 0:
            continue
        table = outcome_table(split, n_a, direction)
        out = table.outcomes[rule(n_a)]
        if out.state_b is None:
            continue
        weights.append(p_na[n_a])
        blocks.append(SpinDensity.from_pure(out.state_b))
    if not blocks:
        raise ValueError("no herald mass: every block has zero probability")
    weights = np.array(weights)
    return BlockMixture(weights / weights.sum(), blocks)


def avg_qfi_joint_block(p, rule, axis):
    """Eq. (S9): QFI density of the direct sum of heralded blocks over N_B."""
    direction = resolve_axis(axis, p)
    mixture = _pure_block_mixture(p, rule, direction)
    return qfi_block_mixture(mixture).density


def avg_qfi_full(p, rule, axis, noise, n_a_star=None):
    """Eqs. (S11)/(S12): QFI density of the direct sum over N_A of detection-noise
    mixtures.

    Per block, the inner l_A sum uses raw Gaussian factors (the paper applies a
    single global normalization, so blocks carry their herald-probability mass
    p(N_A) * sum_l p(l_A) g(l_A)); with n_a_star given, blocks are additionally
    weighted by the N_A read-out Gaussian.
    """
    split = split_state(p)
    direction = resolve_axis(axis, p)
    p_na = splitting_distribution(p.n)
    g_na = (
        _gauss_factor(n_a_star, np.arange(p.n + 1), noise.sigma_number)
        if n_a_star is not None
        else np.ones(p.n + 1)
    )
    weights, blocks = [], []
    for n_a in range(p.n + 1):
        n_b = p.n - n_a
        outer = p_na[n_a] * g_na[n_a]
        if n_b == 0 or outer <= 0.0:
            continue
        table = outcome_table(split, n_a, direction)
        gauss = _gauss_factor(rule(n_a), np.arange(n_a + 1), noise.sigma)
        inner = table.p_given_na * gauss
        # branches below the joint-probability cutoff carry no state; drop
        # them from the mass so the block density stays normalized
        resolvable = np.array([o.state_b is not None for o in table.outcomes])
        inner = np.where(resolvable, inner, 0.0)
        mass = inner.sum()
        if mass < ZERO_PROB_CUTOFF:
            continue
        rho = np.zeros((n_b + 1, n_b + 1), dtype=complex)
        for l_a, w in enumerate(inner):
            if w <= 0.0:
                continue
            rho += (w / mass) * table.outcomes[l_a].state_b.projector()
        weights.append(outer * mass)
        blocks.append(SpinDensity(n_b, rho))
    if not blocks:
        raise ValueError("no herald mass: every block has zero probability")
    weights = np.array(weights)
    mixture = BlockMixture(weights / weights.sum(), blocks)
    return qfi_block_mixture(mixture).density
