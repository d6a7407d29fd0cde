"""Conditional measurements on mode A and the heralded states of mode B.

Measuring (N_A = nA, l_A along direction n) on the split state leaves mode B in

    |phi_B> proportional to sum_{k_A} amp3[nA][k_A][k_B] <l_A|_{n, nA}|k_A>,

with joint probability p(l_A, N_A | n) equal to the squared norm of the
unnormalized vector.  Dividing by the binomial weight p(N_A) gives the
conditional outcome distribution p_{N_A,n}(l_A).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dicke import DickeState, RotationSpec, log_binomial, rotated_dicke_bra
from .oat import LN2, splitting_distribution

ZERO_PROB_CUTOFF = 1e-14


@dataclass
class ConditionalOutcome:
    n_a: int
    l_a: int
    direction: RotationSpec
    prob: float           # joint p(l_A, N_A | n)
    state_b: DickeState   # None when prob is below the zero-probability cutoff

    @property
    def n_b(self):
        return self.state_b.n if self.state_b is not None else None


def _project(split, n_a, bra):
    """Unnormalized B amplitudes: bra (over k_A) contracted with the nA block."""
    return bra @ split.block(n_a)


def condition(split, n_a, l_a, direction):
    if not (0 <= n_a <= split.n):
        raise ValueError("mode-A particle number out of range")
    if not (0 <= l_a <= n_a):
        raise ValueError("excitation index out of range")
    bra = rotated_dicke_bra(n_a, l_a, direction)
    raw = _project(split, n_a, bra)
    prob = float(np.vdot(raw, raw).real)
    if prob < ZERO_PROB_CUTOFF:
        raise ValueError("outcome unresolvable: zero-probability branch")
    state_b = DickeState(split.n - n_a, raw / np.sqrt(prob))
    return ConditionalOutcome(n_a, l_a, direction, prob, state_b)


@dataclass
class OutcomeTable:
    """All nA+1 outcomes for a fixed (N_A, direction).

    `outcomes[l]` holds the joint probability and heralded state (state None for
    zero-probability branches); `p_given_na[l]` is the normalized per-N_A
    distribution p_{N_A,n}(l_A); `p_na` the binomial weight of the block.
    """

    n_a: int
    direction: RotationSpec
    outcomes: list
    p_na: float

    @property
    def probs(self):
        return np.array([o.prob for o in self.outcomes])

    @property
    def p_given_na(self):
        return self.probs / self.p_na


def outcome_table(split, n_a, direction):
    if not (0 <= n_a <= split.n):
        raise ValueError("mode-A particle number out of range")
    block = split.block(n_a)
    rows = []
    for l_a in range(n_a + 1):
        bra = rotated_dicke_bra(n_a, l_a, direction)
        raw = bra @ block
        prob = float(np.vdot(raw, raw).real)
        if prob < ZERO_PROB_CUTOFF:
            rows.append(ConditionalOutcome(n_a, l_a, direction, prob, None))
        else:
            state = DickeState(split.n - n_a, raw / np.sqrt(prob))
            rows.append(ConditionalOutcome(n_a, l_a, direction, prob, state))
    p_na = float(splitting_distribution(split.n)[n_a])
    return OutcomeTable(n_a, direction, rows, p_na)


def sz_conditional_closed_form(p, n_a, l_a):
    """Heralded B-state for an S_z measurement on A, in closed form:

    amp[k_B] = 2^(-n_B/2) sqrt(C(n_B, k_B)) exp(-i (mu/2) (n/2 - l_A - k_B)^2).

    A z-measurement only pins the excitation split, so B remains an OAT-like
    state whose phase is re-centered by l_A (a twisted state rotated about z).
    """
    if not (0 <= l_a <= n_a <= p.n):
        raise ValueError("herald indices out of range")
    n_b = p.n - n_a
    k_b = np.arange(n_b + 1)
    mag = np.exp(0.5 * np.array([log_binomial(n_b, k) for k in k_b]) - 0.5 * n_b * LN2)
    phase = np.exp(-1j * (p.mu / 2.0) * (p.n / 2.0 - l_a - k_b) ** 2)
    return DickeState(n_b, mag * phase)
