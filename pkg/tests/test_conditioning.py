"""Heralded-state extraction checked against dense projective measurement.

The projector oracle rotates Dicke projectors with matrix exponentials and
contracts the full two-mode amplitude tensor, no shared code with the bra
contraction under test.
"""

import math

import numpy as np
import pytest
from scipy.linalg import expm

from splitspin.conditioning import (
    ZERO_PROB_CUTOFF,
    condition,
    outcome_table,
    sz_conditional_closed_form,
)
from splitspin.dicke import RotationSpec, collective_spin_ops, rotated_dicke_bra
from splitspin.oat import OATParameters, split_state, splitting_distribution


# ------------------------------------------------------------------ oracles

def dense_heralded_state(split, n_a, l_a, direction):
    """(prob, normalized B amplitudes) via an expm-rotated bra."""
    n_b = split.n - n_a
    if n_a == 0:
        bra = np.ones(1, dtype=complex)
    else:
        ops = collective_spin_ops(n_a)
        rot = expm(-1j * direction.phi * ops.sz) @ expm(-1j * direction.theta * ops.sy)
        bra = rot[:, l_a].conj()
    raw = bra @ split.block(n_a)
    prob = float(np.vdot(raw, raw).real)
    if prob == 0.0:
        return 0.0, np.zeros(n_b + 1, dtype=complex)
    return prob, raw / math.sqrt(prob)


# ------------------------------------------------------------------- tests

def test_unit_herald_on_polarized_state():
    # no twisting: +x coherent state, measured along +x, always gives l_A = N_A
    p = OATParameters(8, 0.0)
    split = split_state(p)
    direction = RotationSpec.x_axis()
    out = condition(split, 3, 3, direction)
    assert out.prob == pytest.approx(splitting_distribution(8)[3], abs=1e-13)
    want = np.array([math.sqrt(math.comb(5, k)) / 2 ** 2.5 for k in range(6)])
    fid = abs(np.vdot(rotate_to_x(5), out.state_b.amp))
    assert fid == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(np.abs(out.state_b.amp) - want)) < 1e-12


def rotate_to_x(n):
    ops = collective_spin_ops(n)
    top = np.zeros(n + 1, dtype=complex)
    top[n] = 1.0
    return expm(-1j * (math.pi / 2) * ops.sy) @ top


def test_matches_dense_projector_oracle():
    rng = np.random.default_rng(5)
    for n in [4, 8]:
        for mu in [0.3, 2.2]:
            split = split_state(OATParameters(n, mu))
            for _ in range(4):
                d = RotationSpec(rng.uniform(0.1, math.pi - 0.1),
                                 rng.uniform(0, 2 * math.pi))
                n_a = int(rng.integers(1, n))
                l_a = int(rng.integers(0, n_a + 1))
                prob, amp = dense_heralded_state(split, n_a, l_a, d)
                if prob < ZERO_PROB_CUTOFF:
                    continue
                out = condition(split, n_a, l_a, d)
                assert out.prob == pytest.approx(prob, rel=1e-11)
                overlap = abs(np.vdot(amp, out.state_b.amp))
                assert overlap >= 1 - 1e-11


def test_closed_form_for_z_measurements():
    for mu in [0.1, 0.5, math.pi]:
        p = OATParameters(10, mu)
        split = split_state(p)
        z = RotationSpec.z_axis()
        for n_a in range(1, 10):
            for l_a in range(n_a + 1):
                out = condition(split, n_a, l_a, z)
                want = sz_conditional_closed_form(p, n_a, l_a)
                overlap = abs(np.vdot(want.amp, out.state_b.amp))
                assert overlap >= 1 - 1e-12


def test_z_herald_probability_is_binomial():
    # z measurement cannot see twisting phases: p(l_A | N_A) stays binomial
    p = OATParameters(9, 1.4)
    split = split_state(p)
    table = outcome_table(split, 4, RotationSpec.z_axis())
    want = np.array([math.comb(4, l) / 16 for l in range(5)])
    assert np.max(np.abs(table.p_given_na - want)) < 1e-12


def test_outcome_table_completeness():
    rng = np.random.default_rng(19)
    for n in [5, 9]:
        split = split_state(OATParameters(n, 0.7))
        for _ in range(3):
            d = RotationSpec(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi))
            total = 0.0
            for n_a in range(n + 1):
                table = outcome_table(split, n_a, d)
                block_mass = float(table.probs.sum())
                assert block_mass == pytest.approx(table.p_na, abs=1e-12)
                assert float(table.p_given_na.sum()) == pytest.approx(1.0, abs=1e-12)
                total += block_mass
            assert total == pytest.approx(1.0, abs=1e-11)


def test_zero_probability_branch_rejected():
    # polarized along +x, so l_A < N_A along x is unreachable
    split = split_state(OATParameters(60, 0.0))
    with pytest.raises(ValueError, match="outcome unresolvable"):
        condition(split, 30, 0, RotationSpec.x_axis())


def test_range_checks():
    split = split_state(OATParameters(6, 0.2))
    d = RotationSpec.z_axis()
    with pytest.raises(ValueError):
        condition(split, 7, 0, d)
    with pytest.raises(ValueError):
        condition(split, 3, 4, d)


def test_conditional_outcome_fields():
    split = split_state(OATParameters(6, 0.4))
    out = condition(split, 2, 1, RotationSpec.x_axis())
    assert out.n_b == 4
    assert out.state_b.n == 4
    assert abs(np.linalg.norm(out.state_b.amp) - 1.0) < 1e-12
