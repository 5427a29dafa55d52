from fractions import Fraction
from math import pi

import numpy as np
import pytest
from hypothesis import given, strategies as st

from supq.constants import normalization_constant
from supq.errors import DimensionError, ParameterError, SingularityError
from supq.hyperbolic import (
    GroupElement,
    InvariantMeasureSpec,
    block_unitary,
    haar_unitary,
    in_disc,
    invariant_density,
    mobius_act,
    mobius_act_transposed,
    random_disc_point,
    random_group_element,
    sample_invariant,
    squeeze_element,
    unsqueeze_element,
    validate_group_element,
)

SHAPES = [(1, 1), (1, 2), (2, 1), (2, 2), (3, 2)]
seeds = st.integers(0, 2**32 - 1)


def test_identity_is_valid():
    assert validate_group_element(GroupElement.identity(2, 3), tol=1e-12)


def test_scaled_identity_is_invalid():
    g = GroupElement.identity(2, 2)
    assert not validate_group_element(GroupElement(2 * g.A, g.B, g.C, g.D))


def test_block_shapes_checked():
    with pytest.raises(DimensionError):
        GroupElement(np.eye(2), np.zeros((2, 2)), np.zeros((1, 2)), np.eye(1))


def test_block_unitary_action(rng):
    # diag(U^+, V^+) sends L to U^+ L V
    U, V = haar_unitary(rng, 2), haar_unitary(rng, 3)
    V[:, 0] /= np.linalg.det(U) * np.linalg.det(V)
    g = block_unitary(U.conj().T, V.conj().T)
    assert validate_group_element(g)
    L = random_disc_point(rng, 2, 3)
    assert np.allclose(mobius_act(g, L), U.conj().T @ L @ V, atol=1e-12)


@pytest.mark.parametrize("p,q", SHAPES)
def test_random_elements_valid_and_reproducible(p, q):
    g = random_group_element(np.random.default_rng(5), p, q, squeeze_scale=2.0)
    h = random_group_element(np.random.default_rng(5), p, q, squeeze_scale=2.0)
    assert validate_group_element(g)
    assert np.array_equal(g.matrix, h.matrix)


def test_zero_squeeze_is_block_diagonal(rng):
    g = random_group_element(rng, 2, 2, squeeze_scale=0.0)
    assert np.allclose(g.B, 0) and np.allclose(g.C, 0)


@pytest.mark.parametrize("p,q", SHAPES)
def test_group_law(p, q):
    rng = np.random.default_rng(p * 10 + q)
    for _ in range(100):
        g1 = random_group_element(rng, p, q)
        g2 = random_group_element(rng, p, q)
        L = random_disc_point(rng, p, q)
        lhs = mobius_act(g1 @ g2, L)
        rhs = mobius_act(g1, mobius_act(g2, L))
        assert np.linalg.norm(lhs - rhs) <= 1e-10 * max(1.0, np.linalg.norm(lhs))


@given(seeds)
def test_action_stays_in_disc(seed):
    rng = np.random.default_rng(seed)
    p, q = SHAPES[seed % len(SHAPES)]
    g = random_group_element(rng, p, q)
    assert in_disc(mobius_act(g, random_disc_point(rng, p, q, 0.9)))


def test_action_stays_in_disc_bulk():
    rng = np.random.default_rng(11)
    for k in range(1000):
        p, q = SHAPES[k % len(SHAPES)]
        g = random_group_element(rng, p, q, squeeze_scale=1.5)
        assert in_disc(mobius_act(g, random_disc_point(rng, p, q, 0.95)))


def test_transposed_formula_is_action_of_transpose(rng):
    g = random_group_element(rng, 2, 2)
    L = random_disc_point(rng, 2, 2)
    assert np.allclose(mobius_act_transposed(g, L), mobius_act(g.transpose(), L))


def test_inverse(rng):
    g = random_group_element(rng, 2, 3)
    assert np.allclose((g @ g.inverse()).matrix, np.eye(5), atol=1e-10)


@pytest.mark.parametrize("p,q", [(1, 1), (2, 2), (2, 3)])
def test_unsqueeze_sends_sigma_to_zero(p, q, rng):
    r = min(p, q)
    sigma = rng.uniform(0, 0.95, size=r)
    S = np.zeros((p, q))
    S[range(r), range(r)] = sigma
    h = unsqueeze_element(sigma, p, q)
    assert validate_group_element(h)
    assert np.allclose(mobius_act(h, S), 0, atol=1e-12)
    assert np.allclose(mobius_act(squeeze_element(np.arctanh(sigma), p, q), np.zeros((p, q))), S)


def test_singular_denominator_detected():
    g = GroupElement(np.eye(1), np.eye(1), np.eye(1), np.eye(1))
    with pytest.raises(SingularityError):
        mobius_act(g, [[-1.0]])


def test_normalization_constants():
    assert normalization_constant(1, 1, 3).coeff == 2 and normalization_constant(1, 1, 3).pi_power == -1
    assert float(normalization_constant(1, 1, 3)) == pytest.approx(2 / pi)
    assert float(normalization_constant(1, 1, 2)) == pytest.approx(1 / pi)
    c = normalization_constant(2, 2, 4)
    assert (c.coeff, c.pi_power) == (Fraction(12), -4)
    with pytest.raises(ParameterError):
        InvariantMeasureSpec(1, 2, 2)


def test_density_at_origin():
    assert invariant_density(InvariantMeasureSpec(1, 1, 3), [[0]]) == pytest.approx(0.636620, abs=1e-6)


def test_sylvester_identity(rng):
    L = random_disc_point(rng, 2, 3)
    a = np.linalg.det(np.eye(2) - L @ L.conj().T)
    b = np.linalg.det(np.eye(3) - L.conj().T @ L)
    assert np.isclose(a, b)


@pytest.mark.parametrize("p,q,n", [(1, 1, 3), (1, 2, 4), (2, 2, 5)])
def test_sampler_reproduces_vacuum_norm(p, q, n):
    # E[w |<0|L,n>|^2] = <0|0> = 1; a proposal of order n + 2 makes it nontrivial
    spec = InvariantMeasureSpec(p, q, n)
    rng = np.random.default_rng(3)
    Ls, ws = sample_invariant(rng, spec, proposal_order=n + 2, size=100_000)
    assert np.all(ws >= 0)
    det = np.real(np.linalg.det(np.eye(p) - Ls @ np.conj(np.swapaxes(Ls, 1, 2))))
    vals = ws * det ** n
    se = vals.std(ddof=1) / np.sqrt(len(vals))
    assert abs(vals.mean() - 1) <= 3 * se


def test_sampler_rejects_small_order():
    with pytest.raises(ParameterError):
        sample_invariant(np.random.default_rng(0), InvariantMeasureSpec(1, 1, 3), proposal_order=1)


def test_measure_invariance_weak_form():
    # compactly supported bump f, f o g against f under mu_{1,2,3}
    p, q, n = 1, 2, 3
    spec = InvariantMeasureSpec(p, q, n)
    rng = np.random.default_rng(17)
    g = random_group_element(rng, p, q, squeeze_scale=0.3)
    f = lambda L: np.clip(1 - np.linalg.norm(L) ** 2 / 0.5, 0, None) ** 2
    Ls, ws = sample_invariant(rng, spec, proposal_order=p + q, size=60_000)
    a = ws * np.array([f(L) for L in Ls])
    b = ws * np.array([f(mobius_act(g, L)) for L in Ls])
    se = np.sqrt(a.var() / len(a) + b.var() / len(b))
    assert abs(a.mean() - b.mean()) <= 3 * se
