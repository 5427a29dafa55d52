from fractions import Fraction
from math import comb, factorial, pi, sqrt

import numpy as np
import pytest

from supq.coherent import CoherentState, expand, fidelity, husimi, overlap, tensor_power
from supq.definetti import polar_grid
from supq.errors import DimensionError, ParameterError
from supq.exact import GaussianRational
from supq.fock import FockOperator, FockPoly, Layout, Z_poly, bargmann_inner
from supq.hyperbolic import mobius_act, random_disc_point, random_group_element


def test_vacuum():
    psi = expand(CoherentState(np.zeros((2, 2)), 2), 6)
    assert len(psi) == 1 and np.isclose(complex(psi.terms[0]), 1)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_su11_coefficients(n):
    lam = 0.4 - 0.3j
    psi = expand(CoherentState([[lam]], n), 8)
    lay = Layout(1, 1, n)
    Zk = FockPoly.one(lay)
    for k in range(8):
        basis = Zk.scale(1 / sqrt(factorial(n + k - 1) * factorial(k) / factorial(n - 1)))
        c = complex(bargmann_inner(basis, psi))
        assert np.isclose(c, (1 - abs(lam) ** 2) ** (n / 2) * sqrt(comb(n + k - 1, k)) * lam ** k)
        Zk = Zk * Z_poly(lay, 0, 0)


def test_truncated_norm_tail():
    state = CoherentState([[0.5]], 1)
    norms = [complex(bargmann_inner(expand(state, d), expand(state, d))).real for d in range(0, 21)]
    assert all(b > a for a, b in zip(norms, norms[1:]))
    assert 1 - norms[-1] == pytest.approx(0.25 ** 21, rel=1e-6)


def test_fidelity_examples():
    assert fidelity([[0.5]], [[-0.5]], 1) == pytest.approx(0.36)
    L = np.array([[0.3, 0.1j], [0.2, -0.4]])
    assert fidelity(L, L, 3) == pytest.approx(1.0)
    det = np.linalg.det(np.eye(2) - L @ L.conj().T).real
    assert fidelity(L, np.zeros((2, 2)), 3) == pytest.approx(det ** 3)
    with pytest.raises(DimensionError):
        fidelity(L, np.zeros((2, 1)), 1)


def test_overlap_two_mode_squeezed_product():
    s1, s2 = np.array([0.3, 0.7]), np.array([-0.2, 0.5])
    expected = np.prod(np.sqrt(1 - s1 ** 2) * np.sqrt(1 - s2 ** 2) / (1 - s1 * s2))
    assert overlap(np.diag(s1), np.diag(s2), 1) == pytest.approx(expected)
    L = np.array([[0.3 + 0.2j, 0.1]])
    assert overlap(L, L, 4) == pytest.approx(1.0)


@pytest.mark.parametrize("p,q", [(1, 1), (1, 2), (2, 2)])
def test_overlap_matches_series(p, q, rng):
    for _ in range(3):
        L1, L2 = random_disc_point(rng, p, q), random_disc_point(rng, p, q)
        series = complex(bargmann_inner(expand(CoherentState(L1, 1), 40), expand(CoherentState(L2, 1), 40)))
        closed = overlap(L1, L2, 1)
        assert abs(series - closed) <= 1e-8 * abs(closed)


def test_overlap_phase_several_replicas(rng):
    L1, L2 = random_disc_point(rng, 1, 2, 0.3), random_disc_point(rng, 1, 2, 0.3)
    series = complex(bargmann_inner(expand(CoherentState(L1, 2), 24), expand(CoherentState(L2, 2), 24)))
    assert abs(series - overlap(L1, L2, 2)) < 1e-10
    assert abs(overlap(L1, L2, 2) - overlap(L1, L2, 1) ** 2) < 1e-14


def test_fidelity_invariant_under_group(rng):
    for p, q in [(1, 1), (2, 1), (2, 2)]:
        g = random_group_element(rng, p, q)
        L1, L2 = random_disc_point(rng, p, q), random_disc_point(rng, p, q)
        a = fidelity(mobius_act(g, L1), mobius_act(g, L2), 3)
        assert abs(a - fidelity(L1, L2, 3)) < 1e-9


def test_fidelity_below_one_off_diagonal(rng):
    L = random_disc_point(rng, 2, 2)
    for eps in (1e-2, 1e-3):
        assert fidelity(L, L + eps * random_disc_point(rng, 2, 2), 2) < 1


def test_sylvester_normalization(rng):
    L = random_disc_point(rng, 2, 3)
    st = CoherentState(L, 3)
    other = np.linalg.det(np.eye(3) - L.conj().T @ L).real ** 1.5
    assert st.normalization == pytest.approx(other)


def test_tensor_power_law_exact():
    L = [[Fraction(1, 3), GaussianRational(0, Fraction(1, 4))]]
    for n in (2, 3):
        d = 3
        lhs = expand(CoherentState(L, n), d, normalized=False)
        rhs = tensor_power(expand(CoherentState(L, 1), d, normalized=False), n, d)
        assert lhs == rhs and lhs.is_exact()


def _husimi_integral(rho, n, radial=60, angular=16):
    lam, w = polar_grid(radial, angular)
    return sum(wi * husimi(rho, [[li]], n) for li, wi in zip(lam, w))


def test_husimi_vacuum():
    lay = Layout(1, 1, 3)
    rho = FockOperator.outer(FockPoly.one(lay, 1.0))
    for lam in (0.0, 0.3, 0.5 + 0.5j):
        assert husimi(rho, [[lam]], 3) == pytest.approx(2 / pi * (1 - abs(lam) ** 2))
    assert _husimi_integral(rho, 3) == pytest.approx(1.0, abs=1e-10)


def test_husimi_excited_state_integrates_to_one():
    n = 3
    lay = Layout(1, 1, n)
    Z = Z_poly(lay, 0, 0)
    psi = (Z * Z).scale(1 / sqrt(factorial(n + 1) * 2 / factorial(n - 1)))
    rho = FockOperator.outer(psi.map_coeffs(complex))
    assert _husimi_integral(rho, n) == pytest.approx(1.0, abs=1e-10)
    assert husimi(rho, [[0.0]], n) == pytest.approx(0.0)
    assert husimi(rho, [[0.6j]], n) >= 0


def test_husimi_needs_large_n():
    rho = FockOperator.outer(FockPoly.one(Layout(1, 1, 1), 1.0))
    with pytest.raises(ParameterError):
        husimi(rho, [[0.1]], 1)
