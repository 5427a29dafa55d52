import numpy as np
import pytest
from hypothesis import given, strategies as st

from supq.coherent import CoherentState, expand
from supq.errors import ParameterError
from supq.hyperbolic import GroupElement, block_unitary, haar_unitary, mobius_act, random_disc_point, random_group_element
from supq.phase_space import (
    covariance,
    is_symplectic,
    moment_covariance,
    omega,
    omega_block,
    pure_state_residuals,
    s_map,
    symplectic_of,
    t_map,
)

SHAPES = [(1, 1), (1, 2), (2, 1), (2, 2)]


def test_block_maps():
    assert np.array_equal(s_map(np.eye(3)), np.eye(6))
    Y = np.array([[1 + 2j]])
    assert np.array_equal(t_map(Y), [[1, 2], [2, -1]])


def test_s_map_symplectic(rng):
    U = haar_unitary(rng, 3)
    W = omega_block(3)
    S = s_map(U)
    assert np.allclose(S @ W @ S.T, W, atol=1e-12)
    X = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    assert np.allclose(s_map(X @ U), s_map(X) @ s_map(U))
    # S(X) W S(X)^T = S(X X^+) W, so Hermitian X gives a symmetric S(X) but a
    # symplectic one only when X is also unitary
    H = X + X.conj().T
    assert np.allclose(s_map(H), s_map(H).T)
    assert np.allclose(s_map(X) @ W @ s_map(X).T, s_map(X @ X.conj().T) @ W)
    assert not np.allclose(s_map(2 * np.eye(3)) @ W @ s_map(2 * np.eye(3)).T, W)


def test_vacuum_and_two_mode_example():
    assert np.allclose(covariance(np.zeros((2, 3))), np.eye(10))
    G = covariance([[0.6]])
    nu, beta = 1.36 / 0.64, 1.2 / 0.64
    assert nu == pytest.approx(2.125) and beta == pytest.approx(1.875)
    expect = np.array([[nu, 0, beta, 0], [0, nu, 0, -beta], [beta, 0, nu, 0], [0, -beta, 0, nu]])
    assert np.allclose(G, expect)


def test_diagonal_sigma():
    sig = np.array([0.3, 0.6])
    S = np.zeros((2, 3))
    S[[0, 1], [0, 1]] = sig
    G = covariance(S)
    nu = np.r_[(1 + sig ** 2) / (1 - sig ** 2), 1.0]
    beta = np.r_[2 * sig / (1 - sig ** 2), 0.0]
    assert np.allclose(np.diag(G)[:4], np.r_[nu[:2], nu[:2]])
    assert np.allclose(np.diag(G)[4:], np.r_[nu, nu])
    # x_i pairs with x'_i only; the unpaired x'_3 stays in vacuum
    assert np.allclose(G[:2, 4:7], np.diag(beta[:2]) @ np.eye(2, 3))


@pytest.mark.parametrize("p,q", SHAPES)
def test_covariance_transport(p, q):
    rng = np.random.default_rng(p + 7 * q)
    for _ in range(100):
        g = random_group_element(rng, p, q)
        L = random_disc_point(rng, p, q)
        S = symplectic_of(g)
        assert np.abs(covariance(mobius_act(g, L)) - S @ covariance(L) @ S.T).max() <= 1e-9


@pytest.mark.parametrize("p,q", SHAPES)
def test_homomorphism_and_form(p, q):
    rng = np.random.default_rng(3 * p + q)
    for _ in range(50):
        g1, g2 = random_group_element(rng, p, q), random_group_element(rng, p, q)
        S1, S2 = symplectic_of(g1), symplectic_of(g2)
        err = np.linalg.norm(symplectic_of(g1 @ g2) - S1 @ S2, 2)
        assert err <= 1e-10 * np.linalg.norm(S1, 2) * np.linalg.norm(S2, 2)
        assert is_symplectic(S1, p, q)


@given(st.integers(0, 2**31))
def test_pure_state_invariants(seed):
    rng = np.random.default_rng(seed)
    p, q = SHAPES[seed % 4]
    G = covariance(random_disc_point(rng, p, q, 0.9))
    sym, det = pure_state_residuals(G, p, q)
    assert sym <= 1e-9 * max(1, np.linalg.norm(G, 2) ** 2) and det <= 1e-9
    assert np.allclose(G, G.T) and np.linalg.eigvalsh(G).min() > 0


def test_identity_and_unitary_subgroup(rng):
    assert np.allclose(symplectic_of(GroupElement.identity(2, 2)), np.eye(8))
    U, V = haar_unitary(rng, 2), haar_unitary(rng, 1)
    V[:, 0] /= np.linalg.det(U) * np.linalg.det(V)
    S = symplectic_of(block_unitary(U, V))
    assert np.allclose(S[:4, :4], s_map(U)) and np.allclose(S[4:, 4:], s_map(V.conj()))


def test_invalid_group_element_rejected():
    g = GroupElement.identity(1, 1)
    with pytest.raises(ParameterError):
        symplectic_of(GroupElement(2 * g.A, g.B, g.C, g.D))


def test_moment_oracle(rng):
    # second moments of the truncated Fock state against the closed form
    for p, q in [(1, 1), (1, 2), (2, 1)]:
        L = random_disc_point(rng, p, q, 0.35)
        psi = expand(CoherentState(L, 1), 30)
        assert np.allclose(moment_covariance(psi), covariance(L), atol=1e-9)


def test_photon_number_mean():
    # diagonal entry 1 + 2<n> with geometric mean photon number s^2/(1-s^2)
    s = 0.45
    assert covariance([[s]])[0, 0] == pytest.approx(1 + 2 * s ** 2 / (1 - s ** 2))


def test_boundary_warning():
    with pytest.warns(RuntimeWarning):
        covariance([[1 - 1e-8]])
