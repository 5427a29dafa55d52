"""Phase-space picture: covariance matrices and the map ``SU(p,q) -> Sp``.

Quadratures are ordered ``(x_1..x_p, y_1..y_p, x'_1..x'_q, y'_1..y'_q)``
with ``hbar = 2`` so the vacuum has covariance identity.
"""

import warnings

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import DimensionError, ParameterError
from .hyperbolic import as_disc_point, validate_group_element


def s_map(X):
    """``S(X) = [[Re X, -Im X], [Im X, Re X]]``."""
    X = np.atleast_2d(np.asarray(X, dtype=complex))
    return np.block([[X.real, -X.imag], [X.imag, X.real]])


def t_map(Y):
    """``T(Y) = [[Re Y, Im Y], [Im Y, -Re Y]]``."""
    Y = np.atleast_2d(np.asarray(Y, dtype=complex))
    return np.block([[Y.real, Y.imag], [Y.imag, -Y.real]])


def omega_block(k):
    I = np.eye(k)
    Z = np.zeros((k, k))
    return np.block([[Z, I], [-I, Z]])


def omega(p, q):
    """Symplectic form ``Omega_p (+) Omega_q``."""
    out = np.zeros((2 * (p + q), 2 * (p + q)))
    out[: 2 * p, : 2 * p] = omega_block(p)
    out[2 * p:, 2 * p:] = omega_block(q)
    return out


def is_symplectic(S, p, q, tol=1e-10):
    W = omega(p, q)
    return bool(np.linalg.norm(S @ W @ S.T - W, 2) <= tol * max(1.0, np.linalg.norm(S, 2) ** 2))


def covariance(L, warn_margin=1e-6):
    """Covariance matrix of the coherent state with parameter ``L``.

    Blocks: ``S((1+LL^+)(1-LL^+)^{-1})`` and ``T(2L(1-L^+L)^{-1})`` on the first
    row, the transpose of the latter and ``S(conj((1+L^+L)(1-L^+L)^{-1}))`` on
    the second. The conjugate in the last block is what makes the matrix a
    pure-state covariance (``det = 1``) for complex ``L``.

    Examples
    --------
    >>> float(covariance([[0.6]])[0, 0])
    2.125
    """
    L = as_disc_point(L)
    p, q = L.shape
    if np.linalg.norm(L, 2) > 1.0 - warn_margin:
        warnings.warn("parameter is close to the boundary; covariance is ill-conditioned", RuntimeWarning)
    Ip, Iq = np.eye(p), np.eye(q)
    Mp = cho_factor(Ip - L @ L.conj().T)
    Mq = cho_factor(Iq - L.conj().T @ L)
    # (1 + X)(1 - X)^{-1} with X Hermitian: the two factors commute
    top = cho_solve(Mp, Ip + L @ L.conj().T)
    bottom = cho_solve(Mq, Iq + L.conj().T @ L)
    off = 2.0 * cho_solve(Mq, L.conj().T).conj().T
    T = t_map(off)
    return np.block([[s_map(top), T], [T.T, s_map(bottom.conj())]])


def symplectic_of(g, tol=1e-10):
    """``s(g) = [[S(A), T(B)], [T(conj C), S(conj D)]]``."""
    if not validate_group_element(g, tol=max(tol, 1e-10)):
        raise ParameterError("not an element of SU(p,q)")
    return np.block([[s_map(g.A), t_map(g.B)], [t_map(g.C.conj()), s_map(g.D.conj())]])


def pure_state_residuals(G, p, q):
    """``(||G W G^T - W||, |det G - 1|)``."""
    W = omega(p, q)
    return float(np.linalg.norm(G @ W @ G.T - W, 2)), float(abs(np.linalg.det(G) - 1.0))


def moment_covariance(psi):
    """Covariance from second moments of a Fock polynomial state.

    Ladder operators act as ``a_v = d/dx_v`` and ``a_v^+ = x_v``; with
    ``x = a + a^+`` and ``y = i(a^+ - a)``,
    ``Gamma_ab = Re <R_a psi, R_b psi> / <psi, psi> - <R_a><R_b>``.
    The state must be truncated well beyond its effective support.
    """
    from .fock import bargmann_inner

    lay = psi.layout
    if lay.n != 1:
        raise DimensionError("moment covariance is defined for one replica")
    p, q = lay.p, lay.q
    order = [lay.z(0, i) for i in range(p)], [lay.zp(0, j) for j in range(q)]
    ops = []
    for group in order:
        ops += [psi.diff(v) + psi.mul_var(v) for v in group]
        ops += [(psi.mul_var(v) - psi.diff(v)).scale(1j) for v in group]
    norm = complex(bargmann_inner(psi, psi)).real
    mean = np.array([complex(bargmann_inner(psi, r)).real for r in ops]) / norm
    k = len(ops)
    G = np.empty((k, k))
    for a in range(k):
        for b in range(a, k):
            G[a, b] = G[b, a] = complex(bargmann_inner(ops[a], ops[b])).real / norm - mean[a] * mean[b]
    return G
