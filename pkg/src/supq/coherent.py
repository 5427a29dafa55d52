"""Coherent states ``|L, n> = det(1 - L L^+)^{n/2} exp(sum_ij L_ij Z_ij)``."""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .constants import normalization_constant
from .errors import DimensionError, ParameterError
from .exact import is_exact
from .fock import FockOperator, FockPoly, Layout, Z_poly
from .hyperbolic import as_disc_point
from .poly import BITS, DEFAULT_TERM_CAP


def _is_exact_matrix(L):
    if isinstance(L, np.ndarray) and L.dtype != object:
        return False
    try:
        return all(is_exact(x) for row in L for x in row)
    except TypeError:
        return False


@dataclass(frozen=True)
class CoherentState:
    """Coherent state with parameter ``Lambda`` (``p x q``) on ``n`` replicas.

    ``Lambda`` may be a complex array or a nested list of exact scalars
    (ints, Fractions, GaussianRationals); exact parameters enable exact
    unnormalized expansions.
    """

    Lambda: object
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError("n must be positive")
        as_disc_point(self.matrix)

    @property
    def exact(self):
        return _is_exact_matrix(self.Lambda)

    @property
    def matrix(self):
        if _is_exact_matrix(self.Lambda):
            return np.array([[complex(x) for x in row] for row in self.Lambda])
        return np.atleast_2d(np.asarray(self.Lambda, dtype=complex))

    @property
    def p(self):
        return self.matrix.shape[0]

    @property
    def q(self):
        return self.matrix.shape[1]

    @property
    def layout(self):
        return Layout(self.p, self.q, self.n)

    @property
    def det_defect(self):
        """``det(1 - L L^+)``, real and in ``(0, 1]``."""
        L = self.matrix
        return float(np.real(np.linalg.det(np.eye(self.p) - L @ L.conj().T)))

    @property
    def normalization(self):
        return self.det_defect ** (self.n / 2.0)


def expand(state, d, normalized=True, cap=DEFAULT_TERM_CAP):
    """Degree-``d`` truncation of the coherent state as a FockPoly.

    ``normalization * sum_{m <= d} X^m / m!`` with ``X = sum L_ij Z_ij``.
    With ``normalized=False`` and an exact ``Lambda`` the result is exact.

    Examples
    --------
    >>> from supq.fock import bargmann_inner
    >>> psi = expand(CoherentState([[0.0]], 1), 5)
    >>> complex(bargmann_inner(psi, psi))
    (1+0j)
    """
    lay = state.layout
    exact = state.exact and not normalized
    if exact:
        entries = state.Lambda
        one = 1
    else:
        entries = state.matrix
        one = 1.0 + 0j
    X = FockPoly(lay)
    for i in range(lay.p):
        for j in range(lay.q):
            c = entries[i][j]
            if c:
                X = X + Z_poly(lay, i, j, c if exact else complex(c))
    out = FockPoly.one(lay, one)
    term = FockPoly.one(lay, one)
    for m in range(1, d + 1):
        term = term.mul(X, cap=cap).scale(Fraction(1, m) if exact else 1.0 / m)
        if not term:
            break
        out = out + term
    if normalized:
        out = out.scale(state.normalization)
    return out


def _pair(L1, L2):
    L1 = np.atleast_2d(np.asarray(L1, dtype=complex))
    L2 = np.atleast_2d(np.asarray(L2, dtype=complex))
    if L1.shape != L2.shape:
        raise DimensionError("parameters have different shapes")
    as_disc_point(L1)
    as_disc_point(L2)
    return L1, L2


def overlap(L1, L2, n):
    """``<L1, n | L2, n>``.

    ``[det(1-L1 L1^+)^{1/2} det(1-L2 L2^+)^{1/2} / det(1 - L1^+ L2)]^n``;
    antilinear in ``L1`` like the Bargmann pairing.
    """
    L1, L2 = _pair(L1, L2)
    p, q = L1.shape
    d1 = np.real(np.linalg.det(np.eye(p) - L1 @ L1.conj().T))
    d2 = np.real(np.linalg.det(np.eye(p) - L2 @ L2.conj().T))
    cross = np.linalg.det(np.eye(q) - L1.conj().T @ L2)
    return complex((np.sqrt(d1 * d2) / cross) ** n)


def fidelity(L1, L2, n):
    """``|<L1, n | L2, n>|^2 = [det(1-L1L1^+) det(1-L2L2^+) / |det(1-L1L2^+)|^2]^n``."""
    L1, L2 = _pair(L1, L2)
    p = L1.shape[0]
    d1 = np.real(np.linalg.det(np.eye(p) - L1 @ L1.conj().T))
    d2 = np.real(np.linalg.det(np.eye(p) - L2 @ L2.conj().T))
    cross = abs(np.linalg.det(np.eye(p) - L1 @ L2.conj().T))
    return float((d1 * d2 / cross ** 2) ** n)


def husimi(rho, L, n):
    """``Q(L) = C_n <L,n| rho |L,n> / det(1 - L L^+)^{p+q}``.

    Parameters
    ----------
    rho : FockOperator
        Operator on the variables of ``Layout(p, q, n)``.
    L : (p, q) array_like
    n : int
        Must satisfy ``n >= p + q``.
    """
    L = np.atleast_2d(np.asarray(L, dtype=complex))
    p, q = L.shape
    lay = Layout(p, q, n)
    if rho.nmodes != lay.nvars:
        raise DimensionError("operator does not act on the expected modes")
    C = float(normalization_constant(p, q, n))
    deg = 0
    for K in rho.kets():
        deg = max(deg, *lay.degrees(K))
    state = CoherentState(L, n)
    psi = expand(state, deg)
    val = complex(rho.expectation(psi)).real
    return C * val / state.det_defect ** (p + q)


def embed_replica(f, layout, t):
    """Copy a single-replica polynomial onto replica ``t`` of ``layout``."""
    src = f.layout
    if src.n != 1 or (src.p, src.q) != (layout.p, layout.q):
        raise DimensionError("source must be a single replica of the same (p, q)")
    moves = [layout.z(t, i) for i in range(src.p)] + [layout.zp(t, j) for j in range(src.q)]
    out = {}
    for key, c in f.terms.items():
        k2 = 0
        for v, target in enumerate(moves):
            k2 += ((key >> (BITS * v)) & ((1 << BITS) - 1)) << (BITS * target)
        out[k2] = c
    return FockPoly(layout, out)


def tensor_power(f, n, d):
    """Degree-``d`` truncation of ``f`` placed on every one of ``n`` replicas."""
    lay = Layout(f.layout.p, f.layout.q, n)
    keep = lambda k: max(lay.degrees(k)) <= d
    out = embed_replica(f, lay, 0)
    for t in range(1, n):
        out = out.mul(embed_replica(f, lay, t), keep=keep)
    return out.truncate(keep)


def coherent_operator(state, d):
    """``|L,n><L,n|`` truncated at degree ``d``."""
    return FockOperator.outer(expand(state, d))
