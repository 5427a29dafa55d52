"""Explicit bases of symmetric subspaces.

``SU(1,1)``: the powers ``Z^k`` of ``Z = sum_t z_t z'_t`` and the generators
``K+ = Z``, ``K- = Delta``, ``K0 = (n + nA + nB) / 2``.

``SU(2,2)``: the candidate vectors

    phi_{r,s}^{l,m} = sum_i (-1)^i C(r,i) C(s,i) / C(n+r+s-2, i)
                      Z11^{l+i} Z12^{r-i} Z21^{s-i} Z22^{m+i}

whose normalized versions ``phi / (l! r! s! m! sqrt(a))`` are conjectured to
be orthonormal. Checks are radical free: inner products of the unnormalized
``phi`` are compared with ``(l! r! s! m!)^2 a``.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import comb, factorial

import numpy as np

from .errors import DimensionError, ParameterError
from .fock import FockPoly, Layout, Z_poly, bargmann_inner, invariance_residual, laplacian, z_expand
from .poly import SparsePoly, pack


# SU(1,1) ----------------------------------------------------------------------


def su11_basis_norm(n, k):
    """``||Z^k||^2 = (n+k-1)! k! / (n-1)!`` (an integer).

    Examples
    --------
    >>> su11_basis_norm(2, 2)
    12
    """
    if n < 1 or k < 0:
        raise ParameterError("need n >= 1 and k >= 0")
    return factorial(n + k - 1) * factorial(k) // factorial(n - 1)


def su11_basis_coefficients(lam, n, d):
    """Components ``(1-|l|^2)^{n/2} sqrt(C(n+k-1,k)) l^k`` of ``|l, n>`` for ``k <= d``."""
    lam = complex(lam)
    k = np.arange(d + 1)
    a = np.array([comb(n + j - 1, j) for j in range(d + 1)], dtype=float)
    return (1 - abs(lam) ** 2) ** (n / 2) * np.sqrt(a) * lam ** k


def _number_op(f, variables):
    out = FockPoly(f.layout)
    for v in variables:
        out = out + f.diff(v).mul_var(v)
    return out


def _match_multiple(img, target):
    """Exact ``c`` with ``img == c * target`` (``None`` if not a multiple)."""
    if not img:
        return 0
    if not target:
        return None
    k0 = next(iter(target.terms))
    c = Fraction(img.terms.get(k0, 0)) / Fraction(target.terms[k0])
    if img != target.scale(c):
        return None
    return c if c.denominator != 1 else c.numerator


@dataclass
class Su11Operators:
    """Truncated generators in the basis ``Z^0, ..., Z^d``.

    ``raw`` holds exact matrices in the unnormalized basis (derived by acting
    on the explicit polynomial expansions); ``normalized()`` returns float
    matrices in the orthonormal basis ``psi_k``.
    """

    n: int
    d: int
    raw: dict = field(default_factory=dict)

    def normalized(self):
        s = np.sqrt([float(su11_basis_norm(self.n, k)) for k in range(self.d + 1)])
        out = {}
        for name, M in self.raw.items():
            A = np.array([[float(x) for x in row] for row in M])
            # column k: op psi_k = op Z^k / s_k, rows re-expressed on psi_j = Z^j / s_j
            out[name] = (A * s[:, None]) / s[None, :]
        return out


def su11_operators(n, d):
    """Build ``K+``, ``K-``, ``K0``, ``nA``, ``nB`` by exact polynomial action."""
    if n < 1 or d < 0:
        raise ParameterError("need n >= 1 and d >= 0")
    lay = Layout(1, 1, n)
    Z = Z_poly(lay, 0, 0)
    powers = [FockPoly.one(lay)]
    for _ in range(d + 1):
        powers.append(powers[-1] * Z)
    zvars, zpvars = list(lay.z_vars), list(lay.zp_vars)
    actions = {
        "K+": lambda f: f * Z,
        "K-": lambda f: laplacian(f, 0, 0),
        "nA": lambda f: _number_op(f, zvars),
        "nB": lambda f: _number_op(f, zpvars),
    }
    shifts = {"K+": 1, "K-": -1, "nA": 0, "nB": 0}
    raw = {}
    for name, act in actions.items():
        M = [[0] * (d + 1) for _ in range(d + 1)]
        for k in range(d + 1):
            j = k + shifts[name]
            if j < 0 or j > d:
                continue
            c = _match_multiple(act(powers[k]), powers[j])
            if c is None:
                raise ArithmeticError(f"{name} does not map Z^{k} onto Z^{j}")
            M[j][k] = c
        raw[name] = M
    raw["K0"] = [
        [Fraction(n, 2) * (i == k) + Fraction(raw["nA"][i][k] + raw["nB"][i][k], 2) for k in range(d + 1)]
        for i in range(d + 1)
    ]
    return Su11Operators(n, d, raw)


def _mm(A, B):
    m = len(A)
    return [[sum(A[i][t] * B[t][k] for t in range(m)) for k in range(m)] for i in range(m)]


def _lin(*pairs):
    m = len(pairs[0][1])
    return [[sum(c * M[i][k] for c, M in pairs) for k in range(m)] for i in range(m)]


def _comm(A, B):
    return _lin((1, _mm(A, B)), (-1, _mm(B, A)))


def _split_columns(R, depth, d):
    """Max |entry| on interior columns ``k <= d - depth`` and on boundary columns."""
    interior = max((abs(R[i][k]) for i in range(d + 1) for k in range(d + 1 - depth)), default=0)
    boundary = max((abs(R[i][k]) for i in range(d + 1) for k in range(d + 1 - depth, d + 1)), default=0)
    return interior, boundary


def su11_commutator_check(n, d):
    """Exact check of ``[K0, K+-] = +-K+-``, ``[K-, K+] = 2 K0 = nA + nB + n``
    and ``[nA, K+-] = +-K+-`` on interior columns.

    Returns
    -------
    dict
        identity name -> ``{"interior": residual, "boundary": residual}``;
        interior residuals are exact zeros when the identities hold.
    """
    if d < 2:
        raise ParameterError("d must be at least 2")
    ops = su11_operators(n, d).raw
    Kp, Km, K0, nA, nB = ops["K+"], ops["K-"], ops["K0"], ops["nA"], ops["nB"]
    I = [[int(i == k) for k in range(d + 1)] for i in range(d + 1)]
    checks = {
        "[K0,K+]-K+": (_lin((1, _comm(K0, Kp)), (-1, Kp)), 1),
        "[K0,K-]+K-": (_lin((1, _comm(K0, Km)), (1, Km)), 1),
        "[K-,K+]-2K0": (_lin((1, _comm(Km, Kp)), (-2, K0)), 1),
        "[K-,K+]-(nA+nB+n)": (_lin((1, _comm(Km, Kp)), (-1, nA), (-1, nB), (-n, I)), 1),
        "[nA,K+]-K+": (_lin((1, _comm(nA, Kp)), (-1, Kp)), 1),
        "[nA,K-]+K-": (_lin((1, _comm(nA, Km)), (1, Km)), 1),
        "[nB,K+]-K+": (_lin((1, _comm(nB, Kp)), (-1, Kp)), 1),
        "[nB,K-]+K-": (_lin((1, _comm(nB, Km)), (1, Km)), 1),
    }
    out = {}
    for name, (R, depth) in checks.items():
        interior, boundary = _split_columns(R, depth, d)
        out[name] = {"interior": interior, "boundary": boundary}
    return out


def casimir(n, d):
    """Casimir ``C2 = K0^2 - (K+K- + K-K+)/2`` on the truncated basis.

    Returns
    -------
    matrix : list of lists
        Exact matrix in the ``Z^k`` basis.
    report : dict
        ``expected`` (``n/2 (n/2 - 1)``), ``interior_diagonal`` values,
        off-diagonal interior residual and commutator residuals.
    """
    if d < 2:
        raise ParameterError("d must be at least 2")
    ops = su11_operators(n, d).raw
    Kp, Km, K0 = ops["K+"], ops["K-"], ops["K0"]
    C = _lin((1, _mm(K0, K0)), (Fraction(-1, 2), _mm(Kp, Km)), (Fraction(-1, 2), _mm(Km, Kp)))
    expected = Fraction(n, 2) * (Fraction(n, 2) - 1)
    I = [[int(i == k) for k in range(d + 1)] for i in range(d + 1)]
    dev, _ = _split_columns(_lin((1, C), (-expected, I)), 1, d)
    comms = {}
    for name, K in (("K0", K0), ("K+", Kp), ("K-", Km)):
        comms[name] = _split_columns(_comm(C, K), 2, d)[0]
    report = {
        "expected": expected,
        "interior_diagonal": [C[k][k] for k in range(d)],
        "interior_residual": dev,
        "commutator_residuals": comms,
    }
    return C, report


# SU(2,2) ----------------------------------------------------------------------

# Z-space variable order: Z11, Z12, Z21, Z22
_ZVARS = 4


def a_single(n, k):
    """``a_k^n = C(n+k-1, k)`` with ``a_{-1}^n = 0``."""
    if k < 0:
        return 0
    return comb(n + k - 1, k)


def a_coefficient(n, l, m, r, s):
    """``(a_r^n a_s^n - a_{r-1}^n a_{s-1}^n) a_l^{n+r+s} a_m^{n+r+s}``."""
    lead = a_single(n, r) * a_single(n, s) - a_single(n, r - 1) * a_single(n, s - 1)
    return lead * a_single(n + r + s, l) * a_single(n + r + s, m)


def _denominator(n, r, s, i, variant):
    if variant == "basis":
        return comb(n + r + s - 2, i)
    if variant == "alternative":
        return comb(n + r + s - i - 1, i)
    raise ParameterError(f"unknown variant {variant!r}")


def su22_zpoly(n, l, m, r, s, variant="basis"):
    """Unnormalized ``phi_{r,s}^{l,m}`` as a polynomial in ``(Z11, Z12, Z21, Z22)``."""
    if n < 2:
        raise ParameterError("n must be at least 2")
    if min(l, m, r, s) < 0:
        raise ParameterError("indices must be nonnegative")
    terms = {}
    for i in range(min(r, s) + 1):
        c = Fraction((-1) ** i * comb(r, i) * comb(s, i), _denominator(n, r, s, i, variant))
        terms[pack((l + i, r - i, s - i, m + i))] = c
    return SparsePoly(_ZVARS, terms)


def su22_element(n, l, m, r, s, variant="basis"):
    """``phi_{r,s}^{l,m}`` expanded into the ``z`` variables of ``Layout(2, 2, n)``."""
    return z_expand(Layout(2, 2, n), su22_zpoly(n, l, m, r, s, variant))


def index_tuples(max_weight):
    """All ``(l, m, r, s)`` with ``l + m + r + s <= max_weight``, in a fixed order."""
    out = [t for t in product(range(max_weight + 1), repeat=4) if sum(t) <= max_weight]
    out.sort(key=lambda t: (sum(t), t))
    return out


def _enc(x):
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


@dataclass
class Su22GramReport:
    """Exact Gram data of the unnormalized candidate vectors.

    ``gram[a][b] = <phi_a, phi_b>`` and ``expected[a] = (l! r! s! m!)^2 a``.
    The normalized family is orthonormal iff ``gram`` is diagonal with
    ``gram[a][a] == expected[a]``.
    """

    n: int
    max_weight: int
    variant: str
    indices: list
    gram: list
    expected: list
    is_identity: bool
    offending: list

    def to_json_obj(self):
        return {
            "n": self.n,
            "max_weight": self.max_weight,
            "variant": self.variant,
            "indices": [list(t) for t in self.indices],
            "gram": [[_enc(x) for x in row] for row in self.gram],
            "expected_norms": [_enc(x) for x in self.expected],
            "is_identity": self.is_identity,
            "offending": [[list(a), list(b), _enc(v), _enc(e)] for a, b, v, e in self.offending],
        }


def su22_gram(n, max_weight, variant="basis"):
    """Exact Gram matrix of the candidate basis up to total index ``max_weight``.

    Each vector is expanded through ``Z_ij -> sum_t z z'`` on
    ``Layout(2, 2, n)`` and paired with the Bargmann inner product.
    ``offending`` lists ``(I, J, value, expected)`` for every entry that
    breaks orthonormality.
    """
    idx = index_tuples(max_weight)
    vecs = [su22_element(n, *t, variant=variant) for t in idx]
    expected = [
        (factorial(l) * factorial(r) * factorial(s) * factorial(m)) ** 2 * a_coefficient(n, l, m, r, s)
        for l, m, r, s in idx
    ]
    N = len(idx)
    gram = [[Fraction(0)] * N for _ in range(N)]
    offending = []
    for a in range(N):
        for b in range(a, N):
            v = Fraction(bargmann_inner(vecs[a], vecs[b]))
            gram[a][b] = gram[b][a] = v
            target = expected[a] if a == b else 0
            if v != target:
                offending.append((idx[a], idx[b], v, target))
    return Su22GramReport(n, max_weight, variant, idx, gram, expected, not offending, offending)


def su22_invariance_check(n, l, m, r, s, variant="basis"):
    f = su22_element(n, l, m, r, s, variant)
    return all(not res for res in invariance_residual(f).values())


def _exp_zspace(Lam, d):
    """``sum_{k <= d} (sum L_ij Z_ij)^k / k!`` in Z-space, exact."""
    X = SparsePoly(_ZVARS, {pack(e): c for e, c in zip(
        ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)),
        (Lam[0][0], Lam[0][1], Lam[1][0], Lam[1][1]),
    )})
    out = SparsePoly(_ZVARS, {0: 1})
    term = SparsePoly(_ZVARS, {0: 1})
    for k in range(1, d + 1):
        term = term.mul(X).scale(Fraction(1, k))
        out = out + term
    return out


def su22_conjectured_series(Lam, n, d, variant="basis"):
    """Conjectured expansion truncated at total index ``d``, in Z-space.

    Uses ``sqrt(a) psi = phi / (l! r! s! m!)`` and the terminating
    hypergeometric sum in product form
    ``sum_i C(l,i) C(m,i) / C(n+r+s+i-1, i) l1^{l-i} l2^{r+i} l3^{s+i} l4^{m-i}``
    so that no division by ``l1 l4`` is needed.
    """
    l1, l2, l3, l4 = Lam[0][0], Lam[0][1], Lam[1][0], Lam[1][1]
    out = SparsePoly(_ZVARS)
    for l, m, r, s in index_tuples(d):
        coef = 0
        for i in range(min(l, m) + 1):
            coef += Fraction(comb(l, i) * comb(m, i), comb(n + r + s + i - 1, i)) * (
                l1 ** (l - i) * l2 ** (r + i) * l3 ** (s + i) * l4 ** (m - i)
            )
        if not coef:
            continue
        scale = Fraction(1, factorial(l) * factorial(r) * factorial(s) * factorial(m))
        out = out + su22_zpoly(n, l, m, r, s, variant).scale(coef * scale)
    return out


def su22_coherent_expansion_check(Lam, n, d, variant="basis"):
    """Compare the truncated coherent state with the conjectured series.

    Both sides are compared as polynomials in the ``Z_ij``, which is
    equivalent to comparing their ``z`` expansions because the ``Z_ij`` are
    algebraically independent for ``n >= 2``. The common normalization
    ``det(1 - L L^+)^{n/2}`` is dropped.

    Returns
    -------
    dict
        ``max_discrepancy`` (exact), ``mismatched`` monomial count and the
        worst monomial exponents.
    """
    if n < 2:
        raise ParameterError("n must be at least 2")
    if len(Lam) != 2 or any(len(row) != 2 for row in Lam):
        raise DimensionError("expected a 2x2 parameter")
    lhs = _exp_zspace(Lam, d)
    rhs = su22_conjectured_series(Lam, n, d, variant)
    diff = lhs - rhs
    worst = None
    worst_val = 0
    for e, c in diff.items():
        mag = abs(complex(c))
        if mag > worst_val:
            worst_val, worst = mag, e
    max_disc = max((abs(complex(c)) for c in diff.terms.values()), default=0.0)
    exact_max = None
    if worst is not None:
        exact_max = diff.coeff(worst)
    return {
        "max_discrepancy": exact_max if exact_max is not None else 0,
        "max_discrepancy_float": max_disc,
        "mismatched": len(diff),
        "worst_monomial": worst,
        "agrees": not diff,
    }
