"""Truncated Segal-Bargmann engine for ``n`` replicas of a ``(p, q)`` system.

Variables are ``z[t, i]`` (``t < n``, ``i < p``) and ``z'[t, j]``
(``t < n``, ``j < q``). In the Bargmann pairing distinct monomials are
orthogonal and ``||z^A z'^B||^2 = A! B!``, so every computation here is
combinatorial and, with exact coefficients, bit-exact.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from math import comb, factorial, sqrt

import numpy as np

from .errors import CapacityError, DimensionError, ParameterError
from .exact import is_exact, sparse_rank
from .hyperbolic import haar_unitary
from .poly import (
    BITS,
    DEFAULT_TERM_CAP,
    MASK,
    SparsePoly,
    _decode_scalar,
    _encode_scalar,
    grlex_sort_key,
    key_degree,
    key_factorial,
    pack,
    terms_from_exponents,
    unpack,
    weighted_inner,
)

__all__ = [
    "Layout",
    "FockPoly",
    "FockOperator",
    "bargmann_inner",
    "apply_unitary_change",
    "laplacian",
    "invariance_residual",
    "is_invariant",
    "Z_poly",
    "z_expand",
    "invariant_subspace_dim",
    "laplacian_kernel_dim_in_invariants",
    "maximally_entangled",
    "partial_trace",
    "apply_operator",
    "twirl",
    "haar_unitary",
]


@dataclass(frozen=True)
class Layout:
    """Variable layout of ``F_{p,q,n}``.

    ``z[t, i]`` sits at index ``t * p + i`` and ``z'[t, j]`` at
    ``n * p + t * q + j``.
    """

    p: int
    q: int
    n: int

    def __post_init__(self):
        if self.p < 1 or self.q < 1 or self.n < 1:
            raise ParameterError("p, q, n must be positive")

    @property
    def nvars(self):
        return self.n * (self.p + self.q)

    def z(self, t, i):
        return t * self.p + i

    def zp(self, t, j):
        return self.n * self.p + t * self.q + j

    @property
    def z_vars(self):
        return range(self.n * self.p)

    @property
    def zp_vars(self):
        return range(self.n * self.p, self.nvars)

    def degrees(self, key):
        """``(deg_z, deg_z')`` of a packed monomial."""
        cut = BITS * self.n * self.p
        return key_degree(key & ((1 << cut) - 1)), key_degree(key >> cut)

    def tables(self, key):
        """Exponent tables ``(A, B)`` with shapes ``n x p`` and ``n x q``."""
        e = unpack(key, self.nvars)
        np_ = self.n * self.p
        A = [list(e[t * self.p:(t + 1) * self.p]) for t in range(self.n)]
        B = [list(e[np_ + t * self.q: np_ + (t + 1) * self.q]) for t in range(self.n)]
        return A, B

    def key_from_tables(self, A, B):
        flat = [a for row in A for a in row] + [b for row in B for b in row]
        return pack(flat)


class FockPoly(SparsePoly):
    """Sparse polynomial on a :class:`Layout`.

    Parameters
    ----------
    layout : Layout
    terms : dict, optional
        Packed monomial key -> coefficient.
    """

    __slots__ = ("layout",)

    def __init__(self, layout, terms=None):
        super().__init__(layout.nvars, terms)
        self.layout = layout

    def _copy_extra(self, other):
        other.layout = self.layout

    def _check(self, other):
        if not isinstance(other, FockPoly) or other.layout != self.layout:
            raise DimensionError("polynomials live on different layouts")

    @classmethod
    def from_exponents(cls, layout, items):
        return cls(layout, terms_from_exponents(layout.nvars, items))

    @classmethod
    def one(cls, layout, c=1):
        return cls(layout, {0: c})

    def is_exact(self):
        return all(is_exact(c) for c in self.terms.values())

    def truncate_degree(self, d):
        """Keep monomials with ``deg_z <= d`` and ``deg_z' <= d``."""
        lay = self.layout
        return self.truncate(lambda k: max(lay.degrees(k)) <= d)

    def to_json_obj(self):
        obj = super().to_json_obj()
        obj["layout"] = [self.layout.p, self.layout.q, self.layout.n]
        return obj

    @classmethod
    def from_json_obj(cls, obj):
        lay = Layout(*obj["layout"])
        items = [(tuple(e), _decode_scalar(c)) for e, c in obj["terms"]]
        return cls.from_exponents(lay, items)


def variable(layout, v, c=1):
    return FockPoly(layout, {1 << (BITS * v): c})


def bargmann_inner(f, g):
    """Bargmann inner product ``<f, g>``, antilinear in ``f``.

    Examples
    --------
    >>> lay = Layout(1, 1, 1)
    >>> f = variable(lay, 0) * variable(lay, 0)
    >>> bargmann_inner(f, f)
    2
    """
    if f.layout != g.layout:
        raise DimensionError("polynomials live on different layouts")
    return weighted_inner(f, g)


def bargmann_norm2(f):
    return bargmann_inner(f, f)


def _as_matrix(u):
    if isinstance(u, np.ndarray) and u.dtype != object:
        return u.astype(complex), False
    rows = [list(r) for r in u]
    if all(is_exact(x) for r in rows for x in r):
        return rows, True
    return np.array(rows, dtype=complex), False


def _check_unitary(u, n, tol):
    mat, exact = _as_matrix(u)
    if exact:
        if len(mat) != n or any(len(r) != n for r in mat):
            raise DimensionError(f"expected an {n}x{n} matrix")
        for a in range(n):
            for b in range(n):
                s = sum(mat[t][a].conjugate() * mat[t][b] for t in range(n))
                if s != (1 if a == b else 0):
                    raise ParameterError("matrix is not unitary")
        return mat, True
    if mat.shape != (n, n):
        raise DimensionError(f"expected an {n}x{n} matrix")
    if np.linalg.norm(mat.conj().T @ mat - np.eye(n), 2) > tol:
        raise ParameterError("matrix is not unitary")
    return mat, False


def apply_unitary_change(f, u, tol=1e-10):
    """Apply ``W_u``: ``z_i -> u z_i`` and ``z'_j -> conj(u) z'_j``.

    ``z_i`` is the length-``n`` column ``(z[0,i], ..., z[n-1,i])``. Degrees
    are preserved, nothing is truncated.

    Parameters
    ----------
    f : FockPoly
    u : (n, n) array_like
        Unitary; exact entries keep the computation exact.
    """
    lay = f.layout
    mat, exact = _check_unitary(u, lay.n, tol)
    images = []
    for t in range(lay.n):
        for i in range(lay.p):
            terms = {}
            for s in range(lay.n):
                c = mat[t][s] if exact else complex(mat[t, s])
                if c:
                    terms[1 << (BITS * lay.z(s, i))] = c
            images.append(FockPoly(lay, terms))
    for t in range(lay.n):
        for j in range(lay.q):
            terms = {}
            for s in range(lay.n):
                c = (mat[t][s] if exact else complex(mat[t, s])).conjugate()
                if c:
                    terms[1 << (BITS * lay.zp(s, j))] = c
            images.append(FockPoly(lay, terms))
    return f.linear_substitute(images)


def laplacian(f, i, j):
    """``sum_t d/dz[t,i] d/dz'[t,j] f``."""
    lay = f.layout
    if not (0 <= i < lay.p and 0 <= j < lay.q):
        raise DimensionError("Laplacian index out of range")
    out = FockPoly(lay)
    for t in range(lay.n):
        out = out + f.diff(lay.z(t, i)).diff(lay.zp(t, j))
    return out


def _generator(f, t, u):
    """Polarized U(n) generator whose coefficients are the (t, u) residuals.

    ``sum_i z[u,i] d/dz[t,i] f - sum_j z'[t,j] d/dz'[u,j] f``; its coefficient
    at ``z^A z'^B`` is the left side minus the right side of the linear
    equation linking the coefficients of ``f`` around ``(A, B)``.
    """
    lay = f.layout
    out = FockPoly(lay)
    for i in range(lay.p):
        out = out + f.diff(lay.z(t, i)).mul_var(lay.z(u, i))
    for j in range(lay.q):
        out = out - f.diff(lay.zp(u, j)).mul_var(lay.zp(t, j))
    return out


def invariance_residual(f):
    """Residuals of every U(n) invariance equation.

    Returns
    -------
    dict
        ``(t, u) -> FockPoly`` whose coefficient at each monomial is the
        residual of the ``(t, u)`` equation there. ``f`` is U(n)-invariant
        iff every returned polynomial is zero. For ``t == u`` the equation
        says row ``t`` of ``A`` and of ``B`` carry the same total weight.
    """
    n = f.layout.n
    return {(t, u): _generator(f, t, u) for t in range(n) for u in range(n)}


def is_invariant(f, tol=0.0):
    for r in invariance_residual(f).values():
        if tol == 0.0:
            if r:
                return False
        elif any(abs(complex(c)) > tol for c in r.terms.values()):
            return False
    return True


def Z_poly(layout, i, j, c=1):
    """``Z_{i,j} = sum_t z[t,i] z'[t,j]`` as a FockPoly."""
    return FockPoly(
        layout,
        {(1 << (BITS * layout.z(t, i))) + (1 << (BITS * layout.zp(t, j))): c for t in range(layout.n)},
    )


def z_expand(layout, zpoly):
    """Expand a polynomial in the ``Z_{i,j}`` through ``Z_{i,j} -> sum_t z z'``.

    Parameters
    ----------
    zpoly : SparsePoly
        Polynomial in ``p * q`` variables, variable ``i * q + j`` being
        ``Z_{i,j}``.
    """
    if zpoly.nvars != layout.p * layout.q:
        raise DimensionError("expected a polynomial in p*q variables")
    images = [Z_poly(layout, i, j) for i in range(layout.p) for j in range(layout.q)]
    out = FockPoly(layout)
    powers = {}
    for key, c in zpoly.terms.items():
        term = FockPoly.one(layout, c)
        for v, e in enumerate(unpack(key, zpoly.nvars)):
            if e:
                pw = powers.get((v, e))
                if pw is None:
                    pw = images[v]
                    for _ in range(e - 1):
                        pw = pw * images[v]
                    powers[(v, e)] = pw
                term = term * pw
        out = out + term
    return out


def _monomials(nvars, degree):
    for combo in combinations_with_replacement(range(nvars), degree):
        key = 0
        for v in combo:
            key += 1 << (BITS * v)
        yield key


def _block_columns(layout, a, b):
    zv = list(layout.z_vars)
    zpv = list(layout.zp_vars)
    zkeys = list(_monomials(len(zv), a))
    shift = BITS * layout.n * layout.p
    zpkeys = [k << shift for k in _monomials(len(zpv), b)]
    return [x + y for x in zkeys for y in zpkeys]


def _generator_rows(layout, cols, extra_ops=()):
    """Sparse integer rows of the invariance system restricted to ``cols``.

    Each column (monomial) is pushed through every generator; row labels are
    ``(equation, target monomial)``.
    """
    rows = {}
    n = layout.n
    for key in cols:
        unit = FockPoly(layout, {key: 1})
        for t in range(n):
            for u in range(n):
                img = _generator(unit, t, u)
                for k2, c in img.terms.items():
                    rows.setdefault(("E", t, u, k2), {})[key] = c
        for name, op in extra_ops:
            img = op(unit)
            for k2, c in img.terms.items():
                rows.setdefault((name, k2), {})[key] = c
    return [r for r in rows.values() if any(r.values())]


def _nullity(layout, d, extra_ops=(), cap=DEFAULT_TERM_CAP):
    total = 0
    ncols = 0
    for a in range(d + 1):
        for b in range(d + 1):
            cols = _block_columns(layout, a, b)
            ncols += len(cols)
            if ncols > cap:
                raise CapacityError(f"{ncols} unknown coefficients exceed the cap of {cap}")
            rows = _generator_rows(layout, cols, extra_ops)
            total += len(cols) - sparse_rank(rows)
    return total


def invariant_subspace_dim(p, q, n, d, cap=DEFAULT_TERM_CAP):
    """Dimension of the U(n)-invariant polynomials with ``deg_z, deg_z' <= d``.

    The unknowns are the coefficients of every monomial in the degree box;
    the system stacks all ``(t, u)`` invariance equations and its nullity is
    found by exact integer elimination, one ``(deg_z, deg_z')`` block at a
    time (the equations never mix blocks).
    """
    if d < 0:
        raise ParameterError("d must be nonnegative")
    return _nullity(Layout(p, q, n), d, cap=cap)


def laplacian_kernel_dim_in_invariants(p, q, n, d, cap=DEFAULT_TERM_CAP):
    """Dimension of the invariants of degree ``<= d`` killed by every ``Delta_{i,j}``."""
    if d < 0:
        raise ParameterError("d must be nonnegative")
    lay = Layout(p, q, n)
    ops = [
        (("D", i, j), (lambda f, i=i, j=j: laplacian(f, i, j)))
        for i in range(p)
        for j in range(q)
    ]
    return _nullity(lay, d, extra_ops=ops, cap=cap)


def maximally_entangled(p, q, n, d, cap=DEFAULT_TERM_CAP):
    """Unnormalized maximally entangled state truncated at ``Z``-degree ``d``.

    Lives on ``Layout(p+q, p+q, n)``: the pairing polynomial
    ``X = Z_{1,q+1} + ... + Z_{p,q+p} + Z_{p+1,1} + ... + Z_{p+q,q}``
    and the state is ``sum_{m <= d} X^m / m!``. Its squared norm is
    ``binom(n(p+q) + d, d)``.
    """
    P = p + q
    lay = Layout(P, P, n)
    X = FockPoly(lay)
    for i in range(p):
        X = X + Z_poly(lay, i, q + i)
    for i in range(p, P):
        X = X + Z_poly(lay, i, i - p)
    out = FockPoly.one(lay)
    term = FockPoly.one(lay)
    for m in range(1, d + 1):
        term = term.mul(X, cap=cap).scale(Fraction(1, m))
        out = out + term
        if len(out) > cap:
            raise CapacityError(f"state exceeds {cap} terms")
    return out


def system_modes(layout, p, q):
    """Variable indices of the ``(p, q)`` subsystem inside a doubled layout.

    The subsystem is formed by the first ``p`` z-columns and the first ``q``
    z'-columns of every replica, in the order used by ``Layout(p, q, n)``.
    """
    n = layout.n
    return [layout.z(t, i) for t in range(n) for i in range(p)] + [
        layout.zp(t, j) for t in range(n) for j in range(q)
    ]


# operators ------------------------------------------------------------------


def _restrict(key, modes):
    out = 0
    for pos, v in enumerate(modes):
        out |= ((key >> (BITS * v)) & MASK) << (BITS * pos)
    return out


def _embed(key, modes):
    out = 0
    for pos, v in enumerate(modes):
        out |= ((key >> (BITS * pos)) & MASK) << (BITS * v)
    return out


class FockOperator:
    """Finite-rank operator ``sum c_{K,L} |z^K><z^L|`` on ``nmodes`` modes.

    Kets and bras are unnormalized monomials, so the matrix element in the
    orthonormal monomial basis is ``c_{K,L} sqrt(K! L!)``.
    """

    __slots__ = ("nmodes", "terms")

    def __init__(self, nmodes, terms=None):
        self.nmodes = nmodes
        self.terms = {} if terms is None else {k: c for k, c in terms.items() if c}

    @classmethod
    def outer(cls, f, g=None):
        """``|f><g|`` for polynomials on the same variables."""
        g = f if g is None else g
        terms = {}
        for kf, cf in f.terms.items():
            for kg, cg in g.terms.items():
                terms[(kf, kg)] = cf * cg.conjugate()
        return cls(f.nvars, terms)

    def __add__(self, other):
        if other.nmodes != self.nmodes:
            raise DimensionError("operators act on different mode counts")
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return FockOperator(self.nmodes, out)

    def scale(self, s):
        return FockOperator(self.nmodes, {k: c * s for k, c in self.terms.items()})

    def trace(self):
        acc = 0
        for (K, L), c in self.terms.items():
            if K == L:
                acc += c * key_factorial(K)
        return acc

    def kets(self):
        keys = set()
        for K, L in self.terms:
            keys.add(K)
            keys.add(L)
        return sorted(keys, key=lambda k: grlex_sort_key(unpack(k, self.nmodes)))

    def to_matrix(self, basis=None):
        """Dense matrix in the orthonormal monomial basis ``basis`` (packed keys)."""
        basis = self.kets() if basis is None else list(basis)
        index = {k: a for a, k in enumerate(basis)}
        M = np.zeros((len(basis), len(basis)), dtype=complex)
        for (K, L), c in self.terms.items():
            if K in index and L in index:
                M[index[K], index[L]] += complex(c) * sqrt(key_factorial(K) * key_factorial(L))
        return M, basis

    @classmethod
    def from_matrix(cls, nmodes, M, basis, atol=0.0):
        terms = {}
        for a, K in enumerate(basis):
            for b, L in enumerate(basis):
                c = M[a, b]
                if abs(c) > atol:
                    terms[(K, L)] = complex(c) / sqrt(key_factorial(K) * key_factorial(L))
        return cls(nmodes, terms)

    def expectation(self, f):
        """``<f| op |f>`` for a polynomial on the same modes."""
        acc = 0
        for (K, L), c in self.terms.items():
            a = f.terms.get(K)
            b = f.terms.get(L)
            if a is None or b is None:
                continue
            acc += a.conjugate() * c * b * key_factorial(K) * key_factorial(L)
        return acc

    def sandwich(self, f, g):
        """``<f| op |g>`` for polynomials on the same modes."""
        acc = 0
        for (K, L), c in self.terms.items():
            a = f.terms.get(K)
            b = g.terms.get(L)
            if a is None or b is None:
                continue
            acc += a.conjugate() * c * b * key_factorial(K) * key_factorial(L)
        return acc

    def to_json_obj(self):
        items = sorted(
            self.terms.items(),
            key=lambda kv: (grlex_sort_key(unpack(kv[0][0], self.nmodes)), grlex_sort_key(unpack(kv[0][1], self.nmodes))),
        )
        return {
            "nmodes": self.nmodes,
            "terms": [[list(unpack(K, self.nmodes)), list(unpack(L, self.nmodes)), _encode_scalar(c)] for (K, L), c in items],
        }


def partial_trace(rho, modes):
    """Trace out ``modes``; survivors keep their relative order.

    Traced exponents must agree between ket and bra and contribute their
    factorial (the squared norm of the matched monomial).
    """
    traced = sorted(set(modes))
    if any(v < 0 or v >= rho.nmodes for v in traced):
        raise DimensionError("mode index out of range")
    kept = [v for v in range(rho.nmodes) if v not in set(traced)]
    out = {}
    for (K, L), c in rho.terms.items():
        kt = _restrict(K, traced)
        if kt != _restrict(L, traced):
            continue
        key = (_restrict(K, kept), _restrict(L, kept))
        out[key] = out.get(key, 0) + c * key_factorial(kt)
    return FockOperator(len(kept), out)


def reduced_density(psi, modes):
    """``tr_modes |psi><psi|`` without forming the full outer product.

    Terms of ``psi`` are grouped by their exponents on the traced modes; only
    equal groups pair up, each weighted by the traced factorial.
    """
    traced = sorted(set(modes))
    kept = [v for v in range(psi.nvars) if v not in set(traced)]
    groups = {}
    for key, c in psi.terms.items():
        groups.setdefault(_restrict(key, traced), []).append((_restrict(key, kept), c))
    out = {}
    for T, members in groups.items():
        w = key_factorial(T)
        for K, a in members:
            for L, b in members:
                k = (K, L)
                out[k] = out.get(k, 0) + a * b.conjugate() * w
    return FockOperator(len(kept), out)


def apply_operator(op, f, modes=None):
    """Apply ``op`` to the variables ``modes`` of the polynomial ``f``."""
    modes = list(range(op.nmodes)) if modes is None else list(modes)
    if len(modes) != op.nmodes:
        raise DimensionError("one target variable per operator mode is required")
    by_bra = {}
    for (K, L), c in op.terms.items():
        by_bra.setdefault(L, []).append((K, c * key_factorial(L)))
    out = {}
    for key, a in f.terms.items():
        sub = _restrict(key, modes)
        hits = by_bra.get(sub)
        if not hits:
            continue
        rest = key - _embed(sub, modes)
        for K, c in hits:
            k2 = rest + _embed(K, modes)
            out[k2] = out.get(k2, 0) + c * a
    return f._new({k: c for k, c in out.items() if c})


def twirl(rho, layout, samples, rng):
    """Monte Carlo average of ``W_u rho W_u^dagger`` over Haar ``u``.

    Parameters
    ----------
    rho : FockOperator
        Operator on the variables of ``layout``.
    samples : int
    rng : numpy.random.Generator
    """
    if rho.nmodes != layout.nvars:
        raise DimensionError("operator and layout disagree")
    if samples < 1:
        raise ParameterError("samples must be positive")
    kets = rho.kets()
    acc = FockOperator(rho.nmodes)
    for _ in range(samples):
        u = haar_unitary(rng, layout.n)
        images = {k: apply_unitary_change(FockPoly(layout, {k: 1.0 + 0j}), u) for k in kets}
        terms = {}
        for (K, L), c in rho.terms.items():
            fK, fL = images[K], images[L]
            for a, ca in fK.terms.items():
                for b, cb in fL.terms.items():
                    terms[(a, b)] = terms.get((a, b), 0) + c * ca * cb.conjugate()
        acc = acc + FockOperator(rho.nmodes, terms)
    return acc.scale(1.0 / samples)


def monomial_norm2(key):
    return key_factorial(key)


def su11_norm2(n, k):
    """``||Z^k||^2 = (n+k-1)! k! / (n-1)!`` for ``p = q = 1``."""
    return factorial(n + k - 1) * factorial(k) // factorial(n - 1)


def count_box_monomials(layout, d):
    """Number of monomials with ``deg_z, deg_z' <= d``."""
    a = sum(comb(layout.n * layout.p + k - 1, k) for k in range(d + 1))
    b = sum(comb(layout.n * layout.q + k - 1, k) for k in range(d + 1))
    return a * b
