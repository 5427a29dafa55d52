"""Sparse multivariate polynomials with packed monomial keys.

A monomial ``x_0^e_0 ... x_{k-1}^e_{k-1}`` is stored as the integer
``sum(e_v << (BITS * v))``. Multiplying monomials is then integer addition,
which keeps the inner loops of expansion cheap. Coefficients may be ``int``,
``Fraction``, :class:`~supq.exact.GaussianRational` or ``complex``; the engine
never inspects them beyond ``+``, ``*``, ``conjugate`` and truthiness.
"""

from fractions import Fraction
from math import factorial

from .errors import CapacityError, DimensionError
from .exact import GaussianRational

BITS = 10
MASK = (1 << BITS) - 1
MAX_EXPONENT = MASK

DEFAULT_TERM_CAP = 2_000_000

_fact_cache = {}


def pack(exps):
    key = 0
    for v, e in enumerate(exps):
        if e < 0:
            raise ValueError("negative exponent")
        if e > MAX_EXPONENT:
            raise CapacityError(f"exponent {e} exceeds {MAX_EXPONENT}")
        key |= e << (BITS * v)
    return key


def unpack(key, nvars):
    return tuple((key >> (BITS * v)) & MASK for v in range(nvars))


def exponent(key, v):
    return (key >> (BITS * v)) & MASK


def key_factorial(key):
    """Product of the factorials of the exponents of a packed monomial."""
    out = _fact_cache.get(key)
    if out is None:
        out = 1
        k = key
        while k:
            e = k & MASK
            if e > 1:
                out *= factorial(e)
            k >>= BITS
        _fact_cache[key] = out
    return out


def key_degree(key, variables=None):
    """Total degree, optionally restricted to a collection of variables."""
    if variables is None:
        deg = 0
        while key:
            deg += key & MASK
            key >>= BITS
        return deg
    return sum((key >> (BITS * v)) & MASK for v in variables)


def grlex_sort_key(exps):
    """Graded lexicographic order: total degree first, then x_0 > x_1 > ..."""
    return (sum(exps), tuple(-e for e in exps))


def _encode_scalar(c):
    if isinstance(c, bool):
        raise TypeError("bool coefficient")
    if isinstance(c, int):
        return str(c)
    if isinstance(c, Fraction):
        return f"{c.numerator}/{c.denominator}"
    if isinstance(c, GaussianRational):
        return {"re": _encode_scalar(c.re), "im": _encode_scalar(c.im)}
    c = complex(c)
    return [c.real, c.imag]


def _decode_scalar(obj):
    if isinstance(obj, str):
        f = Fraction(obj)
        return f.numerator if f.denominator == 1 else f
    if isinstance(obj, dict):
        return GaussianRational(Fraction(obj["re"]), Fraction(obj["im"]))
    return complex(obj[0], obj[1])


def terms_from_exponents(nvars, items):
    terms = {}
    for exps, c in items:
        if len(exps) != nvars:
            raise DimensionError("exponent tuple has the wrong length")
        k = pack(exps)
        terms[k] = terms.get(k, 0) + c
    return {k: c for k, c in terms.items() if c}


class SparsePoly:
    """Sparse polynomial in ``nvars`` variables.

    Parameters
    ----------
    nvars : int
        Number of variables.
    terms : dict, optional
        Packed monomial key -> coefficient. Zero coefficients are dropped.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars, terms=None):
        self.nvars = nvars
        if terms is None:
            self.terms = {}
        else:
            self.terms = {k: c for k, c in terms.items() if c}

    # construction -----------------------------------------------------
    def _new(self, terms):
        out = object.__new__(type(self))
        out.nvars = self.nvars
        out.terms = terms
        self._copy_extra(out)
        return out

    def _copy_extra(self, other):
        pass

    def _check(self, other):
        if not isinstance(other, SparsePoly) or other.nvars != self.nvars:
            raise DimensionError("polynomials live in different variable sets")

    @staticmethod
    def from_exponents(nvars, items):
        """Build from ``(exponent_tuple, coefficient)`` pairs."""
        return SparsePoly(nvars, terms_from_exponents(nvars, items))

    def constant(self, c):
        return self._new({0: c} if c else {})

    def variable(self, v, c=1):
        return self._new({1 << (BITS * v): c})

    # inspection -------------------------------------------------------
    def __len__(self):
        return len(self.terms)

    def __bool__(self):
        return bool(self.terms)

    def items(self):
        """``(exponent_tuple, coefficient)`` pairs in graded lex order."""
        pairs = [(unpack(k, self.nvars), c) for k, c in self.terms.items()]
        pairs.sort(key=lambda t: grlex_sort_key(t[0]))
        return pairs

    def coeff(self, exps):
        return self.terms.get(pack(exps), 0)

    def degree(self, variables=None):
        if not self.terms:
            return -1
        return max(key_degree(k, variables) for k in self.terms)

    def __eq__(self, other):
        if not isinstance(other, SparsePoly):
            if not self.terms:
                return not other
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __repr__(self):
        return f"{type(self).__name__}(nvars={self.nvars}, terms={len(self.terms)})"

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, SparsePoly):
            return self + self.constant(other)
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return self._new(out)

    __radd__ = __add__

    def __neg__(self):
        return self._new({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, s):
        if not s:
            return self._new({})
        out = {}
        for k, c in self.terms.items():
            v = c * s
            if v:
                out[k] = v
        return self._new(out)

    def mul(self, other, keep=None, cap=DEFAULT_TERM_CAP):
        """Product, optionally keeping only monomials with ``keep(key)`` true."""
        self._check(other)
        out = {}
        get = out.get
        if len(other.terms) > len(self.terms):
            a, b = other.terms, self.terms
        else:
            a, b = self.terms, other.terms
        for kb, cb in b.items():
            for ka, ca in a.items():
                k = ka + kb
                if keep is not None and not keep(k):
                    continue
                out[k] = get(k, 0) + ca * cb
            if len(out) > cap:
                raise CapacityError(f"product exceeds {cap} terms")
        return self._new({k: c for k, c in out.items() if c})

    def __mul__(self, other):
        if isinstance(other, SparsePoly):
            return self.mul(other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def conj(self):
        """Complex-conjugate every coefficient."""
        return self._new({k: c.conjugate() for k, c in self.terms.items()})

    def diff(self, v):
        """Partial derivative with respect to variable ``v``."""
        shift = BITS * v
        unit = 1 << shift
        out = {}
        for k, c in self.terms.items():
            e = (k >> shift) & MASK
            if e:
                out[k - unit] = c * e
        return self._new(out)

    def mul_var(self, v):
        unit = 1 << (BITS * v)
        return self._new({k + unit: c for k, c in self.terms.items()})

    def truncate(self, keep):
        return self._new({k: c for k, c in self.terms.items() if keep(k)})

    def map_coeffs(self, fn):
        out = {}
        for k, c in self.terms.items():
            v = fn(c)
            if v:
                out[k] = v
        return self._new(out)

    def linear_substitute(self, images, cap=DEFAULT_TERM_CAP):
        """Substitute each variable ``x_v`` by the polynomial ``images[v]``.

        Powers of the images are cached, so a sum over many monomials sharing
        variables costs one multiplication per new factor.
        """
        if len(images) != self.nvars:
            raise DimensionError("one image per variable is required")
        powers = [{0: self.constant(1), 1: img} for img in images]

        def power(v, e):
            cache = powers[v]
            if e not in cache:
                top = max(cache)
                acc = cache[top]
                for j in range(top + 1, e + 1):
                    acc = acc.mul(images[v], cap=cap)
                    cache[j] = acc
            return cache[e]

        total = {}
        for k, c in self.terms.items():
            term = self.constant(c)
            for v, e in enumerate(unpack(k, self.nvars)):
                if e:
                    term = term.mul(power(v, e), cap=cap)
            for kk, cc in term.terms.items():
                total[kk] = total.get(kk, 0) + cc
            if len(total) > cap:
                raise CapacityError(f"substitution exceeds {cap} terms")
        return self._new({k: c for k, c in total.items() if c})

    # serialization ----------------------------------------------------
    def to_json_obj(self):
        return {
            "nvars": self.nvars,
            "terms": [[list(e), _encode_scalar(c)] for e, c in self.items()],
        }

    @classmethod
    def from_json_obj(cls, obj):
        items = [(tuple(e), _decode_scalar(c)) for e, c in obj["terms"]]
        return SparsePoly.from_exponents(obj["nvars"], items)


def weighted_inner(f, g):
    """``sum conj(f_K) g_K K!`` over common monomials (Bargmann pairing)."""
    f._check(g)
    if len(f.terms) > len(g.terms):
        small, big, flip = g.terms, f.terms, True
    else:
        small, big, flip = f.terms, g.terms, False
    acc = 0
    for k, c in small.items():
        d = big.get(k)
        if d is None:
            continue
        if flip:
            acc += d.conjugate() * c * key_factorial(k)
        else:
            acc += c.conjugate() * d * key_factorial(k)
    return acc
