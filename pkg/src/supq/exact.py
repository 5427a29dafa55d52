"""Exact scalars and exact linear algebra over the integers.

``GaussianRational`` is a minimal exact complex number ``a + b i`` with
``Fraction`` parts. The elimination routines work on sparse integer rows
(``dict`` column -> int) and never leave the integers.
"""

from fractions import Fraction
from math import gcd
import numbers

from .errors import CapacityError

__all__ = [
    "GaussianRational",
    "as_exact",
    "conj",
    "is_exact",
    "sparse_rank",
]


class GaussianRational:
    """Exact complex number with rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def _coerce(other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Fraction)):
            return GaussianRational(other, 0)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return complex(self) + other
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return complex(self) - other
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return complex(self) * other
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return complex(self) / other
        den = other.re * other.re + other.im * other.im
        if den == 0:
            raise ZeroDivisionError("GaussianRational division by zero")
        num = self * other.conjugate()
        return GaussianRational(num.re / den, num.im / den)

    def __rtruediv__(self, other):
        return GaussianRational._coerce(other) / self

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only nonnegative integer powers are exact")
        out = GaussianRational(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        if isinstance(other, numbers.Complex):
            return complex(self) == other
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"


def is_exact(x):
    return isinstance(x, (int, Fraction, GaussianRational)) and not isinstance(x, bool)


def as_exact(x):
    """Convert ints, Fractions, strings like ``"3/4"`` to an exact scalar."""
    if isinstance(x, GaussianRational):
        return x if x.im else x.re
    if isinstance(x, (int, Fraction)):
        return x
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact scalar")


def conj(x):
    return x.conjugate()


def _content_normalize(row):
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        return {c: v // g for c, v in row.items()}
    return row


def sparse_rank(rows, max_columns=None):
    """Rank of an integer matrix given as sparse rows.

    Fraction-free elimination: a row is reduced against the pivot stored for
    its leading column by ``r <- p * r - r[c] * pivot``, then divided by its
    content, so entries stay integral and small. Rows holding a single entry
    are applied first; they pin a column to zero and remove it from every
    other row without any arithmetic.

    Parameters
    ----------
    rows : iterable of dict
        Each dict maps a hashable, orderable column label to a nonzero int.
    max_columns : int, optional
        Raise :class:`CapacityError` if more distinct columns appear.
    """
    rows = [dict(r) for r in rows if r]
    if max_columns is not None:
        cols = set()
        for r in rows:
            cols.update(r)
        if len(cols) > max_columns:
            raise CapacityError(f"{len(cols)} columns exceed the cap of {max_columns}")

    rank = 0
    # singleton propagation
    dead = set()
    changed = True
    while changed:
        changed = False
        keep = []
        for r in rows:
            if dead:
                r = {c: v for c, v in r.items() if c not in dead}
            if not r:
                continue
            if len(r) == 1:
                (c,) = r
                dead.add(c)
                rank += 1
                changed = True
            else:
                keep.append(r)
        rows = keep
        # drop duplicates of singletons already counted: rows reduced to a
        # dead column vanish in the next pass

    pivots = {}
    for r in rows:
        r = _content_normalize(r)
        while r:
            c = min(r)
            piv = pivots.get(c)
            if piv is None:
                pivots[c] = r
                rank += 1
                break
            a, b = piv[c], r[c]
            g = gcd(a, b)
            fa, fb = a // g, b // g
            new = {k: fa * v for k, v in r.items()}
            for k, v in piv.items():
                nv = new.get(k, 0) - fb * v
                if nv:
                    new[k] = nv
                else:
                    new.pop(k, None)
            r = _content_normalize(new) if new else new
    return rank
