from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from supq.errors import CapacityError, DimensionError
from supq.exact import GaussianRational, as_exact, sparse_rank
from supq.poly import SparsePoly, key_factorial, pack, unpack, weighted_inner

NV = 3
exps = st.tuples(*[st.integers(0, 3)] * NV)
coef = st.fractions(min_value=-5, max_value=5, max_denominator=6)
polys = st.lists(st.tuples(exps, coef), max_size=5).map(lambda it: SparsePoly.from_exponents(NV, it))


def test_pack_roundtrip():
    e = (3, 0, 7, 1)
    assert unpack(pack(e), 4) == e
    assert key_factorial(pack(e)) == 6 * 5040


def test_gaussian_rational_arithmetic():
    a = GaussianRational(Fraction(1, 2), 1)
    b = GaussianRational(0, Fraction(-1, 3))
    assert a * b == GaussianRational(Fraction(1, 3), Fraction(-1, 6))
    assert a * a.conjugate() == Fraction(5, 4)
    assert complex(a / b) == pytest.approx(complex(0.5 + 1j) / complex(-1j / 3))
    assert as_exact("3/4") == Fraction(3, 4)


@given(polys, polys, polys)
def test_ring_axioms(f, g, h):
    assert f * g == g * f
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert (f - f).terms == {}


@given(polys, polys, st.integers(0, NV - 1))
def test_leibniz_rule(f, g, v):
    assert (f * g).diff(v) == f.diff(v) * g + f * g.diff(v)


@given(polys)
def test_json_roundtrip(f):
    assert SparsePoly.from_json_obj(f.to_json_obj()) == f


def test_weighted_inner_monomials():
    x = SparsePoly(2, {pack((1, 0)): 1})
    y = SparsePoly(2, {pack((0, 1)): 1})
    assert weighted_inner(x * x, x * x) == 2
    assert weighted_inner(x, y) == 0
    assert weighted_inner(x * x * y, x * x * y) == 2


def test_capacity_guard():
    f = SparsePoly(2, {pack((1, 0)): 1, pack((0, 1)): 1})
    with pytest.raises(CapacityError):
        f.mul(f, cap=2)


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        SparsePoly(2, {0: 1}) + SparsePoly(3, {0: 1})


@given(st.lists(st.lists(st.integers(-3, 3), min_size=5, max_size=5), min_size=1, max_size=6))
def test_sparse_rank_matches_sympy(rows):
    sparse = [{c: v for c, v in enumerate(r) if v} for r in rows]
    assert sparse_rank(sparse) == sympy.Matrix(rows).rank()
