from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qbundle.linalg import (I, ONE, ZERO, SQRT3, Accumulator, DimensionMismatch, Echelon, Quotient, S, Scalar,
                            Vec, VectorSpace, format_scalar, inverse_matrix, mat_mul, null_space_rows,
                            parse_scalar, solve_rows)

rat = st.fractions(min_value=-20, max_value=20, max_denominator=7)
scalars = st.builds(Scalar, rat, rat, rat, rat)
gauss = st.builds(Scalar, rat, rat)


@given(scalars, scalars, scalars)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a - a == ZERO
    assert a * ONE == a


@given(scalars)
def test_inverse_and_conj(a):
    if a:
        assert a * a.inverse() == ONE
        assert a / a == ONE
    assert a.conj().conj() == a


@given(scalars, scalars)
def test_conj_is_multiplicative(a, b):
    assert (a * b).conj() == a.conj() * b.conj()


def test_imaginary_unit_and_sqrt3():
    assert I * I == S(-1)
    assert SQRT3 * SQRT3 == S(3)
    assert I.conj() == -I
    assert SQRT3.conj() == SQRT3


@given(gauss)
def test_parse_roundtrip_gaussian(a):
    assert parse_scalar(format_scalar(a)) == a


def test_parse_examples():
    assert parse_scalar("-1/2") == S(Fraction(-1, 2))
    assert parse_scalar("1-2i") == Scalar(1, -2)
    assert parse_scalar("-1/2+(1/2i)*sqrt3") == Scalar(Fraction(-1, 2), 0, 0, Fraction(1, 2))
    with pytest.raises(ValueError):
        parse_scalar("x")


def test_no_float_complex():
    with pytest.raises(TypeError):
        S(1j)


def test_vec_drops_zeros_and_adds():
    v = Vec({"a": 1, "b": 0})
    assert list(v) == ["a"]
    w = v + Vec.unit("a", -1)
    assert not w
    assert (Vec.unit("a") * 3)["a"] == S(3)


def test_accumulator_cancels():
    acc = Accumulator()
    acc.add("x", 2)
    acc.add("x", -2)
    acc.add("y", 1)
    assert acc.vec() == Vec.unit("y")


small_rows = st.lists(st.dictionaries(st.integers(0, 4), rat, max_size=5), max_size=5)


@settings(max_examples=60)
@given(small_rows)
def test_null_space_is_annihilated(rows):
    rows = [{j: S(c) for j, c in r.items()} for r in rows]
    basis = null_space_rows(rows, 5)
    rank = Echelon(rows).rank
    assert len(basis) == 5 - rank
    for x in basis:
        for r in rows:
            assert sum((c * x.get(j, ZERO) for j, c in r.items()), ZERO) == ZERO


@settings(max_examples=60)
@given(small_rows, st.lists(rat, min_size=5, max_size=5))
def test_solve_rows_solves_consistent_systems(rows, x0):
    rows = [{j: S(c) for j, c in r.items()} for r in rows]
    rhs = [sum((c * S(x0[j]) for j, c in r.items()), ZERO) for r in rows]
    x = solve_rows(rows, rhs, 5)
    assert x is not None
    for r, b in zip(rows, rhs):
        assert sum((c * x.get(j, ZERO) for j, c in r.items()), ZERO) == b


def test_solve_rows_inconsistent():
    assert solve_rows([{0: ONE}, {0: ONE}], [1, 2], 1) is None


def test_echelon_order_independent():
    rows = [{0: S(1), 1: S(2)}, {1: S(1), 2: S(1)}, {0: S(1), 1: S(3), 2: S(1)}]
    a = Echelon(rows).rows()
    b = Echelon(reversed(rows)).rows()
    assert a == b


def test_quotient_projects_to_representatives():
    V = VectorSpace(["a", "b", "c"])
    Q = Quotient(V, [Vec({"a": 1, "b": -1})])
    assert Q.dim == 2
    assert Q.project(Vec.unit("a")) == Q.project(Vec.unit("b"))
    assert Q.contains(Vec({"a": 2, "b": -2}))
    with pytest.raises(DimensionMismatch):
        Q.project(Vec.unit("z"))


def test_inverse_matrix():
    m = [[S(1), S(2)], [S(3), S(4)]]
    inv = inverse_matrix(m)
    assert mat_mul(m, inv) == [[ONE, ZERO], [ZERO, ONE]]
    with pytest.raises(ZeroDivisionError):
        inverse_matrix([[S(1), S(2)], [S(2), S(4)]])
