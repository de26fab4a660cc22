"""Multiplication operators, operator algebras, quasiinverses and stable images."""

import random

import pytest
from hypothesis import given, settings as hsettings, strategies as st

from src.algebra import Subspace, left_annihilator, make_algebra, multiply, right_annihilator, weak_series
from src.exactmath import GF, QQ, Matrix
from src.exceptions import DimensionMismatchError, NotQuasiinvertibleError
from src.multiplication import (
    LinearOperator,
    apply_operators,
    associator_nilpotence,
    associator_op,
    generate_operator_algebra,
    identity_op,
    left_nilpotence,
    left_op,
    mult_algebra,
    mult_algebra_assoc,
    mult_algebra_left,
    mult_algebra_right,
    nilpotence_report,
    operator_algebra_nilpotence,
    operator_nilpotence,
    operator_power,
    operator_power_filtration,
    quasi_mult,
    quasiinverse,
    right_nilpotence,
    right_op,
    stable_image,
    twisted_left_nilpotence,
    zero_op,
)
from src.scenarios import (
    build_upper_triangular_assoc,
    build_xixi,
    build_xwi,
    random_algebra,
    random_associative_algebra,
)


random_algebras = st.builds(
    lambda field, dim, seed: random_algebra(field, dim, random.Random(seed)),
    st.sampled_from([GF(2), GF(3)]),
    st.integers(1, 4),
    st.integers(0, 10**6),
)


def test_left_and_right_operators(xixi4):
    x1, x2 = xixi4.gen("x1"), xixi4.gen("x2")
    assert left_op(xixi4, x1)(x1) == x2
    assert right_op(xixi4, x2)(x2) == xixi4.gen("x3")
    assert left_op(xixi4, x1)(x2).is_zero()


def test_operator_shape_is_checked(xixi4):
    with pytest.raises(DimensionMismatchError):
        LinearOperator(xixi4, Matrix.identity(QQ, 2))


def test_operator_composition_order(xwi4):
    lx = left_op(xwi4, xwi4.gen("x"))
    rw0 = right_op(xwi4, xwi4.gen("w0"))
    # rw0 sends x to w1; lx then sends w1 to w2
    assert (lx @ rw0)(xwi4.gen("x")) == xwi4.gen("w2")
    assert (rw0 @ lx)(xwi4.gen("x")).is_zero()


def test_mult_algebra_of_xixi4(xixi4):
    M = mult_algebra(xixi4)
    assert M.dim == 3
    assert operator_algebra_nilpotence(M) == 3
    filtration = operator_power_filtration(M)
    assert [len(term) for term in filtration] == [3, 1, 0]


def test_nilpotence_report_of_xixi4(xixi4):
    report = nilpotence_report(xixi4)
    assert (report.N1, report.N2, report.N3) == (4, 5, 3)
    assert report.is_nilpotent


def test_nilpotence_report_of_two_dim_lie(two_dim_lie):
    report = nilpotence_report(two_dim_lie)
    assert not report.is_nilpotent
    assert report.N1 is None and report.N2 is None and report.N3 is None


def test_left_and_right_indices(xwi4):
    assert left_nilpotence(xwi4) == 4
    assert right_nilpotence(xwi4) == 2
    assert twisted_left_nilpotence(xwi4, 0, 1) == 2
    kinds = {op.kind: op.index for op in operator_nilpotence(xwi4)}
    assert kinds["left"] == 4
    assert kinds["right"] == 2
    assert kinds["full"] == 4


def test_associator_algebra_of_associative_algebra():
    T = build_upper_triangular_assoc(4)
    assert mult_algebra_assoc(T).is_zero()
    e = T.basis()
    assert associator_op(T, e[0], e[1]).is_zero()


def test_associator_of_xixi5_is_nonzero():
    A = build_xixi(5)
    x1, x2 = A.gen("x1"), A.gen("x2")
    assert associator_op(A, x1, x1)(x1).is_zero()
    # x2 (x1 x1) - (x2 x1) x1
    assert associator_op(A, x2, x1)(x1) == A.gen("x3")


def test_quasiinverse_of_nilpotent_operator(xwi4):
    lx = left_op(xwi4, xwi4.gen("x"))
    v = quasiinverse(lx)
    expected = -lx + operator_power(lx, 2) - operator_power(lx, 3)
    assert v == expected
    assert quasi_mult(lx, v).is_zero()
    assert quasi_mult(v, lx).is_zero()


def test_quasiinverse_of_zero_is_zero(xixi4):
    assert quasiinverse(zero_op(xixi4)).is_zero()


def test_minus_identity_is_not_quasiinvertible(xixi4):
    with pytest.raises(NotQuasiinvertibleError):
        quasiinverse(-identity_op(xixi4))


def test_stable_image(xixi4, two_dim_lie):
    image, steps = stable_image(xixi4)
    assert image.is_zero()
    assert steps == 3
    image, steps = stable_image(two_dim_lie)
    assert image == Subspace.span(two_dim_lie, [two_dim_lie.gen("y")])
    assert steps == 1


def test_generated_algebra_drops_zero_generators(xixi4):
    M = generate_operator_algebra(xixi4, [zero_op(xixi4)])
    assert M.is_zero()
    assert operator_algebra_nilpotence(M) == 1


@given(random_algebras)
@hsettings(max_examples=40, deadline=None)
def test_nilpotence_criteria_agree(A):
    report = nilpotence_report(A)
    assert report.is_nilpotent == (weak_series(A).vanishing_index is not None)
    image, _ = stable_image(A)
    assert image.is_zero() == report.is_nilpotent


@given(random_algebras)
@hsettings(max_examples=30, deadline=None)
def test_operator_powers_give_weak_series(A):
    weak = weak_series(A)
    for k, ops in enumerate(operator_power_filtration(mult_algebra(A)), start=1):
        assert apply_operators(A, ops) == weak.term(k + 1)


@given(random_algebras)
@hsettings(max_examples=30, deadline=None)
def test_mult_algebra_is_closed(A):
    M = mult_algebra(A)
    for u in M.basis:
        for v in M.basis:
            assert M.contains(u @ v)
    for x in A.basis():
        assert M.contains(left_op(A, x))
        assert M.contains(right_op(A, x))


strictly_upper = st.integers(1, 4).flatmap(
    lambda n: st.lists(st.integers(0, 2), min_size=n * n, max_size=n * n).map(
        lambda flat: [[flat[i * n + j] if j > i else 0 for j in range(n)] for i in range(n)]
    )
)


@given(strictly_upper)
@hsettings(max_examples=40, deadline=None)
def test_quasiinverse_is_an_involution(rows):
    A = make_algebra(GF(3), len(rows), None, [])
    u = LinearOperator(A, Matrix.from_rows(GF(3), rows))
    v = quasiinverse(u)
    assert quasi_mult(u, v).is_zero()
    assert quasiinverse(v) == u


@given(random_algebras, st.integers(0, 10**6))
@hsettings(max_examples=30, deadline=None)
def test_left_multiplication_is_linear(A, seed):
    rng = random.Random(seed)
    a = A.element([rng.randrange(3) for _ in range(A.dim)])
    b = A.element([rng.randrange(3) for _ in range(A.dim)])
    c = rng.randrange(1, 3)
    assert left_op(A, a + b.scale(c)) == left_op(A, a) + left_op(A, b).scale(c)
    assert right_op(A, a + b.scale(c)) == right_op(A, a) + right_op(A, b).scale(c)


@given(st.sampled_from([QQ, GF(2), GF(3)]), st.integers(3, 5), st.integers(0, 10**6))
@hsettings(max_examples=20, deadline=None)
def test_associative_multiplications_compose(field, n, seed):
    A = random_associative_algebra(field, n, random.Random(seed))
    for x in A.basis():
        for y in A.basis():
            xy = multiply(x, y)
            assert left_op(A, xy) == left_op(A, x) @ left_op(A, y)
            assert right_op(A, xy) == right_op(A, y) @ right_op(A, x)
    assert mult_algebra_left(A).dim == A.dim - left_annihilator(A).dim
    assert mult_algebra_right(A).dim == A.dim - right_annihilator(A).dim
    assert associator_nilpotence(A) == 1


def test_upper_triangular_annihilators():
    T = build_upper_triangular_assoc(4)
    assert left_annihilator(T).dim == 3
    assert right_annihilator(T).dim == 3
    assert mult_algebra_left(T).dim == 3
    assert mult_algebra_right(T).dim == 3


def test_associator_index_is_bounded_by_half_of_n3():
    A = build_xixi(5)
    assert nilpotence_report(A).N3 == 4
    index = associator_nilpotence(A)
    assert index is not None and index <= 2
    assert associator_nilpotence(build_xwi(4)) <= 2
