"""Algebras, subspaces, descending series, ideals and quotients."""

import random

import pytest
from hypothesis import given, settings as hsettings, strategies as st

from src.algebra import (
    Subspace,
    commutator_ideal,
    derived_length,
    derived_series,
    ideal_closure,
    is_ideal,
    is_nilpotent,
    is_solvable,
    left_annihilator,
    make_algebra,
    multiply,
    quotient,
    right_annihilator,
    strong_series,
    structure_checks,
    subalgebra,
    twist,
    weak_series,
)
from src.exactmath import GF, QQ, Scalar
from src.exceptions import (
    DimensionLimitError,
    DimensionMismatchError,
    FieldMismatchError,
    NotAnIdealError,
)
from src.models import SeriesKind
from src.scenarios import (
    build_upper_triangular_assoc,
    build_upper_triangular_lie,
    build_xixi,
    random_algebra,
)


# ----------------------------------------------------------------------------
# Construction
# ----------------------------------------------------------------------------

def test_make_algebra_defaults():
    A = make_algebra(QQ, 2, entries=[(0, 0, 1, 3)])
    assert A.labels == ("e0", "e1")
    assert A.entries == [(0, 0, 1, Scalar(QQ, 3))]
    assert multiply(A.basis_element(0), A.basis_element(0)) == A.element([0, 3])


def test_make_algebra_rejects_duplicates():
    with pytest.raises(ValueError):
        make_algebra(QQ, 2, entries=[(0, 0, 1, 1), (0, 0, 1, 2)])


def test_make_algebra_rejects_bad_index():
    with pytest.raises(DimensionMismatchError):
        make_algebra(QQ, 2, entries=[(0, 2, 1, 1)])


def test_make_algebra_rejects_label_count():
    with pytest.raises(DimensionMismatchError):
        make_algebra(QQ, 2, ["a"])


def test_make_algebra_rejects_foreign_scalars():
    with pytest.raises(FieldMismatchError):
        make_algebra(QQ, 1, entries=[(0, 0, 0, Scalar(GF(3), 1))])


def test_dimension_cap(small_max_dim):
    make_algebra(QQ, small_max_dim)
    with pytest.raises(DimensionLimitError):
        make_algebra(QQ, small_max_dim + 1)


def test_zero_products_are_dropped():
    A = make_algebra(GF(3), 1, entries=[(0, 0, 0, 3)])
    assert A.table == {}


def test_element_arithmetic_and_str(xixi4):
    x1, x2 = xixi4.gen("x1"), xixi4.gen("x2")
    assert str(2 * x1 + x2) == "2*x1 + x2"
    assert str(xixi4.zero()) == "0"
    assert x1 * x1 == x2
    assert (x1 - x1).is_zero()
    with pytest.raises(KeyError):
        xixi4.gen("y")


def test_elements_of_different_algebras_do_not_mix(xixi4):
    other = build_xixi(5)
    with pytest.raises(DimensionMismatchError):
        xixi4.gen("x1") + other.gen("x1")


# ----------------------------------------------------------------------------
# Subspaces
# ----------------------------------------------------------------------------

def test_subspace_canonical_form(xixi4):
    a = Subspace.span(xixi4, [{0: 1, 1: 1}, {1: 1}])
    b = Subspace.span(xixi4, [{0: 2}, {0: 1, 1: -1}])
    assert a == b
    assert a.dim == 2
    assert Subspace.span(xixi4, [{1: 1}]) <= a
    assert not (Subspace.full(xixi4) <= a)
    assert (a + Subspace.span(xixi4, [{2: 1}])) == Subspace.full(xixi4)
    assert xixi4.gen("x2") in a


# ----------------------------------------------------------------------------
# Series
# ----------------------------------------------------------------------------

def test_series_of_xixi4(xixi4):
    weak = weak_series(xixi4)
    assert weak.dimensions == [3, 2, 1, 0]
    assert weak.vanishing_index == 4
    strong = strong_series(xixi4)
    assert strong.dimensions == [3, 2, 1, 1, 0]
    assert strong.vanishing_index == 5
    derived = derived_series(xixi4)
    assert derived.dimensions == [3, 2, 1, 0]
    assert derived.vanishing_index == 3


def test_strong_series_of_xixi5_reaches_the_bound():
    assert strong_series(build_xixi(5)).vanishing_index == 9
    assert weak_series(build_xixi(5)).vanishing_index == 5


def test_series_of_two_dim_lie(two_dim_lie):
    weak = weak_series(two_dim_lie)
    assert weak.dimensions == [2, 1, 1]
    assert weak.stabilized
    assert weak.vanishing_index is None
    assert not is_nilpotent(two_dim_lie)
    assert is_solvable(two_dim_lie)
    assert derived_series(two_dim_lie).vanishing_index == 2


def test_series_term_indexing(xixi4):
    weak = weak_series(xixi4)
    assert weak.term(1) == Subspace.full(xixi4)
    assert weak.term(10).is_zero()
    derived = derived_series(xixi4)
    assert derived.offset == 0
    assert derived.term(0) == Subspace.full(xixi4)
    with pytest.raises(IndexError):
        weak.term(0)


def test_series_summary(xixi4):
    summary = weak_series(xixi4).summary()
    assert summary.kind == SeriesKind.WEAK
    assert summary.dimensions == [3, 2, 1, 0]
    assert not summary.stabilized


def test_zero_dimensional_algebra():
    A = make_algebra(QQ, 0)
    assert weak_series(A).vanishing_index == 1
    assert derived_series(A).vanishing_index == 0


@pytest.mark.parametrize("n", [3, 4, 5])
def test_weak_equals_strong_for_lie_algebras(n):
    A = build_upper_triangular_lie(n)
    assert weak_series(A).dimensions == strong_series(A).dimensions
    assert weak_series(A).vanishing_index == n


# ----------------------------------------------------------------------------
# Identities and twists
# ----------------------------------------------------------------------------

def test_structure_checks():
    assoc = structure_checks(build_upper_triangular_assoc(4))
    assert assoc.associative and not assoc.anticommutative
    lie = structure_checks(build_upper_triangular_lie(4))
    assert lie.lie and lie.jacobi and not lie.associative
    assert not structure_checks(build_xixi(5)).associative


def test_twist_gives_commutator_algebra():
    T = build_upper_triangular_assoc(3)
    assert twist(T, 1, -1) == build_upper_triangular_lie(3)


def test_opposite_algebra_by_twist():
    A = make_algebra(QQ, 2, ["a", "b"], [(0, 1, 1, 1)])
    op = twist(A, 0, 1)
    assert multiply(op.gen("b"), op.gen("a")) == op.gen("b")
    assert multiply(op.gen("a"), op.gen("b")).is_zero()


# ----------------------------------------------------------------------------
# Ideals, quotients, subalgebras
# ----------------------------------------------------------------------------

def test_ideal_closure_layers(xwi4):
    closure = ideal_closure(xwi4, [xwi4.gen("w0")])
    assert closure.ideal.dim == 4
    assert [closure.depth_of(xwi4.gen(f"w{j}")) for j in range(4)] == [0, 1, 2, 3]
    assert closure.depth_of(xwi4.gen("x")) is None
    assert is_ideal(xwi4, closure.ideal)


def test_quotient_by_top_degree(xixi4):
    top = Subspace.span(xixi4, [xixi4.gen("x3")])
    B, proj = quotient(xixi4, top)
    assert B == build_xixi(3)
    assert proj(xixi4.gen("x1")) == B.gen("x1")
    assert proj(xixi4.gen("x3")).is_zero()


def test_quotient_rejects_non_ideal(xixi4):
    with pytest.raises(NotAnIdealError) as info:
        quotient(xixi4, Subspace.span(xixi4, [xixi4.gen("x1")]))
    assert info.value.witness is not None


def test_subalgebra_of_square(xixi4):
    S = subalgebra(xixi4, Subspace.span(xixi4, [xixi4.gen("x2"), xixi4.gen("x3")]))
    assert S.labels == ("x2", "x3")
    assert multiply(S.gen("x2"), S.gen("x2")) == S.gen("x3")


def test_subalgebra_requires_closure(xixi4):
    with pytest.raises(NotAnIdealError):
        subalgebra(xixi4, Subspace.span(xixi4, [xixi4.gen("x1")]))


def test_annihilators(xixi4, xwi4):
    assert left_annihilator(xixi4) == Subspace.span(xixi4, [xixi4.gen("x3")])
    assert right_annihilator(xixi4) == Subspace.span(xixi4, [xixi4.gen("x3")])
    assert left_annihilator(xwi4).dim == 4
    assert right_annihilator(xwi4) == Subspace.span(xwi4, [xwi4.gen("x"), xwi4.gen("w3")])


def test_derived_length_and_commutator_ideal(xixi4, two_dim_lie):
    assert derived_length(xixi4) == 3
    assert commutator_ideal(xixi4) == Subspace.span(xixi4, [xixi4.gen("x2"), xixi4.gen("x3")])
    assert derived_length(two_dim_lie) == 2
    assert commutator_ideal(two_dim_lie) == Subspace.span(two_dim_lie, [two_dim_lie.gen("y")])
    assert commutator_ideal(two_dim_lie) == derived_series(two_dim_lie).term(1)


@given(
    st.sampled_from([GF(2), GF(3)]),
    st.integers(1, 4),
    st.integers(0, 10**6),
    st.integers(1, 3),
)
@hsettings(max_examples=40, deadline=None)
def test_quotient_by_ideal_closure_kills_generators(field, dim, seed, count):
    rng = random.Random(seed)
    A = random_algebra(field, dim, rng)
    gens = [A.element([rng.randrange(field.characteristic) for _ in range(dim)]) for _ in range(count)]
    closure = ideal_closure(A, gens)
    assert is_ideal(A, closure.ideal)
    B, proj = quotient(A, closure.ideal)
    assert B.dim == A.dim - closure.ideal.dim
    for g in gens:
        assert proj(g).is_zero()
