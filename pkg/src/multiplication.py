"""Multiplication operators and the operator algebras they generate.

For an algebra A, ``l_x(y) = xy`` and ``r_x(y) = yx``. The multiplication
algebra M(A) is the (nonunital) associative algebra of linear maps on A
generated by all l_x and r_x; M_l, M_r and M_a use only left
multiplications, only right multiplications, or only associator maps
``a_{x,z}(y) = x(yz) - (xy)z``.
"""

from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from typing import Any, Iterable, List, Optional, Sequence, Tuple

import structlog

from .algebra import Algebra, Element, Subspace, strong_series, twist, weak_series
from .config import settings
from .exactmath import EchelonBasis, Matrix, determinant, inverse, vec_axpy
from .exceptions import DimensionMismatchError, InvariantViolation, NotQuasiinvertibleError
from .models import NilpotenceReport, OperatorNilpotence

logger = structlog.get_logger()


@dataclass(frozen=True, eq=False)
class LinearOperator:
    """Linear map on an algebra, as a matrix acting on coordinate columns."""

    parent: Algebra
    matrix: Matrix

    def __post_init__(self):
        if self.matrix.field != self.parent.field:
            raise DimensionMismatchError("operator matrix over a different field")
        if self.matrix.shape != (self.parent.dim, self.parent.dim):
            raise DimensionMismatchError(f"operator of shape {self.matrix.shape} on an algebra of dimension {self.parent.dim}")

    def _check(self, other: "LinearOperator") -> None:
        if not (self.parent is other.parent or self.parent == other.parent):
            raise DimensionMismatchError("operators on different algebras")

    def __call__(self, x: Element) -> Element:
        if not (x.parent is self.parent or x.parent == self.parent):
            raise DimensionMismatchError("element of a different algebra")
        return Element(self.parent, self.matrix.apply(x.coords))

    def __matmul__(self, other: "LinearOperator") -> "LinearOperator":
        """Composition: (u @ v)(y) = u(v(y))."""
        self._check(other)
        return LinearOperator(self.parent, self.matrix @ other.matrix)

    def __add__(self, other: "LinearOperator") -> "LinearOperator":
        self._check(other)
        return LinearOperator(self.parent, self.matrix + other.matrix)

    def __sub__(self, other: "LinearOperator") -> "LinearOperator":
        self._check(other)
        return LinearOperator(self.parent, self.matrix - other.matrix)

    def __neg__(self) -> "LinearOperator":
        return LinearOperator(self.parent, -self.matrix)

    def scale(self, c: Any) -> "LinearOperator":
        return LinearOperator(self.parent, self.matrix.scale(c))

    def is_zero(self) -> bool:
        return self.matrix.is_zero()

    def is_nilpotent(self) -> bool:
        m = self.matrix
        for _ in range(self.parent.dim):
            if m.is_zero():
                return True
            m = m @ self.matrix
        return m.is_zero()

    @property
    def flat(self):
        return self.matrix.flatten()

    def __eq__(self, other):
        if not isinstance(other, LinearOperator):
            return NotImplemented
        return self.matrix == other.matrix

    def __hash__(self):
        return hash(self.matrix)

    def __repr__(self):
        return f"LinearOperator({self.matrix.to_strings()})"


def identity_op(A: Algebra) -> LinearOperator:
    return LinearOperator(A, Matrix.identity(A.field, A.dim))


def zero_op(A: Algebra) -> LinearOperator:
    return LinearOperator(A, Matrix.zeros(A.field, A.dim, A.dim))


def _check_element(A: Algebra, x: Element) -> None:
    if not (x.parent is A or x.parent == A):
        raise DimensionMismatchError("element of a different algebra")


def left_op(A: Algebra, x: Element) -> LinearOperator:
    """l_x: column j is x e_j."""
    _check_element(A, x)
    one = A.field.one
    cols = [A.mul_vectors(x.coords, {j: one}) for j in range(A.dim)]
    return LinearOperator(A, Matrix.from_columns(A.field, cols, A.dim))


def right_op(A: Algebra, x: Element) -> LinearOperator:
    """r_x: column j is e_j x."""
    _check_element(A, x)
    one = A.field.one
    cols = [A.mul_vectors({j: one}, x.coords) for j in range(A.dim)]
    return LinearOperator(A, Matrix.from_columns(A.field, cols, A.dim))


def associator_op(A: Algebra, x: Element, z: Element) -> LinearOperator:
    """a_{x,z}(y) = x(yz) - (xy)z."""
    _check_element(A, x)
    _check_element(A, z)
    f = A.field
    mul = A.mul_vectors
    cols = []
    for j in range(A.dim):
        e = {j: f.one}
        col = mul(x.coords, mul(e, z.coords))
        vec_axpy(f, col, f.neg(f.one), mul(mul(x.coords, e), z.coords))
        cols.append(col)
    return LinearOperator(A, Matrix.from_columns(f, cols, A.dim))


@dataclass(frozen=True, eq=False)
class OperatorAlgebra:
    """Subalgebra of End(A) spanned by ``basis`` and generated by ``generators``.

    ``basis`` is the row-reduced basis of the flattened matrices.
    """

    parent: Algebra
    basis: Tuple[LinearOperator, ...]
    generators: Tuple[LinearOperator, ...]
    _echelon: EchelonBasis = dc_field(repr=False, default=None)

    def __post_init__(self):
        if self._echelon is None:
            object.__setattr__(self, "_echelon", EchelonBasis(self.parent.field, [b.flat for b in self.basis]))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, u: LinearOperator) -> bool:
        return self._echelon.contains(u.flat)

    def __contains__(self, u: LinearOperator) -> bool:
        return self.contains(u)

    def is_zero(self) -> bool:
        return not self.basis

    def __repr__(self):
        return f"OperatorAlgebra(dim={self.dim}, generators={len(self.generators)})"


def generate_operator_algebra(A: Algebra, generators: Iterable[LinearOperator]) -> OperatorAlgebra:
    """Least composition-closed subspace of End(A) containing the generators.

    Only left composition by generators is needed: every word g_1...g_k is
    g_1 applied to a shorter word, and each basis element is left-multiplied
    by every generator once, when it first enters the basis.
    """
    gens = []
    for g in generators:
        if not (g.parent is A or g.parent == A):
            raise DimensionMismatchError("generator acts on a different algebra")
        if not g.is_zero():
            gens.append(g)
    basis = EchelonBasis(A.field)
    frontier: List[Matrix] = []
    for g in gens:
        if basis.add(g.flat):
            frontier.append(g.matrix)
    rounds = 0
    while frontier:
        rounds += 1
        new: List[Matrix] = []
        for m in frontier:
            for g in gens:
                c = g.matrix @ m
                if not c.is_zero() and basis.add(c.flatten()):
                    new.append(c)
        frontier = new
    n = A.dim
    ops = tuple(LinearOperator(A, Matrix.unflatten(A.field, row, n, n)) for row in basis.rows())
    M = OperatorAlgebra(A, ops, tuple(gens), basis)
    if M.dim <= settings.closure_check_limit:
        for u in ops:
            for v in ops:
                if not basis.contains((u @ v).flat):
                    raise InvariantViolation("generated operator space is not closed under composition")
    logger.debug("Generated operator algebra", dim=M.dim, generators=len(gens), rounds=rounds)
    return M


def _basis_ops(A: Algebra, make) -> List[LinearOperator]:
    return [make(A, A.basis_element(i)) for i in range(A.dim)]


@lru_cache(maxsize=64)
def mult_algebra(A: Algebra) -> OperatorAlgebra:
    """M(A), generated by l_{e_i} and r_{e_i}."""
    return generate_operator_algebra(A, _basis_ops(A, left_op) + _basis_ops(A, right_op))


@lru_cache(maxsize=64)
def mult_algebra_left(A: Algebra) -> OperatorAlgebra:
    return generate_operator_algebra(A, _basis_ops(A, left_op))


@lru_cache(maxsize=64)
def mult_algebra_right(A: Algebra) -> OperatorAlgebra:
    return generate_operator_algebra(A, _basis_ops(A, right_op))


@lru_cache(maxsize=64)
def mult_algebra_assoc(A: Algebra) -> OperatorAlgebra:
    e = A.basis()
    return generate_operator_algebra(A, [associator_op(A, x, z) for x in e for z in e])


def operator_power_filtration(M: OperatorAlgebra) -> List[Tuple[LinearOperator, ...]]:
    """Bases of M^1, M^2, ... with M^{k+1} = span{g m : g generator, m in M^k}.

    Ends at the first zero term, or at the first term equal to its
    predecessor (the chain is descending, so equal rank means equal).
    """
    A = M.parent
    n = A.dim
    terms = [M.basis]
    while terms[-1]:
        basis = EchelonBasis(A.field)
        for m in terms[-1]:
            for g in M.generators:
                basis.add((g.matrix @ m.matrix).flatten())
        nxt = tuple(LinearOperator(A, Matrix.unflatten(A.field, row, n, n)) for row in basis.rows())
        if len(nxt) == len(terms[-1]):
            break
        terms.append(nxt)
    return terms


def operator_algebra_nilpotence(M: OperatorAlgebra) -> Optional[int]:
    """Smallest k with M^k = 0, or None when the powers stabilize above zero."""
    terms = operator_power_filtration(M)
    if terms[-1]:
        return None
    return len(terms)


def apply_operators(A: Algebra, ops: Sequence[LinearOperator], V: Optional[Subspace] = None) -> Subspace:
    """span{u(v) : u in ops, v in V}; V defaults to all of A."""
    rows = V.rows if V is not None else Subspace.full(A).rows
    basis = EchelonBasis(A.field)
    for u in ops:
        for v in rows:
            basis.add(u.matrix.apply(v))
    return Subspace(A, tuple(basis.rows()))


def nilpotence_report(A: Algebra) -> NilpotenceReport:
    """N1, N2 and N3 with their mutual consistency asserted."""
    n1 = weak_series(A).vanishing_index
    n2 = strong_series(A).vanishing_index
    n3 = operator_algebra_nilpotence(mult_algebra(A))
    present = [x is not None for x in (n1, n2, n3)]
    if any(present) and not all(present):
        raise InvariantViolation(f"nilpotence criteria disagree: N1={n1}, N2={n2}, N3={n3}")
    nilpotent = all(present)
    if nilpotent:
        if n3 != max(1, n1 - 1):
            raise InvariantViolation(f"N3={n3} but N1={n1}")
        if n1 >= 2 and not n1 <= n2 <= 2 ** (n1 - 2) + 1:
            raise InvariantViolation(f"N2={n2} outside [N1, 2^(N1-2)+1] for N1={n1}")
    logger.debug("Computed nilpotence report", N1=n1, N2=n2, N3=n3)
    return NilpotenceReport(N1=n1, N2=n2, N3=n3, is_nilpotent=nilpotent)


def operator_nilpotence(A: Algebra) -> List[OperatorNilpotence]:
    """Dimensions and nilpotence indices of M, M_l, M_r and M_a."""
    out = []
    for kind, build in (
        ("full", mult_algebra),
        ("left", mult_algebra_left),
        ("right", mult_algebra_right),
        ("associator", mult_algebra_assoc),
    ):
        M = build(A)
        out.append(OperatorNilpotence(kind=kind, dim=M.dim, index=operator_algebra_nilpotence(M)))
    return out


def left_nilpotence(A: Algebra) -> Optional[int]:
    return operator_algebra_nilpotence(mult_algebra_left(A))


def right_nilpotence(A: Algebra) -> Optional[int]:
    return operator_algebra_nilpotence(mult_algebra_right(A))


def associator_nilpotence(A: Algebra) -> Optional[int]:
    return operator_algebra_nilpotence(mult_algebra_assoc(A))


def twisted_left_nilpotence(A: Algebra, alpha: Any, beta: Any) -> Optional[int]:
    """Left nilpotence index of x*y = alpha xy + beta yx."""
    return left_nilpotence(twist(A, alpha, beta))


# ----------------------------------------------------------------------------
# Quasiinverses
# ----------------------------------------------------------------------------

def quasi_mult(u: LinearOperator, v: LinearOperator) -> LinearOperator:
    """u * v = u + v + uv."""
    return u + v + (u @ v)


def quasiinverse(u: LinearOperator) -> LinearOperator:
    """v = (1 + u)^{-1} - 1, so that u * v = v * u = 0."""
    one = identity_op(u.parent)
    shifted = (one + u).matrix
    det = determinant(shifted)
    if not det:
        raise NotQuasiinvertibleError(u.parent.field.format(det))
    v = LinearOperator(u.parent, inverse(shifted)) - one
    if not (quasi_mult(u, v).is_zero() and quasi_mult(v, u).is_zero()):
        raise InvariantViolation("quasiinverse fails u * v = 0")
    return v


def operator_power(u: LinearOperator, k: int) -> LinearOperator:
    if k < 0:
        raise ValueError("negative operator power")
    return LinearOperator(u.parent, u.matrix.power(k))


def stable_image(A: Algebra) -> Tuple[Subspace, int]:
    """Stable term of V_0 = A, V_{k+1} = span{g(v)} over the generators of M(A).

    Returns the stable subspace and the smallest k with V_k = V_{k+1}.
    """
    gens = _basis_ops(A, left_op) + _basis_ops(A, right_op)
    V = Subspace.full(A)
    k = 0
    while True:
        nxt = apply_operators(A, gens, V)
        if nxt == V:
            return V, k
        V = nxt
        k += 1
