"""Checked algebra homomorphisms and the induced maps M(h)."""

from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import structlog

from .algebra import Algebra, Element, Subspace, is_ideal
from .exactmath import Matrix, nullspace, solve_sparse
from .exceptions import (
    DimensionMismatchError,
    FieldMismatchError,
    InvariantViolation,
    NotInOperatorAlgebraError,
    NotMultiplicativeError,
    NotSurjectiveError,
)
from .multiplication import LinearOperator, OperatorAlgebra, generate_operator_algebra, mult_algebra

logger = structlog.get_logger()


@dataclass(frozen=True, eq=False)
class Homomorphism:
    """Algebra homomorphism h: domain -> codomain.

    ``matrix`` has shape codomain.dim x domain.dim; column i is h(e_i).
    Build with ``make_hom``; ``unchecked`` skips the multiplicativity check
    and is reserved for maps that are homomorphisms by construction.
    """

    domain: Algebra
    codomain: Algebra
    matrix: Matrix

    @classmethod
    def unchecked(cls, domain: Algebra, codomain: Algebra, matrix: Matrix) -> "Homomorphism":
        return cls(domain, codomain, matrix)

    def __call__(self, x: Element) -> Element:
        if not (x.parent is self.domain or x.parent == self.domain):
            raise DimensionMismatchError("element outside the domain")
        return Element(self.codomain, self.matrix.apply(x.coords))

    @cached_property
    def kernel_space(self) -> Subspace:
        return Subspace.span(self.domain, nullspace(self.matrix))

    @cached_property
    def image_space(self) -> Subspace:
        return Subspace.span(self.codomain, self.matrix.columns())

    @cached_property
    def section_matrix(self) -> Matrix:
        """Right inverse s with h s = 1, free variables set to zero."""
        cols = []
        for k in range(self.codomain.dim):
            x = solve_sparse(self.matrix, {k: self.codomain.field.one})
            if x is None:
                raise NotSurjectiveError(f"basis element {self.codomain.labels[k]} is not in the image")
            cols.append(x)
        return Matrix.from_columns(self.domain.field, cols, self.domain.dim)

    def __eq__(self, other):
        if not isinstance(other, Homomorphism):
            return NotImplemented
        return self.domain == other.domain and self.codomain == other.codomain and self.matrix == other.matrix

    def __hash__(self):
        return hash(self.matrix)

    def __repr__(self):
        return f"Homomorphism({self.domain.dim} -> {self.codomain.dim})"


def make_hom(domain: Algebra, codomain: Algebra, matrix: Matrix) -> Homomorphism:
    """Construct h after checking h(e_i e_j) = h(e_i) h(e_j) for all i, j."""
    if not (domain.field == codomain.field == matrix.field):
        raise FieldMismatchError("homomorphism between algebras over different fields")
    if matrix.shape != (codomain.dim, domain.dim):
        raise DimensionMismatchError(f"matrix of shape {matrix.shape} for a map {domain.dim} -> {codomain.dim}")
    images = matrix.columns()
    for i in range(domain.dim):
        for j in range(domain.dim):
            lhs = matrix.apply(domain.product_vector(i, j))
            rhs = codomain.mul_vectors(images[i], images[j])
            if lhs != rhs:
                raise NotMultiplicativeError(i, j)
    return Homomorphism(domain, codomain, matrix)


def identity_hom(A: Algebra) -> Homomorphism:
    return Homomorphism(A, A, Matrix.identity(A.field, A.dim))


def zero_hom(A: Algebra, B: Algebra) -> Homomorphism:
    if A.field != B.field:
        raise FieldMismatchError("homomorphism between algebras over different fields")
    return Homomorphism(A, B, Matrix.zeros(A.field, B.dim, A.dim))


def kernel(h: Homomorphism) -> Subspace:
    K = h.kernel_space
    if not is_ideal(h.domain, K):
        raise InvariantViolation("kernel of a homomorphism is not an ideal")
    return K


def image(h: Homomorphism) -> Subspace:
    return h.image_space


def is_surjective(h: Homomorphism) -> bool:
    return h.image_space.dim == h.codomain.dim


def section(h: Homomorphism) -> Matrix:
    if not is_surjective(h):
        raise NotSurjectiveError("only surjective homomorphisms have a section")
    return h.section_matrix


def compose(h2: Homomorphism, h1: Homomorphism) -> Homomorphism:
    """h2 after h1."""
    if not (h1.codomain is h2.domain or h1.codomain == h2.domain):
        raise DimensionMismatchError("codomain of the first map is not the domain of the second")
    return Homomorphism.unchecked(h1.domain, h2.codomain, h2.matrix @ h1.matrix)


def induced_mult_hom(h: Homomorphism, u: LinearOperator, M: Optional[OperatorAlgebra] = None) -> LinearOperator:
    """M(h)(u): the operator v on the codomain with v h = h u.

    Computed as v = h u s for the section s. ``M`` may be passed as a
    precomputed ``mult_algebra(h.domain)``.
    """
    if not (u.parent is h.domain or u.parent == h.domain):
        raise DimensionMismatchError("operator acts outside the domain")
    if not is_surjective(h):
        raise NotSurjectiveError("M(h) is only defined for surjective h")
    if M is None:
        M = mult_algebra(h.domain)
    if not M.contains(u):
        raise NotInOperatorAlgebraError("operator is not in the multiplication algebra of the domain")
    K = h.kernel_space
    basis = K.echelon()
    for v in K.rows:
        if not basis.contains(u.matrix.apply(v)):
            raise InvariantViolation("operator in M(A) does not preserve the kernel")
    hu = h.matrix @ u.matrix
    v = hu @ h.section_matrix
    if v @ h.matrix != hu:
        raise InvariantViolation("induced operator does not intertwine with h")
    return LinearOperator(h.codomain, v)


def induced_operator_algebra(h: Homomorphism, M: Optional[OperatorAlgebra] = None) -> OperatorAlgebra:
    """Operator algebra generated by the images of M(A)'s generators."""
    if M is None:
        M = mult_algebra(h.domain)
    images = [induced_mult_hom(h, g, M) for g in M.generators]
    result = generate_operator_algebra(h.codomain, images)
    logger.debug("Induced operator algebra", source_dim=M.dim, target_dim=result.dim)
    return result
