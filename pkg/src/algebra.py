"""Structure-constant algebras, subspaces and descending series.

An ``Algebra`` is a finite-dimensional vector space with a bilinear (not
necessarily associative) product given by structure constants
``e_i e_j = sum_k c[i][j][k] e_k``, stored sparsely. Subspaces are kept in
reduced row-echelon form so that equality, containment and dimension are
all rank computations.
"""

import itertools
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import structlog

from .config import settings
from .exactmath import EchelonBasis, Field, Matrix, Scalar, Vector, nullspace, vec_add, vec_axpy, vec_scale, vec_sub
from .exceptions import (
    DimensionLimitError,
    DimensionMismatchError,
    FieldMismatchError,
    InvariantViolation,
    NotAnIdealError,
)
from .models import SeriesKind, SeriesSummary, StructureChecks

logger = structlog.get_logger()

Entry = Tuple[int, int, int, Any]


@dataclass(frozen=True, eq=False)
class Algebra:
    """Finite-dimensional algebra over an exact field.

    ``table`` maps a basis pair ``(i, j)`` to the sparse coordinate vector
    of ``e_i e_j``; pairs with zero product are absent.
    """

    field: Field
    dim: int
    labels: Tuple[str, ...]
    table: Mapping[Tuple[int, int], Vector]

    @property
    def entries(self) -> List[Entry]:
        """Nonzero structure constants as ``(i, j, k, c)``."""
        out = []
        for (i, j), v in sorted(self.table.items()):
            for k in sorted(v):
                out.append((i, j, k, Scalar(self.field, v[k])))
        return out

    def product_vector(self, i: int, j: int) -> Vector:
        return self.table.get((i, j), {})

    def mul_vectors(self, u: Mapping[int, Any], v: Mapping[int, Any]) -> Vector:
        f = self.field
        out: Vector = {}
        if not u or not v:
            return out
        for i, a in u.items():
            for j, b in v.items():
                prod = self.table.get((i, j))
                if prod:
                    vec_axpy(f, out, f.mul(a, b), prod)
        return out

    def basis_element(self, i: int) -> "Element":
        if not 0 <= i < self.dim:
            raise DimensionMismatchError(f"basis index {i} out of range for dimension {self.dim}")
        return Element(self, {i: self.field.one})

    def basis(self) -> List["Element"]:
        return [self.basis_element(i) for i in range(self.dim)]

    def gen(self, label: str) -> "Element":
        """Basis element by label."""
        try:
            return self.basis_element(self.labels.index(label))
        except ValueError:
            raise KeyError(f"no basis element labelled {label!r}") from None

    def element(self, coords: Union[Sequence[Any], Mapping[int, Any]]) -> "Element":
        f = self.field
        if isinstance(coords, Mapping):
            items = coords.items()
        else:
            if len(coords) != self.dim:
                raise DimensionMismatchError(f"{len(coords)} coordinates for dimension {self.dim}")
            items = enumerate(coords)
        v: Vector = {}
        for i, x in items:
            if not 0 <= i < self.dim:
                raise DimensionMismatchError(f"coordinate index {i} out of range")
            c = f.convert(x)
            if c:
                v[i] = c
        return Element(self, v)

    def zero(self) -> "Element":
        return Element(self, {})

    def full(self) -> "Subspace":
        return Subspace.full(self)

    def __eq__(self, other):
        if not isinstance(other, Algebra):
            return NotImplemented
        if self is other:
            return True
        return (self.field == other.field and self.dim == other.dim
                and self.labels == other.labels and dict(self.table) == dict(other.table))

    def __hash__(self):
        return hash((self.field, self.dim, self.labels, len(self.table)))

    def __repr__(self):
        return f"Algebra({self.field}, dim={self.dim}, products={len(self.table)})"


def make_algebra(
    field: Field,
    dim: int,
    labels: Optional[Sequence[str]] = None,
    entries: Iterable[Entry] = (),
) -> Algebra:
    """Build an algebra from ``(i, j, k, c)`` entries; unspecified products are zero."""
    if dim < 0:
        raise DimensionMismatchError("dimension must be nonnegative")
    if dim > settings.max_dim:
        raise DimensionLimitError(dim, settings.max_dim)
    if labels is None:
        labels = [f"e{i}" for i in range(dim)]
    if len(labels) != dim:
        raise DimensionMismatchError(f"{len(labels)} labels for dimension {dim}")
    table: Dict[Tuple[int, int], Vector] = {}
    seen = set()
    for i, j, k, c in entries:
        for idx in (i, j, k):
            if not 0 <= idx < dim:
                raise DimensionMismatchError(f"index {idx} out of range in entry ({i}, {j}, {k})")
        if (i, j, k) in seen:
            raise ValueError(f"duplicate structure constant for ({i}, {j}, {k})")
        seen.add((i, j, k))
        if isinstance(c, Scalar) and c.field != field:
            raise FieldMismatchError(f"structure constant over {c.field} in an algebra over {field}")
        value = field.convert(c)
        if value:
            table.setdefault((i, j), {})[k] = value
    return Algebra(field, dim, tuple(labels), table)


def _from_table(field: Field, labels: Sequence[str], table: Mapping[Tuple[int, int], Vector]) -> Algebra:
    if len(labels) > settings.max_dim:
        raise DimensionLimitError(len(labels), settings.max_dim)
    return Algebra(field, len(labels), tuple(labels), {k: v for k, v in table.items() if v})


@dataclass(frozen=True, eq=False)
class Element:
    """Element of an algebra with sparse canonical coordinates."""

    parent: Algebra
    coords: Mapping[int, Any]

    def _check(self, other: "Element") -> None:
        if not (self.parent is other.parent or self.parent == other.parent):
            raise DimensionMismatchError("elements of different algebras")

    @property
    def coordinates(self) -> List[Scalar]:
        f = self.parent.field
        return [Scalar(f, self.coords.get(i, f.zero)) for i in range(self.parent.dim)]

    def coefficient(self, i: int) -> Scalar:
        return Scalar(self.parent.field, self.coords.get(i, self.parent.field.zero))

    def __add__(self, other: "Element") -> "Element":
        self._check(other)
        return Element(self.parent, vec_add(self.parent.field, self.coords, other.coords))

    def __sub__(self, other: "Element") -> "Element":
        self._check(other)
        return Element(self.parent, vec_sub(self.parent.field, self.coords, other.coords))

    def __neg__(self) -> "Element":
        f = self.parent.field
        return Element(self.parent, vec_scale(f, self.coords, f.neg(f.one)))

    def scale(self, c: Any) -> "Element":
        f = self.parent.field
        return Element(self.parent, vec_scale(f, self.coords, f.convert(c)))

    def __rmul__(self, c: Any) -> "Element":
        return self.scale(c)

    def __mul__(self, other: Any) -> "Element":
        if isinstance(other, Element):
            return multiply(self, other)
        return self.scale(other)

    def is_zero(self) -> bool:
        return not self.coords

    def __eq__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return (self.parent is other.parent or self.parent == other.parent) and dict(self.coords) == dict(other.coords)

    def __hash__(self):
        return hash(tuple(sorted(self.coords.items())))

    def __str__(self):
        if not self.coords:
            return "0"
        f = self.parent.field
        terms = []
        for i in sorted(self.coords):
            c = self.coords[i]
            label = self.parent.labels[i]
            terms.append(label if c == f.one else f"{f.format(c)}*{label}")
        return " + ".join(terms)

    __repr__ = __str__


def multiply(a: Element, b: Element) -> Element:
    """Bilinear product (ab)_k = sum a_i b_j c[i][j][k]."""
    a._check(b)
    return Element(a.parent, a.parent.mul_vectors(a.coords, b.coords))


@dataclass(frozen=True, eq=False)
class Subspace:
    """Linear subspace of an algebra, stored as RREF rows."""

    parent: Algebra
    rows: Tuple[Vector, ...]

    @classmethod
    def span(cls, parent: Algebra, vectors: Iterable[Union[Mapping[int, Any], Element]]) -> "Subspace":
        basis = EchelonBasis(parent.field)
        for v in vectors:
            basis.add(v.coords if isinstance(v, Element) else v)
        return cls(parent, tuple(basis.rows()))

    @classmethod
    def zero(cls, parent: Algebra) -> "Subspace":
        return cls(parent, ())

    @classmethod
    def full(cls, parent: Algebra) -> "Subspace":
        return cls(parent, tuple({i: parent.field.one} for i in range(parent.dim)))

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def pivots(self) -> List[int]:
        return [min(r) for r in self.rows]

    @property
    def basis(self) -> Matrix:
        return Matrix(self.parent.field, len(self.rows), self.parent.dim, tuple(dict(r) for r in self.rows))

    def echelon(self) -> EchelonBasis:
        return EchelonBasis(self.parent.field, self.rows)

    def elements(self) -> List[Element]:
        return [Element(self.parent, dict(r)) for r in self.rows]

    def contains(self, x: Union[Element, Mapping[int, Any]]) -> bool:
        v = x.coords if isinstance(x, Element) else x
        return self.echelon().contains(v)

    def __contains__(self, x) -> bool:
        return self.contains(x)

    def issubset(self, other: "Subspace") -> bool:
        basis = other.echelon()
        return all(basis.contains(r) for r in self.rows)

    __le__ = issubset

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace.span(self.parent, list(self.rows) + list(other.rows))

    def is_zero(self) -> bool:
        return not self.rows

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self):
        return hash(tuple(tuple(sorted(r.items())) for r in self.rows))

    def __repr__(self):
        return f"Subspace(dim={self.dim} of {self.parent.dim})"


def subspace_product(A: Algebra, U: Subspace, V: Subspace) -> Subspace:
    """Span of all products u v with u in U and v in V."""
    if not (U.parent == A and V.parent == A):
        raise DimensionMismatchError("subspaces of a different algebra")
    basis = EchelonBasis(A.field)
    for u in U.rows:
        for v in V.rows:
            basis.add(A.mul_vectors(u, v))
    return Subspace(A, tuple(basis.rows()))


# ----------------------------------------------------------------------------
# Descending series
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class SeriesReport:
    """Computed terms of a descending series.

    Weak and strong series are 1-based (``terms[0]`` is A_[1] = A); the
    derived series is 0-based (``terms[0]`` is A^(0) = A).
    """

    kind: SeriesKind
    terms: Tuple[Subspace, ...]
    stabilized: bool
    vanishing_index: Optional[int]

    @property
    def dimensions(self) -> List[int]:
        return [t.dim for t in self.terms]

    @property
    def offset(self) -> int:
        return 0 if self.kind == SeriesKind.DERIVED else 1

    def term(self, n: int) -> Subspace:
        """Term by its mathematical index; constant after the last computed one."""
        i = n - self.offset
        if i < 0:
            raise IndexError(f"series index {n} below {self.offset}")
        return self.terms[min(i, len(self.terms) - 1)]

    def summary(self) -> SeriesSummary:
        return SeriesSummary(
            kind=self.kind,
            dimensions=self.dimensions,
            stabilized=self.stabilized,
            vanishing_index=self.vanishing_index,
        )


def _check_monotone(kind: SeriesKind, terms: Sequence[Subspace]) -> None:
    for a, b in zip(terms, terms[1:]):
        if not b.issubset(a):
            raise InvariantViolation(f"{kind.value} series is not descending")


def weak_series(A: Algebra) -> SeriesReport:
    """A_[1] = A, A_[n+1] = A A_[n] + A_[n] A."""
    full = Subspace.full(A)
    terms = [full]
    while True:
        last = terms[-1]
        if last.is_zero():
            result = SeriesReport(SeriesKind.WEAK, tuple(terms), False, len(terms))
            break
        nxt = subspace_product(A, full, last) + subspace_product(A, last, full)
        terms.append(nxt)
        if nxt == last:
            result = SeriesReport(SeriesKind.WEAK, tuple(terms), True, None)
            break
    _check_monotone(SeriesKind.WEAK, result.terms)
    logger.debug("Computed weak series", dims=result.dimensions, vanishing_index=result.vanishing_index)
    return result


def strong_series(A: Algebra) -> SeriesReport:
    """A_(1) = A, A_(n+1) = sum over 0 < m < n+1 of A_(m) A_(n+1-m).

    The series can stay on a plateau and then drop again, so it only counts
    as stabilized once a term has held from index a through index 2a - 1;
    after that every later term is forced to be the same.
    """
    terms: List[Subspace] = [Subspace.full(A)]
    distinct: List[Subspace] = [terms[0]]
    slot: List[int] = [0]
    products: Dict[Tuple[int, int], Subspace] = {}
    plateau_start = 1
    while True:
        last = terms[-1]
        n = len(terms)
        if last.is_zero():
            result = SeriesReport(SeriesKind.STRONG, tuple(terms), False, n)
            break
        if n >= 2 * plateau_start - 1 and n > plateau_start:
            result = SeriesReport(SeriesKind.STRONG, tuple(terms), True, None)
            break
        basis = EchelonBasis(A.field)
        for m in range(1, n + 1):
            key = (slot[m - 1], slot[n - m])
            if key not in products:
                products[key] = subspace_product(A, distinct[key[0]], distinct[key[1]])
            for r in products[key].rows:
                basis.add(r)
        nxt = Subspace(A, tuple(basis.rows()))
        if nxt == last:
            slot.append(slot[-1])
        else:
            distinct.append(nxt)
            slot.append(len(distinct) - 1)
            plateau_start = n + 1
        terms.append(nxt)
    _check_monotone(SeriesKind.STRONG, result.terms)
    logger.debug("Computed strong series", dims=result.dimensions, vanishing_index=result.vanishing_index)
    return result


def derived_series(A: Algebra) -> SeriesReport:
    """A^(0) = A, A^(n+1) = A^(n) A^(n)."""
    terms = [Subspace.full(A)]
    while True:
        last = terms[-1]
        if last.is_zero():
            result = SeriesReport(SeriesKind.DERIVED, tuple(terms), False, len(terms) - 1)
            break
        nxt = subspace_product(A, last, last)
        terms.append(nxt)
        if nxt == last:
            result = SeriesReport(SeriesKind.DERIVED, tuple(terms), True, None)
            break
    _check_monotone(SeriesKind.DERIVED, result.terms)
    logger.debug("Computed derived series", dims=result.dimensions, vanishing_index=result.vanishing_index)
    return result


def is_nilpotent(A: Algebra) -> bool:
    return weak_series(A).vanishing_index is not None


def is_solvable(A: Algebra) -> bool:
    return derived_series(A).vanishing_index is not None


def derived_length(A: Algebra) -> Optional[int]:
    return derived_series(A).vanishing_index


def commutator_ideal(A: Algebra) -> Subspace:
    return subspace_product(A, Subspace.full(A), Subspace.full(A))


# ----------------------------------------------------------------------------
# Identities
# ----------------------------------------------------------------------------

def structure_checks(A: Algebra) -> StructureChecks:
    """Check associativity, anticommutativity and Jacobi on basis triples."""
    f = A.field
    n = A.dim
    e = [{i: f.one} for i in range(n)]
    prod = A.product_vector
    mul = A.mul_vectors

    anticommutative = all(not prod(i, i) for i in range(n)) and all(
        not vec_add(f, prod(i, j), prod(j, i)) for i in range(n) for j in range(i + 1, n)
    )

    associative = True
    jacobi = True
    for i, j, k in itertools.product(range(n), repeat=3):
        ij, jk, ki = prod(i, j), prod(j, k), prod(k, i)
        if associative and (ij or jk):
            if mul(ij, e[k]) != mul(e[i], jk):
                associative = False
        if jacobi and (ij or jk or ki):
            total = mul(ij, e[k])
            vec_axpy(f, total, f.one, mul(jk, e[i]))
            vec_axpy(f, total, f.one, mul(ki, e[j]))
            if total:
                jacobi = False
        if not associative and not jacobi:
            break
    return StructureChecks(
        associative=associative,
        anticommutative=anticommutative,
        jacobi=jacobi,
        lie=anticommutative and jacobi,
    )


def twist(A: Algebra, alpha: Any, beta: Any) -> Algebra:
    """Algebra with product x*y = alpha xy + beta yx on the same space."""
    f = A.field
    for s in (alpha, beta):
        if isinstance(s, Scalar) and s.field != f:
            raise FieldMismatchError(f"twist scalar over {s.field} for an algebra over {f}")
    a, b = f.convert(alpha), f.convert(beta)
    table: Dict[Tuple[int, int], Vector] = {}
    for (i, j), v in A.table.items():
        vec_axpy(f, table.setdefault((i, j), {}), a, v)
        vec_axpy(f, table.setdefault((j, i), {}), b, v)
    return _from_table(f, A.labels, table)


# ----------------------------------------------------------------------------
# Ideals, quotients, subalgebras
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class IdealClosure:
    """Ideal generated by a set, with its generation layers.

    ``layers[t]`` is the span of everything reachable from the generators by
    at most t one-sided multiplications by basis elements.
    """

    ideal: Subspace
    layers: Tuple[Subspace, ...]

    def depth_of(self, x: Union[Element, Mapping[int, Any]]) -> Optional[int]:
        for t, layer in enumerate(self.layers):
            if layer.contains(x):
                return t
        return None

    @property
    def depths(self) -> List[int]:
        """Depth at which each later basis vector (RREF of the ideal) appears."""
        return [self.depth_of(r) for r in self.ideal.rows]


def ideal_closure(A: Algebra, generators: Iterable[Element]) -> IdealClosure:
    """Least subspace containing the generators with A V + V A inside V."""
    basis = EchelonBasis(A.field)
    frontier: List[Vector] = []
    for g in generators:
        if g.parent != A:
            raise DimensionMismatchError("generator from a different algebra")
        if basis.add(g.coords):
            frontier.append(dict(g.coords))
    layers = [Subspace(A, tuple(basis.rows()))]
    e = [{i: A.field.one} for i in range(A.dim)]
    while frontier:
        new: List[Vector] = []
        for v in frontier:
            for i in range(A.dim):
                for w in (A.mul_vectors(e[i], v), A.mul_vectors(v, e[i])):
                    if w and basis.add(w):
                        new.append(w)
        frontier = new
        if new:
            layers.append(Subspace(A, tuple(basis.rows())))
    ideal = layers[-1]
    logger.debug("Computed ideal closure", dim=ideal.dim, depth=len(layers) - 1)
    return IdealClosure(ideal, tuple(layers))


def _ideal_witness(A: Algebra, I: Subspace) -> Optional[Tuple[int, int]]:
    basis = I.echelon()
    for t, v in enumerate(I.rows):
        for i in range(A.dim):
            e = {i: A.field.one}
            if not basis.contains(A.mul_vectors(e, v)) or not basis.contains(A.mul_vectors(v, e)):
                return (i, t)
    return None


def is_ideal(A: Algebra, I: Subspace) -> bool:
    return _ideal_witness(A, I) is None


def quotient(A: Algebra, I: Subspace):
    """Quotient algebra A / I and its projection.

    The quotient basis is the images of the basis vectors at the non-pivot
    coordinates of I, so the result is deterministic.
    """
    from .morphism import Homomorphism

    if I.parent != A:
        raise DimensionMismatchError("subspace of a different algebra")
    witness = _ideal_witness(A, I)
    if witness is not None:
        raise NotAnIdealError(
            f"subspace is not an ideal: basis element {witness[0]} times ideal vector {witness[1]} escapes",
            witness,
        )
    basis = I.echelon()
    pivot_set = set(I.pivots)
    complement = [c for c in range(A.dim) if c not in pivot_set]
    position = {c: t for t, c in enumerate(complement)}

    def project(v: Mapping[int, Any]) -> Vector:
        r = basis.reduce(v)
        return {position[k]: x for k, x in r.items()}

    table = {}
    for s, cs in enumerate(complement):
        for t, ct in enumerate(complement):
            v = A.product_vector(cs, ct)
            if v:
                table[(s, t)] = project(v)
    B = _from_table(A.field, [A.labels[c] for c in complement], table)
    columns = [project({k: A.field.one}) for k in range(A.dim)]
    matrix = Matrix.from_columns(A.field, columns, B.dim)
    logger.debug("Built quotient algebra", dim=A.dim, ideal_dim=I.dim, quotient_dim=B.dim)
    return B, Homomorphism.unchecked(A, B, matrix)


def subalgebra(A: Algebra, S: Subspace) -> Algebra:
    """Algebra structure on S in the coordinates of its RREF basis."""
    if S.parent != A:
        raise DimensionMismatchError("subspace of a different algebra")
    basis = S.echelon()
    table = {}
    for s, u in enumerate(S.rows):
        for t, v in enumerate(S.rows):
            w = A.mul_vectors(u, v)
            if not w:
                continue
            coords = basis.coordinates(w)
            if coords is None:
                raise NotAnIdealError("subspace is not closed under multiplication", (s, t))
            table[(s, t)] = coords
    labels = [A.labels[p] for p in S.pivots]
    return _from_table(A.field, labels, table)


def left_annihilator(A: Algebra) -> Subspace:
    """{x | x A = 0}."""
    # x e_j = sum_i x_i (e_i e_j): stack the maps x -> x e_j
    rows: List[Vector] = []
    for j in range(A.dim):
        block = [{} for _ in range(A.dim)]
        for i in range(A.dim):
            for k, c in A.product_vector(i, j).items():
                block[k][i] = c
        rows.extend(block)
    m = Matrix(A.field, len(rows), A.dim, tuple(rows))
    return Subspace.span(A, nullspace(m))


def right_annihilator(A: Algebra) -> Subspace:
    """{x | A x = 0}."""
    rows: List[Vector] = []
    for i in range(A.dim):
        block = [{} for _ in range(A.dim)]
        for j in range(A.dim):
            for k, c in A.product_vector(i, j).items():
                block[k][j] = c
        rows.extend(block)
    m = Matrix(A.field, len(rows), A.dim, tuple(rows))
    return Subspace.span(A, nullspace(m))
