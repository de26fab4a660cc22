"""Exact scalar and linear algebra over the rationals and prime fields.

Everything else in nilplab sits on top of this module:

- ``Field`` describes the base field (Q or F_p) and performs raw arithmetic
  on canonical values (``Fraction`` for Q, residues in ``[0, p)`` for F_p).
- ``Scalar`` pairs a canonical value with its field for the public API.
- Vectors are sparse dicts ``{index: nonzero value}``; ``Matrix`` stores
  sparse rows.
- ``EchelonBasis`` keeps a reduced row-echelon basis of a growing span and
  is the single canonicalization used for spans, membership and ranks.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

from .exceptions import DimensionMismatchError, FieldMismatchError, NotInvertibleError

Vector = Dict[int, Any]


def is_prime(n: int) -> bool:
    """Trial-division primality test."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class Field:
    """Base field: the rationals when ``p`` is None, otherwise F_p."""

    p: Optional[int] = None

    def __post_init__(self):
        if self.p is not None and not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    @classmethod
    def rationals(cls) -> "Field":
        return cls()

    @classmethod
    def prime(cls, p: int) -> "Field":
        return cls(p)

    @property
    def kind(self) -> str:
        return "Q" if self.p is None else "Fp"

    @property
    def characteristic(self) -> int:
        return 0 if self.p is None else self.p

    @property
    def zero(self) -> Any:
        return Fraction(0) if self.p is None else 0

    @property
    def one(self) -> Any:
        return Fraction(1) if self.p is None else 1

    def convert(self, value: Any) -> Any:
        """Bring an int, Fraction, numeric string or Scalar into canonical form."""
        if isinstance(value, Scalar):
            if value.field != self:
                raise FieldMismatchError(f"scalar over {value.field} used in {self}")
            return value.value
        if isinstance(value, str):
            return self.parse(value)
        if isinstance(value, bool) or not isinstance(value, (int, Fraction)):
            raise TypeError(f"cannot use {type(value).__name__} as an exact scalar")
        if self.p is None:
            return Fraction(value)
        if isinstance(value, Fraction):
            if value.denominator % self.p == 0:
                raise NotInvertibleError(f"denominator of {value} vanishes mod {self.p}")
            return value.numerator * pow(value.denominator, -1, self.p) % self.p
        return value % self.p

    def parse(self, text: str) -> Any:
        """Parse "n/d" or "n" (rationals) or a decimal residue."""
        try:
            value = Fraction(text.strip())
        except ValueError as e:
            raise ValueError(f"invalid scalar {text!r}") from e
        return self.convert(value)

    def format(self, value: Any) -> str:
        return str(value)

    def add(self, a: Any, b: Any) -> Any:
        return a + b if self.p is None else (a + b) % self.p

    def sub(self, a: Any, b: Any) -> Any:
        return a - b if self.p is None else (a - b) % self.p

    def mul(self, a: Any, b: Any) -> Any:
        return a * b if self.p is None else (a * b) % self.p

    def neg(self, a: Any) -> Any:
        return -a if self.p is None else (-a) % self.p

    def inv(self, a: Any) -> Any:
        if not a:
            raise NotInvertibleError("zero has no inverse")
        return Fraction(1) / a if self.p is None else pow(a, -1, self.p)

    def __str__(self) -> str:
        return "Q" if self.p is None else f"F_{self.p}"


QQ = Field()


def GF(p: int) -> Field:
    return Field(p)


@dataclass(frozen=True, eq=False)
class Scalar:
    """A field element; ``value`` is always canonical."""

    field: Field
    value: Any

    def __post_init__(self):
        object.__setattr__(self, "value", self.field.convert(self.value))

    def _coerce(self, other: Any) -> "Scalar":
        if isinstance(other, Scalar):
            return other
        return Scalar(self.field, other)

    def __add__(self, other):
        return scalar_add(self, self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return scalar_add(self, scalar_neg(self._coerce(other)))

    def __mul__(self, other):
        return scalar_mul(self, self._coerce(other))

    __rmul__ = __mul__

    def __neg__(self):
        return scalar_neg(self)

    def __truediv__(self, other):
        return scalar_mul(self, scalar_inv(self._coerce(other)))

    def inverse(self) -> "Scalar":
        return scalar_inv(self)

    def is_zero(self) -> bool:
        return not self.value

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.field == other.field and self.value == other.value
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.value == self.field.convert(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.value))

    def __str__(self):
        return self.field.format(self.value)

    def __repr__(self):
        return f"Scalar({self.field}, {self})"


def _same_field(a: Scalar, b: Scalar) -> Field:
    if a.field != b.field:
        raise FieldMismatchError(f"{a.field} vs {b.field}")
    return a.field


def scalar_add(a: Scalar, b: Scalar) -> Scalar:
    f = _same_field(a, b)
    return Scalar(f, f.add(a.value, b.value))


def scalar_mul(a: Scalar, b: Scalar) -> Scalar:
    f = _same_field(a, b)
    return Scalar(f, f.mul(a.value, b.value))


def scalar_neg(a: Scalar) -> Scalar:
    return Scalar(a.field, a.field.neg(a.value))


def scalar_inv(a: Scalar) -> Scalar:
    return Scalar(a.field, a.field.inv(a.value))


# ----------------------------------------------------------------------------
# Sparse vectors
# ----------------------------------------------------------------------------

def vec_axpy(field: Field, target: Vector, coef: Any, source: Mapping[int, Any]) -> None:
    """target += coef * source, in place; zeros are dropped."""
    if not coef:
        return
    p = field.p
    for k, v in source.items():
        s = target.get(k, 0) + coef * v
        if p is not None:
            s %= p
        if s:
            target[k] = s
        else:
            target.pop(k, None)


def vec_add(field: Field, u: Mapping[int, Any], v: Mapping[int, Any]) -> Vector:
    out = dict(u)
    vec_axpy(field, out, field.one, v)
    return out


def vec_sub(field: Field, u: Mapping[int, Any], v: Mapping[int, Any]) -> Vector:
    out = dict(u)
    vec_axpy(field, out, field.neg(field.one), v)
    return out


def vec_scale(field: Field, v: Mapping[int, Any], coef: Any) -> Vector:
    if not coef:
        return {}
    return {k: field.mul(coef, x) for k, x in v.items()}


def vec_from_dense(field: Field, values: Sequence[Any]) -> Vector:
    out: Vector = {}
    for i, x in enumerate(values):
        c = field.convert(x)
        if c:
            out[i] = c
    return out


def vec_to_dense(field: Field, v: Mapping[int, Any], length: int) -> List[Any]:
    return [v.get(i, field.zero) for i in range(length)]


# ----------------------------------------------------------------------------
# Echelon bases
# ----------------------------------------------------------------------------

class EchelonBasis:
    """Reduced row-echelon basis of a growing span of sparse vectors.

    Every stored row has a leading 1 at its pivot and zeros at every other
    pivot, so reduction against the basis is order independent.
    """

    def __init__(self, field: Field, vectors: Iterable[Mapping[int, Any]] = ()):
        self.field = field
        self._rows: Dict[int, Vector] = {}
        for v in vectors:
            self.add(v)

    def reduce(self, vector: Mapping[int, Any]) -> Vector:
        """Residue of ``vector`` modulo the span; zero at every pivot."""
        v = dict(vector)
        neg = self.field.neg
        for pivot in [k for k in v if k in self._rows]:
            c = v.get(pivot)
            if c:
                vec_axpy(self.field, v, neg(c), self._rows[pivot])
        return v

    def add(self, vector: Mapping[int, Any]) -> bool:
        """Extend the span; returns True if the rank grew."""
        r = self.reduce(vector)
        if not r:
            return False
        pivot = min(r)
        scale = self.field.inv(r[pivot])
        r = vec_scale(self.field, r, scale)
        neg = self.field.neg
        for row in self._rows.values():
            c = row.get(pivot)
            if c:
                vec_axpy(self.field, row, neg(c), r)
        self._rows[pivot] = r
        return True

    def contains(self, vector: Mapping[int, Any]) -> bool:
        return not self.reduce(vector)

    def coordinates(self, vector: Mapping[int, Any]) -> Optional[Vector]:
        """Coordinates in the pivot-ordered basis, or None if outside the span."""
        if self.reduce(vector):
            return None
        return {t: vector[p] for t, p in enumerate(self.pivots) if vector.get(p)}

    @property
    def rank(self) -> int:
        return len(self._rows)

    @property
    def pivots(self) -> List[int]:
        return sorted(self._rows)

    def rows(self) -> List[Vector]:
        """Copies of the basis rows ordered by pivot."""
        return [dict(self._rows[p]) for p in sorted(self._rows)]

    def copy(self) -> "EchelonBasis":
        other = EchelonBasis(self.field)
        other._rows = {p: dict(r) for p, r in self._rows.items()}
        return other

    def __len__(self) -> int:
        return len(self._rows)


# ----------------------------------------------------------------------------
# Matrices
# ----------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Matrix:
    """Exact matrix stored as sparse rows. The constructor trusts its input;
    use the ``from_*`` classmethods for anything user supplied."""

    field: Field
    rows: int
    cols: int
    data: Tuple[Vector, ...]

    @classmethod
    def from_rows(cls, field: Field, rows: Sequence[Sequence[Any]], cols: Optional[int] = None) -> "Matrix":
        if cols is None:
            cols = len(rows[0]) if rows else 0
        data = []
        for r in rows:
            if len(r) != cols:
                raise DimensionMismatchError(f"ragged row of length {len(r)}, expected {cols}")
            data.append(vec_from_dense(field, r))
        return cls(field, len(rows), cols, tuple(data))

    @classmethod
    def from_sparse_rows(cls, field: Field, rows: Sequence[Mapping[int, Any]], cols: int) -> "Matrix":
        data = []
        for r in rows:
            v: Vector = {}
            for j, x in r.items():
                if not 0 <= j < cols:
                    raise DimensionMismatchError(f"column index {j} out of range for {cols} columns")
                c = field.convert(x)
                if c:
                    v[j] = c
            data.append(v)
        return cls(field, len(rows), cols, tuple(data))

    @classmethod
    def from_columns(cls, field: Field, columns: Sequence[Mapping[int, Any]], rows: int) -> "Matrix":
        """Build from sparse canonical columns (column j = image of e_j)."""
        data: List[Vector] = [{} for _ in range(rows)]
        for j, col in enumerate(columns):
            for i, x in col.items():
                if not 0 <= i < rows:
                    raise DimensionMismatchError(f"row index {i} out of range for {rows} rows")
                if x:
                    data[i][j] = x
        return cls(field, rows, len(columns), tuple(data))

    @classmethod
    def from_column(cls, field: Field, values: Sequence[Any]) -> "Matrix":
        return cls.from_rows(field, [[x] for x in values], 1)

    @classmethod
    def zeros(cls, field: Field, rows: int, cols: int) -> "Matrix":
        return cls(field, rows, cols, tuple({} for _ in range(rows)))

    @classmethod
    def identity(cls, field: Field, n: int) -> "Matrix":
        return cls(field, n, n, tuple({i: field.one} for i in range(n)))

    @classmethod
    def unflatten(cls, field: Field, flat: Mapping[int, Any], rows: int, cols: int) -> "Matrix":
        data: List[Vector] = [{} for _ in range(rows)]
        for idx, x in flat.items():
            data[idx // cols][idx % cols] = x
        return cls(field, rows, cols, tuple(data))

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    def entry(self, i: int, j: int) -> Any:
        return self.data[i].get(j, self.field.zero)

    def __getitem__(self, key: Tuple[int, int]) -> Scalar:
        i, j = key
        return Scalar(self.field, self.entry(i, j))

    def row(self, i: int) -> Vector:
        return dict(self.data[i])

    def columns(self) -> List[Vector]:
        cols: List[Vector] = [{} for _ in range(self.cols)]
        for i, r in enumerate(self.data):
            for j, x in r.items():
                cols[j][i] = x
        return cols

    def col(self, j: int) -> Vector:
        return {i: r[j] for i, r in enumerate(self.data) if j in r}

    def transpose(self) -> "Matrix":
        return Matrix(self.field, self.cols, self.rows, tuple(self.columns()))

    def _check(self, other: "Matrix") -> None:
        if self.field != other.field:
            raise FieldMismatchError(f"{self.field} vs {other.field}")

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.cols != other.rows:
            raise DimensionMismatchError(f"cannot compose {self.shape} with {other.shape}")
        f = self.field
        data = []
        for r in self.data:
            out: Vector = {}
            for j, x in r.items():
                src = other.data[j]
                if src:
                    vec_axpy(f, out, x, src)
            data.append(out)
        return Matrix(f, self.rows, other.cols, tuple(data))

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.shape != other.shape:
            raise DimensionMismatchError(f"cannot add {self.shape} and {other.shape}")
        return Matrix(self.field, self.rows, self.cols,
                      tuple(vec_add(self.field, a, b) for a, b in zip(self.data, other.data)))

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.shape != other.shape:
            raise DimensionMismatchError(f"cannot subtract {self.shape} and {other.shape}")
        return Matrix(self.field, self.rows, self.cols,
                      tuple(vec_sub(self.field, a, b) for a, b in zip(self.data, other.data)))

    def __neg__(self) -> "Matrix":
        return self.scale(self.field.neg(self.field.one))

    def scale(self, coef: Any) -> "Matrix":
        c = self.field.convert(coef)
        return Matrix(self.field, self.rows, self.cols, tuple(vec_scale(self.field, r, c) for r in self.data))

    def apply(self, v: Mapping[int, Any]) -> Vector:
        """Matrix times a sparse column vector."""
        f = self.field
        out: Vector = {}
        if not v:
            return out
        for i, r in enumerate(self.data):
            s = 0
            for j, x in r.items():
                y = v.get(j)
                if y:
                    s += x * y
            if f.p is not None:
                s %= f.p
            if s:
                out[i] = s
        return out

    def power(self, k: int) -> "Matrix":
        if self.rows != self.cols:
            raise DimensionMismatchError("power of a non-square matrix")
        result = Matrix.identity(self.field, self.rows)
        for _ in range(k):
            result = result @ self
        return result

    def is_zero(self) -> bool:
        return not any(self.data)

    def flatten(self) -> Vector:
        out: Vector = {}
        n = self.cols
        for i, r in enumerate(self.data):
            for j, x in r.items():
                out[i * n + j] = x
        return out

    def to_dense(self) -> List[List[Any]]:
        return [vec_to_dense(self.field, r, self.cols) for r in self.data]

    def to_strings(self) -> List[List[str]]:
        return [[self.field.format(x) for x in row] for row in self.to_dense()]

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.field == other.field and self.shape == other.shape and self.data == other.data

    def __hash__(self):
        return hash((self.field, self.shape, tuple(tuple(sorted(r.items())) for r in self.data)))

    def __repr__(self):
        return f"Matrix({self.field}, {self.to_strings()})"


class RrefResult(NamedTuple):
    reduced: Matrix
    rank: int
    pivot_columns: List[int]


def rref(m: Matrix) -> RrefResult:
    """Reduced row-echelon form with leading ones; zero rows at the bottom."""
    basis = EchelonBasis(m.field, m.data)
    rows = basis.rows()
    padded = tuple(rows) + tuple({} for _ in range(m.rows - len(rows)))
    return RrefResult(Matrix(m.field, m.rows, m.cols, padded), basis.rank, basis.pivots)


def rank(m: Matrix) -> int:
    return EchelonBasis(m.field, m.data).rank


def solve_sparse(m: Matrix, target: Mapping[int, Any]) -> Optional[Vector]:
    """Particular solution of m x = target with free variables zero, or None."""
    aug = m.cols
    rows = []
    for i, r in enumerate(m.data):
        row = dict(r)
        if target.get(i):
            row[aug] = target[i]
        rows.append(row)
    basis = EchelonBasis(m.field, rows)
    if aug in basis.pivots:
        return None
    solution: Vector = {}
    for row in basis.rows():
        pivot = min(row)
        value = row.get(aug)
        if value:
            solution[pivot] = value
    return solution


def solve(m: Matrix, target: Union[Matrix, Sequence[Any]]) -> Optional[Matrix]:
    """Solve m x = target; returns a column matrix or None if inconsistent."""
    if isinstance(target, Matrix):
        if target.cols != 1:
            raise DimensionMismatchError("target must be a single column")
        m._check(target)
        vec = target.col(0)
        length = target.rows
    else:
        vec = vec_from_dense(m.field, target)
        length = len(target)
    if length != m.rows:
        raise DimensionMismatchError(f"target of length {length} for a matrix with {m.rows} rows")
    x = solve_sparse(m, vec)
    if x is None:
        return None
    return Matrix.from_columns(m.field, [x], m.cols)


def nullspace(m: Matrix) -> List[Vector]:
    """Basis of {x | m x = 0}, one vector per free column."""
    reduced, _, pivots = rref(m)
    pivot_set = set(pivots)
    neg = m.field.neg
    basis = []
    for free in range(m.cols):
        if free in pivot_set:
            continue
        v: Vector = {free: m.field.one}
        for r, pivot in enumerate(pivots):
            c = reduced.data[r].get(free)
            if c:
                v[pivot] = neg(c)
        basis.append(v)
    return basis


def determinant(m: Matrix) -> Any:
    if m.rows != m.cols:
        raise DimensionMismatchError("determinant of a non-square matrix")
    f = m.field
    a = m.to_dense()
    n = m.rows
    det = f.one
    for c in range(n):
        pivot = next((r for r in range(c, n) if a[r][c]), None)
        if pivot is None:
            return f.zero
        if pivot != c:
            a[c], a[pivot] = a[pivot], a[c]
            det = f.neg(det)
        det = f.mul(det, a[c][c])
        inv = f.inv(a[c][c])
        for r in range(c + 1, n):
            if a[r][c]:
                factor = f.mul(a[r][c], inv)
                a[r] = [f.sub(x, f.mul(factor, y)) for x, y in zip(a[r], a[c])]
    return det


def inverse(m: Matrix) -> Matrix:
    if m.rows != m.cols:
        raise DimensionMismatchError("inverse of a non-square matrix")
    n = m.rows
    rows = []
    for i, r in enumerate(m.data):
        row = dict(r)
        row[n + i] = m.field.one
        rows.append(row)
    basis = EchelonBasis(m.field, rows)
    if basis.pivots != list(range(n)):
        raise NotInvertibleError("matrix is singular")
    data = tuple({j - n: x for j, x in row.items() if j >= n} for row in basis.rows())
    return Matrix(m.field, n, n, data)
