"""Truncated free associative algebras with forbidden subwords.

A stage k<X>/(T + X^d) has as basis the nonempty words over X of length
below d that avoid every forbidden pattern in T; the product of two words
is their concatenation when that is again a basis word, and zero
otherwise. Stages of one presentation at different degrees form a tower
linked by the truncation maps.
"""

from collections import deque
from dataclasses import dataclass
from math import comb
from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

import structlog

from .algebra import Algebra, Element, Subspace, make_algebra
from .exactmath import QQ, EchelonBasis, Field, Matrix, Scalar, vec_axpy
from .exceptions import (
    InvariantViolation,
    NotNilpotentError,
    PresentationMismatchError,
)
from .morphism import Homomorphism, make_hom
from .multiplication import LinearOperator

logger = structlog.get_logger()

Word = str


@dataclass(frozen=True)
class SandwichRule:
    """Forbids every subword left m_1 ... m_k right with all m_i in middle (k >= 0)."""

    left: str
    middle: FrozenSet[str]
    right: str

    def occurs_in(self, word: Word) -> bool:
        for i, a in enumerate(word):
            if a != self.left:
                continue
            for b in word[i + 1:]:
                if b == self.right:
                    return True
                if b not in self.middle:
                    break
        return False


@dataclass(frozen=True)
class ForbiddenSet:
    """Literal forbidden subwords plus sandwich rules."""

    literals: FrozenSet[Word] = frozenset()
    sandwich: Tuple[SandwichRule, ...] = ()

    def __post_init__(self):
        for w in self.literals:
            if len(w) < 2:
                raise ValueError(f"forbidden literal {w!r} must have length at least 2")

    @classmethod
    def build(
        cls,
        literals: Iterable[Word] = (),
        sandwich: Iterable[Tuple[str, Iterable[str], str]] = (),
    ) -> "ForbiddenSet":
        rules = tuple(SandwichRule(left, frozenset(middle), right) for left, middle, right in sandwich)
        return cls(frozenset(literals), rules)

    def is_forbidden(self, word: Word) -> bool:
        if any(lit in word for lit in self.literals):
            return True
        return any(rule.occurs_in(word) for rule in self.sandwich)

    def letters(self) -> FrozenSet[str]:
        out = set()
        for w in self.literals:
            out.update(w)
        for r in self.sandwich:
            out.update((r.left, r.right), r.middle)
        return frozenset(out)


@dataclass(frozen=True, eq=False)
class TruncatedFreeAlgebra:
    """One stage of a truncation tower.

    ``words`` is in graded-lex order (by length, then by alphabet order) and
    doubles as the basis labels of ``algebra``.
    """

    alphabet: Tuple[str, ...]
    forbidden: ForbiddenSet
    degree: int
    words: Tuple[Word, ...]
    index: Mapping[Word, int]
    algebra: Algebra

    @property
    def field(self) -> Field:
        return self.algebra.field

    @property
    def dim(self) -> int:
        return self.algebra.dim

    def same_presentation(self, other: "TruncatedFreeAlgebra") -> bool:
        return self.alphabet == other.alphabet and self.forbidden == other.forbidden and self.field == other.field

    def stage(self, degree: int) -> "TruncatedFreeAlgebra":
        """Same presentation truncated at another degree."""
        if degree == self.degree:
            return self
        return build_truncated(self.alphabet, self.forbidden, degree, self.field)

    def _check_letters(self, word: Word) -> None:
        bad = set(word) - set(self.alphabet)
        if bad:
            raise ValueError(f"letters {sorted(bad)} are not in the alphabet")

    def word_element(self, word: Word) -> Element:
        """Image of a monomial; zero if the word is forbidden or too long."""
        self._check_letters(word)
        if not word:
            raise ValueError("the empty word is not an element of a nonunital stage")
        i = self.index.get(word)
        if i is None:
            return self.algebra.zero()
        return self.algebra.basis_element(i)

    def element_from_words(self, terms: Mapping[Word, Any]) -> Element:
        f = self.field
        v: Dict[int, Any] = {}
        for word, c in terms.items():
            self._check_letters(word)
            i = self.index.get(word)
            if i is not None:
                vec_axpy(f, v, f.convert(c), {i: f.one})
        return Element(self.algebra, v)

    def coefficients(self, x: Element) -> Dict[Word, Scalar]:
        f = self.field
        return {self.words[i]: Scalar(f, c) for i, c in sorted(x.coords.items())}

    def __repr__(self):
        return f"TruncatedFreeAlgebra({''.join(self.alphabet)}, degree={self.degree}, dim={self.dim})"


def _enumerate_words(alphabet: Sequence[str], forbidden: ForbiddenSet, degree: int) -> List[Word]:
    # Allowed words are closed under prefixes, so extending allowed words
    # letter by letter reaches all of them, already in graded-lex order.
    words: List[Word] = []
    queue = deque([""])
    while queue:
        w = queue.popleft()
        if len(w) + 1 >= degree:
            continue
        for a in alphabet:
            u = w + a
            if not forbidden.is_forbidden(u):
                words.append(u)
                queue.append(u)
    return words


def build_truncated(
    alphabet: Sequence[str],
    forbidden: Optional[ForbiddenSet] = None,
    degree: int = 8,
    field: Field = QQ,
) -> TruncatedFreeAlgebra:
    """k<alphabet>/(forbidden + words of length >= degree)."""
    alphabet = tuple(alphabet)
    if not alphabet:
        raise ValueError("alphabet is empty")
    if any(len(a) != 1 for a in alphabet) or len(set(alphabet)) != len(alphabet):
        raise ValueError("alphabet must consist of distinct single characters")
    if degree < 1:
        raise ValueError("degree must be at least 1")
    if forbidden is None:
        forbidden = ForbiddenSet()
    unknown = forbidden.letters() - set(alphabet)
    if unknown:
        raise ValueError(f"forbidden patterns use letters outside the alphabet: {sorted(unknown)}")
    words = _enumerate_words(alphabet, forbidden, degree)
    index = {w: i for i, w in enumerate(words)}
    entries = []
    for i, u in enumerate(words):
        for j, v in enumerate(words):
            k = index.get(u + v)
            if k is not None:
                entries.append((i, j, k, 1))
    algebra = make_algebra(field, len(words), words, entries)
    logger.debug("Built truncated algebra", alphabet="".join(alphabet), degree=degree, dim=len(words))
    return TruncatedFreeAlgebra(alphabet, forbidden, degree, tuple(words), index, algebra)


def truncate_map(
    source: TruncatedFreeAlgebra,
    target: Union[int, TruncatedFreeAlgebra],
) -> Homomorphism:
    """Surjection killing the words of length at least the target degree."""
    if isinstance(target, int):
        target = source.stage(target)
    if not source.same_presentation(target):
        raise PresentationMismatchError("truncation between different presentations")
    if target.degree > source.degree:
        raise ValueError(f"cannot truncate degree {source.degree} to the larger degree {target.degree}")
    one = source.field.one
    cols = []
    for w in source.words:
        k = target.index.get(w)
        cols.append({k: one} if k is not None else {})
    matrix = Matrix.from_columns(source.field, cols, target.dim)
    return make_hom(source.algebra, target.algebra, matrix)


def truncated_ideal(A: TruncatedFreeAlgebra, r: Element) -> Subspace:
    """Two-sided ideal span{a r b : a, b words or the empty word}."""
    f = A.field
    terms = [(A.words[i], c) for i, c in r.coords.items()]
    multipliers = ("",) + A.words
    basis = EchelonBasis(f)
    for a in multipliers:
        left: Dict[Word, Any] = {}
        for t, c in terms:
            if a + t in A.index:
                left[a + t] = c
        if not left:
            continue
        for b in multipliers:
            v: Dict[int, Any] = {}
            for t, c in left.items():
                k = A.index.get(t + b)
                if k is not None:
                    vec_axpy(f, v, c, {k: f.one})
            if v:
                basis.add(v)
    return Subspace(A.algebra, tuple(basis.rows()))


def solve_unipotent(
    A: Union[TruncatedFreeAlgebra, Algebra],
    u: LinearOperator,
    target: Element,
) -> Element:
    """The y with (1 - u)(y) = target, as the finite series sum of u^k(target)."""
    algebra = A.algebra if isinstance(A, TruncatedFreeAlgebra) else A
    if not (u.parent is algebra or u.parent == algebra):
        raise ValueError("operator acts on a different algebra")
    if not u.is_nilpotent():
        raise NotNilpotentError("operator is not nilpotent")
    y = algebra.zero()
    term = target
    while not term.is_zero():
        y = y + term
        term = u(term)
    if y - u(y) != target:
        raise InvariantViolation("(1 - u)(y) differs from the target")
    return y


class CoefficientProfile(NamedTuple):
    vectors: Matrix
    rank: int


def right_coefficient_profile(
    A: TruncatedFreeAlgebra,
    e: Element,
    prefix_letter: str,
    marker_letter: str,
    tail_letter: str,
) -> CoefficientProfile:
    """Coefficients of prefix^j marker tail^k in e, one row per j.

    The prefix and tail letters may coincide.

    Rows are j = 0 .. d-2 and columns are tail powers k = 0 .. d-2.
    """
    letters = (prefix_letter, marker_letter, tail_letter)
    if marker_letter in (prefix_letter, tail_letter):
        raise ValueError("the marker letter must differ from the prefix and tail letters")
    for a in letters:
        if a not in A.alphabet:
            raise ValueError(f"letter {a!r} is not in the alphabet")
    size = max(A.degree - 1, 0)
    rows = []
    for j in range(size):
        row: Dict[int, Any] = {}
        for k in range(size):
            i = A.index.get(prefix_letter * j + marker_letter + tail_letter * k)
            if i is not None and e.coords.get(i):
                row[k] = e.coords[i]
        rows.append(row)
    m = Matrix(A.field, size, size, tuple(rows))
    rank = EchelonBasis(A.field, rows).rank
    return CoefficientProfile(m, rank)


class UnitSeries(NamedTuple):
    """Truncated (1 + x)^e split as constant + element of the nonunital stage."""
    constant: Scalar
    element: Element


def generalized_binomial(exponent: int, k: int) -> int:
    """C(exponent, k) for any integer exponent."""
    if exponent >= 0:
        return comb(exponent, k)
    return (-1) ** k * comb(-exponent + k - 1, k)


def power_series_unit_inverse(
    A: TruncatedFreeAlgebra,
    exponent: int,
    letter: Optional[str] = None,
) -> UnitSeries:
    """(1 + x)^exponent truncated at the stage degree, for exponent <= -1."""
    if exponent > -1:
        raise ValueError("exponent must be a negative integer")
    if letter is None:
        if len(A.alphabet) != 1:
            raise ValueError("a letter is required for a stage with several generators")
        letter = A.alphabet[0]
    if letter not in A.alphabet:
        raise ValueError(f"letter {letter!r} is not in the alphabet")
    terms = {letter * k: generalized_binomial(exponent, k) for k in range(1, A.degree)}
    return UnitSeries(Scalar(A.field, 1), A.element_from_words(terms))
