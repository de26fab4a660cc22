"""Named example algebras and executable reproductions.

Each runner takes ``ScenarioParams`` and returns a ``ScenarioReport`` whose
verdicts pair an expected value with the computed one. Runners never raise
on a failed verdict; ``run_all`` additionally turns exceptions into failed
reports so one broken scenario does not hide the others.
"""

import random
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from math import ceil
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import structlog

from .algebra import (
    Algebra,
    Element,
    SeriesReport,
    Subspace,
    commutator_ideal,
    derived_length,
    derived_series,
    ideal_closure,
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
from .config import settings
from .exactmath import QQ, EchelonBasis, Field, GF, Matrix
from .exceptions import InvariantViolation, UnknownScenarioError
from .freetrunc import (
    ForbiddenSet,
    TruncatedFreeAlgebra,
    build_truncated,
    power_series_unit_inverse,
    right_coefficient_profile,
    solve_unipotent,
    truncate_map,
    truncated_ideal,
)
from .models import NilpotenceReport, RunSummary, ScenarioParams, ScenarioReport, TowerConfig, Verdict, field_from_spec
from .morphism import (
    compose,
    identity_hom,
    induced_mult_hom,
    induced_operator_algebra,
    kernel,
    make_hom,
)
from .multiplication import (
    LinearOperator,
    apply_operators,
    associator_nilpotence,
    identity_op,
    left_nilpotence,
    left_op,
    mult_algebra,
    mult_algebra_left,
    mult_algebra_right,
    nilpotence_report,
    operator_power_filtration,
    quasiinverse,
    right_nilpotence,
    right_op,
    stable_image,
    twisted_left_nilpotence,
)

logger = structlog.get_logger()

_MONOMIAL_BASIS = "nonforbidden words form a basis of the quotient by forbidden words"


# ----------------------------------------------------------------------------
# Report plumbing
# ----------------------------------------------------------------------------

class _Recorder:
    """Collects verdicts and witnesses for one run."""

    def __init__(self, name: str, parameters: Dict[str, Any]):
        self.name = name
        self.parameters = parameters
        self.verdicts: List[Verdict] = []
        self.witnesses: Dict[str, Any] = {}
        self.started = time.perf_counter()
        logger.info("Running scenario", scenario=name, **parameters)

    def check(self, claim: str, citation: str, expected: Any, computed: Any, passed: Optional[bool] = None) -> bool:
        if passed is None:
            passed = expected == computed
        self.verdicts.append(Verdict(claim=claim, citation=citation, expected=expected, computed=computed, passed=passed))
        if not passed:
            logger.warning("Verdict failed", scenario=self.name, claim=claim, expected=expected, computed=computed)
        return passed

    def holds(self, claim: str, citation: str, computed: bool) -> bool:
        return self.check(claim, citation, True, bool(computed))

    def witness(self, key: str, value: Any) -> None:
        self.witnesses[key] = value

    def report(self) -> ScenarioReport:
        runtime = (time.perf_counter() - self.started) * 1000
        report = ScenarioReport(
            scenario=self.name,
            parameters=self.parameters,
            verdicts=self.verdicts,
            witnesses=self.witnesses,
            runtime_ms=round(runtime, 3),
        )
        logger.info("Finished scenario", scenario=self.name, passed=report.passed, runtime_ms=report.runtime_ms)
        return report


def _fmt(x: Element) -> str:
    return str(x)


def _grows_every_two(values: Dict[int, int]) -> bool:
    """Nondecreasing in the degree and strictly larger two degrees on."""
    items = sorted(values.items())
    for i, (d1, v1) in enumerate(items):
        for d2, v2 in items[i + 1:]:
            if v2 < v1 or (d2 - d1 >= 2 and v2 <= v1):
                return False
    return True


# ----------------------------------------------------------------------------
# Builders
# ----------------------------------------------------------------------------

def build_xixi(n: int, field: Field = QQ) -> Algebra:
    """Basis x_1 .. x_{n-1} with x_m x_m = x_{m+1}, all other products zero."""
    if n < 2:
        raise ValueError("n must be at least 2")
    labels = [f"x{m}" for m in range(1, n)]
    entries = [(m, m, m + 1, 1) for m in range(n - 2)]
    return make_algebra(field, n - 1, labels, entries)


def build_xwi(d: int, field: Field = QQ) -> Algebra:
    """Basis x, w_0 .. w_{d-1} with x w_i = w_{i+1}."""
    if d < 1:
        raise ValueError("d must be at least 1")
    labels = ["x"] + [f"w{i}" for i in range(d)]
    entries = [(0, 1 + i, 2 + i, 1) for i in range(d - 1)]
    return make_algebra(field, d + 1, labels, entries)


def build_wiwi(d: int, field: Field = QQ) -> Algebra:
    """Basis w_0 .. w_{d-1} with w_i w_i = w_{i+1}."""
    if d < 1:
        raise ValueError("d must be at least 1")
    labels = [f"w{i}" for i in range(d)]
    entries = [(i, i, i + 1, 1) for i in range(d - 1)]
    return make_algebra(field, d, labels, entries)


def build_alternating(d: int, field: Field = QQ) -> Algebra:
    """Basis x, w_0 .. w_{d-1} with x w_{2i} = w_{2i+1} and w_{2i+1} x = w_{2i+2}."""
    if d < 1:
        raise ValueError("d must be at least 1")
    labels = ["x"] + [f"w{i}" for i in range(d)]
    entries = []
    for j in range(d - 1):
        if j % 2 == 0:
            entries.append((0, 1 + j, 2 + j, 1))
        else:
            entries.append((1 + j, 0, 2 + j, 1))
    return make_algebra(field, d + 1, labels, entries)


def build_modp_lie(p: int) -> Algebra:
    """(p+2)-dimensional solvable Lie algebra over F_p.

    Basis D, XD, Y_0 .. Y_{p-1} (Y_n for the operator X^n Y) with
    [D, XD] = D, [D, Y_n] = n Y_{n-1} + Y_n, [XD, Y_n] = n Y_n + Y_{n+1}
    where Y_p = 0, and [Y_m, Y_n] = 0.
    """
    f = GF(p)
    D, XD = 0, 1

    def Y(n: int) -> int:
        return 2 + n

    brackets: Dict[Tuple[int, int], Dict[int, int]] = {(D, XD): {D: 1}}
    for n in range(p):
        vec = {Y(n): 1}
        if n > 0:
            vec[Y(n - 1)] = n
        brackets[(D, Y(n))] = vec
        vec = {Y(n): n}
        if n + 1 < p:
            vec[Y(n + 1)] = 1
        brackets[(XD, Y(n))] = vec
    entries = []
    for (i, j), vec in brackets.items():
        for k, c in vec.items():
            if c % p:
                entries.append((i, j, k, c))
                entries.append((j, i, k, -c))
    labels = ["D", "XD"] + [f"Y{n}" for n in range(p)]
    B = make_algebra(f, p + 2, labels, entries)
    if not structure_checks(B).lie:
        raise InvariantViolation(f"bracket table for p={p} is not a Lie algebra")
    return B


def build_two_dim_solvable(field: Field = QQ) -> Algebra:
    """[x, y] = y."""
    return make_algebra(field, 2, ["x", "y"], [(0, 1, 1, 1), (1, 0, 1, -1)])


def _upper_pairs(n: int) -> List[Tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def build_upper_triangular_assoc(n: int, field: Field = QQ) -> Algebra:
    """Strictly upper-triangular n x n matrices under matrix product."""
    pairs = _upper_pairs(n)
    index = {pair: t for t, pair in enumerate(pairs)}
    entries = []
    for a, (i, j) in enumerate(pairs):
        for b, (k, l) in enumerate(pairs):
            if j == k:
                entries.append((a, b, index[(i, l)], 1))
    return make_algebra(field, len(pairs), [f"E{i}{j}" for i, j in pairs], entries)


def build_upper_triangular_lie(n: int, field: Field = QQ) -> Algebra:
    """Strictly upper-triangular n x n matrices under the commutator.

    [E_ij, E_kl] = delta_jk E_il - delta_li E_kj.
    """
    pairs = _upper_pairs(n)
    index = {pair: t for t, pair in enumerate(pairs)}
    entries = []
    for a, (i, j) in enumerate(pairs):
        for b, (k, l) in enumerate(pairs):
            if j == k:
                entries.append((a, b, index[(i, l)], 1))
            if l == i:
                entries.append((a, b, index[(k, j)], -1))
    return make_algebra(field, len(pairs), [f"E{i}{j}" for i, j in pairs], entries)


def _random_scalar(field: Field, rng: random.Random) -> Any:
    if field.p is None:
        return rng.choice([Fraction(-2), Fraction(-1), Fraction(1), Fraction(2), Fraction(1, 2)])
    return rng.randrange(1, field.p)


def random_algebra(field: Field, dim: int, rng: random.Random, density: float = 0.35) -> Algebra:
    """Sparse random structure constants.

    Products e_i e_j landing above max(i, j) are favoured so that a good
    share of the samples is nilpotent.
    """
    entries = []
    for i in range(dim):
        for j in range(dim):
            for k in range(dim):
                chance = density if k > max(i, j) else density / 6
                if rng.random() < chance:
                    entries.append((i, j, k, _random_scalar(field, rng)))
    return make_algebra(field, dim, None, entries)


def random_associative_algebra(field: Field, n: int, rng: random.Random, generators: int = 2) -> Algebra:
    """Subalgebra of strictly upper-triangular n x n matrices generated by random elements."""
    T = build_upper_triangular_assoc(n, field)
    basis = EchelonBasis(field)
    elems = []
    for _ in range(generators):
        v = {i: _random_scalar(field, rng) for i in range(T.dim) if rng.random() < 0.5}
        if v and basis.add(v):
            elems.append(v)
    frontier = list(elems)
    while frontier:
        new = []
        for a in frontier:
            for b in list(elems):
                for c in (T.mul_vectors(a, b), T.mul_vectors(b, a)):
                    if c and basis.add(c):
                        new.append(c)
                        elems.append(c)
        frontier = new
    return subalgebra(T, Subspace(T, tuple(basis.rows())))


# ----------------------------------------------------------------------------
# Truncated-tower helpers
# ----------------------------------------------------------------------------

Y_XYZ_FORBIDDEN = ForbiddenSet.build(literals=["xz", "wx", "ww", "zw", "zx"])
Y_XY_YX_FORBIDDEN = ForbiddenSet.build(sandwich=[("w", "x", "w")])


def y_xyz_stage(d: int) -> TruncatedFreeAlgebra:
    return build_truncated("xwz", Y_XYZ_FORBIDDEN, d)


def y_xy_yx_stage(d: int) -> TruncatedFreeAlgebra:
    return build_truncated("xw", Y_XY_YX_FORBIDDEN, d)


def free_xy_stage(d: int) -> TruncatedFreeAlgebra:
    return build_truncated("xy", ForbiddenSet(), d)


def _lr(A: TruncatedFreeAlgebra, letter: str) -> Tuple[LinearOperator, LinearOperator]:
    x = A.word_element(letter)
    return left_op(A.algebra, x), right_op(A.algebra, x)


def y_xyz_element(A: TruncatedFreeAlgebra) -> Element:
    """y = (1 - l_x r_z)^{-1}(w)."""
    lx, _ = _lr(A, "x")
    _, rz = _lr(A, "z")
    return solve_unipotent(A, lx @ rz, A.word_element("w"))


def y_xy_yx_element(A: TruncatedFreeAlgebra) -> Element:
    """y = (1 - l_x + r_x)^{-1}(w)."""
    lx, rx = _lr(A, "x")
    return solve_unipotent(A, lx - rx, A.word_element("w"))


def y_xy_yx_by_commuting_factors(A: TruncatedFreeAlgebra) -> Element:
    """y = sum_i l_x^i (1 + r_x)^{-1-i}(w), using that l_x and r_x commute."""
    lx, rx = _lr(A, "x")
    inv = identity_op(A.algebra) + quasiinverse(rx)
    y = A.algebra.zero()
    term = inv(A.word_element("w"))
    while not term.is_zero():
        y = y + term
        term = lx(inv(term))
    return y


def _subword_closed(A: TruncatedFreeAlgebra) -> bool:
    for w in A.words:
        for i in range(len(w)):
            for j in range(i + 1, len(w) + 1):
                if w[i:j] not in A.index:
                    return False
    return True


# ----------------------------------------------------------------------------
# Reproductions
# ----------------------------------------------------------------------------

def run_scenario_y_xyz(d: int, degrees: Optional[Sequence[int]] = None) -> ScenarioReport:
    """y = w + xwz + x^2wz^2 + ... in k<x,w,z>/(xz, wx, ww, zw, zx)."""
    degrees = sorted(set(degrees or settings.tower_degrees))
    rec = _Recorder("y-xyz", {"degree": d, "degrees": degrees})
    A = y_xyz_stage(d)
    rec.witness("dim", A.dim)
    rec.holds("allowed words are closed under subwords", _MONOMIAL_BASIS, _subword_closed(A))
    rec.holds("stage is associative", "monomial quotients of free algebras are associative",
              structure_checks(A.algebra).associative)

    lx, _ = _lr(A, "x")
    _, rz = _lr(A, "z")
    u = lx @ rz
    w = A.word_element("w")
    y = solve_unipotent(A, u, w)
    rec.witness("y", _fmt(y))
    rec.holds("(1 - l_x r_z)(y) = w", "y is the solution of y - xyz = w", y - u(y) == w)

    expected = A.element_from_words({"x" * i + "w" + "z" * i: 1 for i in range(d)})
    rec.check("y = sum of x^i w z^i", "y = w + xwz + x^2wz^2 + ...", _fmt(expected), _fmt(y))

    via_quasi = w + quasiinverse(-u)(w)
    rec.holds("quasiinverse of -l_x r_z gives the same y", "(1 - u)^{-1} = 1 + quasiinverse(-u)", via_quasi == y)

    ideal = truncated_ideal(A, w)
    rec.holds("y lies in (w) at this stage", "every finite stage has y in the image of (w)", ideal.contains(y))
    rec.check("truncated ideal agrees with ideal closure", "two-sided ideals of associative algebras",
              ideal.dim, ideal_closure(A.algebra, [w]).ideal.dim)

    weak = weak_series(A.algebra)
    rec.holds("stage is nilpotent with N1 <= d", "words of length >= d vanish",
              weak.vanishing_index is not None and weak.vanishing_index <= d)
    depth = max((n for n in range(1, len(weak.terms) + 1) if weak.term(n).contains(y)), default=0)
    rec.witness("weak_series_depth_of_y", depth)

    if d <= settings.operator_degree_limit:
        rec.witness("nilpotence", nilpotence_report(A.algebra).model_dump())

    profile = right_coefficient_profile(A, y, "x", "w", "z")
    rec.check("right coefficient rank", "right coefficient of x^j w in y is z^j", ceil((d - 1) / 2), profile.rank)

    if d > 2:
        lower = A.stage(d - 2)
        p = truncate_map(A, lower)
        rec.holds("truncation sends y_d to y_(d-2)", "the y_d form a compatible family",
                  p(y) == y_xyz_element(lower))

    ranks = {}
    for k in degrees:
        stage = A if k == d else A.stage(k)
        ranks[k] = right_coefficient_profile(stage, y_xyz_element(stage), "x", "w", "z").rank
    rec.witness("rank_growth", {str(k): r for k, r in ranks.items()})
    rec.check("rank growth matches ceil((d-1)/2)", "right coefficients z^0 .. z^j are independent",
              [ceil((k - 1) / 2) for k in degrees], list(ranks.values()))
    rec.holds("rank grows every two degrees", "no finite sum of a_i w b_i equals y", _grows_every_two(ranks))
    return rec.report()


def _sandwich_profile_matches(A: TruncatedFreeAlgebra, y: Element) -> bool:
    """Row i of the profile is (1 + x)^{-1-i} truncated to length d - 2 - i."""
    profile = right_coefficient_profile(A, y, "x", "w", "x")
    for i in range(A.degree - 1):
        unit = build_truncated("x", ForbiddenSet(), A.degree - 1 - i, A.field)
        series = power_series_unit_inverse(unit, -1 - i)
        expected = {0: series.constant.value}
        for word, c in unit.coefficients(series.element).items():
            expected[len(word)] = c.value
        if profile.vectors.row(i) != expected:
            return False
    return True


def run_scenario_y_xy_yx(d: int, degrees: Optional[Sequence[int]] = None) -> ScenarioReport:
    """y = (1 - l_x + r_x)^{-1}(w) in k<x,w>/(w x^i w)."""
    degrees = sorted(set(degrees or settings.tower_degrees))
    rec = _Recorder("y-xy-yx", {"degree": d, "degrees": degrees})
    A = y_xy_yx_stage(d)
    rec.witness("dim", A.dim)
    rec.holds("allowed words are closed under subwords", _MONOMIAL_BASIS, _subword_closed(A))

    lx, rx = _lr(A, "x")
    w = A.word_element("w")
    y = solve_unipotent(A, lx - rx, w)
    y2 = y_xy_yx_by_commuting_factors(A)
    rec.holds("geometric series and commuting-factor formula agree",
              "(1 - l_x + r_x)^{-1} = sum l_x^i (1 + r_x)^{-1-i}", y == y2)
    rec.holds("(1 - l_x + r_x)(y) = w", "y is the solution of y - xy + yx = w", y - lx(y) + rx(y) == w)

    coeffs = {word: c for word, c in A.coefficients(y).items()}
    tail = [str(coeffs.get("w" + "x" * k, 0)) for k in range(d - 1)]
    rec.check("coefficient of w x^k is (-1)^k", "(1 + x)^{-1} = 1 - x + x^2 - ...",
              [str((-1) ** k) for k in range(d - 1)], tail)
    rec.holds("profile rows are truncated (1 + x)^{-1-i}", "x^i w (1 + x)^{-1-i}", _sandwich_profile_matches(A, y))

    ideal = truncated_ideal(A, w)
    rec.holds("y lies in (w) at this stage", "every finite stage has y in the image of (w)", ideal.contains(y))

    if d > 2:
        lower = A.stage(d - 2)
        rec.holds("truncation sends y_d to y_(d-2)", "the y_d form a compatible family",
                  truncate_map(A, lower)(y) == y_xy_yx_element(lower))

    ranks = {}
    for k in degrees:
        stage = A if k == d else A.stage(k)
        ranks[k] = right_coefficient_profile(stage, y_xy_yx_element(stage), "x", "w", "x").rank
    rec.witness("rank_growth", {str(k): r for k, r in ranks.items()})
    rec.check("rank of the (1 + x)^{-1-i} family is d - 1", "powers of 1 + x are linearly independent",
              [max(k - 1, 0) for k in degrees], list(ranks.values()))
    rec.holds("rank grows every two degrees", "no finite sum of a_i w b_i equals y", _grows_every_two(ranks))
    return rec.report()


def run_scenario_y_xy(d: int) -> ScenarioReport:
    """One-sided example: x w_i = w_{i+1}, y = sum w_i, y - xy = w_0."""
    rec = _Recorder("y-xy", {"degree": d})
    A = build_xwi(d)
    x, w0 = A.gen("x"), A.gen("w0")
    y = solve_unipotent(A, left_op(A, x), w0)
    total = A.element({i: 1 for i in range(1, d + 1)})
    rec.check("y = sum of w_i", "y = (1 - l_x)^{-1}(w_0)", _fmt(total), _fmt(y))
    rec.check("y - xy = w_0", "y is the solution of y - xy = w_0", _fmt(w0), _fmt(y - multiply(x, y)))
    closure = ideal_closure(A, [w0])
    rec.check("(w_0) is spanned by the w_i", "ideal generated by w_0", d, closure.ideal.dim)
    rec.check("w_j first appears at depth j", "finite sums of products with w_0",
              list(range(d)), [closure.depth_of(A.gen(f"w{j}")) for j in range(d)])
    rec.holds("y lies in (w_0) at this stage", "every finite stage has y in the image of (w_0)",
              closure.ideal.contains(y))
    return rec.report()


def run_scenario_y_yy(d: int) -> ScenarioReport:
    """w_i w_i = w_{i+1}, y = sum w_i, y - y^2 = w_0."""
    rec = _Recorder("y-yy", {"degree": d})
    A = build_wiwi(d)
    w0 = A.gen("w0")
    y = A.element([1] * d)
    diff = y - multiply(y, y)
    rec.check("y - y^2 = w_0", "y - y^2 = w_0", _fmt(w0), _fmt(diff))
    top = Subspace.span(A, [A.gen(f"w{d - 1}")])
    rec.holds("y - y^2 = w_0 modulo the top degree", "y - y^2 = w_0", top.contains((diff - w0).coords))
    B, proj = quotient(A, top)
    py = proj(y)
    rec.check("y - y^2 = w_0 in the quotient by the top degree", "y - y^2 = w_0",
              _fmt(proj(w0)), _fmt(py - multiply(py, py)))
    closure = ideal_closure(A, [w0])
    rec.check("w_j first appears at depth j", "(w_0) consists of finite sums",
              list(range(d)), [closure.depth_of(A.gen(f"w{j}")) for j in range(d)])
    rec.witness("ideal_depth", len(closure.layers) - 1)
    return rec.report()


def _check_associator_bound(rec: _Recorder, A: Algebra) -> None:
    """M_a(A) lies in M(A)^2, so its index is at most ceil(N3 / 2)."""
    n3 = nilpotence_report(A).N3
    index = associator_nilpotence(A)
    rec.witness("associator_index", index)
    rec.holds("M_a(A) is nilpotent of index <= ceil(N3 / 2)", "a_{x,z} = l_x r_z - r_z l_x lies in M(A)^2",
              n3 is not None and index is not None and index <= ceil(n3 / 2))


def run_scenario_left_right(d: int) -> ScenarioReport:
    """x w_i = w_{i+1}: right nilpotent of index 2, left nilpotent of index d."""
    rec = _Recorder("left-right", {"degree": d})
    A = build_xwi(d)
    left = left_nilpotence(A)
    right = right_nilpotence(A)
    rec.witness("left_index", left)
    rec.witness("right_index", right)
    rec.check("M_r(A)^2 = 0", "(AA)A = 0", 2 if d >= 2 else 1, right)
    rec.check("M_l(A)^n != 0 for n < d", "l_x^(d-1)(w_0) = w_(d-1)", d, left)
    rec.check("weak series vanishes at d + 1", "x^k w_0 survives k products", d + 1, weak_series(A).vanishing_index)
    rec.check("left nilpotence of the opposite algebra is right nilpotence", "x*y = yx swaps l and r",
              right, twisted_left_nilpotence(A, 0, 1))
    _check_associator_bound(rec, A)
    return rec.report()


def run_scenario_alternating(d: int, degrees: Optional[Sequence[int]] = None) -> ScenarioReport:
    """x w_{2i} = w_{2i+1}, w_{2i+1} x = w_{2i+2}: left and right nilpotent, N1 unbounded."""
    degrees = sorted(set(degrees or [2, 4, 6, 8]))
    rec = _Recorder("alternating", {"degree": d, "degrees": degrees})
    A = build_alternating(d)
    left = left_nilpotence(A)
    right = right_nilpotence(A)
    rec.witness("left_index", left)
    rec.witness("right_index", right)
    rec.holds("M_l(A)^3 = 0", "both left and right nilpotent", left is not None and left <= 3)
    rec.holds("M_r(A)^3 = 0", "both left and right nilpotent", right is not None and right <= 3)
    rec.check("N1 = d + 1", "alternating l_x, r_x reach w_(d-1)", d + 1, weak_series(A).vanishing_index)
    _check_associator_bound(rec, A)
    growth = {k: weak_series(build_alternating(k)).vanishing_index for k in degrees}
    rec.witness("n1_growth", {str(k): v for k, v in growth.items()})
    values = list(growth.values())
    rec.holds("N1 strictly increasing in d", "not nilpotent in the limit", all(a < b for a, b in zip(values, values[1:])))
    return rec.report()


def run_scenario_y_xyyx(d: int) -> ScenarioReport:
    """r = y - x y^2 x in truncated free algebras on x, y.

    Only the finite-stage facts are checked; the non-membership of y in (r)
    in the completed algebra is cited.
    """
    rec = _Recorder("y-xyyx", {"degree": d})
    A = free_xy_stage(d)
    rec.witness("dim", A.dim)
    y = A.word_element("y")
    r = A.element_from_words({"y": 1, "xyyx": -1})
    ideal = truncated_ideal(A, r)
    rec.holds("y lies in (r) at this stage", "y = r + x r x + x^2 r x^2 + ... is a finite sum here", ideal.contains(y))
    rec.check("truncated ideal agrees with ideal closure", "two-sided ideals of associative algebras",
              ideal.dim, ideal_closure(A.algebra, [r]).ideal.dim)
    B, _ = quotient(A.algebra, ideal)
    rec.witness("quotient_dim", B.dim)
    rec.holds("quotient stage is nilpotent", "finite stages are nilpotent", is_nilpotent(B))
    rec.witness("limit_claim", "y is not in (y - x y^2 x) in the completed free algebra (cited)")
    return rec.report()


def run_scenario_extremal(ns: Sequence[int]) -> ScenarioReport:
    """x_m x_m = x_{m+1}: N1 = n, N2 = 2^(n-2) + 1, N3 = max(1, n - 1)."""
    rec = _Recorder("extremal", {"n": list(ns)})
    indices = {}
    for n in ns:
        report = nilpotence_report(build_xixi(n))
        indices[str(n)] = report.model_dump()
        rec.check(f"n={n}: (N1, N2, N3)", "N1 = n, N2 = 2^(n-2) + 1, N3 = max(1, N1 - 1)",
                  [n, 2 ** (n - 2) + 1, max(1, n - 1)], [report.N1, report.N2, report.N3])
    rec.witness("indices", indices)
    if 5 in ns:
        rec.check("n=5 is not associative", "(x1 x1)(x1 x1) = x3 but x1((x1 x1) x1) = 0",
                  False, structure_checks(build_xixi(5)).associative)
    return rec.report()


def run_scenario_modp_lie(p: int) -> ScenarioReport:
    """Finite solvable Lie algebra whose commutator ideal is not nilpotent."""
    rec = _Recorder("modp-lie", {"prime": p})
    B = build_modp_lie(p)
    rec.check("dimension p + 2", "(p+2)-dimensional", p + 2, B.dim)
    rec.holds("Jacobi holds", "Lie algebra", structure_checks(B).lie)
    series = derived_series(B)
    rec.check("derived dimensions", "B^(3) = 0", [p + 2, p + 1, p, 0], series.dimensions)
    rec.check("derived length 3", "B is solvable", 3, derived_length(B))
    rec.holds("commutator ideal is B^(1)", "[B, B] = B^(1)", commutator_ideal(B) == series.term(1))
    B1 = subalgebra(B, commutator_ideal(B))
    rec.check("B^(1) is not nilpotent", "B^(1) is still not nilpotent", False, is_nilpotent(B1))
    rec.check("[D, Y_0] = Y_0", "[D, X^0 Y] = X^0 Y", _fmt(B.gen("Y0")), _fmt(multiply(B.gen("D"), B.gen("Y0"))))
    B2 = subalgebra(B, series.term(2))
    rec.holds("B^(2) is abelian", "B^(2) loses D and has zero bracket", not B2.table)
    return rec.report()


def run_scenario_two_dim_solvable() -> ScenarioReport:
    """[x, y] = y: solvable but not nilpotent."""
    rec = _Recorder("two-dim-solvable", {})
    A = build_two_dim_solvable()
    y = A.gen("y")
    rec.holds("Lie algebra", "[x, y] = y", structure_checks(A).lie)
    rec.check("solvable", "A^(2) = 0", True, is_solvable(A))
    rec.check("not nilpotent", "the converse is not true", False, is_nilpotent(A))
    rec.check("derived length 2", "A^(1) = span{y}", 2, derived_length(A))
    weak = weak_series(A)
    rec.holds("weak series stabilizes at span{y}", "[x, y] = y",
              weak.stabilized and weak.terms[-1] == Subspace.span(A, [y]))
    image, steps = stable_image(A)
    rec.holds("stable image is span{y}", "stable image of M(A)^k(A)", image == Subspace.span(A, [y]))
    rec.witness("stable_image_steps", steps)
    commutator = subalgebra(A, commutator_ideal(A))
    rec.holds("commutator ideal is nilpotent", "solvable iff [A, A] is nilpotent", is_nilpotent(commutator))
    return rec.report()


def _series_agree(a: SeriesReport, b: SeriesReport) -> bool:
    length = max(len(a.terms), len(b.terms)) + 1
    return all(a.term(n) == b.term(n) for n in range(1, length + 1))


def _weak_in_strong(weak: SeriesReport, strong: SeriesReport) -> bool:
    length = max(len(weak.terms), len(strong.terms)) + 1
    return all(weak.term(n).issubset(strong.term(n)) for n in range(1, length + 1))


def _derived_in_strong(derived: SeriesReport, strong: SeriesReport) -> bool:
    return all(derived.term(n).issubset(strong.term(2 ** n)) for n in range(len(derived.terms)))


def _annihilator_dims_match(A: Algebra) -> bool:
    """For associative A, x -> l_x and x -> r_x map onto M_l(A) and M_r(A)."""
    return (
        mult_algebra_left(A).dim == A.dim - left_annihilator(A).dim
        and mult_algebra_right(A).dim == A.dim - right_annihilator(A).dim
    )


def _solvable_criterion(A: Algebra) -> bool:
    """Solvable iff the commutator ideal is nilpotent (characteristic 0)."""
    commutator = subalgebra(A, commutator_ideal(A))
    return is_solvable(A) == is_nilpotent(commutator)


def run_scenario_lie_series() -> ScenarioReport:
    """Weak and strong series coincide for Lie and associative algebras."""
    rec = _Recorder("lie-series", {"n": [3, 4, 5, 6], "fields": ["Q", "F_2"]})
    for field in (QQ, GF(2)):
        for n in range(3, 7):
            A = build_upper_triangular_lie(n, field)
            weak, strong = weak_series(A), strong_series(A)
            rec.holds(f"upper-triangular n={n} over {field}: Lie", "commutator bracket", structure_checks(A).lie)
            rec.holds(f"upper-triangular n={n} over {field}: weak = strong", "A_[n] = A_(n) for Lie algebras",
                      _series_agree(weak, strong))
            rec.check(f"upper-triangular n={n} over {field}: N1", "[A_[p], A_[q]] lies in A_[p+q]", n, weak.vanishing_index)
    heisenberg = build_upper_triangular_lie(3)
    rec.check("Heisenberg N1", "[[A, A], A] = 0", 3, weak_series(heisenberg).vanishing_index)

    T = build_upper_triangular_assoc(4)
    rec.check("commutator twist of matrices is the matrix Lie algebra", "x*y = xy - yx",
              True, twist(T, 1, -1) == build_upper_triangular_lie(4))
    rec.holds("twisted algebra satisfies Jacobi", "x*y = xy - yx", structure_checks(twist(T, 1, -1)).jacobi)
    rec.check("dim M_l(T) = dim T - dim left annihilator", "M_l(A) = {l_x} for associative A",
              T.dim - left_annihilator(T).dim, mult_algebra_left(T).dim)
    rec.check("dim M_r(T) = dim T - dim right annihilator", "M_r(A) = {r_x} for associative A",
              T.dim - right_annihilator(T).dim, mult_algebra_right(T).dim)
    rec.check("associator algebra of T is zero", "associative algebras have M_a(A) = 0", 1, associator_nilpotence(T))

    rng = random.Random(settings.random_seed)
    agree = 0
    annihilators = 0
    cases = 12
    for t in range(cases):
        field = (QQ, GF(2), GF(3))[t % 3]
        A = random_associative_algebra(field, 3 + t % 3, rng)
        weak, strong = weak_series(A), strong_series(A)
        if structure_checks(A).associative and _series_agree(weak, strong) and _derived_in_strong(derived_series(A), strong):
            agree += 1
        annihilators += _annihilator_dims_match(A)
    rec.check("random associative algebras: weak = strong", "A_[n] = A_(n) for associative algebras", cases, agree)
    rec.check("random associative algebras: M_l, M_r dimensions", "M_l(A) = A / left annihilator", cases, annihilators)

    corpus = [build_upper_triangular_lie(n) for n in range(3, 7)] + [build_two_dim_solvable(), heisenberg]
    rec.check("solvable iff commutator ideal nilpotent on the Lie corpus over Q", "solvability criterion",
              len(corpus), sum(_solvable_criterion(A) for A in corpus))
    return rec.report()


def _criteria_agree(report: NilpotenceReport, weak: SeriesReport) -> bool:
    """N1, N2, N3 all unset, or all set with N3 = max(1, N1 - 1) and N1 <= N2 <= 2^(N1-2) + 1."""
    n1, n2, n3 = report.N1, report.N2, report.N3
    if n1 is None or n2 is None or n3 is None:
        return n1 is None and n2 is None and n3 is None and not report.is_nilpotent and weak.vanishing_index is None
    upper = 2 ** (n1 - 2) + 1 if n1 >= 2 else 1
    return (
        report.is_nilpotent
        and weak.vanishing_index == n1
        and n3 == max(1, n1 - 1)
        and n1 <= n2 <= upper
    )


def run_scenario_random_equivalence(cases: Optional[int] = None, seed: Optional[int] = None) -> ScenarioReport:
    """Nilpotence criteria and series containments on random algebras over F_2 and F_3."""
    cases = cases if cases is not None else settings.property_cases
    seed = seed if seed is not None else settings.random_seed
    rec = _Recorder("random-equivalence", {"cases": cases, "seed": seed})
    rng = random.Random(seed)
    counts = {"criteria": 0, "weak_in_strong": 0, "strong_bound": 0, "stable_image": 0, "operator_powers": 0, "derived": 0}
    nilpotent = 0
    for t in range(cases):
        field = GF(2) if t % 2 == 0 else GF(3)
        A = random_algebra(field, rng.randint(1, 4), rng)
        report = nilpotence_report(A)
        nilpotent += report.is_nilpotent
        weak, strong = weak_series(A), strong_series(A)
        counts["criteria"] += _criteria_agree(report, weak)
        counts["weak_in_strong"] += _weak_in_strong(weak, strong)
        n = report.N1
        if n is None or n < 2 or strong.term(2 ** (n - 2) + 1).issubset(weak.term(n)):
            counts["strong_bound"] += 1
        image, _ = stable_image(A)
        counts["stable_image"] += image.is_zero() == report.is_nilpotent
        filtration = operator_power_filtration(mult_algebra(A))
        counts["operator_powers"] += all(
            apply_operators(A, ops) == weak.term(k + 1) for k, ops in enumerate(filtration, start=1)
        )
        counts["derived"] += _derived_in_strong(derived_series(A), strong)
    rec.witness("nilpotent_cases", nilpotent)
    rec.check("N1, N2, N3 agree", "the three nilpotence criteria are equivalent", cases, counts["criteria"])
    rec.check("A_[n] inside A_(n)", "A_[n] is contained in A_(n)", cases, counts["weak_in_strong"])
    rec.check("A_(2^(n-2)+1) inside A_[n]", "N2 <= 2^(N1-2) + 1", cases, counts["strong_bound"])
    rec.check("stable image is zero iff nilpotent", "finite-length Nakayama argument", cases, counts["stable_image"])
    rec.check("M(A)^n(A) = A_[n+1]", "M(A)^n(A) = A_[n+1]", cases, counts["operator_powers"])
    rec.check("A^(n) inside A_(2^n)", "A^(n) is contained in A_(2^n)", cases, counts["derived"])
    return rec.report()


def _check_functoriality(rec: _Recorder, label: str, g, h) -> None:
    """g: A -> B and h: B -> C surjective."""
    A, B = g.domain, g.codomain
    MA, MB = mult_algebra(A), mult_algebra(B)
    induced = induced_operator_algebra(g, MA)
    rec.holds(f"{label}: M(g) is onto M(B)", "M(h) is surjective",
              induced.dim == MB.dim and all(MB.contains(b) for b in induced.basis))
    hg = compose(h, g)
    agree = all(
        induced_mult_hom(hg, u, MA) == induced_mult_hom(h, induced_mult_hom(g, u, MA), MB) for u in MA.basis
    )
    rec.holds(f"{label}: M(hg) = M(h) M(g)", "M(hg) = M(h)M(g)", agree)
    rec.holds(f"{label}: M(id) = id", "M(id_A) = id_M(A)",
              all(induced_mult_hom(identity_hom(A), u, MA) == u for u in MA.basis))
    lx_ok = all(
        induced_mult_hom(g, left_op(A, x), MA) == left_op(B, g(x))
        and induced_mult_hom(g, right_op(A, x), MA) == right_op(B, g(x))
        for x in A.basis()
    )
    rec.holds(f"{label}: M(g)(l_x) = l_g(x) and M(g)(r_x) = r_g(x)", "M(h)(l_x) = l_h(x)", lx_ok)


def _xixi_truncation(n: int, m: int):
    """xixi(n) -> xixi(m) keeping x_1 .. x_{m-1}."""
    A, B = build_xixi(n), build_xixi(m)
    cols = [{i: QQ.one} if i < B.dim else {} for i in range(A.dim)]
    return make_hom(A, B, Matrix.from_columns(QQ, cols, B.dim))


def run_scenario_functoriality() -> ScenarioReport:
    """M(h) on the extremal tower and on low-degree free truncation towers."""
    limit = settings.operator_degree_limit
    rec = _Recorder("functoriality", {"operator_degree_limit": limit})
    g, h = _xixi_truncation(5, 4), _xixi_truncation(4, 3)
    _check_functoriality(rec, "xixi 5 -> 4 -> 3", g, h)
    rec.holds("xixi: truncations compose", "composition of truncations", compose(h, g) == _xixi_truncation(5, 3))
    rec.check("kernel of xixi 4 -> 3", "Ker(h) is an ideal", 1, kernel(h).dim)
    B, proj = quotient(build_xixi(4), kernel(h))
    rec.holds("xixi(4) / span{x3} is xixi(3)", "quotient by the top degree", B == build_xixi(3))

    top = min(4, limit)
    for name, stage in (("y-xyz", y_xyz_stage), ("y-xy-yx", y_xy_yx_stage), ("x", lambda d: build_truncated("x", None, d))):
        if top < 3:
            break
        A = stage(top)
        middle = A.stage(top - 1)
        g, h = truncate_map(A, middle), truncate_map(middle, top - 2)
        _check_functoriality(rec, f"{name} {top} -> {top - 1} -> {top - 2}", g, h)
    return rec.report()


def run_scenario_quotient_nilpotence(d: int) -> ScenarioReport:
    """Quotients of finite stages by the distinguished ideals are nilpotent."""
    rec = _Recorder("quotient-nilpotence", {"degree": d})
    cases = []
    A = y_xyz_stage(d)
    cases.append(("y-xyz / (w)", A.algebra, truncated_ideal(A, A.word_element("w"))))
    S = y_xy_yx_stage(d)
    cases.append(("y-xy-yx / (w)", S.algebra, truncated_ideal(S, S.word_element("w"))))
    F = free_xy_stage(min(d, 6))
    r = F.element_from_words({"y": 1, "xyyx": -1})
    cases.append(("free xy / (y - xyyx)", F.algebra, truncated_ideal(F, r)))
    X = build_xwi(d)
    cases.append(("xwi / (w0)", X, ideal_closure(X, [X.gen("w0")]).ideal))
    W = build_wiwi(d)
    cases.append(("wiwi / (w0)", W, ideal_closure(W, [W.gen("w0")]).ideal))
    for label, alg, ideal in cases:
        B, _ = quotient(alg, ideal)
        n_top = weak_series(alg).vanishing_index
        n_quot = weak_series(B).vanishing_index
        rec.holds(f"{label} is nilpotent", "quotients of nilpotent algebras are nilpotent",
                  n_quot is not None and n_top is not None and n_quot <= n_top)
        rec.witness(label, {"dim": B.dim, "N1": n_quot})
    return rec.report()


# ----------------------------------------------------------------------------
# Towers
# ----------------------------------------------------------------------------

_TOWERS: Dict[str, Tuple[Callable[[int], TruncatedFreeAlgebra], Optional[Callable], Tuple[str, str, str]]] = {
    "y-xyz": (y_xyz_stage, y_xyz_element, ("x", "w", "z")),
    "y-xy-yx": (y_xy_yx_stage, y_xy_yx_element, ("x", "w", "x")),
    "y-xyyx": (free_xy_stage, None, ("x", "y", "x")),
}


def _tower_coherence(rec: _Recorder, stages: Dict[int, TruncatedFreeAlgebra]) -> None:
    degrees = sorted(stages)
    top = stages[degrees[-1]]
    projections = {k: truncate_map(top, stages[k]) for k in degrees}
    coherent = True
    for i in degrees:
        for j in degrees:
            if j > i:
                continue
            f = truncate_map(stages[i], stages[j])
            if compose(f, projections[i]).matrix != projections[j].matrix:
                coherent = False
    rec.holds("f_ji p_i = p_j", "truncation maps are coherent", coherent)


def tower_report(name: str, degrees: Sequence[int]) -> ScenarioReport:
    """Coherence, element compatibility and witness growth along a tower.

    The highest listed degree stands in for the limit.
    """
    if name not in _TOWERS:
        raise UnknownScenarioError(name, _TOWERS)
    degrees = sorted(set(degrees))
    if not degrees:
        raise ValueError("at least one degree is required")
    build, element, letters = _TOWERS[name]
    rec = _Recorder(f"tower:{name}", {"degrees": degrees})
    stages = {d: build(d) for d in degrees}
    rec.witness("dims", {str(d): s.dim for d, s in stages.items()})
    _tower_coherence(rec, stages)
    top = stages[degrees[-1]]
    if element is not None:
        family = {d: element(s) for d, s in stages.items()}
        rec.holds("p_d(y_top) = y_d", "the y_d form a compatible family",
                  all(truncate_map(top, stages[d])(family[degrees[-1]]) == family[d] for d in degrees))
        ranks = [right_coefficient_profile(stages[d], family[d], *letters).rank for d in degrees]
        rec.witness("rank_growth", {str(d): r for d, r in zip(degrees, ranks)})
        rec.holds("rank grows every two degrees", "no finite sum of a_i w b_i equals y",
                  _grows_every_two(dict(zip(degrees, ranks))))
    else:
        members = []
        for d in degrees:
            s = stages[d]
            r = s.element_from_words({"y": 1, "xyyx": -1})
            members.append(truncated_ideal(s, r).contains(s.word_element("y")))
        rec.holds("y lies in (r) at every stage", "finite stages do not see the limit non-membership", all(members))
    return rec.report()


def custom_tower_report(config: TowerConfig) -> ScenarioReport:
    """Stage dimensions, coherence and nilpotence for a user presentation."""
    forbidden = ForbiddenSet.build(config.literals, [(l, m, r) for l, m, r in config.sandwich])
    field = field_from_spec(config.field)
    degrees = sorted(set(config.degrees or [config.degree]))
    rec = _Recorder("tower:custom", {"alphabet": config.alphabet, "degrees": degrees})
    stages = {d: build_truncated(config.alphabet, forbidden, d, field) for d in degrees}
    rec.witness("dims", {str(d): s.dim for d, s in stages.items()})
    _tower_coherence(rec, stages)
    for d, s in stages.items():
        n1 = weak_series(s.algebra).vanishing_index
        rec.holds(f"degree {d}: nilpotent with N1 <= d", "words of length >= d vanish", n1 is not None and n1 <= d)
        rec.holds(f"degree {d}: subword closed", _MONOMIAL_BASIS, _subword_closed(s))
    return rec.report()


# ----------------------------------------------------------------------------
# Registry
# ----------------------------------------------------------------------------

def _degree(params: ScenarioParams, default: int) -> int:
    return params.degree if params.degree is not None else default


SCENARIOS: Dict[str, Callable[[ScenarioParams], ScenarioReport]] = {
    "y-xyz": lambda p: run_scenario_y_xyz(_degree(p, settings.default_degree), p.degrees),
    "y-xy-yx": lambda p: run_scenario_y_xy_yx(_degree(p, settings.default_degree), p.degrees),
    "y-xy": lambda p: run_scenario_y_xy(_degree(p, 6)),
    "y-yy": lambda p: run_scenario_y_yy(_degree(p, 6)),
    "left-right": lambda p: run_scenario_left_right(_degree(p, 6)),
    "alternating": lambda p: run_scenario_alternating(_degree(p, 8), p.degrees),
    "y-xyyx": lambda p: run_scenario_y_xyyx(_degree(p, 6)),
    "extremal": lambda p: run_scenario_extremal([p.n] if p.n else range(2, 8)),
    "modp-lie": lambda p: run_scenario_modp_lie(p.prime or settings.default_prime),
    "two-dim-solvable": lambda p: run_scenario_two_dim_solvable(),
    "lie-series": lambda p: run_scenario_lie_series(),
    "random-equivalence": lambda p: run_scenario_random_equivalence(),
    "functoriality": lambda p: run_scenario_functoriality(),
    "quotient-nilpotence": lambda p: run_scenario_quotient_nilpotence(_degree(p, settings.default_degree)),
}


def run_scenario(name: str, params: Optional[ScenarioParams] = None) -> ScenarioReport:
    if name not in SCENARIOS:
        raise UnknownScenarioError(name, SCENARIOS)
    return SCENARIOS[name](params or ScenarioParams())


def _run_collecting(name: str, params: ScenarioParams) -> ScenarioReport:
    try:
        return run_scenario(name, params)
    except Exception as e:
        logger.error("Scenario raised", scenario=name, error=str(e), error_type=type(e).__name__)
        return ScenarioReport(scenario=name, parameters=params.model_dump(exclude_none=True),
                              error=f"{type(e).__name__}: {e}")


def _run_collecting_json(name: str, params_json: str) -> str:
    report = _run_collecting(name, ScenarioParams.model_validate_json(params_json))
    return report.to_json()


def run_all(params: Optional[ScenarioParams] = None, names: Optional[Sequence[str]] = None) -> RunSummary:
    """Run every registered scenario; failures are collected, not raised."""
    params = params or ScenarioParams()
    names = sorted(names or SCENARIOS)
    for name in names:
        if name not in SCENARIOS:
            raise UnknownScenarioError(name, SCENARIOS)
    if settings.max_workers > 1:
        with ProcessPoolExecutor(max_workers=settings.max_workers) as pool:
            payload = params.model_dump_json()
            results = list(pool.map(_run_collecting_json, names, [payload] * len(names)))
        reports = [ScenarioReport.model_validate_json(r) for r in results]
    else:
        reports = [_run_collecting(name, params) for name in names]
    reports.sort(key=lambda r: r.scenario)
    passed = sum(r.passed for r in reports)
    logger.info("Finished run", passed=passed, failed=len(reports) - passed)
    return RunSummary(reports=reports, passed=passed, failed=len(reports) - passed)
