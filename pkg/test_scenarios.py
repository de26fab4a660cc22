"""Scenario runners, towers and the scenario registry."""

import json

import pytest
import sympy

from src.algebra import multiply, structure_checks, weak_series
from src.config import settings
from src.exceptions import UnknownScenarioError
from src.freetrunc import right_coefficient_profile
from src.models import NilpotenceReport, ScenarioParams, ScenarioReport, TowerConfig
from src.scenarios import (
    SCENARIOS,
    _criteria_agree,
    build_alternating,
    build_modp_lie,
    build_wiwi,
    custom_tower_report,
    run_all,
    run_scenario,
    run_scenario_alternating,
    run_scenario_extremal,
    run_scenario_functoriality,
    run_scenario_left_right,
    run_scenario_lie_series,
    run_scenario_modp_lie,
    run_scenario_quotient_nilpotence,
    run_scenario_random_equivalence,
    run_scenario_two_dim_solvable,
    run_scenario_y_xy,
    run_scenario_y_xy_yx,
    run_scenario_y_xyyx,
    run_scenario_y_xyz,
    run_scenario_y_yy,
    tower_report,
    y_xy_yx_by_commuting_factors,
    y_xy_yx_element,
    y_xy_yx_stage,
    y_xyz_element,
    y_xyz_stage,
)


def failures(report: ScenarioReport):
    return [v.claim for v in report.verdicts if not v.passed]


# ----------------------------------------------------------------------------
# Builders
# ----------------------------------------------------------------------------

def test_wiwi_identity():
    A = build_wiwi(6)
    y = A.element([1] * 6)
    assert y - multiply(y, y) == A.gen("w0")


def test_alternating_products():
    A = build_alternating(4)
    x = A.gen("x")
    assert multiply(x, A.gen("w0")) == A.gen("w1")
    assert multiply(A.gen("w1"), x) == A.gen("w2")
    assert weak_series(A).vanishing_index == 5


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_modp_lie_is_lie(p):
    B = build_modp_lie(p)
    assert B.dim == p + 2
    assert structure_checks(B).lie


def test_y_xyz_element_is_the_diagonal_sum():
    A = y_xyz_stage(8)
    y = y_xyz_element(A)
    assert y == A.element_from_words({"w": 1, "xwz": 1, "xxwzz": 1, "xxxwzzz": 1})


def test_y_xy_yx_two_formulas_agree():
    A = y_xy_yx_stage(6)
    assert y_xy_yx_element(A) == y_xy_yx_by_commuting_factors(A)


# ----------------------------------------------------------------------------
# Reproductions
# ----------------------------------------------------------------------------

def test_y_xyz_scenario():
    report = run_scenario_y_xyz(6, [4, 6])
    assert failures(report) == []
    assert report.witnesses["rank_growth"] == {"4": 2, "6": 3}
    assert report.witnesses["dim"] == 25


def test_y_xyz_at_degree_10():
    report = run_scenario_y_xyz(10, [4, 6, 8, 10])
    assert failures(report) == []
    assert report.witnesses["dim"] == 63
    assert report.witnesses["rank_growth"] == {"4": 2, "6": 3, "8": 4, "10": 5}


def test_y_xyz_profile_rank_against_sympy():
    A = y_xyz_stage(10)
    coeffs = {w: c.value for w, c in A.coefficients(y_xyz_element(A)).items()}
    # row j holds the coefficients of x^j w z^k
    rows = [[coeffs.get("x" * j + "w" + "z" * k, 0) for k in range(10)] for j in range(10)]
    expected = sympy.Matrix(rows).rank()
    assert expected == 5
    assert right_coefficient_profile(A, y_xyz_element(A), "x", "w", "z").rank == expected


def test_adjacent_degrees_do_not_fail_rank_growth():
    assert failures(run_scenario_y_xyz(4, [4, 5])) == []
    assert failures(run_scenario_y_xy_yx(4, [4, 5])) == []


def test_y_xy_yx_scenario():
    report = run_scenario_y_xy_yx(6, [4, 6])
    assert failures(report) == []
    assert report.witnesses["rank_growth"] == {"4": 3, "6": 5}


@pytest.mark.parametrize("runner", [run_scenario_y_xy, run_scenario_y_yy, run_scenario_left_right])
@pytest.mark.parametrize("d", [1, 2, 5])
def test_one_parameter_scenarios(runner, d):
    assert failures(runner(d)) == []


def test_left_right_indices():
    report = run_scenario_left_right(5)
    assert report.witnesses["left_index"] == 5
    assert report.witnesses["right_index"] == 2
    assert 1 <= report.witnesses["associator_index"] <= 3


def test_alternating_scenario():
    report = run_scenario_alternating(6, [2, 4, 6])
    assert failures(report) == []
    assert report.witnesses["n1_growth"] == {"2": 3, "4": 5, "6": 7}


def test_y_xyyx_scenario():
    assert failures(run_scenario_y_xyyx(5)) == []


def test_extremal_scenario():
    report = run_scenario_extremal([2, 3, 4, 5])
    assert failures(report) == []
    assert report.witnesses["indices"]["5"]["N2"] == 9


@pytest.mark.parametrize("n,n2", [(2, 2), (3, 3), (4, 5), (5, 9), (6, 17), (7, 33)])
def test_extremal_indices(n, n2):
    report = run_scenario_extremal([n])
    assert failures(report) == []
    assert report.witnesses["indices"][str(n)] == {"N1": n, "N2": n2, "N3": max(1, n - 1), "is_nilpotent": True}


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_modp_lie_scenario(p):
    report = run_scenario_modp_lie(p)
    assert failures(report) == []
    passed = {v.claim for v in report.verdicts if v.passed}
    assert {"derived length 3", "B^(1) is not nilpotent", "derived dimensions"} <= passed


def test_two_dim_solvable_scenario():
    assert failures(run_scenario_two_dim_solvable()) == []


def test_lie_series_scenario():
    assert failures(run_scenario_lie_series()) == []


def test_random_equivalence_scenario():
    report = run_scenario_random_equivalence(cases=24, seed=7)
    assert failures(report) == []
    assert report.parameters == {"cases": 24, "seed": 7}


def test_random_equivalence_at_configured_cases():
    report = run_scenario_random_equivalence()
    assert report.parameters["cases"] == settings.property_cases == 200
    assert failures(report) == []
    assert all(v.computed == 200 for v in report.verdicts)


def test_criteria_agreement_detects_inconsistent_indices(xixi4):
    weak = weak_series(xixi4)
    assert _criteria_agree(NilpotenceReport(N1=4, N2=5, N3=3, is_nilpotent=True), weak)
    assert not _criteria_agree(NilpotenceReport(N1=4, N2=5, N3=2, is_nilpotent=True), weak)
    assert not _criteria_agree(NilpotenceReport(N1=4, N2=6, N3=3, is_nilpotent=True), weak)
    assert not _criteria_agree(NilpotenceReport(N1=4, N2=None, N3=3, is_nilpotent=True), weak)


def test_functoriality_scenario():
    assert failures(run_scenario_functoriality()) == []


def test_quotient_nilpotence_scenario():
    assert failures(run_scenario_quotient_nilpotence(5)) == []


# ----------------------------------------------------------------------------
# Towers
# ----------------------------------------------------------------------------

def test_y_xyz_tower():
    report = tower_report("y-xyz", [4, 6, 8])
    assert report.passed
    assert report.witnesses["rank_growth"] == {"4": 2, "6": 3, "8": 4}


def test_y_xy_yx_tower():
    report = tower_report("y-xy-yx", [8, 4, 6])
    assert report.passed
    assert report.parameters["degrees"] == [4, 6, 8]


def test_single_degree_tower_is_degenerate_pass():
    assert tower_report("y-xyz", [5]).passed


def test_tower_with_adjacent_degrees_passes():
    report = tower_report("y-xyz", [4, 5])
    assert report.witnesses["rank_growth"] == {"4": 2, "5": 2}
    assert report.passed


def test_y_xyyx_tower():
    assert tower_report("y-xyyx", [3, 5]).passed


def test_unknown_tower():
    with pytest.raises(UnknownScenarioError):
        tower_report("nope", [4])


def test_custom_tower_from_file(data_dir):
    config = TowerConfig.model_validate(json.loads((data_dir / "y_xyz.json").read_text()))
    report = custom_tower_report(config)
    assert report.passed
    assert report.witnesses["dims"] == {"4": 12, "6": 25, "8": 42}


# ----------------------------------------------------------------------------
# Registry
# ----------------------------------------------------------------------------

def test_unknown_scenario_lists_names():
    with pytest.raises(UnknownScenarioError) as info:
        run_scenario("nope")
    assert "y-xyz" in str(info.value)
    assert info.value.registered == sorted(SCENARIOS)


def test_run_scenario_uses_params():
    report = run_scenario("modp-lie", ScenarioParams(prime=3))
    assert report.parameters == {"prime": 3}
    assert report.passed


def test_run_all_collects_exceptions(monkeypatch):
    def boom(params):
        raise RuntimeError("exploded")

    monkeypatch.setitem(SCENARIOS, "boom", boom)
    summary = run_all(names=["boom", "y-xy"])
    assert [r.scenario for r in summary.reports] == ["boom", "y-xy"]
    assert summary.passed == 1
    assert summary.failed == 1
    assert not summary.all_passed
    assert summary.reports[0].error == "RuntimeError: exploded"


def test_report_json_round_trip():
    report = run_scenario_y_xy(4)
    data = json.loads(report.to_json())
    assert all("pass" in v for v in data["verdicts"])
    assert ScenarioReport.model_validate_json(report.to_json()) == report
