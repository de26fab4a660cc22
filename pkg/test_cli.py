"""Command-line behaviour: output, JSON round trips and exit codes."""

import json

import pytest

from src import scenarios
from src.cli import EXIT_INVARIANT, EXIT_OK, EXIT_USAGE, EXIT_VERDICT, analyze_algebra, load_algebra_file, main
from src.exceptions import InvariantViolation
from src.models import AnalysisReport, RunSummary, ScenarioReport, Verdict


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# ----------------------------------------------------------------------------
# analyze
# ----------------------------------------------------------------------------

def test_analyze_nilpotent(capsys, data_dir):
    code, out, _ = run(capsys, "analyze", str(data_dir / "xixi_n4.json"))
    assert code == EXIT_OK
    assert "nilpotent: yes, N1=4 N2=5 N3=3" in out


def test_analyze_solvable_not_nilpotent(capsys, data_dir):
    code, out, _ = run(capsys, "analyze", str(data_dir / "two_dim_lie.json"))
    assert code == EXIT_OK
    assert "nilpotent: no, solvable: yes (length 2)" in out


def test_analyze_over_prime_field(capsys, data_dir):
    code, out, _ = run(capsys, "analyze", str(data_dir / "heisenberg.json"))
    assert code == EXIT_OK
    assert "Algebra over F_3" in out
    assert "nilpotent: yes, N1=3 N2=3 N3=2" in out
    assert "lie: yes" in out


def test_analyze_json_round_trip(capsys, data_dir):
    path = data_dir / "xixi_n4.json"
    code, out, _ = run(capsys, "analyze", str(path), "--output", "json")
    assert code == EXIT_OK
    parsed = AnalysisReport.model_validate_json(out)
    assert parsed == analyze_algebra(load_algebra_file(str(path)).to_algebra())
    assert parsed.stable_image_dim == 0


def test_analyze_malformed_json(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "dim": 2,\n  "products": [\n')
    code, _, err = run(capsys, "analyze", str(path))
    assert code == EXIT_USAGE
    assert "line" in err


def test_analyze_invalid_document(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"dim": 2, "products": [[0, 0, 5, "1"]]}))
    code, _, err = run(capsys, "analyze", str(path))
    assert code == EXIT_USAGE
    assert "out of range" in err


def test_analyze_duplicate_products(capsys, tmp_path):
    path = tmp_path / "dup.json"
    path.write_text(json.dumps({"dim": 2, "products": [[0, 0, 1, "1"], [0, 0, 1, 2]]}))
    code, _, err = run(capsys, "analyze", str(path))
    assert code == EXIT_USAGE
    assert "duplicate" in err


def test_analyze_missing_file(capsys, tmp_path):
    code, _, _ = run(capsys, "analyze", str(tmp_path / "missing.json"))
    assert code == EXIT_USAGE


def test_analyze_dimension_cap(capsys, tmp_path, small_max_dim):
    path = tmp_path / "big.json"
    path.write_text(json.dumps({"dim": small_max_dim + 1}))
    code, _, err = run(capsys, "analyze", str(path))
    assert code == EXIT_USAGE
    assert "NILPLAB_MAX_DIM" in err


# ----------------------------------------------------------------------------
# scenario
# ----------------------------------------------------------------------------

def test_scenario_modp_lie_json(capsys):
    code, out, _ = run(capsys, "scenario", "modp-lie", "--prime", "5", "--output", "json")
    assert code == EXIT_OK
    report = ScenarioReport.model_validate_json(out)
    assert report.passed
    dims = next(v for v in report.verdicts if v.claim == "dimension p + 2")
    assert dims.computed == 7


def test_scenario_pretty(capsys):
    code, out, _ = run(capsys, "scenario", "y-xyz", "--degree", "6", "--degrees", "4", "6")
    assert code == EXIT_OK
    assert "Scenario: y-xyz" in out
    assert "rank_growth" in out
    assert "Result: PASS" in out


def test_scenario_degree_zero_is_usage_error(capsys):
    code, _, err = run(capsys, "scenario", "y-xyz", "--degree", "0")
    assert code == EXIT_USAGE
    assert "degree" in err


def test_scenario_composite_prime_is_usage_error(capsys):
    code, _, _ = run(capsys, "scenario", "modp-lie", "--prime", "4")
    assert code == EXIT_USAGE


def test_unknown_scenario_lists_names(capsys):
    code, _, err = run(capsys, "scenario", "nope")
    assert code == EXIT_USAGE
    assert "y-xyz" in err and "modp-lie" in err


def test_failed_verdict_exits_1(capsys, monkeypatch):
    failing = ScenarioReport(scenario="bad", verdicts=[Verdict(claim="c", citation="x", passed=False)])
    monkeypatch.setitem(scenarios.SCENARIOS, "bad", lambda params: failing)
    code, out, _ = run(capsys, "scenario", "bad")
    assert code == EXIT_VERDICT
    assert "[FAIL] c" in out


def test_invariant_violation_exits_3(capsys, monkeypatch):
    def broken(params):
        raise InvariantViolation("kernel is not an ideal")

    monkeypatch.setitem(scenarios.SCENARIOS, "broken", broken)
    code, _, err = run(capsys, "scenario", "broken")
    assert code == EXIT_INVARIANT
    assert "kernel is not an ideal" in err


def test_computation_error_exits_3(capsys, monkeypatch):
    def failing(params):
        raise ValueError("pivot vanished")

    monkeypatch.setitem(scenarios.SCENARIOS, "failing", failing)
    code, _, err = run(capsys, "scenario", "failing")
    assert code == EXIT_INVARIANT
    assert "internal error: ValueError: pivot vanished" in err


# ----------------------------------------------------------------------------
# tower, list, run-all
# ----------------------------------------------------------------------------

def test_tower_by_name(capsys):
    code, out, _ = run(capsys, "tower", "y-xyz", "4", "6", "8", "--output", "json")
    assert code == EXIT_OK
    report = ScenarioReport.model_validate_json(out)
    assert report.witnesses["rank_growth"] == {"4": 2, "6": 3, "8": 4}


def test_tower_single_degree(capsys):
    code, _, _ = run(capsys, "tower", "y-xy-yx", "5")
    assert code == EXIT_OK


def test_tower_from_config(capsys, data_dir):
    code, out, _ = run(capsys, "tower", "--config", str(data_dir / "y_xyz.json"))
    assert code == EXIT_OK
    assert "tower:custom" in out


def test_tower_adjacent_degrees(capsys):
    code, out, _ = run(capsys, "tower", "y-xyz", "4", "5")
    assert code == EXIT_OK
    assert "Result: PASS" in out


def test_tower_name_and_config_are_exclusive(capsys, data_dir):
    code, _, err = run(capsys, "tower", "4", "6", "--config", str(data_dir / "y_xyz.json"))
    assert code == EXIT_USAGE
    assert "not allowed with" in err


def test_tower_config_degrees_override(capsys, data_dir):
    code, out, _ = run(capsys, "tower", "--config", str(data_dir / "y_xyz.json"), "--degrees", "4", "6", "--output", "json")
    assert code == EXIT_OK
    assert ScenarioReport.model_validate_json(out).witnesses["dims"] == {"4": 12, "6": 25}


def test_tower_config_rejects_long_sandwich_ends(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"alphabet": ["x", "w"], "sandwich": [["wx", "x", "w"]]}))
    code, _, err = run(capsys, "tower", "--config", str(path))
    assert code == EXIT_USAGE
    assert "single-letter" in err


def test_tower_requires_name_or_config(capsys):
    code, _, _ = run(capsys, "tower")
    assert code == EXIT_USAGE


def test_list(capsys):
    code, out, _ = run(capsys, "list", "--output", "json")
    assert code == EXIT_OK
    listing = json.loads(out)
    assert "y-xyz" in listing["scenarios"]
    assert "y-xy-yx" in listing["towers"]


def test_run_all(capsys, monkeypatch):
    monkeypatch.setattr(scenarios, "SCENARIOS", {"y-xy": scenarios.SCENARIOS["y-xy"]})
    code, out, _ = run(capsys, "run-all", "--degree", "4", "--output", "json")
    assert code == EXIT_OK
    summary = RunSummary.model_validate_json(out)
    assert summary.passed == 1
    assert summary.reports[0].parameters == {"degree": 4}


def test_missing_command(capsys):
    code, _, _ = run(capsys)
    assert code == EXIT_USAGE


@pytest.mark.parametrize("flag", ["--version"])
def test_version(capsys, flag):
    code, out, _ = run(capsys, flag)
    assert code == EXIT_OK
    assert "nilplab" in out
