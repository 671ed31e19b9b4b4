import json

import pytest

from algebroid_obstructions.cli import (
    ConfigInvalid,
    RunConfig,
    UnknownScenario,
    emit,
    main,
    run_scenario,
)

FAST = ["--grid", "64", "--steps", "256", "--no-timings"]


def test_unknown_scenario():
    with pytest.raises(UnknownScenario):
        run_scenario(RunConfig(scenario="nope"))
    assert main(["--scenario", "nope"]) == 1


@pytest.mark.parametrize(
    "kwargs",
    [{"grid": 8}, {"steps": 4}, {"tol": 0.0}, {"center_tol": -1.0}, {"degree": -1}, {"format": "xml"}],
)
def test_config_invalid(kwargs):
    with pytest.raises(ConfigInvalid):
        run_scenario(RunConfig(**kwargs))


def test_bad_flag_is_usage_error(capsys):
    assert main(["--grid", "many"]) == 1


def test_prequantization_json(tmp_path):
    out = tmp_path / "r.json"
    assert main(["--scenario", "prequantization", "--out", str(out)] + FAST) == 0
    doc = json.loads(out.read_text())
    assert set(doc) >= {"scenario", "config", "obstructions", "residuals", "verdicts", "timings"}
    assert doc["theorem1_identity"] is True
    obs = doc["obstructions"]
    assert obs["mackenzie"] == pytest.approx(12.566, abs=1e-2)
    assert obs["crainic_fernandes"] == pytest.approx(-12.566, abs=1e-2)
    assert obs["meinrenken"] == pytest.approx(-12.566, abs=1e-2)
    assert doc["timings"] == {}


def test_so3_report():
    doc = run_scenario(RunConfig(scenario="so3-clutching", steps=256, winding=1))
    assert doc["obstructions"] == {"mackenzie": -1, "crainic_fernandes": None, "meinrenken": -1}
    assert all(doc["verdicts"].values())


def test_output_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["--scenario", "so3-clutching", "--winding", "2"] + FAST
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_verdict_failure_exit_code(tmp_path):
    assert main(["--scenario", "prequantization", "--tol", "1e-12", "--out", str(tmp_path / "r.json")] + FAST) == 2


def test_text_format(capsys):
    assert main(["--scenario", "mc-selftest", "--format", "text"] + FAST) == 0
    text = capsys.readouterr().out
    rows = [r for r in text.splitlines() if r.startswith("obstruction.")]
    assert len(rows) == 3
    assert "verdict.product_formula" in text and "PASS" in text


def test_emit_empty_residuals():
    doc = {"scenario": "x", "config": {}, "obstructions": {}, "residuals": {}, "verdicts": {}, "timings": {}}
    assert json.loads(emit(doc))["residuals"] == {}


def test_emit_twelve_significant_digits():
    doc = {"value": 3.14159265358979323, "nested": [1 / 3]}
    data = json.loads(emit(doc))
    assert data["value"] == 3.14159265359
    assert data["nested"] == [0.333333333333]


def test_calibration_writes_and_feeds_signs(tmp_path):
    signs = tmp_path / "signs.json"
    assert main(["--scenario", "calibration", "--signs", str(signs), "--out", str(tmp_path / "c.json")] + FAST) == 0
    data = json.loads(signs.read_text())
    assert data == {"equator": 1, "evolution": 1, "pairing": 1, "tolerance": 0.01}
    assert main(["--scenario", "prequantization", "--signs", str(signs), "--out", str(tmp_path / "p.json")] + FAST) == 0
    # a flipped pairing sign breaks the cross-check
    data["pairing"] = -1
    signs.write_text(json.dumps(data))
    assert main(["--scenario", "prequantization", "--signs", str(signs), "--out", str(tmp_path / "q.json")] + FAST) == 2


def test_missing_signs_file_is_config_error(tmp_path):
    assert main(["--scenario", "mc-selftest", "--signs", str(tmp_path / "none.json")]) == 1


@pytest.mark.parametrize("scenario", ["functoriality", "cech-selftest", "mc-selftest"])
def test_other_scenarios_pass(scenario, tmp_path):
    assert main(["--scenario", scenario, "--degree", "3", "--out", str(tmp_path / "r.json")] + FAST) == 0
