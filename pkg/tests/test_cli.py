import json

import numpy as np
import pytest
import yaml

from secrecy_regions import ScenarioFile, ValidationError
from secrecy_regions.cli import main, run_figure, run_scenario
from conftest import degraded_binary_channel, reveal_both_channel

MINIMAL_GAUSSIAN = {
    "scenario": {"p1": 1.0, "p2": 1.0, "sigma1_sq": 0.1, "sigma2_sq": 0.3},
    "bound": "inner",
    "resolution": 11,
}


def gaussian_scenario_text(output, summary=None, **extra):
    data = {"kind": "gaussian", **MINIMAL_GAUSSIAN, "output": str(output), **extra}
    if summary is not None:
        data["summary"] = str(summary)
    return yaml.safe_dump(data)


# -- scenario parsing -------------------------------------------------------


def test_parse_minimal_gaussian(tmp_path):
    sf = ScenarioFile.parse(gaussian_scenario_text(tmp_path / "r.csv"))
    assert sf.kind == "gaussian"
    assert sf.resolution() == 11
    assert sf.gaussian_scenario().sigma2_sq == 0.3


def test_parse_rejects_unknown_keys(tmp_path):
    text = gaussian_scenario_text(tmp_path / "r.csv") + "\nmystery_knob: 3\n"
    with pytest.raises(ValidationError, match="unknown keys"):
        ScenarioFile.parse(text)


def test_parse_rejects_unknown_kind():
    with pytest.raises(ValidationError):
        ScenarioFile.parse("kind: bogus\noutput: x.csv\n")
    with pytest.raises(ValidationError):
        ScenarioFile.parse("output: x.csv\n")


def test_parse_rejects_missing_required():
    with pytest.raises(ValidationError, match="missing keys"):
        ScenarioFile.parse("kind: gaussian\nbound: inner\noutput: x.csv\n")


def test_parse_rejects_bad_yaml():
    with pytest.raises(ValidationError, match="parse error"):
        ScenarioFile.parse("kind: [unclosed\n")


def test_round_trip_is_field_identical(tmp_path):
    sf = ScenarioFile.parse(gaussian_scenario_text(tmp_path / "r.csv", tmp_path / "s.json"))
    again = ScenarioFile.parse(sf.serialize())
    assert again.kind == sf.kind
    assert again.data == sf.data


def test_dm_scenario_alphabet_cap(tmp_path):
    data = {
        "kind": "dm",
        "bound": "inner",
        "channel": np.full((2, 2, 2, 2), 0.25).tolist(),
        "grid": {"u_size": 5},
        "output": str(tmp_path / "r.csv"),
    }
    sf = ScenarioFile.parse(yaml.safe_dump(data))
    with pytest.raises(ValidationError, match="1..3"):
        sf.grid_spec()


# -- scenario execution -----------------------------------------------------


def test_run_gaussian_scenario_writes_csv(tmp_path):
    out = tmp_path / "region.csv"
    sf = ScenarioFile.parse(gaussian_scenario_text(out, tmp_path / "summary.json"))
    written = run_scenario(sf)
    assert str(out) in written
    lines = out.read_text().splitlines()
    assert lines[0] == "bound_kind,r0,r1,r2,beta1,beta2,rho"
    assert len(lines) >= 2
    # inner rows must leave rho empty
    assert all(line.endswith(",") for line in lines[1:])
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["g_inner"]["points"] == len(lines) - 1


def test_run_simulate_scenario(tmp_path):
    out = tmp_path / "sim.csv"
    data = {
        "kind": "simulate",
        "channel": reveal_both_channel(0.25).transition.tolist(),
        "aux": {
            "p_u": [1.0],
            "p_v1_given_u": [[0.5, 0.5]],
            "p_v2_given_u": [[0.5, 0.5]],
            "p_x1_given_v1": [[1.0, 0.0], [0.0, 1.0]],
            "p_x2_given_v2": [[1.0, 0.0], [0.0, 1.0]],
        },
        "code": {"n": 4, "r1": 0.25, "r2": 0.25, "r1p": 0.1887, "seed": 5},
        "blocklengths": [4, 8],
        "trials": 25,
        "output": str(out),
    }
    run_scenario(ScenarioFile.parse(yaml.safe_dump(data)))
    lines = out.read_text().splitlines()
    assert lines[0] == "n,trials,pe1,pe2,equivocation_bits_per_use,secrecy_gap"
    assert len(lines) == 3
    assert lines[1].startswith("4,25,") and lines[2].startswith("8,25,")


def test_run_fm_check_scenario(tmp_path):
    out = tmp_path / "fm.json"
    data = {
        "kind": "fm-check",
        "channel": degraded_binary_channel().transition.tolist(),
        "chains": 5,
        "seed": 3,
        "output": str(out),
    }
    run_scenario(ScenarioFile.parse(yaml.safe_dump(data)))
    report = json.loads(out.read_text())
    assert report["chains"] == 5
    assert report["all_equal"] is True
    assert all(r["equal"] for r in report["results"])


# -- figures ----------------------------------------------------------------


def test_run_figure_fig4_summary(tmp_path):
    run_figure("fig4", tmp_path, resolution=51, outer_resolution=11)
    summary = json.loads((tmp_path / "fig4_summary.json").read_text())
    assert summary["inner_max_r1_plus_r2"] == pytest.approx(1.138420103, abs=1e-6)
    assert summary["cmac_max_r1_plus_r2"] == pytest.approx(1.057738609, abs=1e-6)
    assert summary["inner_exceeds_cmac"] is True


def test_run_figure_fig3_summary_and_projection(tmp_path):
    run_figure("fig3", tmp_path, resolution=51)
    summary = json.loads((tmp_path / "fig3_summary.json").read_text())
    assert summary["inner_max_r1_plus_r2"] == pytest.approx(0.7268590, abs=1e-6)
    assert summary["cmac_max_r1_plus_r2"] == pytest.approx(1.4692997, abs=1e-6)
    assert summary["inner_exceeds_cmac"] is False
    lines = (tmp_path / "fig3.csv").read_text().splitlines()
    # projected rows leave r0 empty
    assert lines[1].split(",")[1] == ""


def test_figure_rerun_byte_identical(tmp_path):
    a_dir, b_dir = tmp_path / "a", tmp_path / "b"
    run_figure("fig2", a_dir, resolution=21, outer_resolution=9)
    run_figure("fig2", b_dir, resolution=21, outer_resolution=9)
    assert (a_dir / "fig2.csv").read_bytes() == (b_dir / "fig2.csv").read_bytes()
    assert (a_dir / "fig2_summary.json").read_bytes() == (b_dir / "fig2_summary.json").read_bytes()


def test_run_figure_rejects_unknown():
    with pytest.raises(ValidationError):
        run_figure("fig9", ".")


# -- exit codes -------------------------------------------------------------


def test_exit_code_success(tmp_path):
    path = tmp_path / "s.yaml"
    path.write_text(gaussian_scenario_text(tmp_path / "r.csv"))
    assert main(["run", str(path)]) == 0
    assert (tmp_path / "r.csv").exists()


def test_exit_code_validation_failure(tmp_path):
    path = tmp_path / "s.yaml"
    path.write_text("kind: bogus\n")
    assert main(["run", str(path)]) == 1


def test_exit_code_cap_exceeded(tmp_path):
    data = {
        "kind": "dm",
        "bound": "inner",
        "channel": degraded_binary_channel().transition.tolist(),
        "grid": {"u_size": 3, "v1_size": 3, "v2_size": 3, "resolution": 5, "max_chains": 100},
        "output": str(tmp_path / "r.csv"),
    }
    path = tmp_path / "s.yaml"
    path.write_text(yaml.safe_dump(data))
    assert main(["run", str(path)]) == 2


def test_cli_gaussian_inner_subcommand(tmp_path):
    out = tmp_path / "r.csv"
    code = main(
        [
            "gaussian-inner",
            "--p1", "1", "--p2", "1",
            "--sigma1-sq", "0.1", "--sigma2-sq", "0.6",
            "--resolution", "11",
            "--output", str(out),
        ]
    )
    assert code == 0
    assert out.read_text().startswith("bound_kind,")


def test_cli_usage_error_is_validation_exit():
    assert main(["gaussian-inner", "--p1", "1"]) == 1
