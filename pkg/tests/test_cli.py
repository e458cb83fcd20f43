import asyncio
import io
import json

import numpy as np
import pandas as pd
import pytest

from cli.handlers import cmd_feasibility, cmd_oracle_check, cmd_simulate, cmd_sweep
from cli.main import EXIT_CONFIG_ERROR, EXIT_OK, EXIT_ORACLE_FAILURE, EXIT_SIMULATION_ERROR, main
from config.settings import PROJECT_ROOT
from src.exceptions import ConfigError
from src.oracle import compare_transform
from src.results import load_results
from src.run_config import RunConfig, load_config, parse_config
from src.schemes import path_fluctuation_phase, scheme1_ramp_rates

DEFAULT_CONFIG = PROJECT_ROOT / "config" / "default_run.json"
SWEEP_CONFIG = PROJECT_ROOT / "config" / "sweep_path.json"


def _write_config(tmp_path, data, name="run.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data, indent=2), encoding="utf-8")
    return path


# simulate

def test_simulate_default_config(tmp_path, capsys):
    out = tmp_path / "simulate.csv"
    assert main(["simulate", "--config", str(DEFAULT_CONFIG), "--output", str(out)]) == EXIT_OK
    assert "Bell fidelity" in capsys.readouterr().out

    df = load_results(out)
    assert len(df) == 1
    assert df["fidelity_opt"].iloc[0] >= 0.99999
    assert df["b1_v_per_ns"].iloc[0] == pytest.approx(31.2, rel=1e-2)


def test_simulate_without_splitting_is_perfect(tmp_path):
    config = RunConfig.model_validate({"dot": {"fss_uev": 0.0}})
    row = cmd_simulate(config, str(tmp_path / "out.csv"))
    assert row.fidelity_opt == pytest.approx(1.0, abs=1e-9)
    assert row.concurrence == pytest.approx(1.0, abs=1e-9)


def test_simulate_with_ramp_mismatch(tmp_path):
    config = RunConfig.model_validate({"scheme": {"delta_t_ns": 1.0}})
    row = cmd_simulate(config, str(tmp_path / "out.csv"))
    assert row.fidelity_opt == pytest.approx(0.953, abs=2e-3)


def test_nanosecond_mismatch_ruins_ghz_splitting(tmp_path):
    # 1 GHz splitting
    fss_uev = 1e9 / 241.799e6
    config = RunConfig.model_validate({"dot": {"fss_uev": fss_uev}, "scheme": {"delta_t_ns": 1.0}})
    row = cmd_simulate(config, str(tmp_path / "out.csv"))
    assert row.fidelity_opt <= 0.6


def test_simulate_rejects_sweep_block(tmp_path, capsys):
    code = main(["simulate", "--config", str(SWEEP_CONFIG), "--output", str(tmp_path / "x.csv")])
    assert code == EXIT_CONFIG_ERROR
    assert "sweep" in capsys.readouterr().err
    assert not (tmp_path / "x.csv").exists()


def test_simulate_without_output_path_prints_csv(tmp_path, capsys, monkeypatch):
    monkeypatch.setattr("cli.handlers.RESULTS_DIR", tmp_path)
    assert main(["simulate", "--config", str(DEFAULT_CONFIG)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "Bell fidelity" in out

    df = pd.read_csv(io.StringIO(out[out.index("# fss-correction"):]), comment="#")
    assert len(df) == 1
    assert df["fidelity_opt"].iloc[0] >= 0.99999
    assert not list(tmp_path.iterdir())


def test_simulate_with_output_path_keeps_stdout_short(tmp_path, capsys):
    assert main(["simulate", "--config", str(DEFAULT_CONFIG), "--output", str(tmp_path / "s.csv")]) == EXIT_OK
    assert "# fss-correction" not in capsys.readouterr().out


# sweep

def test_path_sweep_phase_slope(tmp_path):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--config", str(SWEEP_CONFIG), "--output", str(out), "--jobs", "4"]) == EXIT_OK

    df = load_results(out)
    assert len(df) == 11
    assert list(df["value"]) == pytest.approx(list(np.linspace(0, 5, 11)))
    assert (df["parameter"] == "delta_l1").all()

    config = load_config(SWEEP_CONFIG)
    dot = config.dot_params()
    cell, _ = config.cell_params()
    b1, _ = scheme1_ramp_rates(dot, cell, cell)
    expected = path_fluctuation_phase(1e-3, dot.k_H1, cell, b1)
    slope = np.polyfit(df["value"], np.unwrap(df["constant_phase_rad"]), 1)[0]
    assert slope == pytest.approx(expected, rel=1e-5)
    assert df["fidelity_opt"].min() >= 0.99999


def test_sweep_output_is_deterministic(tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["sweep", "--config", str(SWEEP_CONFIG), "--output", str(first), "--jobs", "4"]) == EXIT_OK
    assert main(["sweep", "--config", str(SWEEP_CONFIG), "--output", str(second), "--jobs", "1"]) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()


def test_log_sweep_over_splitting(tmp_path):
    config = RunConfig.model_validate(
        {"sweep": {"parameter": "fss_uev", "start": 0.3, "stop": 40.0, "steps": 6, "spacing": "log"}}
    )
    rows = asyncio.run(cmd_sweep(config, str(tmp_path / "fss.csv"), jobs=2))
    assert [r.value for r in rows] == pytest.approx(list(np.geomspace(0.3, 40.0, 6)))
    assert all(r.fidelity_opt >= 1 - 1e-4 for r in rows)
    assert all(r.concurrence >= 0.999 for r in rows)


def test_mismatch_sweep_is_monotonic(tmp_path):
    config = RunConfig.model_validate({"sweep": {"parameter": "delta_t", "start": 0.0, "stop": 2.0, "steps": 9}})
    rows = asyncio.run(cmd_sweep(config, str(tmp_path / "dt.csv"), jobs=3))
    fidelities = [r.fidelity_opt for r in rows]
    assert all(later <= earlier + 1e-12 for earlier, later in zip(fidelities, fidelities[1:]))
    assert fidelities[-1] < fidelities[0]


def test_sweep_needs_sweep_block(tmp_path):
    with pytest.raises(ConfigError):
        asyncio.run(cmd_sweep(RunConfig(), str(tmp_path / "x.csv")))


# feasibility

def test_feasibility_default_cell(capsys):
    assert main(["feasibility", "--config", str(DEFAULT_CONFIG)]) == EXIT_OK
    assert "V/ns" in capsys.readouterr().out

    report = cmd_feasibility(load_config(DEFAULT_CONFIG))
    assert report.b1_v_per_ns == pytest.approx(31.2, rel=1e-2)
    assert report.b2_v_per_ns < 0
    assert report.max_voltage_v == pytest.approx(156, rel=1e-2)


def test_feasibility_series_cells_share_the_ramp():
    single = cmd_feasibility(RunConfig())
    double = cmd_feasibility(RunConfig.model_validate({"feasibility": {"series_cells": 2}}))
    assert double.per_cell_b1_v_per_ns == pytest.approx(single.b1_v_per_ns / 2, rel=1e-12)
    assert double.per_cell_voltage_v == pytest.approx(single.max_voltage_v / 2, rel=1e-12)
    assert double.b1_v_per_ns == single.b1_v_per_ns


def test_feasibility_scheme2_rates_are_opposite():
    report = cmd_feasibility(RunConfig.model_validate({"scheme": {"kind": 2}}))
    assert report.b2_v_per_ns == report.b1_v_per_ns
    assert report.b1_v_per_ns < 0


# exit codes

def test_inert_cell_is_a_simulation_error(tmp_path, capsys):
    path = _write_config(tmp_path, {"cells": {"cell1": {"alpha_rad_per_v": 0.0}}})
    assert main(["feasibility", "--config", str(path)]) == EXIT_SIMULATION_ERROR
    assert "simulation error" in capsys.readouterr().err


def test_unphysical_offset_is_a_simulation_error(tmp_path):
    path = _write_config(tmp_path, {"scheme": {"a1_v": -1e7}})
    assert main(["simulate", "--config", str(path), "--output", str(tmp_path / "x.csv")]) == EXIT_SIMULATION_ERROR


def test_bad_value_reports_line_and_field(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "dot": {\n    "fss_uev": "lots"\n  }\n}\n', encoding="utf-8")
    assert main(["simulate", "--config", str(path)]) == EXIT_CONFIG_ERROR
    err = capsys.readouterr().err
    assert "line 3" in err
    assert "dot.fss_uev" in err


@pytest.mark.parametrize(
    "data",
    [
        {"dot": {"bogus": 1}},
        {"sweep": {"parameter": "temperature", "start": 0, "stop": 1, "steps": 3}},
        {"sweep": {"parameter": "fss_uev", "start": 0, "stop": 1, "steps": 3, "spacing": "log"}},
        {"scheme": {"kind": 3}},
    ],
)
def test_invalid_config_exit_code(tmp_path, data):
    path = _write_config(tmp_path, data)
    assert main(["sweep", "--config", str(path), "--output", str(tmp_path / "x.csv")]) == EXIT_CONFIG_ERROR


@pytest.mark.parametrize(
    "data, field",
    [
        ({"scheme": {"kind": 2, "delta_t_ns": 1.0}}, "scheme.delta_t_ns"),
        ({"scheme": {"kind": 2, "b2_scale": 1.1}}, "scheme.b2_scale"),
        ({"scheme": {"kind": 2, "a1_v": 5.0}}, "scheme.a1_v"),
        ({"scheme": {"kind": 2}, "cells": {"cell2": {"alpha_rad_per_v": 0.03}}}, "cells.cell2"),
        (
            {"scheme": {"kind": 2}, "sweep": {"parameter": "delta_t", "start": 0, "stop": 2, "steps": 3}},
            "sweep.parameter",
        ),
    ],
)
def test_scheme2_rejects_two_cell_settings(tmp_path, capsys, data, field):
    path = _write_config(tmp_path, data)
    command = "sweep" if "sweep" in data else "simulate"
    assert main([command, "--config", str(path), "--output", str(tmp_path / "x.csv")]) == EXIT_CONFIG_ERROR
    assert field in capsys.readouterr().err
    assert not (tmp_path / "x.csv").exists()


def test_scheme2_check_applies_to_built_configs():
    config = RunConfig.model_validate({"scheme": {"kind": 2, "b2_scale": 2.0}})
    with pytest.raises(ConfigError) as excinfo:
        config.build_scheme()
    assert excinfo.value.field == "scheme.b2_scale"
    assert RunConfig.model_validate({"scheme": {"kind": 2, "b1_scale": 2.0}}).build_scheme().b_scale == 2.0


def test_invalid_json(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "dot": \n', encoding="utf-8")
    assert main(["simulate", "--config", str(path)]) == EXIT_CONFIG_ERROR
    assert "invalid JSON" in capsys.readouterr().err


def test_missing_config_file(tmp_path):
    assert main(["simulate", "--config", str(tmp_path / "nope.json")]) == EXIT_CONFIG_ERROR


def test_print_config_round_trips(capsys):
    assert main(["simulate", "--print-config"]) == EXIT_OK
    assert parse_config(capsys.readouterr().out) == RunConfig()


# oracle-check

def test_corrupted_transform_fails_oracle(tmp_path, capsys):
    path = _write_config(tmp_path, {"oracle": {"grid_points": 4096, "density_grid": 512}})
    assert main(["oracle-check", "--config", str(path), "--corrupt-scale", "1.001"]) == EXIT_ORACLE_FAILURE
    assert "FAIL" in capsys.readouterr().out


def test_corrupted_transform_names_failing_check():
    config = RunConfig.model_validate({"oracle": {"grid_points": 4096, "density_grid": 512}})
    report = cmd_oracle_check(config, corrupt_scale=1.001)
    assert "transform photon 1 L2" in {c.name for c in report.failing()}


@pytest.mark.slow
def test_default_oracle_check_passes(capsys):
    assert main(["oracle-check", "--config", str(DEFAULT_CONFIG)]) == EXIT_OK
    assert capsys.readouterr().out.strip().endswith("PASS")


def test_scheme2_oracle_propagates_flipped_input(monkeypatch):
    seen = []

    def recording(state, *args, **kwargs):
        seen.append(state.labels())
        return compare_transform(state, *args, **kwargs)

    monkeypatch.setattr("cli.handlers.compare_transform", recording)
    config = RunConfig.model_validate({"scheme": {"kind": 2}, "oracle": {"grid_points": 1024, "density_grid": 512}})
    cmd_oracle_check(config)
    assert seen == [["VH", "HV"], ["VH", "HV"]]

    seen.clear()
    cmd_oracle_check(config.model_copy(update={"scheme": config.scheme.model_copy(update={"kind": 1})}))
    assert seen == [["HH", "VV"], ["HH", "VV"]]


@pytest.mark.slow
def test_scheme2_oracle_check_passes():
    report = cmd_oracle_check(RunConfig.model_validate({"scheme": {"kind": 2}}))
    assert report.passed, [c.name for c in report.failing()]
