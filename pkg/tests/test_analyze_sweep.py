import math

import numpy as np
import pandas as pd
import pytest

from scripts.analyze_sweep import analyze_sweep, summarize


def _frame(values, fidelities, phases) -> pd.DataFrame:
    n = len(values)
    return pd.DataFrame({
        "parameter": ["delta_l1"] * n,
        "value": values,
        "fidelity_opt": fidelities,
        "concurrence": [f - 1e-4 for f in fidelities],
        "constant_phase_rad": phases,
        "max_voltage_v": [156.0] * n,
    })


def test_summary_of_linear_phase():
    values = np.linspace(0, 5, 11)
    df = _frame(values, [0.99999] * 11, 0.005 * values + 3.0)
    s = summarize(df)
    assert s["parameter"] == "delta_l1"
    assert s["steps"] == 11
    assert s["phase_slope"] == pytest.approx(0.005, rel=1e-9)
    assert s["concurrence_min"] == pytest.approx(0.99989)
    assert s["max_voltage_v"] == 156.0


def test_slope_survives_phase_wrap():
    values = np.linspace(0, 10, 21)
    wrapped = np.angle(np.exp(1j * (1.0 * values + 2.5)))
    s = summarize(_frame(values, [1.0] * 21, wrapped))
    assert s["phase_slope"] == pytest.approx(1.0, rel=1e-9)


def test_monotonic_flag():
    values = [0.0, 0.5, 1.0]
    assert summarize(_frame(values, [1.0, 0.99, 0.95], [0, 0, 0]))["fidelity_monotonic"]
    assert not summarize(_frame(values, [1.0, 0.9, 0.95], [0, 0, 0]))["fidelity_monotonic"]


def test_constant_values_give_no_slope():
    s = summarize(_frame([1.0, 1.0], [1.0, 1.0], [0.1, 0.2]))
    assert math.isnan(s["phase_slope"])


def test_report_warns_on_low_fidelity(capsys):
    analyze_sweep(_frame([0.0, 1.0], [0.99, 0.5], [0.0, 0.1]))
    out = capsys.readouterr().out
    assert "SWEEP OVER delta_l1" in out
    assert "drops below" in out


def test_empty_frame(capsys):
    analyze_sweep(pd.DataFrame())
    assert "No sweep rows" in capsys.readouterr().out
