import logging
import math

import numpy as np
import pytest

from src.eom import (
    RampProfile,
    apply_cell,
    apply_cell_chain,
    instantaneous_speed,
    phase_difference,
    scale_factor,
    transit_time,
    walkoff,
)
from src.eom.cell import expm1_over
from src.exceptions import InvalidParameterError, UnphysicalVoltageError
from src.metrics import state_norm
from src.schemes import scheme1_ramp_rates
from src.source import initial_state
from src.units import CONSTANTS, CellParams


@pytest.fixture
def b1(dot, cell):
    return scheme1_ramp_rates(dot, cell, cell)[0]


def test_speed_without_field(inert_cell):
    ramp = RampProfile(a=100.0, b=3e10)
    t = np.linspace(0, 1e-8, 5)
    assert np.all(instantaneous_speed(inert_cell, ramp, t) == inert_cell.v0)


def test_speed_halves_when_index_doubles(cell):
    ramp = RampProfile(a=1 / cell.eta)
    assert instantaneous_speed(cell, ramp, 0.0) == pytest.approx(cell.v0 / 2, rel=1e-12)


def test_speed_rejects_unphysical_voltage(cell):
    with pytest.raises(UnphysicalVoltageError):
        instantaneous_speed(cell, RampProfile(a=-2 / cell.eta), 0.0)


def test_ramp_rejects_non_finite_fields():
    with pytest.raises(InvalidParameterError):
        RampProfile(a=math.nan)


def test_transit_time_constant_speed():
    cell = CellParams(eta=1e-7, s=0.02, v0=1.9986e8)
    assert transit_time(cell, RampProfile(), 0.0) == pytest.approx(1.0007e-10, rel=1e-4)


def test_transit_time_doubled_index(cell):
    ramp = RampProfile(a=1 / cell.eta)
    assert transit_time(cell, ramp, 0.0) == pytest.approx(2 * cell.s / cell.v0, rel=1e-12)


def test_transit_time_continuous_at_zero_rate(cell):
    limit = transit_time(cell, RampProfile(a=10.0, L=0.5), 0.0)
    for b in (1e-6, -1e-6):
        assert transit_time(cell, RampProfile(a=10.0, b=b, L=0.5), 0.0) == pytest.approx(limit, rel=1e-9)


def test_expm1_over_is_continuous():
    assert expm1_over(0.0) == 1.0
    assert expm1_over(1e-6 * (1 - 1e-12)) == pytest.approx(expm1_over(1e-6 * (1 + 1e-12)), rel=1e-14)


def test_scale_factor(cell, b1):
    assert scale_factor(cell, 0.0) == 1.0
    assert scale_factor(cell, b1) * scale_factor(cell, -b1) == pytest.approx(1.0, rel=1e-15)
    assert scale_factor(cell, b1) < 1


def test_scale_factor_small_exponent(cell):
    u = 6.693e-7
    f = scale_factor(cell, u / cell.delay_per_volt)
    assert f == pytest.approx(1 - u + u * u / 2, abs=1e-15)


def test_walkoff_vanishes_without_voltage(cell):
    assert walkoff(cell, RampProfile(a=0.0, b=0.0, L=0.5)) == 0.0
    assert walkoff(cell, RampProfile(a=0.0, b=1e-6, L=0.5)) == pytest.approx(0.0, abs=1e-20)


def test_walkoff_constant_voltage_limit(cell):
    a = 10.0
    expected = a * CONSTANTS.c * cell.eta * cell.s / cell.v0
    assert walkoff(cell, RampProfile(a=a, b=0.0)) == pytest.approx(expected, rel=1e-12)
    for b in (1e-6, -1e-6):
        assert walkoff(cell, RampProfile(a=a, b=b)) == pytest.approx(expected, rel=1e-9)


def test_walkoff_positive_for_correcting_ramp(cell, b1):
    assert walkoff(cell, RampProfile(b=b1, L=0.5)) > 0


def test_walkoff_linear_in_lead_in(cell, b1):
    d1 = walkoff(cell, RampProfile(a=3.0, b=b1, L=0.2))
    d2 = walkoff(cell, RampProfile(a=3.0, b=b1, L=0.7))
    expected = 0.5 * math.expm1(cell.delay_per_volt * b1)
    assert d2 - d1 == pytest.approx(expected, rel=1e-7)


def test_walkoff_matches_transit_time(cell, b1):
    ramp = RampProfile(a=5.0, b=b1, L=0.5)
    expected = CONSTANTS.c * (transit_time(cell, ramp, 0.0) - cell.s / cell.v0)
    assert walkoff(cell, ramp) == pytest.approx(expected, rel=1e-8)


def test_walkoff_matches_direct_formula(cell):
    a, b, L = 5.0, 1e13, 0.5
    c = CONSTANTS.c
    u = cell.delay_per_volt * b
    direct = (c / (cell.eta * b) + a * c / b + L) * math.expm1(u) - c * cell.s / cell.v0
    assert walkoff(cell, RampProfile(a=a, b=b, L=L)) == pytest.approx(direct, rel=1e-9)


def test_phase_difference_flat_at_design_rate(dot, cell, b1):
    ramp = RampProfile(b=b1, L=0.5)
    x = np.linspace(-0.3, 0.0, 7)
    phases = phase_difference(cell, ramp, dot.k_V1, dot.k_H1, x)
    assert np.ptp(phases) < 1e-8
    assert phases[-1] == pytest.approx(dot.k_H1 * walkoff(cell, ramp), rel=1e-12)


def test_phase_difference_inert_cell(dot, inert_cell):
    x = np.array([-0.3, -0.1, 0.0])
    phases = phase_difference(inert_cell, RampProfile(b=3e10, L=0.5), dot.k_V1, dot.k_H1, x)
    np.testing.assert_allclose(phases, dot.k_S * x, atol=1e-8)


def test_inert_cell_is_identity(dot, inert_cell, b1):
    state = initial_state(dot)
    ramp = RampProfile(a=20.0, b=b1, L=0.5)
    assert apply_cell(state, inert_cell, ramp, 1) == state
    assert apply_cell(state, inert_cell, ramp, 2) == state


@pytest.mark.parametrize("photon", [1, 2])
@pytest.mark.parametrize("scale", [1.0, -1.0, 50.0])
def test_apply_cell_preserves_norm(dot, cell, b1, photon, scale):
    state = apply_cell(initial_state(dot), cell, RampProfile(a=2.0, b=scale * b1, L=0.5), photon)
    assert state_norm(state) == pytest.approx(1.0, abs=1e-9)


def test_apply_cell_scales_v_wavenumber(dot, cell, b1):
    ramp = RampProfile(b=b1, L=0.5)
    out = apply_cell(initial_state(dot), cell, ramp, 1)
    f = scale_factor(cell, b1)
    vv, hh = out.branch("VV"), out.branch("HH")
    assert vv.kappa1 == pytest.approx(f * dot.k_V1, rel=1e-15)
    assert vv.kappa1 == pytest.approx(dot.k_H1, rel=1e-12)
    assert vv.kappa2 == dot.k_V2
    assert hh.kappa1 == dot.k_H1
    assert hh.phase0 == pytest.approx(-dot.k_H1 * walkoff(cell, ramp), rel=1e-12)


def test_cells_in_series_compose(dot, cell, b1):
    stages = [(cell, RampProfile(b=0.4 * b1, L=0.5)), (cell, RampProfile(b=0.6 * b1, L=0.6))]
    out = apply_cell_chain(initial_state(dot), stages, photon=1)
    expected = scale_factor(cell, 0.4 * b1) * scale_factor(cell, 0.6 * b1) * dot.k_V1
    assert out.branch("VV").kappa1 == pytest.approx(expected, rel=1e-14)
    assert out.branch("VV").kappa1 == pytest.approx(scale_factor(cell, b1) * dot.k_V1, rel=1e-14)
    assert state_norm(out) == pytest.approx(1.0, abs=1e-9)


def test_apply_cell_rejects_unphysical_voltage(dot, cell):
    with pytest.raises(UnphysicalVoltageError):
        apply_cell(initial_state(dot), cell, RampProfile(a=-2 / cell.eta, L=0.5), 1)


def test_apply_cell_rejects_bad_photon(dot, cell):
    with pytest.raises(ValueError):
        apply_cell(initial_state(dot), cell, RampProfile(), 3)


def test_late_ramp_warns(dot, cell, b1, caplog):
    with caplog.at_level(logging.WARNING):
        apply_cell(initial_state(dot), cell, RampProfile(b=b1, L=0.5, t_start_offset=1e-9), 1)
    assert "after the train reference time" in caplog.text
