import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np

from config.settings import RESULTS_DIR
from src.eom.cell import RampProfile
from src.exceptions import ConfigError
from src.metrics import (
    coherence_closed_form,
    normalized_coherence,
    polarization_density_matrix,
)
from src.oracle import compare_transform, density_matrix_grid
from src.results import ResultRow, write_results
from src.run_config import RunConfig
from src.schemes import (
    CorrectionReport,
    Scheme1Config,
    Scheme2Config,
    required_max_voltage,
    resolve_scheme1_rates,
    resolve_scheme2_rate,
    scheme1_ramp_rates,
    scheme1_run,
    scheme2_ramp_rate,
    scheme2_run,
    series_cell_rate,
)
from src.source import initial_state, initial_state_flipped
from src.source.state import TwoPhotonState
from src.units import NS, CellParams
from src.utils import run_limited

logger = logging.getLogger(__name__)

TRANSFORM_L2_TOLERANCE = 1e-4
TRANSFORM_PHASE_TOLERANCE = 1e-3
DENSITY_TOLERANCE = 1e-4
COHERENCE_TOLERANCE = 1e-3

V_PER_NS = 1e9


def run_scheme(config: RunConfig) -> CorrectionReport:
    scheme = config.build_scheme()
    if isinstance(scheme, Scheme2Config):
        return scheme2_run(scheme)
    return scheme1_run(scheme)


def _result_row(config: RunConfig, parameter: str, value: float) -> ResultRow:
    report = run_scheme(config)
    return ResultRow.from_report(parameter, value, report, config.feasibility.ramp_duration_ns * NS)


def resolve_output(config: RunConfig, output: Optional[str], command: str) -> Path:
    if output:
        return Path(output)
    if config.output.path:
        return Path(config.output.path)
    return RESULTS_DIR / f"{command}.csv"


def has_output_path(config: RunConfig, output: Optional[str]) -> bool:
    return bool(output or config.output.path)


def cmd_simulate(config: RunConfig, output: Optional[str] = None) -> ResultRow:
    """Single run; the row is written to a file only when a path is given, otherwise the caller prints it."""
    if config.sweep is not None:
        raise ConfigError("simulate does not take a sweep block, use the sweep command", field="sweep")
    row = _result_row(config, "none", 0.0)
    if has_output_path(config, output):
        write_results(resolve_output(config, output, "simulate"), [row], config)
    return row


async def cmd_sweep(config: RunConfig, output: Optional[str] = None, jobs: int = 1) -> List[ResultRow]:
    if config.sweep is None:
        raise ConfigError("sweep block is missing", field="sweep")
    name = config.sweep.parameter
    values = [float(v) for v in config.sweep.values()]
    logger.info(f"Sweeping {name} over {len(values)} steps with {jobs} jobs")

    def step(value: float) -> ResultRow:
        return _result_row(config.with_parameter(name, value), name, value)

    rows = await run_limited(step, values, jobs)
    write_results(resolve_output(config, output, "sweep"), rows, config)
    return rows


@dataclass(frozen=True)
class FeasibilityReport:
    scheme: int
    b1_v_per_ns: float
    b2_v_per_ns: float
    ramp_duration_ns: float
    max_voltage_v: float
    series_cells: int
    per_cell_b1_v_per_ns: float
    per_cell_b2_v_per_ns: float
    per_cell_voltage_v: float

    def to_dict(self) -> dict:
        return {
            "scheme": self.scheme,
            "b1_v_per_ns": self.b1_v_per_ns,
            "b2_v_per_ns": self.b2_v_per_ns,
            "ramp_duration_ns": self.ramp_duration_ns,
            "max_voltage_v": self.max_voltage_v,
            "series_cells": self.series_cells,
            "per_cell_b1_v_per_ns": self.per_cell_b1_v_per_ns,
            "per_cell_b2_v_per_ns": self.per_cell_b2_v_per_ns,
            "per_cell_voltage_v": self.per_cell_voltage_v,
        }


def cmd_feasibility(config: RunConfig) -> FeasibilityReport:
    dot = config.dot_params()
    cell1, cell2 = config.cell_params()
    if config.scheme.kind == 2:
        b1 = b2 = scheme2_ramp_rate(dot, cell1)
    else:
        b1, b2 = scheme1_ramp_rates(dot, cell1, cell2)

    duration = config.feasibility.ramp_duration_ns * NS
    n = config.feasibility.series_cells
    steepest = max(abs(b1), abs(b2))
    return FeasibilityReport(
        scheme=config.scheme.kind,
        b1_v_per_ns=b1 / V_PER_NS,
        b2_v_per_ns=b2 / V_PER_NS,
        ramp_duration_ns=config.feasibility.ramp_duration_ns,
        max_voltage_v=required_max_voltage(steepest, duration),
        series_cells=n,
        per_cell_b1_v_per_ns=series_cell_rate(b1, n) / V_PER_NS,
        per_cell_b2_v_per_ns=series_cell_rate(b2, n) / V_PER_NS,
        per_cell_voltage_v=required_max_voltage(series_cell_rate(steepest, n), duration),
    )


@dataclass(frozen=True)
class OracleCheck:
    name: str
    value: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.value < self.tolerance)


@dataclass
class OracleCheckReport:
    checks: List[OracleCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failing(self) -> List[OracleCheck]:
        return [c for c in self.checks if not c.passed]


@dataclass(frozen=True)
class OracleSetup:
    cells: Tuple[CellParams, CellParams]
    ramps: Tuple[RampProfile, RampProfile]
    # state entering the cells: flipped for Scheme 2
    cell_input: TwoPhotonState
    corrected: TwoPhotonState


def _oracle_setup(config: RunConfig) -> OracleSetup:
    scheme: Union[Scheme1Config, Scheme2Config] = config.build_scheme()
    if isinstance(scheme, Scheme2Config):
        ramps = scheme.ramps(resolve_scheme2_rate(scheme))
        return OracleSetup(
            (scheme.cell, scheme.cell), ramps, initial_state_flipped(scheme.dot), scheme2_run(scheme).out_state
        )
    ramps = scheme.ramps(*resolve_scheme1_rates(scheme))
    return OracleSetup((scheme.cell1, scheme.cell2), ramps, initial_state(scheme.dot), scheme1_run(scheme).out_state)


def cmd_oracle_check(config: RunConfig, corrupt_scale: float = 1.0) -> OracleCheckReport:
    dot = config.dot_params()
    setup = _oracle_setup(config)
    cells, ramps, corrected = setup.cells, setup.ramps, setup.corrected
    emitted = initial_state(dot)
    report = OracleCheckReport()

    for photon in (1, 2):
        logger.info(f"Oracle: grid propagation of photon {photon}...")
        comparison = compare_transform(
            setup.cell_input,
            cells[photon - 1],
            ramps[photon - 1],
            photon,
            n_points=config.oracle.grid_points,
            f_distortion=corrupt_scale,
        )
        report.checks.append(OracleCheck(f"transform photon {photon} L2", comparison.l2_error, TRANSFORM_L2_TOLERANCE))
        report.checks.append(
            OracleCheck(f"transform photon {photon} phase", comparison.max_phase_error, TRANSFORM_PHASE_TOLERANCE)
        )

    logger.info("Oracle: Riemann-sum density matrices...")
    analytic_emitted = polarization_density_matrix(emitted)
    grid_emitted = density_matrix_grid(emitted, config.oracle.density_grid)
    grid_corrected = density_matrix_grid(corrected, config.oracle.density_grid)
    report.checks.append(
        OracleCheck("density emitted state", float(np.max(np.abs(grid_emitted.rho - analytic_emitted.rho))), DENSITY_TOLERANCE)
    )
    report.checks.append(
        OracleCheck(
            "density corrected state",
            float(np.max(np.abs(grid_corrected.rho - polarization_density_matrix(corrected).rho))),
            DENSITY_TOLERANCE,
        )
    )

    logger.info("Oracle: three-way coherence check...")
    closed = coherence_closed_form(dot.omega_S, dot.gamma)
    analytic = normalized_coherence(analytic_emitted)
    quadrature = normalized_coherence(polarization_density_matrix(emitted, method="quadrature"))
    grid = normalized_coherence(grid_emitted)
    report.checks.append(OracleCheck("coherence analytic vs closed form", abs(analytic - closed), COHERENCE_TOLERANCE))
    report.checks.append(OracleCheck("coherence quadrature vs closed form", abs(quadrature - closed), COHERENCE_TOLERANCE))
    report.checks.append(OracleCheck("coherence grid vs closed form", abs(grid - closed), COHERENCE_TOLERANCE))

    for check in report.failing():
        logger.warning(f"Oracle check failed: {check.name} = {check.value:.3e} (tolerance {check.tolerance:.1e})")
    return report
