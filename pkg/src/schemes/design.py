"""Ramp design equations and first-order sensitivity formulas."""
import logging
import math
from typing import Tuple

from src.eom.cell import walkoff
from src.exceptions import InvalidParameterError, UncorrectableCellError
from src.source.state import DotParams, wrap_phase
from src.units import CONSTANTS, CellParams
from .configs import Scheme1Config

logger = logging.getLogger(__name__)


def _rate_for_ratio(cell: CellParams, log_ratio: float) -> float:
    """Rate b with eta*b*s/v0 = log_ratio."""
    if cell.eta == 0:
        raise UncorrectableCellError("Cell with eta = 0 cannot shift frequencies")
    return log_ratio / cell.delay_per_volt


def scheme1_ramp_rates(dot: DotParams, cell1: CellParams, cell2: CellParams) -> Tuple[float, float]:
    # a swapped dot has the V photons on the lower mode, so log(k_H/k_V) changes sign
    b1 = _rate_for_ratio(cell1, dot.fss_sign * math.log1p(dot.k_S / dot.k_H1))
    b2 = _rate_for_ratio(cell2, dot.fss_sign * math.log1p(-dot.k_S / dot.k_H2))
    return b1, b2


def scheme2_ramp_rate(dot: DotParams, cell: CellParams) -> float:
    """Single-cell rate; after the flipper photon 1's V branch carries the H-path wavenumber."""
    return _rate_for_ratio(cell, -dot.fss_sign * math.log1p(dot.k_S / dot.k_H1))


def scheme1_constant_phase(cfg: Scheme1Config, b1: float, b2: float) -> float:
    """Phase of the VV branch relative to HH when the rates cancel all position dependence."""
    ramp1, ramp2 = cfg.ramps(b1, b2)
    k_h1, k_h2 = cfg.dot.wavenumbers("H")
    return wrap_phase(k_h1 * walkoff(cfg.cell1, ramp1) + k_h2 * walkoff(cfg.cell2, ramp2))


def path_fluctuation_phase(delta_l: float, k_H: float, cell: CellParams, b: float) -> float:
    return k_H * delta_l * math.expm1(cell.delay_per_volt * b)


def ramp_mismatch_phase(delta_t: float, dot: DotParams) -> float:
    return CONSTANTS.c * dot.k_S * delta_t


def required_max_voltage(b: float, duration: float) -> float:
    if not duration > 0:
        raise InvalidParameterError(f"Ramp duration must be positive, got {duration}")
    return abs(b) * duration


def series_cell_rate(b: float, n_cells: int) -> float:
    """Per-cell rate when n identical cells in series share one frequency shift."""
    if n_cells < 1:
        raise InvalidParameterError(f"Series chain needs at least one cell, got {n_cells}")
    return b / n_cells
