"""Closed-form propagation through a Pockels cell driven by a linear ramp V(t) = a + b*t.

Time t = 0 is the moment the wave train's reference point O sits at x = 0.
A point at x <= 0 reaches the entrance face, L ahead of O, at t_in = (L - x)/c.
"""
import logging
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from src.exceptions import InvalidParameterError, UnphysicalVoltageError
from src.units import CONSTANTS, CellParams

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

SERIES_THRESHOLD = 1e-6
SERIES_THRESHOLD_EXCESS = 1e-3


@dataclass(frozen=True)
class RampProfile:
    a: float = 0.0
    b: float = 0.0
    L: float = 0.0
    t_start_offset: float = 0.0

    def __post_init__(self):
        for name in ("a", "b", "L", "t_start_offset"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise InvalidParameterError(f"Ramp field {name} must be finite, got {value}")

    def voltage(self, t: ArrayLike) -> ArrayLike:
        return self.a + self.b * t

    @property
    def covers_train(self) -> bool:
        return self.t_start_offset <= 0

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "L": self.L, "t_start_offset": self.t_start_offset}


def exponent(cell: CellParams, b: float) -> float:
    """u = eta*b*s/v0."""
    return cell.delay_per_volt * b


def expm1_over(u: float) -> float:
    """(e^u - 1)/u, continuous through u = 0."""
    if abs(u) < SERIES_THRESHOLD:
        return 1 + u / 2 + u * u / 6 + u ** 3 / 24
    return math.expm1(u) / u


def _expm1_over_minus_one(u: float) -> float:
    if abs(u) < SERIES_THRESHOLD_EXCESS:
        return u / 2 + u ** 2 / 6 + u ** 3 / 24 + u ** 4 / 120 + u ** 5 / 720
    return (math.expm1(u) - u) / u


def entry_time(ramp: RampProfile, x: ArrayLike) -> ArrayLike:
    return (ramp.L - x) / CONSTANTS.c


def _index_factor(cell: CellParams, ramp: RampProfile, t: ArrayLike) -> ArrayLike:
    factor = 1 + cell.eta * ramp.voltage(t)
    if np.any(np.asarray(factor) <= 0):
        raise UnphysicalVoltageError(
            f"1 + eta*V(t) must stay positive: eta={cell.eta}, a={ramp.a}, b={ramp.b}, "
            f"min factor {np.min(factor):.3e}"
        )
    return factor


def instantaneous_speed(cell: CellParams, ramp: RampProfile, t: ArrayLike) -> ArrayLike:
    return cell.v0 / _index_factor(cell, ramp, t)


def transit_time(cell: CellParams, ramp: RampProfile, x: ArrayLike) -> ArrayLike:
    """Time the point at x spends inside the crystal.

    The index factor only changes by the factor e^u between entry and exit, so a
    positive factor at entry keeps the speed positive for the whole transit.
    """
    u = exponent(cell, ramp.b)
    factor_in = _index_factor(cell, ramp, entry_time(ramp, x))
    return factor_in * (cell.s / cell.v0) * expm1_over(u)


def scale_factor(cell: CellParams, b: float) -> float:
    return math.exp(-exponent(cell, b))


def walkoff(cell: CellParams, ramp: RampProfile) -> float:
    """Displacement of the H train relative to the V reference frame after the cell.

    Equal to c*(transit_time(x=0) - s/v0). Written so that neither eta*b nor
    b appears in a denominator.
    """
    _index_factor(cell, ramp, entry_time(ramp, 0.0))
    u = exponent(cell, ramp.b)
    c = CONSTANTS.c
    excess = cell.eta * ramp.a * expm1_over(u) + _expm1_over_minus_one(u)
    return (c * cell.s / cell.v0) * excess + ramp.L * math.expm1(u)


def phase_difference(
    cell: CellParams,
    ramp: RampProfile,
    k_V: float,
    k_H: float,
    x: ArrayLike,
) -> ArrayLike:
    f = scale_factor(cell, ramp.b)
    return (f * k_V - k_H) * x + k_H * walkoff(cell, ramp)


def check_voltage_range(cell: CellParams, ramp: RampProfile, x_low: float, x_high: float):
    """Raises if 1 + eta*V leaves the physical range for entry points in [x_low, x_high]."""
    _index_factor(cell, ramp, entry_time(ramp, np.array([x_low, x_high])))
