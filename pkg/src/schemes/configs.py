import math
from dataclasses import dataclass
from typing import Optional, Tuple

from src.eom.cell import RampProfile
from src.exceptions import InvalidParameterError
from src.source.state import DotParams
from src.units import CellParams


def mismatch_offsets(delta_t: float) -> Tuple[float, float]:
    """Ramp start times (t1, t2) relative to the train reference, both <= 0, with t2 - t1 = delta_t."""
    t1 = -max(delta_t, 0.0)
    return t1, t1 + delta_t


def _check_paths(**paths: float):
    for name, value in paths.items():
        if not (math.isfinite(value) and value >= 0):
            raise InvalidParameterError(f"{name} must be a non-negative length, got {value}")


@dataclass(frozen=True)
class Scheme1Config:
    dot: DotParams
    cell1: CellParams
    cell2: CellParams
    L1: float = 0.5
    L2: float = 0.5
    a1: float = 0.0
    a2: float = 0.0
    delta_t: float = 0.0
    b1: Optional[float] = None
    b2: Optional[float] = None
    b1_scale: float = 1.0
    b2_scale: float = 1.0
    delta_l1: float = 0.0
    delta_l2: float = 0.0

    def __post_init__(self):
        _check_paths(L1=self.L1 + self.delta_l1, L2=self.L2 + self.delta_l2)
        if not math.isfinite(self.delta_t):
            raise InvalidParameterError(f"delta_t must be finite, got {self.delta_t}")

    def ramps(self, b1: float, b2: float, delta_t: Optional[float] = None) -> Tuple[RampProfile, RampProfile]:
        """Ramps with start-time offsets folded into the voltage offsets, a_i -> a_i + b_i*(0 - t_i)."""
        t1, t2 = mismatch_offsets(self.delta_t if delta_t is None else delta_t)
        ramp1 = RampProfile(a=self.a1 - b1 * t1, b=b1, L=self.L1 + self.delta_l1, t_start_offset=t1)
        ramp2 = RampProfile(a=self.a2 - b2 * t2, b=b2, L=self.L2 + self.delta_l2, t_start_offset=t2)
        return ramp1, ramp2


@dataclass(frozen=True)
class Scheme2Config:
    dot: DotParams
    cell: CellParams
    L1: float = 0.5
    L2: float = 0.5
    b: Optional[float] = None
    b_scale: float = 1.0
    delta_l1: float = 0.0
    delta_l2: float = 0.0

    def __post_init__(self):
        _check_paths(L1=self.L1 + self.delta_l1, L2=self.L2 + self.delta_l2)

    def ramps(self, b: float) -> Tuple[RampProfile, RampProfile]:
        return (
            RampProfile(a=0.0, b=b, L=self.L1 + self.delta_l1),
            RampProfile(a=0.0, b=b, L=self.L2 + self.delta_l2),
        )
