import cmath
import logging
import math
from dataclasses import replace
from typing import Iterable, Tuple

from config.settings import QUADRATURE_TRUNCATION_LENGTHS
from src.source.state import TwoPhotonBranch, TwoPhotonState
from src.units import CellParams
from .cell import RampProfile, check_voltage_range, scale_factor, walkoff

logger = logging.getLogger(__name__)


def scale_coordinate(branch: TwoPhotonBranch, photon: int, f: float) -> TwoPhotonBranch:
    """psi(x) -> sqrt(f) * psi(f*x) on one photon's coordinate."""
    if photon == 1:
        return replace(
            branch,
            amp=branch.amp * math.sqrt(f),
            env1=branch.env1 * f,
            kappa1=branch.kappa1 * f,
            wedge=branch.wedge.scale(1, f),
        )
    return replace(
        branch,
        amp=branch.amp * math.sqrt(f),
        env2=branch.env2 * f,
        kappa2=branch.kappa2 * f,
        wedge=branch.wedge.scale(2, f),
    )


def shift_coordinate(branch: TwoPhotonBranch, photon: int, d: float) -> TwoPhotonBranch:
    """psi(x) -> psi(x - d) on one photon's coordinate."""
    env = branch.env(photon)
    kappa = branch.kappa(photon)
    return replace(
        branch,
        amp=branch.amp * math.exp(-env * d),
        phase0=branch.phase0 - kappa * d,
        wedge=branch.wedge.shift(photon, d),
    )


def _support_range(state: TwoPhotonState, photon: int) -> Tuple[float, float]:
    lows, highs = [], []
    for branch in state:
        edge = branch.wedge.edge(photon)
        highs.append(edge)
        lows.append(edge - QUADRATURE_TRUNCATION_LENGTHS / branch.env(photon))
    return min(lows), max(highs)


def apply_cell(
    state: TwoPhotonState,
    cell: CellParams,
    ramp: RampProfile,
    photon: int,
) -> TwoPhotonState:
    if photon not in (1, 2):
        raise ValueError(f"Photon index must be 1 or 2, got {photon}")
    if not ramp.covers_train:
        logger.warning(
            f"Ramp on photon {photon} starts {ramp.t_start_offset:.3e} s after the train reference time"
        )

    x_low, x_high = _support_range(state, photon)
    check_voltage_range(cell, ramp, x_low, x_high)

    f = scale_factor(cell, ramp.b)
    d = walkoff(cell, ramp)
    logger.debug(f"Cell on photon {photon}: f={f:.15f}, d={d:.6e} m")

    out = []
    for branch in state:
        if branch.pol(photon) == "V":
            out.append(scale_coordinate(branch, photon, f))
        else:
            out.append(shift_coordinate(branch, photon, d))
    return TwoPhotonState(tuple(out))


def apply_cell_chain(
    state: TwoPhotonState,
    stages: Iterable[Tuple[CellParams, RampProfile]],
    photon: int,
) -> TwoPhotonState:
    """Cells in series along one photon's path."""
    for cell, ramp in stages:
        state = apply_cell(state, cell, ramp, photon)
    return state


def branch_profile_ratio(before: TwoPhotonBranch, after: TwoPhotonBranch) -> complex:
    """Complex factor amp'*e^{i*phase0'} / (amp*e^{i*phase0}) between two versions of a branch."""
    return after.amp / before.amp * cmath.exp(1j * (after.phase0 - before.phase0))
