"""Brute-force propagation of sampled wave trains through a ramped crystal.

Only the instantaneous speed v(t) = v0/(1 + eta*V(t)) is taken from the cell
model. Transit times come from solving  integral_{t_in}^{t_in+dt} v(t) dt = s
numerically for every sample.
"""
import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from config.settings import ORACLE_GRID_POINTS, QUADRATURE_TRUNCATION_LENGTHS
from src.eom.cell import RampProfile, instantaneous_speed
from src.eom.transform import apply_cell, branch_profile_ratio
from src.exceptions import InvalidParameterError, NumericalError
from src.source.state import POLARIZATIONS, TwoPhotonState
from src.units import CONSTANTS, CellParams

logger = logging.getLogger(__name__)

SIMPSON_RTOL = 1e-12
SIMPSON_MAX_INTERVALS = 2 ** 16
BISECTION_MAX_ITER = 200

KAISER_BETA = 6.0
KAISER_HALF_WIDTH = 4
KAISER_TAPS = np.arange(-KAISER_HALF_WIDTH + 1, KAISER_HALF_WIDTH + 1)
PADDING = 2 * KAISER_HALF_WIDTH

RESOLUTION_LIMIT = 0.5
PHASE_MASK_FRACTION = 1e-3
# in grid steps
EDGE_TOLERANCE = 1e-6


@dataclass(frozen=True)
class SampledWave:
    """Uniformly sampled single-photon amplitude, stored relative to exp(i*carrier*x).

    The physical amplitude vanishes beyond ``edge``. Samples past it are ghost
    samples that continue the profile smoothly, so the interpolation kernel
    sees no artificial step at the support edge.
    """

    positions: np.ndarray
    amplitudes: np.ndarray
    polarization: str
    carrier: float = 0.0
    edge: float = math.inf

    def __post_init__(self):
        positions = np.asarray(self.positions, dtype=float)
        amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if positions.ndim != 1 or positions.shape != amplitudes.shape:
            raise InvalidParameterError("Positions and amplitudes must be 1-D arrays of equal length")
        if len(positions) < 2:
            raise InvalidParameterError("A sampled wave needs at least two points")
        steps = np.diff(positions)
        if not np.allclose(steps, steps[0], rtol=1e-9, atol=0):
            raise InvalidParameterError("Sample positions must form a uniform grid")
        if self.polarization not in POLARIZATIONS:
            raise InvalidParameterError(f"Unknown polarization: {self.polarization}")
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "amplitudes", amplitudes)

    @property
    def spacing(self) -> float:
        return float((self.positions[-1] - self.positions[0]) / (len(self.positions) - 1))

    def inside(self) -> np.ndarray:
        return self.positions <= self.edge + EDGE_TOLERANCE * self.spacing

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes[self.inside()]) ** 2) * self.spacing)

    @classmethod
    def from_profile(
        cls,
        positions: np.ndarray,
        env: float,
        kappa: float,
        edge: float,
        polarization: str,
        carrier: float,
    ) -> "SampledWave":
        """Samples exp((env + i*kappa)*x); positions past edge hold ghost samples."""
        positions = np.asarray(positions, dtype=float)
        spacing = positions[1] - positions[0]
        if spacing * abs(kappa - carrier) >= RESOLUTION_LIMIT:
            raise InvalidParameterError(
                f"Grid step {spacing:.3e} m does not resolve wavenumber offset {kappa - carrier:.3e} rad/m"
            )
        amplitudes = np.exp((env + 1j * (kappa - carrier)) * positions)
        return cls(positions, amplitudes, polarization, carrier, edge)


def _simpson_distance(cell: CellParams, ramp: RampProfile, t_in: np.ndarray, dt: np.ndarray) -> np.ndarray:
    """integral of v(t) over [t_in, t_in + dt], refined until the relative change is below SIMPSON_RTOL."""

    def simpson(n: int) -> np.ndarray:
        frac = np.linspace(0.0, 1.0, n + 1)
        weights = np.ones(n + 1)
        weights[1:-1:2] = 4
        weights[2:-1:2] = 2
        speeds = instantaneous_speed(cell, ramp, t_in[:, None] + dt[:, None] * frac[None, :])
        return dt / (3 * n) * (speeds @ weights)

    n = 2
    previous = simpson(n)
    while n < SIMPSON_MAX_INTERVALS:
        n *= 2
        current = simpson(n)
        if np.all(np.abs(current - previous) <= SIMPSON_RTOL * np.abs(current)):
            return current
        previous = current
    raise NumericalError("Simpson refinement did not converge")


def solve_transit(cell: CellParams, ramp: RampProfile, t_in: np.ndarray) -> np.ndarray:
    """Transit times by bisection on F(dt) = integral v dt - s over the bracket [0, 4s/v_min]."""
    t_in = np.atleast_1d(np.asarray(t_in, dtype=float))
    v_in = instantaneous_speed(cell, ramp, t_in)
    v_end = instantaneous_speed(cell, ramp, t_in + 4 * cell.s / v_in)
    lo = np.zeros_like(t_in)
    hi = 4 * cell.s / np.minimum(v_in, v_end)
    if np.any(_simpson_distance(cell, ramp, t_in, hi) < cell.s):
        raise NumericalError("Transit-time bracket does not contain the root")

    eps = np.finfo(float).eps
    for _ in range(BISECTION_MAX_ITER):
        mid = 0.5 * (lo + hi)
        beyond = _simpson_distance(cell, ramp, t_in, mid) > cell.s
        hi = np.where(beyond, mid, hi)
        lo = np.where(beyond, lo, mid)
        if np.all(hi - lo <= 4 * eps * hi):
            return 0.5 * (lo + hi)
    raise NumericalError("Transit-time bisection did not converge")


def windowed_sinc_interpolate(samples: np.ndarray, p: np.ndarray) -> np.ndarray:
    """8-tap Kaiser-windowed sinc interpolation at fractional sample indices p; zero outside the grid."""
    padded = np.concatenate([np.zeros(PADDING, dtype=complex), samples, np.zeros(PADDING, dtype=complex)])
    p = np.asarray(p, dtype=float)
    outside = (p < -PADDING) | (p > len(samples) - 1 + PADDING)
    p = np.clip(p, -PADDING, len(samples) - 1 + PADDING)

    base = np.floor(p).astype(int)
    taps = base[:, None] + KAISER_TAPS[None, :]
    dist = p[:, None] - taps
    window = np.i0(KAISER_BETA * np.sqrt(np.clip(1 - (dist / KAISER_HALF_WIDTH) ** 2, 0, None))) / np.i0(KAISER_BETA)
    weights = np.sinc(dist) * window
    weights /= weights.sum(axis=1, keepdims=True)

    index = taps + PADDING
    valid = (index >= 0) & (index < len(padded))
    values = np.where(valid, padded[np.clip(index, 0, len(padded) - 1)], 0)
    result = np.sum(weights * values, axis=1)
    return np.where(outside, 0, result)


def propagate_grid(wave: SampledWave, cell: CellParams, ramp: RampProfile) -> SampledWave:
    """Output amplitude on the input grid, in the frame that follows the V reference point."""
    c = CONSTANTS.c
    x = wave.positions
    felt = cell if wave.polarization == "V" else CellParams(eta=0.0, s=cell.s, v0=cell.v0)

    dt = solve_transit(felt, ramp, (ramp.L - x) / c)
    dt_ref = solve_transit(cell, ramp, np.array([ramp.L / c]))[0]

    # x_in - x_out
    displacement = c * (dt - dt_ref)
    x_out = x - displacement
    if not np.all(np.diff(x_out) > 0):
        raise NumericalError("Propagated sample positions are not monotonic")
    density = np.sqrt(np.gradient(x) / np.gradient(x_out))

    # source point of each output sample: x_src = y + shift
    shift = np.interp(x, x_out, displacement)
    x_src = x + shift
    source = windowed_sinc_interpolate(wave.amplitudes, np.arange(len(x)) + shift / wave.spacing)
    amplitudes = np.interp(x_src, x, density) * np.exp(1j * wave.carrier * shift) * source
    beyond = x_src > wave.edge + EDGE_TOLERANCE * wave.spacing
    amplitudes = np.where(beyond, 0, amplitudes)
    edge = float(np.interp(wave.edge, x_src, x, left=-math.inf, right=math.inf))
    return SampledWave(x, amplitudes, wave.polarization, wave.carrier, edge)


@dataclass(frozen=True)
class BranchComparison:
    label: str
    l2_error: float
    max_phase_error: float

    def to_dict(self) -> dict:
        return {"label": self.label, "l2_error": self.l2_error, "max_phase_error": self.max_phase_error}


@dataclass(frozen=True)
class TransformComparison:
    l2_error: float
    max_phase_error: float
    branches: Tuple[BranchComparison, ...]

    def to_dict(self) -> dict:
        return {
            "l2_error": self.l2_error,
            "max_phase_error": self.max_phase_error,
            "branches": [b.to_dict() for b in self.branches],
        }


def _errors(sampled: np.ndarray, predicted: np.ndarray) -> Tuple[float, float]:
    l2 = math.sqrt(np.sum(np.abs(sampled - predicted) ** 2) / np.sum(np.abs(predicted) ** 2))
    magnitude = np.abs(predicted)
    mask = (magnitude >= PHASE_MASK_FRACTION * magnitude.max()) & (np.abs(sampled) > 0)
    phase = float(np.max(np.abs(np.angle(sampled[mask] * np.conj(predicted[mask]))), initial=0.0))
    return l2, phase


def compare_transform(
    state: TwoPhotonState,
    cell: CellParams,
    ramp: RampProfile,
    photon: int,
    n_points: int = ORACLE_GRID_POINTS,
    f_distortion: float = 1.0,
) -> TransformComparison:
    """Grid propagation versus apply_cell for every branch's profile along one photon.

    f_distortion rescales the closed-form V prediction by an extra factor on f,
    which must make the comparison fail.
    """
    results = []
    for branch in state:
        env, kappa, edge = branch.env(photon), branch.kappa(photon), branch.wedge.edge(photon)
        pol = branch.pol(photon)
        span = QUADRATURE_TRUNCATION_LENGTHS / (2 * env)
        y = np.linspace(edge - span, edge, n_points)
        step = y[1] - y[0]
        ghosts = edge + step * np.arange(1, PADDING + 1)

        wave = SampledWave.from_profile(np.concatenate([y, ghosts]), env, kappa, edge, pol, carrier=kappa)
        sampled = propagate_grid(wave, cell, ramp).amplitudes[:n_points]

        after = apply_cell(TwoPhotonState((branch,)), cell, ramp, photon).branches[0]
        ratio = branch_profile_ratio(branch, after)
        scale = f_distortion if pol == "V" else 1.0
        y_eval = scale * y
        predicted = np.where(
            y_eval <= after.wedge.edge(photon) + EDGE_TOLERANCE * step,
            math.sqrt(scale) * ratio * np.exp(after.env(photon) * y_eval + 1j * (after.kappa(photon) * scale - kappa) * y),
            0,
        )

        l2, phase = _errors(sampled, predicted)
        logger.info(f"Branch {branch.label}, photon {photon}: L2={l2:.3e}, phase={phase:.3e} rad")
        results.append(BranchComparison(branch.label, l2, phase))

    return TransformComparison(
        l2_error=max(r.l2_error for r in results),
        max_phase_error=max(r.max_phase_error for r in results),
        branches=tuple(results),
    )
