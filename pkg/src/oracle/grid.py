import logging

import numpy as np

from config.settings import DENSITY_GRID_POINTS, QUADRATURE_TRUNCATION_LENGTHS
from src.exceptions import InvalidParameterError
from src.metrics import BASIS_INDEX, PolDensityMatrix
from src.source.state import TwoPhotonBranch, TwoPhotonState

logger = logging.getLogger(__name__)

MIN_GRID_POINTS = 512
GRID_TOLERANCE = 1e-4
CUT_CELL_SUBDIVISIONS = 4


def _cell_centers(low: float, high: float, n: int) -> np.ndarray:
    step = (high - low) / n
    return low + (np.arange(n) + 0.5) * step


def _branch_values(branch: TwoPhotonBranch, x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
    """Branch amplitude on broadcastable coordinate arrays."""
    along1 = np.exp((branch.env1 + 1j * branch.kappa1) * x1)
    along2 = np.exp((branch.env2 + 1j * branch.kappa2) * x2)
    return branch.amp * np.exp(1j * branch.phase0) * along1 * along2


def _inside_fraction(branch: TwoPhotonBranch, x1: np.ndarray, x2: np.ndarray, step: float) -> np.ndarray:
    """Approximate fraction of each grid cell inside 0 > s1*x1 + t1 > s2*x2 + t2."""
    w = branch.wedge
    h1 = w.s1 * x1 + w.t1
    h2 = w.s2 * x2 + w.t2
    below_edge = np.clip(0.5 - h1 / (abs(w.s1) * step), 0, 1)
    above_line = np.clip(0.5 + (h1 - h2) / ((abs(w.s1) + abs(w.s2)) * step), 0, 1)
    return below_edge * above_line


def _pair_sums(values, fractions, area: float) -> dict:
    sums = {}
    for i in range(len(values)):
        for j in range(i, len(values)):
            overlap = np.minimum(fractions[i], fractions[j])
            sums[i, j] = np.sum(values[i] * np.conj(values[j]) * overlap) * area
    return sums


def _cut_cell_sums(branches, x: np.ndarray, step: float, fractions) -> tuple:
    """Coarse and subdivided sums over the cells that a wedge boundary passes through.

    A cut cell evaluated at its center is off by a first-order term across the
    boundary; subdividing it k times shrinks that term by k^2.
    """
    cut = np.zeros(fractions[0].shape, dtype=bool)
    for frac in fractions:
        cut |= (frac > 0) & (frac < 1)
    i1, i2 = np.nonzero(cut)

    coarse_values = [_branch_values(b, x[i1], x[i2]) for b in branches]
    coarse_fractions = [frac[i1, i2] for frac in fractions]
    coarse = _pair_sums(coarse_values, coarse_fractions, step * step)

    k = CUT_CELL_SUBDIVISIONS
    offsets = ((np.arange(k) + 0.5) / k - 0.5) * step
    sub1 = x[i1][:, None, None] + offsets[None, :, None]
    sub2 = x[i2][:, None, None] + offsets[None, None, :]
    sub_step = step / k
    fine_values = [_branch_values(b, sub1, sub2) for b in branches]
    fine_fractions = [_inside_fraction(b, sub1, sub2, sub_step) for b in branches]
    fine = _pair_sums(fine_values, fine_fractions, sub_step * sub_step)
    return len(i1), coarse, fine


def density_matrix_grid(state: TwoPhotonState, n: int = DENSITY_GRID_POINTS) -> PolDensityMatrix:
    """Midpoint-rule position trace on an n x n grid, truncated 30 coherence lengths back."""
    if n < MIN_GRID_POINTS:
        raise InvalidParameterError(f"Density grid needs at least {MIN_GRID_POINTS} points per axis, got {n}")

    branches = list(state)
    slowest = min(min(b.env1, b.env2) for b in branches)
    top = max([0.0] + [b.wedge.edge(p) for b in branches for p in (1, 2)])
    low = top - QUADRATURE_TRUNCATION_LENGTHS / (2 * slowest)
    step = (top - low) / n
    x = _cell_centers(low, top, n)

    values = [_branch_values(b, x[:, None], x[None, :]) for b in branches]
    fractions = [_inside_fraction(b, x[:, None], x[None, :], step) for b in branches]
    full = _pair_sums(values, fractions, step * step)
    n_cut, coarse, fine = _cut_cell_sums(branches, x, step, fractions)
    logger.debug(f"Density grid: {n}x{n} cells of {step:.3e} m over [{low:.3f}, {top:.3e}] m, {n_cut} cut cells")

    rho = np.zeros((4, 4), dtype=complex)
    for (i, j), value in full.items():
        value = value - coarse[i, j] + fine[i, j]
        ia, ib = BASIS_INDEX[branches[i].label], BASIS_INDEX[branches[j].label]
        rho[ia, ib] += value
        if j != i:
            rho[ib, ia] += np.conj(value)

    # midpoint error grows as step^2
    tolerance = GRID_TOLERANCE * max(1.0, (DENSITY_GRID_POINTS / n) ** 2)
    return PolDensityMatrix(rho, tolerance=tolerance)
