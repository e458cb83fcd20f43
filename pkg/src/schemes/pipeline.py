import logging
import math
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from config.settings import MISMATCH_NODES, RESIDUAL_SUPPORT_LENGTHS
from src.eom.transform import apply_cell
from src.exceptions import UncorrectableCellError
from src.metrics import (
    PolDensityMatrix,
    concurrence,
    fidelity_phi_plus,
    polarization_density_matrix,
)
from src.source.emission import initial_state, initial_state_flipped
from src.source.state import DotParams, TwoPhotonBranch, TwoPhotonState, flip_photon1, wrap_phase
from .configs import Scheme1Config, Scheme2Config
from .design import scheme1_ramp_rates, scheme2_ramp_rate

logger = logging.getLogger(__name__)

REFERENCE_LABEL = "HH"
PARTNER_LABEL = "VV"


@dataclass(frozen=True)
class CorrectionReport:
    scheme: int
    out_state: TwoPhotonState
    residual_kappa1: float
    residual_kappa2: float
    constant_phase: float
    amp_ratio_epsilon: float
    fidelity: float
    fidelity_raw: float
    concurrence: float
    max_residual_phase: float
    b1: float
    b2: float
    density: Optional[PolDensityMatrix] = None

    def __post_init__(self):
        for name in ("fidelity", "fidelity_raw", "concurrence"):
            value = getattr(self, name)
            if not 0 <= value <= 1:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        for name in ("residual_kappa1", "residual_kappa2", "constant_phase", "amp_ratio_epsilon"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    def to_dict(self) -> Dict:
        return {
            "scheme": self.scheme,
            "residual_kappa1": self.residual_kappa1,
            "residual_kappa2": self.residual_kappa2,
            "constant_phase": self.constant_phase,
            "amp_ratio_epsilon": self.amp_ratio_epsilon,
            "fidelity": self.fidelity,
            "fidelity_raw": self.fidelity_raw,
            "concurrence": self.concurrence,
            "max_residual_phase": self.max_residual_phase,
            "b1": self.b1,
            "b2": self.b2,
            "density": self.density.to_dict() if self.density is not None else None,
        }


def _support_vertices(dot: DotParams) -> Tuple[Tuple[float, float], ...]:
    """Corners of {-X <= x2 <= x1 <= 0}; residuals are linear so their extrema sit here."""
    x = RESIDUAL_SUPPORT_LENGTHS * dot.coherence_length
    return ((0.0, 0.0), (0.0, -x), (-x, -x))


def _max_residual_phase(reference: TwoPhotonBranch, partner: TwoPhotonBranch, dot: DotParams) -> float:
    dk1 = partner.kappa1 - reference.kappa1
    dk2 = partner.kappa2 - reference.kappa2
    return max(abs(dk1 * x1 + dk2 * x2) for x1, x2 in _support_vertices(dot))


def _amplitude_deviation(reference: TwoPhotonBranch, partner: TwoPhotonBranch, dot: DotParams) -> float:
    log_amp = math.log(abs(partner.amp)) - math.log(abs(reference.amp))
    de1 = partner.env1 - reference.env1
    de2 = partner.env2 - reference.env2
    return max(abs(math.expm1(log_amp + de1 * x1 + de2 * x2)) for x1, x2 in _support_vertices(dot))


def _report(
    scheme: int,
    dot: DotParams,
    state: TwoPhotonState,
    rho: PolDensityMatrix,
    b1: float,
    b2: float,
) -> CorrectionReport:
    reference = state.branch(REFERENCE_LABEL)
    partner = state.branch(PARTNER_LABEL)
    return CorrectionReport(
        scheme=scheme,
        out_state=state,
        residual_kappa1=partner.kappa1 - reference.kappa1,
        residual_kappa2=partner.kappa2 - reference.kappa2,
        constant_phase=wrap_phase(partner.phase0 - reference.phase0),
        amp_ratio_epsilon=_amplitude_deviation(reference, partner, dot),
        fidelity=fidelity_phi_plus(rho, optimize_phase=True),
        fidelity_raw=fidelity_phi_plus(rho, optimize_phase=False),
        concurrence=concurrence(rho),
        max_residual_phase=_max_residual_phase(reference, partner, dot),
        b1=b1,
        b2=b2,
        density=rho,
    )


def resolve_scheme1_rates(cfg: Scheme1Config) -> Tuple[float, float]:
    try:
        nominal = scheme1_ramp_rates(cfg.dot, cfg.cell1, cfg.cell2)
    except UncorrectableCellError:
        logger.warning("Inert cell in the setup, leaving both ramps at zero")
        nominal = (0.0, 0.0)
    b1 = nominal[0] if cfg.b1 is None else cfg.b1
    b2 = nominal[1] if cfg.b2 is None else cfg.b2
    return b1 * cfg.b1_scale, b2 * cfg.b2_scale


def _scheme1_state(cfg: Scheme1Config, b1: float, b2: float, delta_t: float) -> TwoPhotonState:
    ramp1, ramp2 = cfg.ramps(b1, b2, delta_t)
    state = initial_state(cfg.dot)
    state = apply_cell(state, cfg.cell1, ramp1, photon=1)
    return apply_cell(state, cfg.cell2, ramp2, photon=2)


def _mismatch_average(cfg: Scheme1Config, b1: float, b2: float) -> PolDensityMatrix:
    """Density matrix averaged over ramp-start mismatches uniform on [0, delta_t]."""
    nodes, weights = leggauss(MISMATCH_NODES)
    rho = np.zeros((4, 4), dtype=complex)
    for node, weight in zip(nodes, weights):
        tau = cfg.delta_t * (node + 1) / 2
        rho += weight / 2 * polarization_density_matrix(_scheme1_state(cfg, b1, b2, tau)).rho
    return PolDensityMatrix(rho)


def scheme1_run(cfg: Scheme1Config) -> CorrectionReport:
    logger.info("Step 1: Ramp rates...")
    b1, b2 = resolve_scheme1_rates(cfg)
    logger.info(f"b1 = {b1 * 1e-9:.4f} V/ns, b2 = {b2 * 1e-9:.4f} V/ns")

    logger.info("Step 2: Propagating through both cells...")
    state = _scheme1_state(cfg, b1, b2, cfg.delta_t)

    logger.info("Step 3: Position trace...")
    if cfg.delta_t == 0:
        rho = polarization_density_matrix(state)
    else:
        rho = _mismatch_average(cfg, b1, b2)

    report = _report(1, cfg.dot, state, rho, b1, b2)
    logger.info(f"Scheme 1: fidelity={report.fidelity:.9f}, concurrence={report.concurrence:.9f}")
    return report


def resolve_scheme2_rate(cfg: Scheme2Config) -> float:
    if cfg.b is not None:
        return cfg.b * cfg.b_scale
    try:
        nominal = scheme2_ramp_rate(cfg.dot, cfg.cell)
    except UncorrectableCellError:
        logger.warning("Inert cell in the setup, leaving the ramp at zero")
        nominal = 0.0
    return nominal * cfg.b_scale


def scheme2_run(cfg: Scheme2Config) -> CorrectionReport:
    """Flip photon 1, pass both photons through one cell, then undo the flip for analysis."""
    logger.info("Step 1: Ramp rate...")
    b = resolve_scheme2_rate(cfg)
    logger.info(f"b = {b * 1e-9:.4f} V/ns")

    logger.info("Step 2: Propagating both photons through the cell...")
    ramp1, ramp2 = cfg.ramps(b)
    state = initial_state_flipped(cfg.dot)
    state = apply_cell(state, cfg.cell, ramp1, photon=1)
    state = apply_cell(state, cfg.cell, ramp2, photon=2)
    state = flip_photon1(state)

    logger.info("Step 3: Position trace...")
    rho = polarization_density_matrix(state)

    report = _report(2, cfg.dot, state, rho, b, b)
    logger.info(
        f"Scheme 2: fidelity={report.fidelity:.9f}, max residual phase={report.max_residual_phase:.3e} rad"
    )
    return report


def amplitude_ratio_epsilon(cfg, report: CorrectionReport) -> float:
    """max over the support of | |A_V/A_H| - 1 | for the output branches."""
    state = report.out_state
    return _amplitude_deviation(state.branch(REFERENCE_LABEL), state.branch(PARTNER_LABEL), cfg.dot)
