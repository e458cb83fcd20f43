import math
import logging

from src.exceptions import NumericalError
from src.units import CONSTANTS
from .state import DotParams, TwoPhotonBranch, TwoPhotonState, Wedge, flip_photon1

logger = logging.getLogger(__name__)

NORM_TOLERANCE = 1e-9


def spectral_amplitude(omega1: float, omega2: float, path: str, dot: DotParams) -> complex:
    c = CONSTANTS.c
    omega_0 = c * dot.k_0
    if path not in ("H", "V"):
        raise ValueError(f"Unknown decay path: {path}")
    omega_x2 = c * dot.wavenumbers(path)[1]

    gamma = dot.gamma
    prefactor = math.sqrt(2) * gamma / (2 * math.pi)
    biexciton = 1 / (omega1 + omega2 - omega_0 + 1j * gamma)
    exciton = 1 / (omega2 - omega_x2 + 1j * gamma / 2)
    return prefactor * biexciton * exciton


def _emitted_branch(pol1: str, pol2: str, kappa1: float, kappa2: float, dot: DotParams) -> TwoPhotonBranch:
    g = dot.gamma / CONSTANTS.c
    # each branch carries norm 1/2 over the ordered-emission wedge
    return TwoPhotonBranch(
        pol1=pol1,
        pol2=pol2,
        amp=complex(g),
        env1=g / 2,
        env2=g / 2,
        phase0=0.0,
        kappa1=kappa1,
        kappa2=kappa2,
        wedge=Wedge(1.0, 0.0, 1.0, 0.0),
    )


def _check_norm(state: TwoPhotonState) -> TwoPhotonState:
    from src.metrics import state_norm

    norm = state_norm(state)
    if abs(norm - 1) > NORM_TOLERANCE:
        raise NumericalError(f"Emitted state is not normalized: {norm}")
    return state


def initial_state(dot: DotParams) -> TwoPhotonState:
    state = TwoPhotonState((
        _emitted_branch("H", "H", *dot.wavenumbers("H"), dot),
        _emitted_branch("V", "V", *dot.wavenumbers("V"), dot),
    ))
    return _check_norm(state)


def initial_state_flipped(dot: DotParams) -> TwoPhotonState:
    """Photon 1 passes a polarization flipper first: |V1H2> and |H1V2> keep their wavenumbers."""
    return _check_norm(flip_photon1(initial_state(dot)))
