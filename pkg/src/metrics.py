"""Position trace of two-photon states and two-qubit entanglement measures."""
import cmath
import logging
import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from scipy import integrate

from config.settings import QUADRATURE_TRUNCATION_LENGTHS
from src.exceptions import NonIntegrableBranchError, NumericalError
from src.source.state import TwoPhotonBranch, TwoPhotonState

logger = logging.getLogger(__name__)

BASIS = ("HH", "HV", "VH", "VV")
BASIS_INDEX = {label: i for i, label in enumerate(BASIS)}

SIGMA_Y = np.array([[0, -1j], [1j, 0]])
SIGMA_YY = np.kron(SIGMA_Y, SIGMA_Y)

ZERO_EIGENVALUE = 1e-12


@dataclass(frozen=True)
class PolDensityMatrix:
    rho: np.ndarray
    tolerance: float = 1e-9

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        if rho.shape != (4, 4):
            raise ValueError(f"Polarization density matrix must be 4x4, got {rho.shape}")
        object.__setattr__(self, "rho", rho)

        if not np.allclose(rho, rho.conj().T, rtol=0, atol=1e-12):
            raise NumericalError("Density matrix is not Hermitian")
        trace = np.trace(rho).real
        if abs(trace - 1) > self.tolerance:
            raise NumericalError(f"Density matrix trace is {trace}, expected 1")
        min_eig = np.linalg.eigvalsh(rho).min()
        if min_eig < -max(1e-10, self.tolerance):
            raise NumericalError(f"Density matrix has negative eigenvalue {min_eig}")

    def __getitem__(self, key: Tuple[str, str]) -> complex:
        row, col = key
        return self.rho[BASIS_INDEX[row], BASIS_INDEX[col]]

    def to_dict(self) -> dict:
        return {
            f"{r}{c}": [self.rho[i, j].real, self.rho[i, j].imag]
            for i, r in enumerate(BASIS)
            for j, c in enumerate(BASIS)
        }


def _exprel(z: complex) -> complex:
    if abs(z) < 1e-5:
        return 1 + z / 2 + z * z / 6 + z ** 3 / 24
    return (cmath.exp(z) - 1) / z


def _upper_boundary_pieces(a: TwoPhotonBranch, b: TwoPhotonBranch) -> Tuple[float, List[Tuple[float, float, float, float]]]:
    """Splits the intersection of two wedges into x1-intervals bounded above in x2 by one line.

    Returns the upper end of x1 and a list of (lo, hi, slope, intercept) with x2 < slope*x1 + intercept.
    """
    wa, wb = a.wedge, b.wedge
    x_top = min(-wa.t1 / wa.s1, -wb.t1 / wb.s1)
    m_a, c_a = wa.s1 / wa.s2, (wa.t1 - wa.t2) / wa.s2
    m_b, c_b = wb.s1 / wb.s2, (wb.t1 - wb.t2) / wb.s2

    if m_a == m_b:
        return x_top, [(-math.inf, x_top, m_a, min(c_a, c_b))]

    # the steeper line is the lower one towards x1 -> -inf
    if m_a > m_b:
        steep, other = (m_a, c_a), (m_b, c_b)
    else:
        steep, other = (m_b, c_b), (m_a, c_a)
    crossing = (c_b - c_a) / (m_a - m_b)
    if crossing >= x_top:
        return x_top, [(-math.inf, x_top, *steep)]
    return x_top, [(-math.inf, crossing, *steep), (crossing, x_top, *other)]


def _overlap_exponents(a: TwoPhotonBranch, b: TwoPhotonBranch) -> Tuple[complex, complex, complex]:
    coeff = a.amp * np.conj(b.amp) * cmath.exp(1j * (a.phase0 - b.phase0))
    alpha1 = complex(a.env1 + b.env1, a.kappa1 - b.kappa1)
    alpha2 = complex(a.env2 + b.env2, a.kappa2 - b.kappa2)
    if alpha1.real <= 0 or alpha2.real <= 0:
        raise NonIntegrableBranchError(f"Overlap of {a.label} and {b.label} does not decay: {alpha1}, {alpha2}")
    return complex(coeff), alpha1, alpha2


def _piece_analytic(alpha1: complex, alpha2: complex, lo: float, hi: float, m: float, c: float) -> complex:
    beta = alpha1 + alpha2 * m
    inner = cmath.exp(alpha2 * c) / alpha2
    if math.isinf(lo):
        return inner * cmath.exp(beta * hi) / beta
    width = hi - lo
    return inner * cmath.exp(beta * hi) * width * _exprel(-beta * width)


def _piece_quadrature(
    alpha1: complex,
    alpha2: complex,
    lo: float,
    hi: float,
    m: float,
    c: float,
    limit: int,
) -> complex:
    beta = alpha1 + alpha2 * m
    if math.isinf(lo):
        lo = hi - QUADRATURE_TRUNCATION_LENGTHS * 2 / beta.real

    def integrand(x: float) -> complex:
        return cmath.exp(alpha1 * x + alpha2 * (m * x + c)) / alpha2

    real, _ = integrate.quad(lambda x: integrand(x).real, lo, hi, epsabs=1e-14, epsrel=1e-9, limit=limit)
    imag, _ = integrate.quad(lambda x: integrand(x).imag, lo, hi, epsabs=1e-14, epsrel=1e-9, limit=limit)
    return complex(real, imag)


def wedge_overlap(
    a: TwoPhotonBranch,
    b: TwoPhotonBranch,
    method: str = "analytic",
    quad_limit: int = 200,
) -> complex:
    """Integral of branch a times conj(branch b) over the intersection of their wedges.

    The inner x2 integral is always analytic; the outer x1 integral is either
    closed-form or done by adaptive quadrature truncated at 30 coherence lengths.
    """
    coeff, alpha1, alpha2 = _overlap_exponents(a, b)
    _, pieces = _upper_boundary_pieces(a, b)

    total = 0j
    for lo, hi, m, c in pieces:
        if method == "analytic":
            total += _piece_analytic(alpha1, alpha2, lo, hi, m, c)
        elif method == "quadrature":
            total += _piece_quadrature(alpha1, alpha2, lo, hi, m, c, quad_limit)
        else:
            raise ValueError(f"Unknown overlap method: {method}")
    return coeff * total


def _density_entries(state: TwoPhotonState, method: str, quad_limit: int) -> np.ndarray:
    rho = np.zeros((4, 4), dtype=complex)
    branches = list(state)
    for i, a in enumerate(branches):
        for j in range(i, len(branches)):
            b = branches[j]
            value = wedge_overlap(a, b, method=method, quad_limit=quad_limit)
            ia, ib = BASIS_INDEX[a.label], BASIS_INDEX[b.label]
            rho[ia, ib] += value
            if j != i:
                rho[ib, ia] += np.conj(value)
    return rho


def state_norm(state: TwoPhotonState) -> float:
    return float(np.trace(_density_entries(state, "analytic", 0)).real)


def polarization_density_matrix(
    state: TwoPhotonState,
    method: str = "analytic",
    quad_limit: int = 200,
) -> PolDensityMatrix:
    return PolDensityMatrix(_density_entries(state, method, quad_limit))


def coherence_closed_form(omega_s: float, gamma: float) -> complex:
    """Normalized HH-VV coherence of the uncorrected cascade state."""
    if not gamma > 0:
        raise ValueError(f"Decay rate must be positive, got {gamma}")
    return 1 / (1 + 1j * omega_s / gamma)


def normalized_coherence(rho: PolDensityMatrix) -> complex:
    populations = rho["HH", "HH"].real * rho["VV", "VV"].real
    if populations <= 0:
        return 0j
    return rho["HH", "VV"] / math.sqrt(populations)


def fidelity_phi_plus(rho: PolDensityMatrix, optimize_phase: bool = False) -> float:
    populations = (rho["HH", "HH"] + rho["VV", "VV"]).real / 2
    if optimize_phase:
        # max over phi of <Phi(phi)|rho|Phi(phi)>, |Phi(phi)> = (|HH> + e^{i phi}|VV>)/sqrt(2)
        value = populations + abs(rho["HH", "VV"])
    else:
        value = populations + rho["HH", "VV"].real
    return float(min(1.0, max(0.0, value)))


def concurrence(rho: PolDensityMatrix) -> float:
    """Wootters concurrence.

    The square-rooted eigenvalues of rho*(sy x sy)*rho^*(sy x sy) are taken as the
    singular values of sqrt(rho)*(sy x sy)*sqrt(rho)^*, which avoids square roots
    of round-off sized eigenvalues.
    """
    try:
        w, v = np.linalg.eigh(rho.rho)
        w = np.where(w < ZERO_EIGENVALUE, 0.0, w)
        sqrt_rho = (v * np.sqrt(w)) @ v.conj().T
        lam = np.linalg.svd(sqrt_rho @ SIGMA_YY @ sqrt_rho.conj(), compute_uv=False)
    except np.linalg.LinAlgError as e:
        raise NumericalError(f"Concurrence eigen-decomposition failed: {e}") from e

    lam = np.sort(lam)[::-1]
    return float(min(1.0, max(0.0, lam[0] - lam[1] - lam[2] - lam[3])))


def local_phase_rotation(rho: PolDensityMatrix, photon: int, theta: float) -> PolDensityMatrix:
    """Applies diag(1, e^{i theta}) to one photon's polarization."""
    single = np.diag([1, cmath.exp(1j * theta)])
    u = np.kron(single, np.eye(2)) if photon == 1 else np.kron(np.eye(2), single)
    return PolDensityMatrix(u @ rho.rho @ u.conj().T, tolerance=rho.tolerance)
