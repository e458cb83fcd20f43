"""Physical constants, unit conversions and Pockels-cell datasheet conversion.

Everything downstream works in strict SI (m, s, rad, V). Convenience units
(nm, ns, μeV, V/ns) only appear at the configuration boundary.

Note: 1 μeV corresponds to 2π × 241.8 MHz with CODATA constants. Older
literature quotes 2π × 254.6 MHz; the CODATA value is used here.
"""
import math
from dataclasses import dataclass

from config.settings import DEFAULT_N0
from src.exceptions import InvalidDatasheetError, InvalidParameterError


@dataclass(frozen=True)
class PhysicalConstants:
    c: float = 2.99792458e8
    hbar: float = 1.054571817e-34
    q_e: float = 1.602176634e-19


CONSTANTS = PhysicalConstants()

NS = 1e-9
MM = 1e-3
NM = 1e-9
UEV = 1e-6


@dataclass(frozen=True)
class CellParams:
    eta: float
    s: float
    v0: float

    def __post_init__(self):
        if not math.isfinite(self.eta):
            raise InvalidParameterError(f"eta must be finite, got {self.eta}")
        if not self.s > 0:
            raise InvalidParameterError(f"Crystal thickness must be positive, got {self.s}")
        if not 0 < self.v0 <= CONSTANTS.c:
            raise InvalidParameterError(f"v0 must lie in (0, c], got {self.v0}")

    @property
    def n0(self) -> float:
        return CONSTANTS.c / self.v0

    @property
    def delay_per_volt(self) -> float:
        """eta*s/v0 in s/V: the only combination the ramp physics depends on."""
        return self.eta * self.s / self.v0

    def to_dict(self) -> dict:
        return {"eta": self.eta, "s": self.s, "v0": self.v0}


def energy_to_angular_frequency(energy_ev: float) -> float:
    return energy_ev * CONSTANTS.q_e / CONSTANTS.hbar


def angular_frequency_to_wavenumber(omega: float) -> float:
    return omega / CONSTANTS.c


def energy_to_wavenumber(energy_ev: float) -> float:
    return angular_frequency_to_wavenumber(energy_to_angular_frequency(energy_ev))


def cell_from_datasheet(
    alpha: float,
    wavelength: float,
    n0: float = DEFAULT_N0,
    s: float = 0.02,
) -> CellParams:
    """Builds a cell from its phase sensitivity alpha (rad/V) at a given wavelength.

    Uses n0*eta*s = alpha*lambda/(2*pi) with v0 = c/n0.
    """
    if not alpha >= 0:
        raise InvalidDatasheetError(f"Phase sensitivity must be non-negative, got {alpha}")
    if not wavelength > 0:
        raise InvalidDatasheetError(f"Wavelength must be positive, got {wavelength}")
    if not n0 >= 1:
        raise InvalidDatasheetError(f"Refractive index must be >= 1, got {n0}")
    if not s > 0:
        raise InvalidDatasheetError(f"Crystal thickness must be positive, got {s}")

    eta = alpha * wavelength / (2 * math.pi * n0 * s)
    return CellParams(eta=eta, s=s, v0=CONSTANTS.c / n0)


def alpha_from_cell(cell: CellParams, wavelength: float) -> float:
    return 2 * math.pi * cell.n0 * cell.eta * cell.s / wavelength
