import logging
import math
from dataclasses import dataclass, field, replace
from typing import List, Tuple

from src.exceptions import InvalidParameterError
from src.units import CONSTANTS, UEV, energy_to_wavenumber

logger = logging.getLogger(__name__)

POLARIZATIONS = ("H", "V")

FSS_RATIO_WARNING = 1e-3


@dataclass(frozen=True)
class DotParams:
    gamma: float
    k_H1: float
    k_H2: float
    k_S: float
    labels_swapped: bool = False

    def __post_init__(self):
        if not self.gamma > 0:
            raise InvalidParameterError(f"Decay rate must be positive, got {self.gamma}")
        if not (self.k_H1 > 0 and self.k_H2 > 0):
            raise InvalidParameterError(f"Photon wavenumbers must be positive: {self.k_H1}, {self.k_H2}")
        if not self.k_S >= 0:
            raise InvalidParameterError(f"FSS wavenumber must be non-negative, got {self.k_S}")
        if self.k_S / self.k_H1 > FSS_RATIO_WARNING:
            logger.warning(f"FSS is not small against the photon wavenumber: k_S/k_H1 = {self.k_S / self.k_H1:.3e}")

    @classmethod
    def from_energies(
        cls,
        photon1_energy_ev: float,
        photon2_energy_ev: float,
        gamma: float,
        fss_uev: float,
    ) -> "DotParams":
        labels_swapped = fss_uev < 0
        if labels_swapped:
            logger.warning(f"Negative FSS {fss_uev} μeV: H and V labels are swapped")
        return cls(
            gamma=gamma,
            k_H1=energy_to_wavenumber(photon1_energy_ev),
            k_H2=energy_to_wavenumber(photon2_energy_ev),
            k_S=energy_to_wavenumber(abs(fss_uev) * UEV),
            labels_swapped=labels_swapped,
        )

    @property
    def k_V1(self) -> float:
        return self.k_H1 + self.k_S

    @property
    def k_V2(self) -> float:
        return self.k_H2 - self.k_S

    @property
    def fss_sign(self) -> float:
        return -1.0 if self.labels_swapped else 1.0

    def wavenumbers(self, pol: str) -> Tuple[float, float]:
        """(photon 1, photon 2) wavenumbers of the decay path polarized along pol.

        k_H*/k_V* name the lower/upper photon-1 exciton modes; a negative
        splitting puts the H label on the upper one.
        """
        if pol not in POLARIZATIONS:
            raise InvalidParameterError(f"Unknown polarization: {pol}")
        if (pol == "V") != self.labels_swapped:
            return self.k_V1, self.k_V2
        return self.k_H1, self.k_H2

    @property
    def k_0(self) -> float:
        return self.k_H1 + self.k_H2

    @property
    def omega_S(self) -> float:
        return CONSTANTS.c * self.k_S

    @property
    def coherence_length(self) -> float:
        return CONSTANTS.c / self.gamma

    def to_dict(self) -> dict:
        return {
            "gamma": self.gamma,
            "k_H1": self.k_H1,
            "k_H2": self.k_H2,
            "k_S": self.k_S,
            "labels_swapped": self.labels_swapped,
        }


@dataclass(frozen=True)
class Wedge:
    """Support {0 > s1*x1 + t1 > s2*x2 + t2}."""

    s1: float = 1.0
    t1: float = 0.0
    s2: float = 1.0
    t2: float = 0.0

    def scale(self, photon: int, factor: float) -> "Wedge":
        if photon == 1:
            return replace(self, s1=self.s1 * factor)
        return replace(self, s2=self.s2 * factor)

    def shift(self, photon: int, distance: float) -> "Wedge":
        if photon == 1:
            return replace(self, t1=self.t1 - self.s1 * distance)
        return replace(self, t2=self.t2 - self.s2 * distance)

    def edge(self, photon: int) -> float:
        """Upper end of one photon's coordinate when the other sits on its own edge."""
        if photon == 1:
            return -self.t1 / self.s1
        return -self.t2 / self.s2

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.s1, self.t1, self.s2, self.t2)


@dataclass(frozen=True)
class TwoPhotonBranch:
    """amp * exp(env1*x1 + env2*x2) * exp(i*(phase0 + kappa1*x1 + kappa2*x2)) on a wedge."""

    pol1: str
    pol2: str
    amp: complex
    env1: float
    env2: float
    phase0: float
    kappa1: float
    kappa2: float
    wedge: Wedge = field(default_factory=Wedge)

    def __post_init__(self):
        if self.pol1 not in POLARIZATIONS or self.pol2 not in POLARIZATIONS:
            raise InvalidParameterError(f"Unknown polarization pair ({self.pol1}, {self.pol2})")
        if not (self.env1 > 0 and self.env2 > 0):
            raise InvalidParameterError(f"Envelope rates must be positive: {self.env1}, {self.env2}")
        if not (self.wedge.s1 > 0 and self.wedge.s2 > 0):
            raise InvalidParameterError(f"Wedge scales must be positive: {self.wedge}")

    @property
    def label(self) -> str:
        return self.pol1 + self.pol2

    def pol(self, photon: int) -> str:
        return self.pol1 if photon == 1 else self.pol2

    def env(self, photon: int) -> float:
        return self.env1 if photon == 1 else self.env2

    def kappa(self, photon: int) -> float:
        return self.kappa1 if photon == 1 else self.kappa2

    def relabel(self, photon: int, pol: str) -> "TwoPhotonBranch":
        if photon == 1:
            return replace(self, pol1=pol)
        return replace(self, pol2=pol)


@dataclass(frozen=True)
class TwoPhotonState:
    branches: Tuple[TwoPhotonBranch, ...]

    def __post_init__(self):
        object.__setattr__(self, "branches", tuple(self.branches))

    def __iter__(self):
        return iter(self.branches)

    def __len__(self) -> int:
        return len(self.branches)

    def branch(self, label: str) -> TwoPhotonBranch:
        for b in self.branches:
            if b.label == label:
                return b
        raise KeyError(label)

    def labels(self) -> List[str]:
        return [b.label for b in self.branches]


def flip_photon1(state: TwoPhotonState) -> TwoPhotonState:
    flipped = []
    for b in state:
        flipped.append(b.relabel(1, "V" if b.pol1 == "H" else "H"))
    return TwoPhotonState(tuple(flipped))


def wrap_phase(phase: float) -> float:
    """Wraps into (-pi, pi]."""
    wrapped = math.remainder(phase, 2 * math.pi)
    if wrapped == -math.pi:
        return math.pi
    return wrapped
