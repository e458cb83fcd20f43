"""JSON run configuration, validated with pydantic; unknown keys are errors."""
import json
import logging
import math
from pathlib import Path
from typing import Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from config.settings import DEFAULT_N0, DEFAULT_RAMP_DURATION_NS, DENSITY_GRID_POINTS, ORACLE_GRID_POINTS
from src.exceptions import ConfigError
from src.schemes.configs import Scheme1Config, Scheme2Config
from src.source.state import DotParams
from src.units import MM, NM, NS, CellParams, cell_from_datasheet

logger = logging.getLogger(__name__)

SWEEP_TARGETS = {
    "delta_l1": ("scheme", "delta_l1_mm"),
    "delta_l2": ("scheme", "delta_l2_mm"),
    "delta_t": ("scheme", "delta_t_ns"),
    "fss_uev": ("dot", "fss_uev"),
    "b1_scale": ("scheme", "b1_scale"),
    "b2_scale": ("scheme", "b2_scale"),
    "L1": ("scheme", "L1_m"),
    "L2": ("scheme", "L2_m"),
}

# settings that only exist for the two-cell scheme, with their inactive values
SCHEME1_ONLY = {
    "a1_v": 0.0,
    "a2_v": 0.0,
    "delta_t_ns": 0.0,
    "b2_scale": 1.0,
}


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class DotConfig(_Strict):
    photon1_energy_ev: float = Field(1.398, gt=0)
    photon2_energy_ev: float = Field(1.400, gt=0)
    gamma_per_s: float = Field(1e9, gt=0)
    fss_uev: float = 1.0

    def to_params(self) -> DotParams:
        return DotParams.from_energies(self.photon1_energy_ev, self.photon2_energy_ev, self.gamma_per_s, self.fss_uev)


class DatasheetCellConfig(_Strict):
    alpha_rad_per_v: float = Field(0.052, ge=0)
    wavelength_nm: float = Field(830.0, gt=0)
    n0: float = Field(DEFAULT_N0, ge=1)
    thickness_mm: float = Field(20.0, gt=0)

    def to_params(self) -> CellParams:
        return cell_from_datasheet(self.alpha_rad_per_v, self.wavelength_nm * NM, self.n0, self.thickness_mm * MM)


class DirectCellConfig(_Strict):
    eta_per_v: float
    thickness_mm: float = Field(gt=0)
    v0_m_per_s: float = Field(gt=0)

    def to_params(self) -> CellParams:
        return CellParams(eta=self.eta_per_v, s=self.thickness_mm * MM, v0=self.v0_m_per_s)


CellConfig = Union[DatasheetCellConfig, DirectCellConfig]


class CellsConfig(_Strict):
    cell1: CellConfig = Field(default_factory=DatasheetCellConfig)
    cell2: Optional[CellConfig] = None


class SchemeConfig(_Strict):
    kind: Literal[1, 2] = 1
    L1_m: float = Field(0.5, ge=0)
    L2_m: float = Field(0.5, ge=0)
    a1_v: float = 0.0
    a2_v: float = 0.0
    delta_t_ns: float = 0.0
    b1_scale: float = 1.0
    b2_scale: float = 1.0
    delta_l1_mm: float = 0.0
    delta_l2_mm: float = 0.0

    @field_validator("*")
    @classmethod
    def _finite(cls, value):
        if isinstance(value, float) and not math.isfinite(value):
            raise ValueError("must be finite")
        return value


class SweepConfig(_Strict):
    parameter: Literal["delta_l1", "delta_l2", "delta_t", "fss_uev", "b1_scale", "b2_scale", "L1", "L2"]
    start: float
    stop: float
    steps: int = Field(ge=2)
    spacing: Literal["linear", "log"] = "linear"

    @model_validator(mode="after")
    def _check_bounds(self) -> "SweepConfig":
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ValueError("sweep bounds must be finite")
        if self.spacing == "log" and not (self.start > 0 and self.stop > 0):
            raise ValueError("log spacing needs positive bounds")
        return self

    def values(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.start, self.stop, self.steps)
        return np.linspace(self.start, self.stop, self.steps)


class FeasibilityConfig(_Strict):
    ramp_duration_ns: float = Field(DEFAULT_RAMP_DURATION_NS, gt=0)
    series_cells: int = Field(1, ge=1)


class OracleConfig(_Strict):
    grid_points: int = Field(ORACLE_GRID_POINTS, ge=2 ** 10)
    density_grid: int = Field(DENSITY_GRID_POINTS, ge=512)


class OutputConfig(_Strict):
    path: Optional[str] = None
    format: Literal["csv"] = "csv"


class RunConfig(_Strict):
    dot: DotConfig = Field(default_factory=DotConfig)
    cells: CellsConfig = Field(default_factory=CellsConfig)
    scheme: SchemeConfig = Field(default_factory=SchemeConfig)
    sweep: Optional[SweepConfig] = None
    feasibility: FeasibilityConfig = Field(default_factory=FeasibilityConfig)
    oracle: OracleConfig = Field(default_factory=OracleConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)

    def dot_params(self) -> DotParams:
        return self.dot.to_params()

    def cell_params(self) -> Tuple[CellParams, CellParams]:
        cell1 = self.cells.cell1.to_params()
        cell2 = self.cells.cell2.to_params() if self.cells.cell2 is not None else cell1
        return cell1, cell2

    def check_scheme(self) -> None:
        """Scheme 2 has a single cell and ramp, so two-cell settings and sweeps are rejected."""
        if self.scheme.kind != 2:
            return
        if self.cells.cell2 is not None:
            raise ConfigError("scheme kind 2 uses cell1 only", field="cells.cell2")
        for key, inactive in SCHEME1_ONLY.items():
            if getattr(self.scheme, key) != inactive:
                raise ConfigError(f"'{key}' is not used by scheme kind 2", field=f"scheme.{key}")
        if self.sweep is not None and SWEEP_TARGETS[self.sweep.parameter][1] in SCHEME1_ONLY:
            raise ConfigError(
                f"sweeping '{self.sweep.parameter}' has no effect for scheme kind 2", field="sweep.parameter"
            )

    def build_scheme(self) -> Union[Scheme1Config, Scheme2Config]:
        self.check_scheme()
        dot = self.dot_params()
        cell1, cell2 = self.cell_params()
        s = self.scheme
        if s.kind == 2:
            return Scheme2Config(
                dot=dot,
                cell=cell1,
                L1=s.L1_m,
                L2=s.L2_m,
                b_scale=s.b1_scale,
                delta_l1=s.delta_l1_mm * MM,
                delta_l2=s.delta_l2_mm * MM,
            )
        return Scheme1Config(
            dot=dot,
            cell1=cell1,
            cell2=cell2,
            L1=s.L1_m,
            L2=s.L2_m,
            a1=s.a1_v,
            a2=s.a2_v,
            delta_t=s.delta_t_ns * NS,
            b1_scale=s.b1_scale,
            b2_scale=s.b2_scale,
            delta_l1=s.delta_l1_mm * MM,
            delta_l2=s.delta_l2_mm * MM,
        )

    def with_parameter(self, name: str, value: float) -> "RunConfig":
        if name not in SWEEP_TARGETS:
            raise ConfigError(f"unknown sweep parameter '{name}'", field="sweep.parameter")
        section, key = SWEEP_TARGETS[name]
        updated = getattr(self, section).model_copy(update={key: float(value)})
        return self.model_copy(update={section: updated})

    def to_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), indent=2, sort_keys=True)


def _line_of(text: str, key: str) -> int:
    for number, line in enumerate(text.splitlines(), start=1):
        if f'"{key}"' in line:
            return number
    return 0


def parse_config(text: str) -> RunConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON: {e.msg}", line=e.lineno) from e

    try:
        config = RunConfig.model_validate(data)
    except ValidationError as e:
        error = e.errors()[0]
        loc = [str(part) for part in error["loc"]]
        keys = [part for part in loc if not part.isdigit() and part not in ("DatasheetCellConfig", "DirectCellConfig")]
        field = ".".join(keys)
        line = _line_of(text, keys[-1]) if keys else 0
        raise ConfigError(error["msg"], field=field, line=line) from e

    try:
        config.check_scheme()
    except ConfigError as e:
        key = e.field.split(".")[-1]
        raise ConfigError(e.message, field=e.field, line=_line_of(text, key)) from e
    return config


def load_config(path: Union[str, Path, None]) -> RunConfig:
    if path is None:
        logger.info("No config file given, using defaults")
        return RunConfig()
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    return parse_config(path.read_text(encoding="utf-8"))
