import csv
import io
import json
import logging
import os
import tempfile
import threading
from dataclasses import astuple, dataclass, fields
from pathlib import Path
from typing import Iterable, List, Union

import pandas as pd

from config.settings import CSV_FLOAT_FORMAT
from src import __version__
from src.run_config import RunConfig
from src.schemes.design import required_max_voltage
from src.schemes.pipeline import CorrectionReport

logger = logging.getLogger(__name__)

_lock = threading.Lock()

V_PER_NS = 1e9


@dataclass(frozen=True)
class ResultRow:
    parameter: str
    value: float
    fidelity_raw: float
    fidelity_opt: float
    concurrence: float
    constant_phase_rad: float
    residual_kappa1: float
    residual_kappa2: float
    epsilon_amp: float
    b1_v_per_ns: float
    b2_v_per_ns: float
    max_voltage_v: float

    @classmethod
    def from_report(cls, parameter: str, value: float, report: CorrectionReport, ramp_duration: float) -> "ResultRow":
        return cls(
            parameter=parameter,
            value=float(value),
            fidelity_raw=report.fidelity_raw,
            fidelity_opt=report.fidelity,
            concurrence=report.concurrence,
            constant_phase_rad=report.constant_phase,
            residual_kappa1=report.residual_kappa1,
            residual_kappa2=report.residual_kappa2,
            epsilon_amp=report.amp_ratio_epsilon,
            b1_v_per_ns=report.b1 / V_PER_NS,
            b2_v_per_ns=report.b2 / V_PER_NS,
            max_voltage_v=required_max_voltage(max(abs(report.b1), abs(report.b2)), ramp_duration),
        )

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


RESULT_COLUMNS = [f.name for f in fields(ResultRow)]


def _format(value) -> str:
    if isinstance(value, float):
        return CSV_FLOAT_FORMAT % value
    return str(value)


def render_csv(rows: Iterable[ResultRow], config: RunConfig) -> str:
    buffer = io.StringIO()
    buffer.write(f"# fss-correction {__version__}\n")
    resolved = json.dumps(config.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    buffer.write(f"# config: {resolved}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(RESULT_COLUMNS)
    for row in rows:
        writer.writerow([_format(v) for v in astuple(row)])
    return buffer.getvalue()


def write_results(path: Union[str, Path], rows: List[ResultRow], config: RunConfig) -> Path:
    """Writes the CSV atomically: a temp file in the target directory replaces the target."""
    path = Path(path)
    content = render_csv(rows, config)
    with _lock:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", newline="", encoding="utf-8") as f:
                f.write(content)
            os.replace(tmp_name, path)
        except BaseException:
            if os.path.exists(tmp_name):
                os.remove(tmp_name)
            raise
    logger.info(f"Saved {len(rows)} rows to {path}")
    return path


def load_results(path: Union[str, Path]) -> pd.DataFrame:
    return pd.read_csv(path, comment="#")
