from .configs import Scheme1Config, Scheme2Config, mismatch_offsets
from .design import (
    scheme1_ramp_rates,
    scheme2_ramp_rate,
    scheme1_constant_phase,
    path_fluctuation_phase,
    ramp_mismatch_phase,
    required_max_voltage,
    series_cell_rate,
)
from .pipeline import (
    CorrectionReport,
    scheme1_run,
    scheme2_run,
    amplitude_ratio_epsilon,
    resolve_scheme1_rates,
    resolve_scheme2_rate,
)
