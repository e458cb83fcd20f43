from .cell import (
    RampProfile,
    instantaneous_speed,
    transit_time,
    scale_factor,
    walkoff,
    phase_difference,
)
from .transform import apply_cell, apply_cell_chain
