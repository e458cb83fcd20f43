from .propagation import (
    SampledWave,
    BranchComparison,
    TransformComparison,
    propagate_grid,
    compare_transform,
)
from .grid import density_matrix_grid
