from .state import DotParams, TwoPhotonBranch, TwoPhotonState, Wedge, flip_photon1, wrap_phase
from .emission import spectral_amplitude, initial_state, initial_state_flipped
