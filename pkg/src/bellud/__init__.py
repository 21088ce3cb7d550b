"""Unambiguous discrimination of two-photon Bell-like states with linear optics."""
from .states import (BellLikeFamily, TwoPhotonState, ValidationError, bell_like_states,
                     coefficient_matrix, concurrence, inner_product)
from .optics import (BeamSplitter, ModeUnitary, NetworkParams, beam_splitter_unitary, compose,
                     decompose_mesh, mesh_unitary, optimal_discrimination_unitary, phase_shifter,
                     two_splitter_network)
from .kernels import BACKEND

__version__ = "0.1.0"
