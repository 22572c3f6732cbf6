"""Kuramoto phase oscillators on multilayer networks.

Build layer graphs and their block (join) adjacency, reduce a multilayer
network to one oscillator per layer, broadcast reduced solutions back, and
certify stability of broadcast equilibria from layer-Laplacian and reduced
spectra.
"""

from ._backend import kernels as _kernels
from .dynamics import (PhaseState, SimulationParams, Trajectory, integrate_multilayer,
                       integrate_reduced, integrate_rk4, kuramoto_rhs, multilayer_rhs,
                       order_parameter, perturb, rescale_time, twisted_state)
from .errors import (AssumptionError, ConfigError, ConnectivityError, ConvergenceError,
                     DivergenceError, GenerationError, NotEquilibriumError, ParameterError,
                     RegularityError)
from .network import (LayerGraph, MultilayerNetwork, assemble_full, complete_inter,
                      laplacian, make_complete, make_random_connected, make_ring_circulant,
                      multilayer, ring_inter, validate_row_regular)
from .reduction import (ReducedNetwork, broadcast, is_broadcast_state, reduce,
                        reduce_adjacency, wrap)
from .stability import (FullJacobian, ReducedJacobian, SpectrumReport, classify_stability,
                        eig_symmetric, jacobian_fd, jacobian_full, jacobian_reduced,
                        spectrum_reduced, spectrum_via_join)

BACKEND = _kernels.NAME

__version__ = "0.1.0"
