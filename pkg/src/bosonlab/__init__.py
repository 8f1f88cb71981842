"""Numerical laboratory for bosonic channel capacities and the entropy photon-number inequality."""

from .beamsplitter import (
    BeamsplitterUnitary,
    apply_bs,
    build_bs_unitary,
    channel_outputs,
    partial_trace,
    verify_degraded,
)
from .capacities import (
    ChannelParams,
    c_heterodyne,
    c_homodyne,
    c_privacy,
    c_privacy_asymptotic,
    c_pure_loss,
    c_shannon,
    c_thermal_lower,
    privacy_inner_objective,
)
from .entropy import EpniVerdict, entropy_photon_number, epni_evaluate, g, g_inv
from .fock import (
    EnsembleMember,
    FockDensityOperator,
    holevo_information,
    make_coherent_state,
    make_fixed_entropy_density,
    make_number_state,
    make_random_density,
    make_random_pure_state,
    make_thermal_state,
    mean_photon_number,
    tensor,
    trace_distance,
    von_neumann_entropy,
)
from .gaussian import (
    GaussianState,
    gaussian_beamsplitter,
    gaussian_coherent,
    gaussian_entropy,
    gaussian_epni_check,
    gaussian_squeezed_vacuum,
    gaussian_thermal,
)
from .powerfill import PowerAllocation, allocate, sum_objective

__version__ = "0.1.0"
