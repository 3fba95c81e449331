"""Simulator and verification suite for a discrete system-bath interaction channel."""

from .operators import (
    HermEigen,
    expm_herm,
    fidelity,
    herm_eig,
    kron,
    partial_trace_bath,
    trace_distance,
    trace_norm,
)
from .models import (
    CouplingSet,
    HamiltonianModel,
    TargetState,
    build_annni,
    build_hubbard,
    build_tfim,
    fermionic_coupling_set,
    ground_state,
    pauli_coupling_set,
    thermal_state,
)
from .channel import (
    BathSpec,
    ChannelParams,
    TrajectoryRecord,
    apply_channel_exact,
    apply_channel_sampled,
    gaussian_profile,
    joint_hamiltonian,
    propagate_joint,
    run_iterations,
    trajectory_pure,
)
from .superop import (
    NonUniqueFixedPointError,
    SpectralReport,
    SuperoperatorMatrix,
    build_superoperator,
    choi_matrix,
    spectral_report,
)
from .dyson import (
    DysonTerm,
    avoid_db_residual,
    compute_F,
    compute_G,
    conjugation_identity_check,
    dyson_channel_order2,
    heisenberg,
    multifourier_bound_check,
    thermal_residual_scaling,
)

__version__ = "0.1.0"
