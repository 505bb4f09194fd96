"""Local quantum thermal susceptibility (LQTS) of Ising and XXZ spin chains."""

from .anticommutator import (
    AnticommutatorSolution,
    UnsolvableError,
    lqts_via_omega,
    series_solution,
    solve_anticommutator,
)
from .landau_zener import (
    TwoLevelSystem,
    lz_classify_sweep,
    lz_heat_capacity,
    lz_optimal_gap,
)
from .linalg import (
    DimensionError,
    NotHermitianError,
    NotPSDError,
    SpectralDecomposition,
    eigh,
    group_degenerate,
    kron,
    partial_trace,
    pinv_power,
    support_projector,
)
from .models import (
    SpinChainModel,
    SubsystemSpec,
    build_hamiltonian,
    complement_hamiltonian,
    interaction_hamiltonian,
    local_hamiltonian,
    pauli_string,
)
from .susceptibility import (
    LqtsResult,
    complement_phase_qfi,
    cramer_rao_bound,
    fidelity,
    high_t_expansion,
    low_t_expansion,
    lqts,
    lqts_eigendiff,
    lqts_fidelity,
    temperature_susceptibility,
)
from .thermal import (
    GibbsEnsemble,
    energy_variance,
    gibbs,
    log_partition,
    purify,
    reduced_thermal_state,
    truncated_energy_variance,
)

__version__ = "0.1.0"
