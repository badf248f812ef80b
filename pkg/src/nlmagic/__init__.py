"""Non-local nonstabilizerness (NN) measures for small quantum systems.

Closed-form and optimized NN for two-qubit states, stabilizer Renyi
entropies, robustness of magic, and two-point NN scans in critical chains
and monitored random circuits.  All entropies and measures are in nats.
"""

__version__ = "0.1.0"

from .fitting import FitError, FitResult, fit_power_law
from .magic import (
    MAX_NN_TWO_QUBIT,
    exponent_law,
    haar_nn_cdf,
    haar_nn_mean,
    haar_nn_pdf,
    is_canonical_form,
    mutual_sre,
    nn_from_schmidt_angle,
    nn_two_qubit_pure_analytic,
    pauli_basis,
    pauli_expectations,
    r_matrix,
    rho_from_r,
    sre2_mixed,
    sre2_pure,
)
from .monitored import (
    CircuitConfig,
    TrajectoryRecord,
    averaged_nn_scan,
    minn_scan_mhc,
    replay_trajectory,
    run_trajectory,
    swapping_diagnostic,
    swapping_from_curves,
)
from .optimize import (
    LocalUnitaryParams,
    OptimizationError,
    OptimizerConfig,
    nelder_mead,
    nn_optimize,
    nn_optimize_nqubit,
    single_qubit_unitary,
)
from .records import ScanRecord, write_scan_csv
from .robustness import (
    L1Decomposition,
    StabilizerStateSet,
    enumerate_stabilizer_states,
    nn_rom,
    rom,
    solve_l1_lp,
)
from .simplex import SimplexError, solve_lp
from .states import (
    apply_gate,
    basis_state,
    density_matrix,
    haar_random_state,
    haar_random_unitary,
    log_negativity,
    mutual_information,
    partial_trace,
    renyi2_entropy,
    schmidt_theta,
    von_neumann_entropy,
    werner_state,
)
from .tfim import (
    FreeFermionChain,
    ResourceLimitError,
    SolverError,
    SymmetryError,
    TfimConfig,
    ground_state_ed,
    minn_of_state,
    minn_scan,
    two_point_nn_scan,
    two_site_rdm_canonical,
)
