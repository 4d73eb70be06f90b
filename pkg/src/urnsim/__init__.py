"""Balanced reinforced-draw simulation: urn engine, branching-tree
representation, logarithmic marginal sampler and limit-law verification."""

from .asymptotics import (
    BlockLimit,
    Convolved,
    Gaussian,
    PointMass,
    SaS,
    ScalingSpec,
    block_limit_for,
    center_scale,
    dirichlet_block_moments,
    increment_moments,
    scaling_for,
    xi_limit,
)
from .colors import FiniteIdx, Hex, Lattice, Phased, hex_partition, to_point
from .config import ExperimentConfig, config_from_json, config_to_json, load_config
from .errors import (
    ConfigError,
    DegenerateFit,
    InfiniteSupport,
    NotErgodic,
    TooLarge,
    UnknownSuite,
    UrnError,
    ValidationError,
)
from .kernels import (
    AugmentedKernel,
    BlockDiagonal,
    DELTA,
    FiniteMatrix,
    HexWalk,
    InitialConfig,
    LatticeWalk,
    PeriodicWalk,
    StableWalk,
    augment,
    block_diagonal,
    finite_matrix,
    has_finite_support,
    kernel_from_json,
    kernel_step,
    kernel_to_json,
    point_mass,
    row_support,
    stationary_distribution,
    validate_kernel,
)
from .rngutil import GENERATOR_NAME, derive_seed, make_rng, replication_rng
from .rrt import (
    BranchingTrajectory,
    TauSample,
    marginal_color,
    rrt_exact_law,
    sample_ancestor_path,
    sample_tau,
    sample_tau_bernoulli,
    simulate_branching,
    tau_mean_var,
)
from .sampler import WeightedIndex
from .stats import (
    TestReport,
    chi_square_gof,
    ecf,
    ks_two_sample,
    ks_vs_cdf,
    normal_cdf,
    sample_mean_cov,
    stable_alpha_fit,
    tv_distance,
)
from .suites import SUITES, run_suite
from .urn import (
    ExactLaw,
    Trajectory,
    UrnState,
    urn_draw,
    urn_exact_law,
    urn_init,
    urn_simulate,
    urn_simulate_batch,
)

__version__ = "1.0.0"
