"""skewlab: a desk-scale laboratory for monotone skew-product semiflows.

Quasi-periodic reaction-diffusion equations generate order-preserving
skew-product semiflows over torus rotations; this package integrates them
with a discretely order-preserving scheme and checks the structural
predictions that uniform stability forces on their minimal sets (symmetry
under compact group actions, totally ordered translate families, spatial
monotonicity of stable waves, asymptotic phase, comparison estimates).
"""

from .errors import (
    BracketFailure,
    CFLViolation,
    ConfigInvalid,
    DimensionMismatch,
    EmptyReturnSet,
    GridMismatch,
    GroupMismatch,
    HypothesisViolated,
    LockHeld,
    NoConvergence,
    NoCrossing,
    NonFiniteState,
    NotStable,
    SkewLabError,
    SymmetryFlagMissing,
    TrappingViolated,
    UndecidedEstimate,
)
from .groups import Rotation2D, Translation, apply, compose, inverse
from .integrator import (
    IntegratorConfig,
    RadialProblem,
    SkewState,
    WaveProblem,
    homogeneous_solution,
    integrate,
    level_crossing,
    step,
    wave_speed_estimate,
)
from .orbits import (
    OmegaLimitEstimate,
    StabilityModulus,
    omega_limit,
    one_cover_check,
    perturbation_ensemble,
    stability_probe,
)
from .profiles import Grid, Profile, ProfileSet, hausdorff, leq, sup_distance, wedge
from .verifiers import (
    PhaseExtraction,
    VerifierReport,
    check_decay_bound,
    check_equivariance,
    check_monotone,
    check_spatial_monotonicity,
    check_symmetry,
    check_total_order,
    check_wedge_order,
    extract_asymptotic_phase,
    run_verifier,
    supersolution_pair,
)
from .quasi_periodic import (
    ContainmentCheck,
    FrequencyBasis,
    QPSignal,
    TorusPhase,
    advance_phase,
    find_integer_relation,
    module_contains,
    return_times,
    torus_distance,
)
from .reaction import ReactionTerm
from .config import ExperimentConfig, build_scenario, load_config, validate_raw
from .scenarios import (
    Scenario,
    clamped_front,
    closed_form_front,
    flatten_tails,
    offset_bump,
    radial_flagship,
    speed_oracle,
    stationary_pulse,
    wave_default,
    wave_flagship,
    wiggled_front,
)
from .serialize import (
    dump_trajectory,
    load_trajectory,
    profile_from_binary,
    profile_from_csv,
    profile_to_binary,
    profile_to_csv,
    reaction_from_dict,
    reaction_to_dict,
    trajectory_to_csv,
)
from .suite import run_suite, worker_count

__version__ = "0.1.0"
