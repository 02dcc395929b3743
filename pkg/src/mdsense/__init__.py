"""Matrix sensing with mirror descent: maps, optimizers, baselines, sweeps.

The package studies which zero-risk matrix an unregularized iterative method
converges to. Spectral mirror maps (entropy on the PSD cone, hypentropy on
general matrices) drive mirror descent toward the Bregman-closest solution;
factored gradient descent and the multiplicative update are companions, and
a nuclear-norm ADMM baseline plus closed-form recovery bounds give the
yardsticks. The experiment layer reproduces the alpha-sweep figures.
"""

from .errors import (
    AsymmetricInputError,
    ConfigError,
    DivergenceError,
    DomainError,
    InvalidRankError,
    MaxItersExceeded,
    MdsenseError,
    NonSquareError,
    NotOrthonormalError,
    NotPDError,
    NotPSDError,
    NumericalFailure,
    ParameterOutOfRangeError,
    RankDeficientGramWarning,
    ShapeMismatchError,
    SpectralOverflowError,
    TooManySamplesError,
    ZeroMatrixError,
)
from .linalg import lift_rect, lift_sym, singular_values, svd, sym_eig, symmetrize
from .metrics import (
    Bound,
    BoundInputs,
    CompletionBound,
    effective_rank,
    frobenius_norm,
    nuclear_norm,
    recon_error,
    spectral_norm,
    theorem3_bound,
    theorem4_bound,
)
from .mirror_maps import (
    EntropyMap,
    HypentropyMap,
    MirrorMap,
    entropy_potential,
    entropy_value,
    hypentropy_potential,
    hypentropy_value,
    make_map,
)
from .nucmin import (
    AffineProjector,
    NucminConfig,
    NucminResult,
    affine_project,
    nucmin,
    svt_prox,
)
from .optimizers import (
    RunConfig,
    Trajectory,
    exp_gradient,
    gd_factored_psd,
    gd_factored_sym,
    mirror_descent,
    safe_step_bound,
)
from .experiment import (
    AlgorithmSpec,
    ExperimentConfig,
    InvariantReport,
    InvariantResult,
    ResultRow,
    build_problem,
    emit_outputs,
    load_config,
    parse_config_text,
    parse_csv,
    reference_rows,
    render_csv,
    run_alpha_sweep,
    run_invariant_suite,
    run_single,
)
from .rng import stream
from .sensing import (
    GroundTruth,
    SensingEnsemble,
    coherence,
    gen_completion,
    gen_gaussian_rect,
    gen_gaussian_sym,
    gen_lowrank_psd,
    gen_lowrank_rect,
    load_ensemble,
    load_ground_truth,
    measure,
    rip_estimate,
    risk,
    risk_grad,
    save_ensemble,
    save_ground_truth,
)

__version__ = "1.0.0"

__all__ = [
    "AffineProjector",
    "AlgorithmSpec",
    "AsymmetricInputError",
    "Bound",
    "BoundInputs",
    "CompletionBound",
    "ConfigError",
    "DivergenceError",
    "DomainError",
    "EntropyMap",
    "ExperimentConfig",
    "GroundTruth",
    "HypentropyMap",
    "InvalidRankError",
    "InvariantReport",
    "InvariantResult",
    "MaxItersExceeded",
    "MdsenseError",
    "MirrorMap",
    "NonSquareError",
    "NotOrthonormalError",
    "NotPDError",
    "NotPSDError",
    "NucminConfig",
    "NucminResult",
    "NumericalFailure",
    "ParameterOutOfRangeError",
    "RankDeficientGramWarning",
    "ResultRow",
    "RunConfig",
    "SensingEnsemble",
    "ShapeMismatchError",
    "SpectralOverflowError",
    "TooManySamplesError",
    "Trajectory",
    "ZeroMatrixError",
    "affine_project",
    "build_problem",
    "coherence",
    "effective_rank",
    "emit_outputs",
    "entropy_potential",
    "entropy_value",
    "exp_gradient",
    "frobenius_norm",
    "gd_factored_psd",
    "gd_factored_sym",
    "gen_completion",
    "gen_gaussian_rect",
    "gen_gaussian_sym",
    "gen_lowrank_psd",
    "gen_lowrank_rect",
    "hypentropy_potential",
    "hypentropy_value",
    "lift_rect",
    "lift_sym",
    "load_config",
    "load_ensemble",
    "load_ground_truth",
    "make_map",
    "measure",
    "mirror_descent",
    "nucmin",
    "nuclear_norm",
    "parse_config_text",
    "parse_csv",
    "recon_error",
    "reference_rows",
    "render_csv",
    "rip_estimate",
    "risk",
    "risk_grad",
    "run_alpha_sweep",
    "run_invariant_suite",
    "run_single",
    "safe_step_bound",
    "save_ensemble",
    "save_ground_truth",
    "singular_values",
    "spectral_norm",
    "stream",
    "svd",
    "svt_prox",
    "sym_eig",
    "symmetrize",
    "theorem3_bound",
    "theorem4_bound",
]
