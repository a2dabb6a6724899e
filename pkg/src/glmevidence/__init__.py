"""Evidence (marginal likelihood) estimation and Bayesian variable
selection for sparse generalized linear models.

The package evaluates the log evidence of every q-sparse submodel three
ways (Laplace approximation at the MLE, prior Monte Carlo, deterministic
quadrature), scores models under a gamma-binomial prior, and ships an
experiment harness for the approximation-error and selection-consistency
studies.  See README.md for the CLI and the kernel backend switch.
"""

from .data import Dataset, ModelIndex, EMPTY_MODEL
from .errors import (
    BudgetExceeded,
    ContractViolation,
    DimensionTooLarge,
    GlmEvidenceError,
    InvalidResponse,
    NoConvergence,
    NumericError,
    ParseError,
    PreconditionViolated,
    Separation,
    ShapeMismatch,
    SingularHessian,
)
from .evidence import (
    EvidenceEstimate,
    LaplaceErrorReport,
    laplace_error_max,
    log_laplace_evidence,
    log_mc_evidence,
    log_quadrature_evidence,
)
from .experiments import (
    ExperimentConfig,
    run_consistency_experiment,
    run_laplace_error_experiment,
)
from .families import LOGISTIC, POISSON, Family, get_family
from .fit import FitOptions, FitResult, check_mle_norm, fit_mle
from .glm import log_likelihood, neg_hessian, score
from .modelspace import ModelPrior, count_models, enumerate_models, log_model_prior
from .priors import PriorSpec, lipschitz_constants, log_prior_density, sample_prior
from .scan import ScanResult, score_bayes_gamma, score_laplace_gamma, select_model
from .simgen import (
    ScalingConfig,
    SimConfig,
    generate_design,
    generate_response,
    make_beta0,
    scaling_config_instantiate,
    simulate_dataset,
)

__version__ = "0.1.0"

__all__ = [
    "Dataset", "ModelIndex", "EMPTY_MODEL",
    "GlmEvidenceError", "ContractViolation", "NumericError", "Separation",
    "NoConvergence", "SingularHessian", "DimensionTooLarge", "BudgetExceeded",
    "PreconditionViolated", "ParseError", "ShapeMismatch", "InvalidResponse",
    "EvidenceEstimate", "LaplaceErrorReport", "laplace_error_max",
    "log_laplace_evidence", "log_mc_evidence", "log_quadrature_evidence",
    "ExperimentConfig", "run_consistency_experiment", "run_laplace_error_experiment",
    "Family", "LOGISTIC", "POISSON", "get_family",
    "FitOptions", "FitResult", "fit_mle", "check_mle_norm",
    "log_likelihood", "score", "neg_hessian",
    "ModelPrior", "count_models", "enumerate_models", "log_model_prior",
    "PriorSpec", "log_prior_density", "sample_prior", "lipschitz_constants",
    "ScanResult", "select_model", "score_laplace_gamma", "score_bayes_gamma",
    "SimConfig", "ScalingConfig", "generate_design", "generate_response",
    "make_beta0", "scaling_config_instantiate", "simulate_dataset",
    "__version__",
]
