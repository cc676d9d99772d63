"""Deflated conjugate gradients with Krylov subspace recycling.

Solves sequences of dense SPD systems by carrying a small basis of
approximate eigenvectors from one solve to the next (harmonic Ritz
extraction out of logged CG iterations), demonstrated end to end on
Gaussian-process binary classification with the Laplace approximation.
"""

from ._kernels import BACKEND
from .errors import (
    BadMagic,
    BasisDeficient,
    BreakdownZeroCurvature,
    ConfigError,
    DataError,
    DefcgError,
    DigitAbsent,
    DimensionMismatch,
    GramNotSpd,
    InvalidLabel,
    NoConvergence,
    NoProgress,
    NotPositiveDefinite,
    NumericalError,
    StateInconsistent,
    TruncatedFile,
)
from .linalg import EigenPairs, cholesky_factor, cholesky_solve, gemm, gen_sym_eigen, matvec, sym_eigen
from .solvers import (
    KrylovLog,
    RecycleBasis,
    SolveReport,
    SolverConfig,
    apply_deflation_projector,
    cg_solve,
    deflated_cg_solve,
    empty_basis,
)
from .recycle import (
    RitzExtraction,
    SequenceState,
    condition_numbers,
    deflated_spectrum,
    harmonic_ritz_extract,
    refresh_basis,
    solve_next,
)
from .gpc import (
    GpcState,
    KernelParams,
    NewtonRecord,
    NewtonSystem,
    build_newton_system,
    laplace_newton,
    likelihood_derivs,
    make_state,
    median_lengthscale,
    newton_update,
    psi_objective,
    rbf_kernel,
)
from .subset import SubsetModel, assemble_full_latents, evaluate_full, fit_subset, induce_latents
from .data import gen_synthetic, load_mnist_idx
from .bench import ExperimentConfig, RunRecord, emit_reports, rel_error_delta, run_comparison

__version__ = "0.1.0"
