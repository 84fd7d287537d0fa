"""Sparse polynomial interpolation from black-box evaluations.

Three families of methods recover a sparse polynomial from its values at
powers of a base point: Prony-type eigenvalue methods, l1-minimisation
linear programs and a total-variation semidefinite hierarchy on the torus.
"""

from .core import (
    AtomicMeasure,
    BasePoint,
    EvaluationOracle,
    NoiseModel,
    SparsePolynomial,
    bundled_instance,
    bundled_instances,
    load_instance,
    measure_from_polynomial,
    save_instance,
)
from .errors import (
    ConfigurationError,
    DecodeError,
    ExtractionError,
    ExtractionWarning,
    IllConditionedWarning,
    InputError,
    InterpError,
    NotApplicableError,
    NumericalError,
    RankDeficiencyError,
    SolveError,
)
from .kernels import BACKEND
from .lp import LinearProgram, LpSolution, dual_certificate, naive_lp, rigorous_lp, solve_lp
from .moments import IndexScheme, MomentSequence, collect_moments, hankel_matrix, toeplitz_matrix
from .prony import PronyConfig, advanced_prony, hankel_prony, toeplitz_prony
from .recover import decode_exponents, relative_error
from .sdp import (
    SdpProgram,
    SdpSolution,
    build_hierarchy_step,
    flat_extension_check,
    solve_sdp,
    super_resolution,
)

__version__ = "0.1.0"

__all__ = [
    "AtomicMeasure",
    "BACKEND",
    "BasePoint",
    "ConfigurationError",
    "DecodeError",
    "EvaluationOracle",
    "ExtractionError",
    "ExtractionWarning",
    "IllConditionedWarning",
    "IndexScheme",
    "InputError",
    "InterpError",
    "LinearProgram",
    "LpSolution",
    "MomentSequence",
    "NoiseModel",
    "NotApplicableError",
    "NumericalError",
    "PronyConfig",
    "RankDeficiencyError",
    "SdpProgram",
    "SdpSolution",
    "SolveError",
    "SparsePolynomial",
    "advanced_prony",
    "build_hierarchy_step",
    "bundled_instance",
    "bundled_instances",
    "collect_moments",
    "decode_exponents",
    "dual_certificate",
    "flat_extension_check",
    "hankel_matrix",
    "hankel_prony",
    "load_instance",
    "measure_from_polynomial",
    "naive_lp",
    "relative_error",
    "rigorous_lp",
    "save_instance",
    "solve_lp",
    "solve_sdp",
    "super_resolution",
    "toeplitz_matrix",
    "toeplitz_prony",
]
