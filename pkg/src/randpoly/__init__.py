"""Expected complex-zero densities of random real and complex polynomial
systems, with closed forms, scaling limits and a Monte Carlo verification
engine."""

from .core import (
    ComplexPoint,
    EnsembleSpec,
    Field,
    GridSpec,
    dimension,
    enumerate_indices,
    grid_points,
    log_multinomial,
    multinomial,
)
from .ensembles import (
    BasisEvaluation,
    CoefficientVector,
    basis_vector,
    basis_weights,
    evaluate_poly,
    sample_coefficients,
)
from .kernel import (
    ConsistencyError,
    ExcludedDomainError,
    HermitianForm,
    KernelState,
    Potential,
    WedgeTerm,
    Y_MIN,
    density_cx,
    density_real,
    error_term_exact_m1,
    gaussian_log_integral,
    hessian_A,
    hessian_B,
    kernel_state,
    mixed_determinant,
    wedge_terms,
)
from .montecarlo import (
    ComparisonReport,
    Histogram,
    QuadratureError,
    Rect,
    RootSet,
    TestFunction,
    compare,
    empirical_density,
    export_histogram_csv,
    find_roots,
    weak_limit_bound,
    weak_limit_pairing,
)
from .scaling import (
    prosen_density,
    scaled_density,
    scaled_error_m1,
    scaled_log_error_hessian,
)

__version__ = "0.1.0"

__all__ = [
    "BasisEvaluation",
    "CoefficientVector",
    "ComparisonReport",
    "ComplexPoint",
    "ConsistencyError",
    "EnsembleSpec",
    "ExcludedDomainError",
    "Field",
    "GridSpec",
    "HermitianForm",
    "Histogram",
    "KernelState",
    "Potential",
    "QuadratureError",
    "Rect",
    "RootSet",
    "TestFunction",
    "WedgeTerm",
    "Y_MIN",
    "basis_vector",
    "basis_weights",
    "compare",
    "density_cx",
    "density_real",
    "dimension",
    "empirical_density",
    "enumerate_indices",
    "error_term_exact_m1",
    "evaluate_poly",
    "export_histogram_csv",
    "find_roots",
    "gaussian_log_integral",
    "grid_points",
    "hessian_A",
    "hessian_B",
    "kernel_state",
    "log_multinomial",
    "mixed_determinant",
    "multinomial",
    "prosen_density",
    "sample_coefficients",
    "scaled_density",
    "scaled_error_m1",
    "scaled_log_error_hessian",
    "weak_limit_bound",
    "weak_limit_pairing",
    "wedge_terms",
    "__version__",
]
