"""Truncated formal power series over the rationals and the constructive
machinery behind parametric approximation of formal solutions."""

from .errors import (
    ArtinError,
    CertificateError,
    CongruenceError,
    InexactDivisionError,
    NonUnitError,
    NotRegularError,
    PrecisionError,
    PreconditionError,
    RegularizationError,
    SimplicityError,
    SingularJacobianError,
    VanishingMinorError,
)
from .series import (
    Series,
    add,
    compose,
    constant,
    embed,
    invert_unit,
    linear_substitute,
    monomial,
    mul,
    order,
    order_info,
    partial,
    variable,
    zero,
)
from .weierstrass import (
    DistinguishedPolynomial,
    XnPolynomial,
    divide_by_regular,
    euclid_pseudo_divide,
    exact_divide,
    regularize,
    weierstrass_divide,
    weierstrass_prepare,
    xn_regular_order,
)
from .linalg import SeriesMatrix, det, det_and_adjugate, jacobian, rank_lower_bound
from .ift import AnalyticSystem, newton_solve, substitute, verify_system
from .tougeron import (
    ApproximateSolution,
    ParametricSolution,
    check_approximate,
    parametric_solution,
    subordinate_params,
    tougeron_system,
)
from .artin import (
    ExtractionResult,
    ReducedSystem,
    StrongSolution,
    artin_approximate,
    corollary1_lift,
    extract_approximate,
    rank_identity,
    reduce_system,
    solve_recursive,
)
from .textform import parse_expr, read_series, series_from_json, series_to_json

__version__ = "0.1.0"

__all__ = [
    "AnalyticSystem",
    "ApproximateSolution",
    "ArtinError",
    "CertificateError",
    "CongruenceError",
    "DistinguishedPolynomial",
    "ExtractionResult",
    "InexactDivisionError",
    "NonUnitError",
    "NotRegularError",
    "ParametricSolution",
    "PrecisionError",
    "PreconditionError",
    "ReducedSystem",
    "RegularizationError",
    "Series",
    "SeriesMatrix",
    "SimplicityError",
    "SingularJacobianError",
    "StrongSolution",
    "VanishingMinorError",
    "XnPolynomial",
    "add",
    "artin_approximate",
    "check_approximate",
    "compose",
    "constant",
    "corollary1_lift",
    "det",
    "det_and_adjugate",
    "divide_by_regular",
    "embed",
    "euclid_pseudo_divide",
    "exact_divide",
    "extract_approximate",
    "invert_unit",
    "jacobian",
    "linear_substitute",
    "monomial",
    "mul",
    "newton_solve",
    "order",
    "order_info",
    "parametric_solution",
    "parse_expr",
    "partial",
    "rank_identity",
    "rank_lower_bound",
    "read_series",
    "reduce_system",
    "regularize",
    "series_from_json",
    "series_to_json",
    "solve_recursive",
    "subordinate_params",
    "substitute",
    "tougeron_system",
    "variable",
    "verify_system",
    "weierstrass_divide",
    "weierstrass_prepare",
    "xn_regular_order",
    "zero",
]
