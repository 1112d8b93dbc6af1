"""Exact star-products, sun-products and their cochains on polynomial algebras."""

from .diffop import (
    BiDiffOp,
    DiffOp,
    FitError,
    OperatorSeries,
    apply_bidiffop,
    apply_diffop,
    compose_operator_series,
    fit_diffop,
    hochschild_coboundary,
    invert_operator_series,
    operator_exp,
)
from .lie import (
    BchContext,
    LieAlgebra,
    LinearForm,
    PoissonStructure,
    abelian,
    ad_power,
    bch_coefficient,
    bernoulli,
    f_series,
    heisenberg,
    jacobi_check,
    poisson_bracket,
    su2,
    z_coefficient,
)
from .parser import ParseError, parse_expression, parse_series
from .pbw import PbwElement, gutt_decompose, gutt_symmetrize
from .poly import (
    DimensionError,
    NuSeries,
    Polynomial,
    Rational,
    TruncationError,
    partial_derivative,
    poly_mul,
    project_pi,
    series_mul,
)
from .report import CheckReport, CovarianceReport
from .star import (
    BiDiffStar,
    GuttStar,
    MoyalStar,
    StarProduct,
    TwistedStar,
    apply_equivalence,
    check_associativity,
    check_chs,
    check_covariance,
    check_eco,
    check_star_axioms,
    gutt_cochain,
    moyal_cochain,
    pointwise_star,
    star_mul,
)
from .sun import (
    FactorMultiset,
    ReconstructionError,
    SunCochains,
    SunProduct,
    build_star_with_cochains,
    check_in_EP,
    check_strong_equivalence,
    check_strong_multiplicativity,
    check_weak_equivalence,
    equivalence_to_EP,
    extract_sun_cochains,
    lambda_factor,
    reconstruct_all,
    reconstruct_cochain_diffop,
    sun_mul,
    symmetrized_star,
    weak_trivializer,
)

__version__ = "0.1.0"
