"""Integrable Schrödinger potentials from symmetries, Lamé families and Dirichlet spectra."""

__version__ = "0.1.0"

from .config import DEFAULT_TOL, Tolerances
from .eigen import (
    EigenProblem,
    EigenResult,
    MexicanHatSpec,
    density_profile,
    determinant_condition,
    mexican_hat_field,
    shoot_miss,
    solve_eigen,
)
from .elliptic import EllipticInvariants, WeierstrassP, wp, wp_derivatives, wp_series_coeffs
from .errors import (
    DomainError,
    LameKitError,
    NotAnEigenvalue,
    PoleProximity,
    RecurrenceBreakdown,
    SingularIntegrand,
    SpecError,
    StepSizeUnderflow,
    UnsupportedN,
    ZeroSymmetry,
)
from .fields import Jet, ScalarField
from .lame import (
    EvenFamily,
    LamePotentialSpec,
    LameSymmetrySpec,
    OddFamily,
    assemble_fields,
    even_coefficients,
    even_cw_closed_form,
    gc_residuals,
    odd_coefficients,
    odd_trivial_pair,
    r1_r2_polynomials,
)
from .numerics import (
    Grid,
    OdeSolution,
    Polynomial,
    cumulative_quadrature,
    find_roots_scan,
    integrate_ode,
    poly_derivative,
    poly_eval,
    poly_mul,
)
from .specfile import PotentialSpecFile, parse_spec, serialize_spec
from .symcore import (
    FundamentalPair,
    SymmetryPair,
    SymmetryTriple,
    classify_case,
    compute_cw,
    first_integral,
    fundamental_solutions,
    hierarchy_step,
    lie_residual,
    make_pair,
    sl2_bracket,
    symmetry_triple,
)
