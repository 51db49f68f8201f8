"""Integer-coefficient Bernstein operators with exact shape certification."""
from .bernstein import (
    BernsteinPoly,
    IntegerBernsteinPoly,
    derivative,
    evaluate,
    from_power_basis,
    poly_from_json,
    poly_to_json,
    reflect,
    second_derivative,
    subdivide,
    to_power_basis,
)
from .certify import (
    Certificate,
    HypothesisId,
    ShapeQuery,
    Status,
    certify_nonnegative,
    certify_shape,
    check_hypothesis,
    coefficient_shape_test,
    sign_change_brackets,
)
from .corrections import (
    CorrectionKind,
    EnvelopeKind,
    correction_grid,
    envelope,
    envelope_poly,
)
from .exact import (
    DomainError,
    Enclosure,
    RoundingMode,
    TiePolicy,
    Undecidable,
    binomial,
    parse_rational,
    round_rational,
)
from .operators import (
    CLASSICAL,
    FLOOR_INT,
    GridSamples,
    OperatorKind,
    apply,
    apply_grid,
    nearest_int,
    parse_function_spec,
)
from .quadrature import IntegrandSpec, QuadratureResult, integrate
from .search import SearchConfig, find_counterexample, verify_paper_examples

__version__ = "0.1.0"
