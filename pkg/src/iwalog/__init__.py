"""Arithmetic of logarithmic divisors over the rationals, growth laws of
Iwasawa-module quotients, local index invariants, form class groups, and a
verification harness for layered class-group tables."""

from .padic import (
    DEFAULT_PRECISION,
    DegenerateAtPrecisionError,
    LogDivisor,
    NonUnitError,
    PadicError,
    PadicInt,
    PadicValue,
    ZeroArgumentError,
    deg_prime,
    divisor_degree,
    iwasawa_log,
    log_valuation,
    normalized_log,
    principal_divisor,
    require_odd_prime,
    teichmuller,
)
from .series import (
    DegreeOverflowError,
    DistinguishedPoly,
    LambdaElem,
    PrecisionExhaustedError,
    SeriesError,
    SingularPresentationError,
    WeierstrassFactorization,
    ZeroSeriesError,
    char_poly,
    cyclotomic_quotient_poly,
    divmod_poly,
    invariants_from_charpoly,
    omega,
    omega_int,
    omega_quotient,
    omega_quotient_int,
    weierstrass,
)
from .growth import (
    CodescentData,
    ElementaryModule,
    GrowthError,
    InconsistentSequenceError,
    InfiniteQuotientError,
    InvariantRelations,
    InvariantTriple,
    NegativeLambdaError,
    PrecisionSaturatedError,
    check_relations,
    codescent_quotient,
    cyclotomic_factor_difference,
    fit_invariants,
    fit_with_known_mu,
    gold_lambda,
    quotient_order_exponent,
    quotient_order_snf,
)
from .localfields import (
    AbelianLocalField,
    EvenPrimeError,
    IndexQuadruple,
    LocalFieldError,
    all_subgroups,
    decomposition_group,
    indices,
    inertia_group,
    relative_indices,
    subgroup_from_generators,
    torsion_inertia_group,
)
from .classgroups import (
    AbelianLGroup,
    ClassGroup,
    ClassGroupError,
    NotSquarefreeError,
    PositiveDError,
    QuadForm,
    cl_prime,
    class_group,
    compose,
    primes_above_ell_classes,
    principal_form,
)
from .tables import (
    ExpectedInvariants,
    InvalidGroupShapeError,
    LayerData,
    TableParseError,
    TableRow,
    bundled_fixtures,
    parse_rows,
    parse_tables,
)
from .verify import (
    CHECK_NAMES,
    VerificationReport,
    fit_two_layer,
    verify,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_PRECISION",
    "DegenerateAtPrecisionError",
    "LogDivisor",
    "NonUnitError",
    "PadicError",
    "PadicInt",
    "PadicValue",
    "ZeroArgumentError",
    "deg_prime",
    "divisor_degree",
    "iwasawa_log",
    "log_valuation",
    "normalized_log",
    "principal_divisor",
    "require_odd_prime",
    "teichmuller",
    "DegreeOverflowError",
    "DistinguishedPoly",
    "LambdaElem",
    "PrecisionExhaustedError",
    "SeriesError",
    "SingularPresentationError",
    "WeierstrassFactorization",
    "ZeroSeriesError",
    "char_poly",
    "cyclotomic_quotient_poly",
    "divmod_poly",
    "invariants_from_charpoly",
    "omega",
    "omega_int",
    "omega_quotient",
    "omega_quotient_int",
    "weierstrass",
    "CodescentData",
    "ElementaryModule",
    "GrowthError",
    "InconsistentSequenceError",
    "InfiniteQuotientError",
    "InvariantRelations",
    "InvariantTriple",
    "NegativeLambdaError",
    "PrecisionSaturatedError",
    "check_relations",
    "codescent_quotient",
    "cyclotomic_factor_difference",
    "fit_invariants",
    "fit_with_known_mu",
    "gold_lambda",
    "quotient_order_exponent",
    "quotient_order_snf",
    "AbelianLocalField",
    "EvenPrimeError",
    "IndexQuadruple",
    "LocalFieldError",
    "all_subgroups",
    "decomposition_group",
    "indices",
    "inertia_group",
    "relative_indices",
    "subgroup_from_generators",
    "torsion_inertia_group",
    "AbelianLGroup",
    "ClassGroup",
    "ClassGroupError",
    "NotSquarefreeError",
    "PositiveDError",
    "QuadForm",
    "cl_prime",
    "class_group",
    "compose",
    "primes_above_ell_classes",
    "principal_form",
    "ExpectedInvariants",
    "InvalidGroupShapeError",
    "LayerData",
    "TableParseError",
    "TableRow",
    "bundled_fixtures",
    "parse_rows",
    "parse_tables",
    "CHECK_NAMES",
    "VerificationReport",
    "fit_two_layer",
    "verify",
]
