"""Hasse-Witt matrices, a-numbers and p-ranks of Picard curves y^3 = f(x)."""

from .cartier import (
    BASIS_LABELS,
    Convention,
    MatrixFp,
    PicardCurve,
    a_number,
    cartier_matrix,
    cartier_monomial_rule,
    hasse_witt_fast,
    hasse_witt_oracle,
    p_rank,
    rank_fp,
    validate_curve,
)
from .errors import (
    DegenerateCurve,
    FieldMismatch,
    GenerationFailed,
    InvalidField,
    OracleBoundExceeded,
    PicardError,
    SingularCurve,
)
from .fieldpoly import BivariatePoly, DensePoly, FieldElement, PrimeField
from .survey import SweepConfig, SweepReport, oracle_equivalence_run, sweep, theorem_check

__version__ = "0.1.0"
