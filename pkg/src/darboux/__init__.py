"""Exact symbolic calculus of Darboux transformations for linear partial
differential operators with rational-function coefficients."""

from .errors import *  # noqa: F401,F403
from .kfield import FieldContext, FieldElement, determinant, fe_arith, fe_derive, fe_is_zero, linear_solve
from .opring import (
    LinOp,
    SymbolPoly,
    format_operator,
    op_add,
    op_apply,
    op_commutator,
    op_conjugate,
    op_mul,
    op_right_divide,
    op_symbol,
    op_tdivide,
    wronskian_operator,
)
from .parsing import parse_field, parse_operator
from .dtcore import (
    DTQuad,
    EquivWitness,
    InverseWitness,
    dt_compose,
    dt_compose_equivalence_witness,
    dt_dual,
    dt_dual_inverse,
    dt_equivalent,
    dt_kernel_map,
    dt_shift,
    dt_shift_inverse,
    dt_verify,
    dt_verify_inverse,
    identity_dt,
    inverse_defects,
    same_symbol,
)
from .laplace import (
    LaplaceInvariants,
    Schrodinger2D,
    laplace_compose_check,
    laplace_invariants,
    laplace_inverse,
    laplace_inverse_candidates,
    laplace_transform,
)
from .continued import (
    Chain,
    CommutingTail,
    ScalarTail,
    continued_build,
    continuant_identities,
    continuant_sequences,
    continued_inverse,
    decompose_xxy,
    ganzha_omega,
    kernel_meet_trivial,
    principal_symbols_agree,
    seed_inverse_check,
    seed_transformation,
    type1_build,
    type1_inverse,
)
from .criterion import (
    FACTORIZATION_WRONSKIAN,
    TYPE_I,
    WRONSKIAN_TYPE,
    CriterionResult,
    FirstOrderClass,
    check_quasi_factorization,
    classify_first_order,
    quasi_factorize,
    tfree_criterion,
    unique_determination,
    wronskian_criterion,
)
from .cli import CommandResult, Session, run_command

__version__ = "0.1.0"
