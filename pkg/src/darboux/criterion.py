"""Existence tests and classification for first-order transformations.

With ``M = D_t`` a transformation exists iff ``L = A*D_t + c*B`` where ``c``
is in K and ``B`` is t-free. A seed ``psi`` in the kernel of ``L`` reduces the
Wronskian case ``M = D_t - psi_t/psi`` to this one by a gauge.
"""

from dataclasses import dataclass, field

from .dtcore import DTQuad, dt_verify
from .errors import DivisionByZero, NonCommuting, NotFirstOrder, NotInKernel, ZeroGauge
from .opring import LinOp, op_apply, op_commutator, op_conjugate, op_right_divide, op_tdivide
from .continued import type1_build

FACTORIZATION_WRONSKIAN = "Factorization-Wronskian"
TYPE_I = "TypeI"
WRONSKIAN_TYPE = "WronskianType"


@dataclass(frozen=True)
class CriterionResult:
    admits: bool
    decomposition: tuple = None
    quad: DTQuad = None
    diagnostics: str = ""
    offending: tuple = field(default=())


@dataclass(frozen=True)
class FirstOrderClass:
    tag: str
    data: dict
    quad: DTQuad


def _split(L, t, reference=None):
    """``(A, c, B, offending)`` for ``L = A*D_t + c*B``; ``B`` is zero when ``L' = 0``."""
    ctx = L.ctx
    A, Lp = op_tdivide(L, t)
    if Lp.is_zero():
        return A, ctx.one, Lp, []
    if reference is None:
        reference = Lp.sorted_terms()[0][0]
    c = Lp.coeff(reference)
    if c.is_zero():
        raise ValueError(f"reference term {reference} is absent from the remainder")
    B = LinOp.scalar(ctx, c.inverse()) * Lp
    offending = [(mi, Lp.coeff(mi)) for mi, coeff in B.sorted_terms() if not coeff.derive(t).is_zero()]
    return A, c, B, offending


def _term_text(ctx, mi, coeff):
    return str(LinOp.monomial(ctx, mi, coeff))


def tfree_criterion(L, t, reference=None):
    """Decide whether ``M = D_t`` gives a transformation of ``L``.

    ``reference`` selects which coefficient of the remainder is normalised to 1
    (default: the leading one in the monomial order).
    """
    ctx = L.ctx
    A, c, B, offending = _split(L, t, reference)
    if offending:
        ref = B.sorted_terms()[0] if reference is None else (reference, B.coeff(reference))
        names = ", ".join(_term_text(ctx, mi, co) for mi, co in offending)
        text = (
            f"remainder after dividing by D{t} is not c times a {t}-free operator: "
            f"relative to {_term_text(ctx, ref[0], c)} the term(s) {names} depend on {t}"
        )
        return CriterionResult(False, diagnostics=text, offending=tuple(_term_text(ctx, mi, co) for mi, co in offending))
    Dt = LinOp.d(ctx, t)
    N = op_conjugate(Dt, c.inverse())
    L1 = N * A + c * B
    q = DTQuad(L, L1, Dt, N)
    assert dt_verify(q)
    assert L1 == L - A * Dt + N * A
    note = "factorization case (c*B = 0)" if B.is_zero() else f"c = {c}, B = {B}"
    return CriterionResult(True, (A, c, B), q, note)


def wronskian_criterion(L, psi, t):
    """Criterion for ``M = D_t - psi_t/psi`` with ``psi`` in the kernel of ``L``."""
    ctx = L.ctx
    psi = ctx.coerce(psi)
    if psi.is_zero():
        raise DivisionByZero("the seed must be nonzero")
    if not op_apply(L, psi).is_zero():
        raise NotInKernel(f"{psi} is not in the kernel of {L}")
    res = tfree_criterion(op_conjugate(L, psi), t)
    if not res.admits:
        return CriterionResult(False, diagnostics=f"after the gauge by {psi}: {res.diagnostics}", offending=res.offending)
    back = psi.inverse()
    q = res.quad
    quad = DTQuad(L, op_conjugate(q.L1, back), op_conjugate(q.M, back), op_conjugate(q.N, back))
    assert quad.L == L
    assert dt_verify(quad)
    return CriterionResult(True, res.decomposition, quad, f"after the gauge by {psi}: {res.diagnostics}")


def quasi_factorize(L, t, v=None):
    """``(C, c, B)`` with ``L = C*M + c*B`` and ``[M, B] = 0``, or ``None``.

    ``M`` is ``D_t`` or, given ``v``, ``D_t - v_t/v``.
    """
    ctx = L.ctx
    Dt = LinOp.d(ctx, t)
    if v is not None:
        v = ctx.coerce(v)
        if v.is_zero():
            raise ZeroGauge("the gauge v must be nonzero")
        Lg = op_conjugate(L, v)
    else:
        Lg = L
    A, c, B, offending = _split(Lg, t)
    if offending:
        return None
    if v is None:
        C, M = A, Dt
    else:
        back = v.inverse()
        C, B, M = op_conjugate(A, back), op_conjugate(B, back), op_conjugate(Dt, back)
    assert op_commutator(M, B).is_zero()
    assert L == C * M + c * B
    return C, c, B


def check_quasi_factorization(L, M, C, c, B):
    """Verify a supplied decomposition; returns ``{"L = CM + cB": bool, "[M,B] = 0": bool}``."""
    return {
        "L = CM + cB": (L - (C * M + c * B)).is_zero(),
        "[M,B] = 0": op_commutator(M, B).is_zero(),
    }


def classify_first_order(C, M, c, B):
    """Sort ``L = C*M + c*B`` (first-order ``M``, ``[M, B] = 0``) into the three cases."""
    ctx = M.ctx
    c = ctx.coerce(c)
    if M.order != 1:
        raise NotFirstOrder(f"{M} is not of order one")
    if not op_commutator(M, B).is_zero():
        raise NonCommuting("[M, B] != 0")
    cB = c * B
    data = {"C": C, "c": c, "B": B}
    if cB.is_zero():
        q = DTQuad(C * M, M * C, M, M)
        tag = FACTORIZATION_WRONSKIAN
    elif cB.is_scalar():
        q = type1_build(C, M, cB.scalar_value())
        tag = TYPE_I
    else:
        N = op_conjugate(M, c.inverse())
        q = DTQuad(C * M + cB, N * C + cB, M, N)
        tag = WRONSKIAN_TYPE
    assert dt_verify(q)
    return FirstOrderClass(tag, data, q)


def unique_determination(L, M):
    """True iff ``L`` and first-order ``M`` admit at most one transformation."""
    if M.order != 1:
        raise NotFirstOrder(f"{M} is not of order one")
    return op_right_divide(L, M) is None
