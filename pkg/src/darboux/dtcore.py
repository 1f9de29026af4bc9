"""Darboux transformations as morphisms: verification, composition,
equivalence, shifts, duals, inverse witnesses and kernel maps.

A transformation ``(M, N): L -> L1`` is valid when ``N*L = L1*M`` and ``L``,
``L1`` have the same principal symbol.
"""

from dataclasses import dataclass

from .errors import ChainMismatch, ContextMismatch, InvalidWitness, NotInKernel
from .opring import LinOp, op_apply, op_right_divide, op_symbol


@dataclass(frozen=True)
class DTQuad:
    L: LinOp
    L1: LinOp
    M: LinOp
    N: LinOp

    @property
    def ctx(self):
        return self.L.ctx

    @property
    def valid(self):
        return dt_verify(self)

    def intertwining_defect(self):
        """``N*L - L1*M``; zero for a valid transformation."""
        return self.N * self.L - self.L1 * self.M

    def as_dict(self):
        return {k: str(getattr(self, k)) for k in ("L", "L1", "M", "N")}


@dataclass(frozen=True)
class EquivWitness:
    A: LinOp


@dataclass(frozen=True)
class InverseWitness:
    Mp: LinOp
    Np: LinOp
    A: LinOp
    B: LinOp

    def as_dict(self):
        return {k: str(getattr(self, k)) for k in ("Mp", "Np", "A", "B")}


def same_symbol(P, Q):
    if P.is_zero() or Q.is_zero():
        return P.is_zero() and Q.is_zero()
    return op_symbol(P) == op_symbol(Q)


def _check_ctx(*ops):
    ctx = ops[0].ctx
    if any(op.ctx is not ctx for op in ops):
        raise ContextMismatch("operators from different contexts")
    return ctx


def identity_dt(L):
    one = LinOp.one(L.ctx)
    return DTQuad(L, L, one, one)


def dt_verify(q):
    _check_ctx(q.L, q.L1, q.M, q.N)
    return same_symbol(q.L, q.L1) and q.intertwining_defect().is_zero()


def dt_compose(q1, q2):
    """``q1`` followed by ``q2``: ``(M2*M1, N2*N1): L -> L2``."""
    if q1.L1 != q2.L:
        raise ChainMismatch("target of the first transformation is not the source of the second")
    return DTQuad(q1.L, q2.L1, q2.M * q1.M, q2.N * q1.N)


def dt_equivalent(q, q2):
    """Witness ``A`` with ``M2 = M + A*L`` and ``N2 = N + L1*A``, or ``None``."""
    if q.L != q2.L or q.L1 != q2.L1:
        raise ChainMismatch("equivalence needs the same source and target")
    dM = q2.M - q.M
    if q.L.is_zero():
        A = LinOp.zero(q.ctx) if dM.is_zero() else None
    else:
        A = op_right_divide(dM, q.L)
    if A is None or q2.N != q.N + q.L1 * A:
        return None
    return EquivWitness(A)


def dt_shift(q, C):
    return DTQuad(q.L + C * q.M, q.L1 + q.N * C, q.M, q.N)


def dt_dual(q):
    return DTQuad(q.M, q.N, q.L, q.L1)


def inverse_defects(q, w):
    """The five witness identities as named differences (all zero iff they hold)."""
    one = LinOp.one(q.ctx)
    return {
        "M'M = 1 + AL": w.Mp * q.M - one - w.A * q.L,
        "N'N = 1 + LA": w.Np * q.N - one - q.L * w.A,
        "MM' = 1 + BL1": q.M * w.Mp - one - w.B * q.L1,
        "NN' = 1 + L1B": q.N * w.Np - one - q.L1 * w.B,
        "BN = MA": w.B * q.N - q.M * w.A,
    }


def dt_verify_inverse(q, w):
    _check_ctx(q.L, q.L1, q.M, q.N, w.Mp, w.Np, w.A, w.B)
    # both arguments are immutable, so a verdict can be kept on the witness
    seen = w.__dict__.setdefault("_verdicts", {})
    for q0, verdict in seen.values():
        if q0 is q:
            return verdict
    verdict = dt_verify(DTQuad(q.L1, q.L, w.Mp, w.Np)) and all(
        d.is_zero() for d in inverse_defects(q, w).values()
    )
    seen[id(q)] = (q, verdict)
    return verdict


def _require_inverse(q, w):
    if not dt_verify_inverse(q, w):
        raise InvalidWitness("the supplied witness does not invert the transformation")


def dt_shift_inverse(q, w, C):
    _require_inverse(q, w)
    return InverseWitness(w.Mp + w.A * C, w.Np + C * w.B, w.A, w.B)


def dt_dual_inverse(q, w):
    _require_inverse(q, w)
    return InverseWitness(-w.A, -w.B, -w.Mp, -w.Np)


def dt_kernel_map(q, phi):
    phi = q.ctx.coerce(phi)
    if not op_apply(q.L, phi).is_zero():
        raise NotInKernel(f"{phi} is not in the kernel of {q.L}")
    image = op_apply(q.M, phi)
    assert op_apply(q.L1, image).is_zero()
    return image


def dt_compose_equivalence_witness(A, B, q1, q2):
    """``C`` relating composites after changing representatives.

    Replacing ``q1`` by ``(M + A*L, N + L1*A)`` and ``q2`` by
    ``(M1 + B*L1, N1 + L2*B)`` changes the composite by ``(C*L, L2*C)``.
    """
    if q1.L1 != q2.L:
        raise ChainMismatch("transformations are not composable")
    L, L1, M, N = q1.L, q1.L1, q1.M, q1.N
    L2, M1 = q2.L1, q2.M
    C = B * N + B * L1 * A + M1 * A
    base = dt_compose(q1, q2)
    moved = dt_compose(DTQuad(L, L1, M + A * L, N + L1 * A), DTQuad(L1, L2, M1 + B * L1, q2.N + L2 * B))
    assert moved.M == base.M + C * L
    assert moved.N == base.N + L2 * C
    return C
