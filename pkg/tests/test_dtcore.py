import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from darboux import (
    ChainMismatch,
    DTQuad,
    FieldContext,
    InvalidWitness,
    InverseWitness,
    LinOp,
    NotInKernel,
    Schrodinger2D,
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
    laplace_inverse,
    laplace_transform,
    op_apply,
    type1_build,
    type1_inverse,
)
from randgen import CTX, rand_coeff, rand_op

XY = FieldContext(["x", "y"])
P, Q = XY.op("Dx + x*Dy"), XY.op("Dx + 1")
R = XY.op("Dx^2 + x*Dx*Dy + Dx + (2+x)*Dy")
LANDAU = DTQuad(Q, Q, Q * P, R)


def rand_type1(rng):
    C = rand_op(rng, CTX, 1, rational=False, exact_order=True)
    M = rand_op(rng, CTX, 1, rational=False, exact_order=True)
    f = rand_coeff(rng, CTX)
    return type1_build(C, M, f), type1_inverse(C, M, f), (C, M, f)


instances = st.randoms(use_true_random=False).map(rand_type1)
small_ops = st.randoms(use_true_random=False).map(lambda r: rand_op(r, CTX, 1, rational=False))


def test_verify_examples():
    assert dt_verify(LANDAU)
    D = XY.op("Dx*Dy")
    assert dt_verify(DTQuad(D, D, XY.op("Dx"), XY.op("Dx")))
    T = FieldContext(["t"])
    L = T.op("Dt + t")
    q = DTQuad(L, L, T.op("Dt"), T.op("Dt"))
    assert not dt_verify(q)
    assert q.intertwining_defect() == 1


def test_symbol_mismatch_is_rejected():
    # N*L = L1*M holds trivially with M = N = 0, but the symbols differ
    z = LinOp.zero(XY)
    assert not dt_verify(DTQuad(XY.op("Dx"), XY.op("Dy"), z, z))


def test_compose_with_identity():
    assert dt_compose(LANDAU, identity_dt(Q)) == LANDAU
    assert dt_compose(identity_dt(Q), LANDAU) == LANDAU
    with pytest.raises(ChainMismatch):
        dt_compose(LANDAU, identity_dt(P))


def test_two_type1_steps_compose():
    rng = random.Random(3)
    q1, _, (C, M, f) = rand_type1(rng)
    # L1 = N*C + f is again of Type I form
    q2 = type1_build(q1.N, C, f)
    assert q2.L == q1.L1
    comp = dt_compose(q1, q2)
    assert dt_verify(comp)
    assert comp.M == C * M


def test_equivalence_examples():
    q = LANDAU
    w = dt_equivalent(q, DTQuad(q.L, q.L1, q.M + q.L, q.N + q.L1))
    assert w is not None and w.A == 1
    assert dt_equivalent(q, DTQuad(q.L, q.L1, q.M, q.N + 1)) is None
    with pytest.raises(ChainMismatch):
        dt_equivalent(q, identity_dt(P))


@given(instances, small_ops, small_ops)
@settings(max_examples=15)
def test_equivalence_relation(inst, A1, A2):
    q, _, _ = inst
    q1 = DTQuad(q.L, q.L1, q.M + A1 * q.L, q.N + q.L1 * A1)
    q2 = DTQuad(q.L, q.L1, q1.M + A2 * q.L, q1.N + q.L1 * A2)
    assert dt_verify(q1) and dt_verify(q2)
    assert dt_equivalent(q, q).A.is_zero()
    assert dt_equivalent(q, q1).A == A1
    assert dt_equivalent(q1, q).A == -A1
    assert dt_equivalent(q, q2).A == A1 + A2


@given(instances, small_ops)
@settings(max_examples=15)
def test_shift_and_dual_stay_valid(inst, C):
    q, _, _ = inst
    assert dt_verify(dt_shift(q, C))
    assert dt_verify(dt_dual(q))
    assert dt_shift(q, LinOp.zero(CTX)) == q
    assert dt_dual(dt_dual(q)) == q


def test_shift_of_type1_seed():
    rng = random.Random(5)
    C = rand_op(rng, CTX, 1, rational=False, exact_order=True)
    M = rand_op(rng, CTX, 1, rational=False, exact_order=True)
    f = CTX.fe("x + y")
    seed = DTQuad(LinOp.scalar(CTX, f), LinOp.scalar(CTX, f), M, type1_build(C, M, f).N)
    assert dt_verify(seed)
    assert dt_shift(seed, C) == type1_build(C, M, f)
    # and the shifted seed inverse is the Type I inverse
    fi = -f.inverse()
    seed_w = InverseWitness(LinOp.zero(CTX), LinOp.zero(CTX), LinOp.scalar(CTX, fi), LinOp.scalar(CTX, fi))
    assert dt_verify_inverse(seed, seed_w)
    assert dt_shift_inverse(seed, seed_w, C) == type1_inverse(C, M, f)


def test_dual_of_landau_and_laplace():
    d = dt_dual(LANDAU)
    assert (d.L, d.L1, d.M, d.N) == (Q * P, R, Q, Q)
    assert dt_verify(d)
    ctx = FieldContext(["x", "y"])
    s = Schrodinger2D(ctx.fe("y"), ctx.fe("x^2"), ctx.fe("1"))
    assert dt_verify(dt_dual(laplace_transform(s, "x")))


def test_inverse_examples():
    L = XY.op("Dx*Dy + x")
    one, zero = LinOp.one(XY), LinOp.zero(XY)
    ident = identity_dt(L)
    w = InverseWitness(one, one, zero, zero)
    assert dt_verify_inverse(ident, w)
    assert dt_dual_inverse(ident, w) == InverseWitness(zero, zero, -one, -one)
    assert dt_verify_inverse(dt_dual(ident), dt_dual_inverse(ident, w))
    assert dt_shift_inverse(ident, w, zero) == w
    with pytest.raises(InvalidWitness):
        dt_dual_inverse(ident, InverseWitness(one, one, one, zero))
    with pytest.raises(InvalidWitness):
        dt_shift_inverse(ident, InverseWitness(zero, one, zero, zero), one)


def test_laplace_inverse_witness():
    ctx = FieldContext(["x", "y"], generic=["a", "b", "c"])
    s = Schrodinger2D(ctx.fe("a"), ctx.fe("b"), ctx.fe("c"))
    q = laplace_transform(s, "x")
    w = laplace_inverse(q, "x")
    k = ctx.fe("b_y + a*b - c")
    assert w.A == LinOp.scalar(ctx, k.inverse())
    assert w.Mp == k.inverse() * ctx.op("Dy + a")
    assert dt_verify_inverse(q, w)


@given(instances, small_ops)
@settings(max_examples=15)
def test_type1_inverse_and_derived_witnesses(inst, C):
    q, w, _ = inst
    assert dt_verify_inverse(q, w)
    # B*N = M*A, checked directly rather than through the verifier
    assert w.B * q.N == q.M * w.A
    assert dt_verify_inverse(dt_shift(q, C), dt_shift_inverse(q, w, C))
    dw = dt_dual_inverse(q, w)
    assert dt_verify_inverse(dt_dual(q), dw)
    ddw = dt_dual_inverse(dt_dual(q), dw)
    assert dt_verify_inverse(q, ddw)


@given(instances, small_ops)
@settings(max_examples=15)
def test_shift_pairs_have_equivalent_duals(inst, C):
    q, _, _ = inst
    w = dt_equivalent(dt_dual(q), dt_dual(dt_shift(q, C)))
    assert w is not None and w.A == C


def test_kernel_map_examples():
    ctx = FieldContext(["x", "y"], adjoined={"F": {"x": "-F"}})
    P, Q = ctx.op("Dx + x*Dy"), ctx.op("Dx + 1")
    R = ctx.op("Dx^2 + x*Dx*Dy + Dx + (2+x)*Dy")
    q = DTQuad(Q, Q, Q * P, R)
    phi = ctx.fe("F")
    assert op_apply(Q, phi).is_zero()
    image = dt_kernel_map(q, phi)
    assert image == op_apply(Q * P, phi)
    assert op_apply(Q, image).is_zero()
    phi2 = ctx.fe("y*F")
    image2 = dt_kernel_map(q, phi2)
    assert image2 == op_apply(Q, op_apply(P, phi2)) and not image2.is_zero()
    assert dt_kernel_map(identity_dt(Q), phi2) == phi2
    T = FieldContext(["t", "x"])
    L = T.op("Dt + Dx^2 + t*Dx - 1/t")
    assert dt_kernel_map(identity_dt(L), T.fe("t")) == T.fe("t")
    with pytest.raises(NotInKernel):
        dt_kernel_map(q, ctx.fe("x"))


def test_compose_equivalence_witness_examples():
    ctx = FieldContext(["x", "y"])
    s = Schrodinger2D(ctx.fe("y"), ctx.fe("x^2"), ctx.fe("1"))
    q1 = laplace_transform(s, "x")
    q2 = laplace_transform(Schrodinger2D.from_op(q1.L1), "y")
    zero, one = LinOp.zero(ctx), LinOp.one(ctx)
    assert dt_compose_equivalence_witness(zero, zero, q1, q2).is_zero()
    assert dt_compose_equivalence_witness(one, zero, q1, q2) == q2.M
    rng = random.Random(11)
    for _ in range(3):
        A = rand_op(rng, ctx, 1, rational=False)
        B = rand_op(rng, ctx, 1, rational=False)
        C = dt_compose_equivalence_witness(A, B, q1, q2)
        moved = dt_compose(
            DTQuad(q1.L, q1.L1, q1.M + A * q1.L, q1.N + q1.L1 * A),
            DTQuad(q2.L, q2.L1, q2.M + B * q2.L, q2.N + q2.L1 * B),
        )
        base = dt_compose(q1, q2)
        assert moved.M - base.M == C * q1.L
        assert moved.N - base.N == q2.L1 * C
    with pytest.raises(ChainMismatch):
        dt_compose_equivalence_witness(zero, zero, q1, q1)
