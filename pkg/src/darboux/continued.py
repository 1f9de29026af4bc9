"""Type I, continued Type I and continued Wronskian transformations.

A chain is the division-like sequence

    M_{i-1} = A_i * M_i + M_{i+1},   1 <= i <= k,

ending in ``M_{k+1} = f`` (a nonzero element of K) or ``M_{k+1} = c*B`` with
``B`` commuting with ``M_k``. ``M_0`` is the source operator ``L``.
"""

from dataclasses import dataclass

from .dtcore import DTQuad, InverseWitness, dt_verify, dt_verify_inverse
from .errors import (
    ChainMismatch,
    NonCommuting,
    NonCommutingTail,
    NotDifferential,
    NotScalarTail,
    SingularP,
    WrongShape,
    ZeroF,
    ZeroLeading,
    ZeroOperator,
)
from .opring import LinOp, op_apply, op_commutator, op_conjugate, op_right_divide, op_symbol


@dataclass(frozen=True)
class ScalarTail:
    f: object

    def __post_init__(self):
        # plain numbers are accepted and coerced once the chain knows its K
        if self.f == 0:
            raise ZeroF("the tail f must be nonzero")


@dataclass(frozen=True)
class CommutingTail:
    c: object
    B: LinOp

    def __post_init__(self):
        if self.c == 0:
            raise ZeroF("the tail factor c must be nonzero")
        if self.B.is_zero() or self.B.order < 1:
            raise WrongShape("the commuting factor B must have positive order")


@dataclass(frozen=True)
class Chain:
    """Operators ``A_1..A_k``, ``M_1..M_k`` and a tail; validated on construction."""

    A: tuple
    M: tuple
    tail: object

    def __post_init__(self):
        object.__setattr__(self, "A", tuple(self.A))
        object.__setattr__(self, "M", tuple(self.M))
        if not self.A or len(self.A) != len(self.M):
            raise ChainMismatch("a chain needs k >= 1 operators A_i and as many M_i")
        ctx = self.M[0].ctx
        for name, seq in (("A", self.A), ("M", self.M)):
            for i, op in enumerate(seq, 1):
                if op.ctx is not ctx:
                    raise ChainMismatch(f"{name}_{i} lives in another context")
                if op.is_zero():
                    raise ZeroOperator(f"{name}_{i} is zero")
        t = self.tail
        if isinstance(t, ScalarTail):
            object.__setattr__(self, "tail", ScalarTail(ctx.coerce(t.f)))
        elif isinstance(t, CommutingTail):
            object.__setattr__(self, "tail", CommutingTail(ctx.coerce(t.c), t.B))
        if isinstance(self.tail, CommutingTail):
            if not op_commutator(self.M[-1], self.tail.B).is_zero():
                raise NonCommutingTail("M_k does not commute with the tail operator B")
        elif not isinstance(self.tail, ScalarTail):
            raise TypeError("tail must be a ScalarTail or a CommutingTail")
        ms = self.all_M()
        for i in range(2, self.k + 1):
            if ms[i - 1] != self.A[i - 1] * ms[i] + ms[i + 1]:
                raise ChainMismatch(f"M_{i - 1} != A_{i} * M_{i} + M_{i + 1}")

    @property
    def k(self):
        return len(self.A)

    @property
    def ctx(self):
        return self.M[0].ctx

    def last(self):
        """``M_{k+1}``."""
        t = self.tail
        if isinstance(t, ScalarTail):
            return LinOp.scalar(self.ctx, t.f)
        return t.c * t.B

    def all_M(self):
        """``[M_0, M_1, ..., M_{k+1}]``."""
        cached = self.__dict__.get("_all_M")
        if cached is None:
            cached = [None, *self.M, self.last()]
            cached[0] = self.A[0] * cached[1] + cached[2]
            object.__setattr__(self, "_all_M", cached)
        return list(cached)


def type1_build(C, M, f):
    """Type I transformation of ``L = C*M + f``."""
    f = M.ctx.coerce(f)
    if f.is_zero():
        raise ZeroF("Type I needs a nonzero f")
    if C.is_zero() or M.is_zero():
        raise ZeroOperator("C and M must be nonzero")
    N = op_conjugate(M, f.inverse())
    q = DTQuad(C * M + f, N * C + f, M, N)
    assert dt_verify(q)
    return q


def type1_inverse(C, M, f):
    f = M.ctx.coerce(f)
    if f.is_zero():
        raise ZeroF("Type I needs a nonzero f")
    g = -f.inverse()
    A = LinOp.scalar(M.ctx, g)
    return InverseWitness(g * C, C * g, A, A)


def continued_build(ch):
    """Returns the transformation ``(M_1, N_1): M_0 -> N_0`` and ``[N_0, ..., N_{k+1}]``."""
    cached = ch.__dict__.get("_built")
    if cached is not None:
        return cached[0], list(cached[1])
    k = ch.k
    ms = ch.all_M()
    t = ch.tail
    g = t.f if isinstance(t, ScalarTail) else t.c
    ns = [None] * (k + 2)
    ns[k + 1] = ms[k + 1]
    ns[k] = op_conjugate(ms[k], g.inverse())
    for i in range(k, 0, -1):
        ns[i - 1] = ns[i] * ch.A[i - 1] + ns[i + 1]
    q = DTQuad(ms[0], ns[0], ms[1], ns[1])
    assert dt_verify(q)
    object.__setattr__(ch, "_built", (q, tuple(ns)))
    return q, ns


def continuant_sequences(ch):
    """``P, P', R, R'`` indexed ``0..k``.

    ``P_{-1} = 0, P_0 = 1, P_{i+1} = P_i*A_{i+1} + P_{i-1}``; ``P'`` multiplies on
    the other side. ``R`` and ``R'`` obey the same recursions from
    ``R_0 = 0, R_1 = 1``.
    """
    ctx, A, k = ch.ctx, ch.A, ch.k
    zero, one = LinOp.zero(ctx), LinOp.one(ctx)
    P, Pp = [zero, one], [zero, one]
    for i in range(k):
        P.append(P[-1] * A[i] + P[-2])
        Pp.append(A[i] * Pp[-1] + Pp[-2])
    R, Rp = [zero, one], [zero, one]
    for i in range(1, k):
        R.append(R[-1] * A[i] + R[-2])
        Rp.append(A[i] * Rp[-1] + Rp[-2])
    return {"P": P[1:], "Pp": Pp[1:], "R": R, "Rp": Rp}


def continuant_identities(ch):
    """Checks of the continuant identities along the chain, as ``{name: bool}``."""
    seq = continuant_sequences(ch)
    P, Pp, R, Rp = seq["P"], seq["Pp"], seq["R"], seq["Rp"]
    ms = ch.all_M()
    k = ch.k
    out = {
        "P_i P'_{i+1} = P_{i+1} P'_i": all(P[i] * Pp[i + 1] == P[i + 1] * Pp[i] for i in range(k)),
        "M_0 = P_i M_i + P_{i-1} M_{i+1}": all(
            ms[0] == P[i] * ms[i] + (P[i - 1] * ms[i + 1] if i else LinOp.zero(ch.ctx))
            for i in range(k + 1)
        ),
        "M_1 = R_i M_i + R_{i-1} M_{i+1}": all(
            ms[1] == R[i] * ms[i] + R[i - 1] * ms[i + 1] for i in range(1, k + 1)
        ),
        "P'_i R_i = R'_i P_i": all(Pp[i] * R[i] == Rp[i] * P[i] for i in range(k + 1)),
    }
    sign = 1
    ok1 = ok2 = True
    for i in range(1, k + 1):
        sign = -sign
        ok1 &= Pp[i] * R[i - 1] == Rp[i] * P[i - 1] + sign
        ok2 &= R[i - 1] * Pp[i] == R[i] * Pp[i - 1] + sign
    out["P'_i R_{i-1} = R'_i P_{i-1} + (-1)^i"] = ok1
    out["R_{i-1} P'_i = R_i P'_{i-1} + (-1)^i"] = ok2
    return out


def continued_inverse(ch, check=True):
    """Explicit inverse of a continued Type I transformation.

    Returns ``(witness, sequences)``. With ``check`` the witness is verified
    against the transformation built by :func:`continued_build`; callers that
    verify it themselves can skip the (costly) products.
    """
    if not isinstance(ch.tail, ScalarTail):
        raise NotScalarTail("inverses are only constructed for scalar tails")
    k = ch.k
    seq = continuant_sequences(ch)
    P, Pp, R, Rp = seq["P"], seq["Pp"], seq["R"], seq["Rp"]
    ms = ch.all_M()
    for i in range(k):
        assert P[i] * Pp[i + 1] == P[i + 1] * Pp[i]
    assert ms[0] == P[k] * ms[k] + P[k - 1] * ms[k + 1]
    assert Pp[k] * R[k] == Rp[k] * P[k]
    finv = ch.tail.f.inverse()
    if k % 2:
        finv = -finv
    w = InverseWitness(finv * Pp[k], P[k] * finv, finv * Rp[k], R[k] * finv)
    if check:
        q, _ = continued_build(ch)
        assert dt_verify_inverse(q, w)
    return w, seq


def seed_transformation(ch):
    """``(M_k, c M_k c^{-1}): c*B -> c*B`` for a commuting tail."""
    if not isinstance(ch.tail, CommutingTail):
        raise WrongShape("the chain has a scalar tail")
    cB = ch.last()
    Mk = ch.M[-1]
    q = DTQuad(cB, cB, Mk, op_conjugate(Mk, ch.tail.c.inverse()))
    assert dt_verify(q)
    return q


def seed_inverse_check(ch, w):
    """Does ``w`` invert the seed transformation of a continued Wronskian chain?"""
    return dt_verify_inverse(seed_transformation(ch), w)


def kernel_meet_trivial(ch, phi):
    """For ``phi`` killed by both ``M_0`` and ``M_1``, walk the chain down.

    Each step gives ``M_{i+1}[phi] = M_{i-1}[phi] - A_i[M_i[phi]] = 0``, so a
    scalar tail forces ``f*phi = 0``. Returns True when ``phi`` is outside the
    intersection or is zero.
    """
    phi = ch.ctx.coerce(phi)
    ms = ch.all_M()
    if not (op_apply(ms[0], phi).is_zero() and op_apply(ms[1], phi).is_zero()):
        return True
    for i in range(1, ch.k + 1):
        value = op_apply(ms[i - 1], phi) - op_apply(ch.A[i - 1], op_apply(ms[i], phi))
        assert value == op_apply(ms[i + 1], phi)
        if not value.is_zero():
            return True
    if isinstance(ch.tail, ScalarTail):
        return phi.is_zero()
    return True


def decompose_xxy(L, x="x", y="y"):
    """Two-step chain for ``L = a001 Dxxy + a00 Dxx + a01 Dxy + a0 Dx + a1 Dy + a``.

    Writes ``L = C*M + F`` and ``M = A*F + f`` with ``C = g Dy + h``,
    ``A = b Dx + c``, ``F = p Dx + q`` under the normalisation ``b*p = 1``.
    """
    ctx = L.ctx
    ix, iy = ctx.check_var(x), ctx.check_var(y)
    n = len(ctx.variables)

    def mi(ex, ey):
        out = [0] * n
        out[ix] += ex
        out[iy] += ey
        return tuple(out)

    shape = {mi(2, 1), mi(2, 0), mi(1, 1), mi(1, 0), mi(0, 1), mi(0, 0)}
    if set(L.terms) - shape:
        raise WrongShape(f"{L} has terms outside the D{x}{x}{y} shape")
    a001, a00, a01 = L.coeff(mi(2, 1)), L.coeff(mi(2, 0)), L.coeff(mi(1, 1))
    a0, a1, a = L.coeff(mi(1, 0)), L.coeff(mi(0, 1)), L.coeff(mi(0, 0))
    if a001.is_zero():
        raise ZeroLeading(f"the D{x}{x}{y} coefficient vanishes")
    g, h = a001, a00
    r, s = a01 / g, a1 / g
    p = a0 - h * r - g * r.derive(y)
    q = a - h * s - g * s.derive(y)
    if p.is_zero():
        raise SingularP("p vanishes, so b = 1/p is undefined")
    b = p.inverse()
    c = (r - b * q - b * p.derive(x)) / p
    f = s - c * q - b * q.derive(x)
    if f.is_zero():
        raise ZeroF("the decomposition ends in f = 0")
    Dx, Dy = LinOp.d(ctx, x), LinOp.d(ctx, y)
    C = g * Dy + h
    A = b * Dx + c
    F = p * Dx + q
    ch = Chain((C, A), (A * F + f, F), ScalarTail(f))
    assert continued_build(ch)[0].L == L
    return ch


def ganzha_omega(M, H, hint=None):
    """``omega`` with ``-[M, H] = omega * H``.

    Direct when ``H`` is a nonzero element of K; from ``omega = c M c^{-1} - M``
    when ``hint = (c, B)`` gives ``H = -c*B`` with ``[M, B] = 0``; otherwise by
    exact right division.
    """
    target = -op_commutator(M, H)
    if H.is_scalar() and not H.is_zero():
        omega = target * LinOp.scalar(M.ctx, H.scalar_value().inverse())
    elif hint is not None:
        c, B = hint
        c = M.ctx.coerce(c)
        if H != -(c * B):
            raise NotDifferential("hint does not match H = -c*B")
        if not op_commutator(M, B).is_zero():
            raise NonCommuting("[M, B] != 0")
        omega = op_conjugate(M, c.inverse()) - M
    else:
        omega = None if H.is_zero() else op_right_divide(target, H)
        if omega is None:
            raise NotDifferential("-[M, H] H^{-1} is not a differential operator")
    assert target == omega * H
    return omega


def principal_symbols_agree(ch):
    _, ns = continued_build(ch)
    ms = ch.all_M()
    return all(op_symbol(ns[i]) == op_symbol(ms[i]) for i in range(ch.k + 2))
