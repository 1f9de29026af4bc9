"""Laplace transformations of ``L = Dx*Dy + a*Dx + b*Dy + c``.

Only the x-direction is written out. The y-direction is the same formula
after exchanging the roles of x and y (which exchanges a with b and the
invariant k with h).
"""

from dataclasses import dataclass

from .dtcore import DTQuad, InverseWitness, dt_compose, dt_verify, dt_verify_inverse
from .errors import NoVerifiedCandidate, WrongShape, ZeroInvariant
from .opring import LinOp, op_conjugate


@dataclass(frozen=True)
class Schrodinger2D:
    a: object
    b: object
    c: object
    x: str = "x"
    y: str = "y"

    @property
    def ctx(self):
        return self.a.ctx

    def to_op(self):
        ctx = self.ctx
        Dx, Dy = LinOp.d(ctx, self.x), LinOp.d(ctx, self.y)
        return Dx * Dy + self.a * Dx + self.b * Dy + self.c

    @classmethod
    def from_op(cls, L, x="x", y="y"):
        ctx = L.ctx
        n = len(ctx.variables)
        ix, iy = ctx.check_var(x), ctx.check_var(y)

        def mi(ex, ey):
            out = [0] * n
            out[ix] += ex
            out[iy] += ey
            return tuple(out)

        allowed = {mi(1, 1), mi(1, 0), mi(0, 1), mi(0, 0)}
        extra = set(L.terms) - allowed
        if extra or L.coeff(mi(1, 1)) != 1:
            raise WrongShape(f"{L} is not of the form D{x}*D{y} + a*D{x} + b*D{y} + c")
        return cls(L.coeff(mi(1, 0)), L.coeff(mi(0, 1)), L.coeff(mi(0, 0)), x, y)

    def swapped(self):
        return Schrodinger2D(self.b, self.a, self.c, self.y, self.x)


@dataclass(frozen=True)
class LaplaceInvariants:
    h: object
    k: object


def laplace_invariants(s):
    ab = s.a * s.b
    return LaplaceInvariants(h=s.a.derive(s.x) + ab - s.c, k=s.b.derive(s.y) + ab - s.c)


def _oriented(s, direction):
    if direction == s.x:
        return s, "k"
    if direction == s.y:
        return s.swapped(), "h"
    raise ValueError(f"direction must be {s.x!r} or {s.y!r}, got {direction!r}")


def _as_schrodinger(q_or_s):
    if isinstance(q_or_s, Schrodinger2D):
        return q_or_s
    if isinstance(q_or_s, DTQuad):
        return Schrodinger2D.from_op(q_or_s.L)
    return Schrodinger2D.from_op(q_or_s)


def laplace_transform(s, direction="x"):
    """The Laplace transformation in ``direction``; returns a verified quad."""
    t, which = _oriented(s, direction)
    # in oriented coordinates the transformation always runs along t.x
    k = laplace_invariants(t).k
    if k.is_zero():
        raise ZeroInvariant(which)
    ctx = t.ctx
    Du, Dw = LinOp.d(ctx, t.x), LinOp.d(ctx, t.y)
    lk = k.derive(t.x) / k
    b1 = t.b - lk
    M = Du + t.b
    N = Du + b1
    L1 = Du * Dw + t.a * Du + b1 * Dw + (t.a * t.b - t.a * lk - k + t.a.derive(t.x))
    q = DTQuad(s.to_op(), L1, M, N)
    assert dt_verify(q)
    return q


def laplace_inverse_candidates(s, direction="x"):
    t, which = _oriented(s, direction)
    k = laplace_invariants(t).k
    if k.is_zero():
        raise ZeroInvariant(which)
    ctx = t.ctx
    Dw = LinOp.d(ctx, t.y)
    kinv = k.inverse()
    out = []
    for sign in (1, -1):
        g = kinv * sign
        Mp = g * (Dw + t.a)
        Np = g * (Dw + t.a - k.derive(t.y) / k)
        A = LinOp.scalar(ctx, g)
        out.append((sign, InverseWitness(Mp, Np, A, A)))
    return out


def laplace_inverse(q, direction="x"):
    """Inverse witness of a Laplace transformation.

    Both sign conventions for the prefactor are built; the one passing all
    witness identities is returned.
    """
    s = Schrodinger2D.from_op(q.L)
    for _, w in laplace_inverse_candidates(s, direction):
        if dt_verify_inverse(q, w):
            return w
    raise NoVerifiedCandidate("no sign candidate satisfies the inverse identities")


def laplace_compose_check(s, first="x"):
    """Compose the two Laplace transformations; returns ``(Mhat, gauge)``.

    Asserts ``Mhat = inv + L`` and that the composite lands on ``L^gauge``
    with ``gauge = 1/inv``, where ``inv`` is k when starting along x, h otherwise.
    """
    inv = laplace_invariants(s)
    if first == s.x:
        second, first_inv = s.y, inv.k
    elif first == s.y:
        second, first_inv = s.x, inv.h
    else:
        raise ValueError(f"first must be {s.x!r} or {s.y!r}")
    if inv.h.is_zero() or inv.k.is_zero():
        raise ZeroInvariant("h" if inv.h.is_zero() else "k")
    q1 = laplace_transform(s, first)
    s1 = Schrodinger2D.from_op(q1.L1, s.x, s.y)
    q2 = laplace_transform(s1, second)
    comp = dt_compose(q1, q2)
    L = s.to_op()
    gauge = first_inv.inverse()
    assert comp.M == L + first_inv
    assert comp.L1 == op_conjugate(L, gauge)
    return comp.M, gauge
