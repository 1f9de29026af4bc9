"""Linear partial differential operators over K in normal form.

An operator is a finite sum ``c_alpha * D^alpha`` with every coefficient to
the left of the derivations. Multi-indices are tuples aligned with
``ctx.variables``. Products are normalised with the Leibniz rule

    D^alpha * b = sum_{gamma <= alpha} binom(alpha, gamma) * b^(gamma) * D^(alpha - gamma)
"""

from itertools import product
from math import comb
from operator import add as _iadd

from .errors import ContextMismatch, DivisionByZero, SingularWronskian, ZeroOperator
from .kfield import FieldElement, determinant, linear_solve

NEG_INF = float("-inf")


def _sub_indices(alpha):
    return product(*(range(e + 1) for e in alpha))


def _binom(alpha, gamma):
    out = 1
    for a, g in zip(alpha, gamma):
        if g:
            out *= comb(a, g)
    return out


def _add_into(out, mi, value):
    prev = out.get(mi)
    out[mi] = value if prev is None else prev + value


def _grlex_desc(mi):
    return (-sum(mi), tuple(-e for e in mi))


class LinOp:
    """Element of ``K[D_v1, ..., D_vn]``; immutable, zero coefficients never stored."""

    __slots__ = ("ctx", "terms", "_hash")

    def __init__(self, ctx, terms=None):
        n = len(ctx.variables)
        clean = {}
        for mi, c in (terms or {}).items():
            mi = tuple(mi)
            if len(mi) != n or any(e < 0 for e in mi):
                raise ValueError(f"bad multi-index {mi} for variables {ctx.variables}")
            c = ctx.coerce(c)
            if not c.is_zero():
                clean[mi] = c
        self.ctx = ctx
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, ctx, terms):
        self = object.__new__(cls)
        self.ctx = ctx
        self.terms = {mi: c for mi, c in terms.items() if not c.is_zero()}
        self._hash = None
        return self

    # ------------------------------------------------------------ constructors

    @classmethod
    def zero(cls, ctx):
        return cls._raw(ctx, {})

    @classmethod
    def one(cls, ctx):
        return cls.scalar(ctx, 1)

    @classmethod
    def scalar(cls, ctx, f):
        return cls._raw(ctx, {(0,) * len(ctx.variables): ctx.coerce(f)})

    @classmethod
    def d(cls, ctx, v, power=1):
        """The derivation ``D_v`` raised to ``power``."""
        i = ctx.check_var(v)
        mi = [0] * len(ctx.variables)
        mi[i] = power
        return cls._raw(ctx, {tuple(mi): ctx.one})

    @classmethod
    def monomial(cls, ctx, mi, coeff=1):
        return cls._raw(ctx, {tuple(mi): ctx.coerce(coeff)})

    # -------------------------------------------------------------- inspection

    @property
    def order(self):
        if not self.terms:
            return NEG_INF
        return max(sum(mi) for mi in self.terms)

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_scalar(self):
        """True for operators of order 0 or the zero operator (elements of K)."""
        return all(not any(mi) for mi in self.terms)

    def scalar_value(self):
        if not self.is_scalar():
            raise ValueError(f"{self} is not an element of K")
        return self.coeff((0,) * len(self.ctx.variables))

    def coeff(self, mi):
        c = self.terms.get(tuple(mi))
        return self.ctx.zero if c is None else c

    def sorted_terms(self):
        """Terms in descending graded-lex order (the rendering order)."""
        return sorted(self.terms.items(), key=lambda item: _grlex_desc(item[0]))

    # -------------------------------------------------------------- arithmetic

    def _coerce(self, other):
        if isinstance(other, LinOp):
            if other.ctx is not self.ctx:
                raise ContextMismatch("operators from different contexts")
            return other
        if isinstance(other, (FieldElement, int)) or hasattr(other, "denominator"):
            return LinOp.scalar(self.ctx, other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        for mi, c in other.terms.items():
            _add_into(out, mi, c)
        return LinOp._raw(self.ctx, out)

    __radd__ = __add__

    def __neg__(self):
        return LinOp._raw(self.ctx, {mi: -c for mi, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return op_mul(self, other)

    def __rmul__(self, other):
        # a scalar on the left only scales coefficients
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return op_mul(other, self)

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            if not self.is_scalar():
                raise ValueError("negative powers exist only for elements of K")
            return LinOp.scalar(self.ctx, self.scalar_value() ** n)
        result = LinOp.one(self.ctx)
        for _ in range(n):
            result = op_mul(result, self)
        return result

    def __eq__(self, other):
        if not isinstance(other, LinOp):
            other = self._coerce(other) if isinstance(other, (FieldElement, int)) else None
            if other is None:
                return NotImplemented
        return self.ctx is other.ctx and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    # ----------------------------------------------------------- conveniences

    def apply(self, f):
        return op_apply(self, f)

    def __call__(self, f):
        return op_apply(self, f)

    def symbol(self):
        return op_symbol(self)

    def conjugate(self, g):
        return op_conjugate(self, g)

    def is_free_of(self, v):
        """No ``D_v`` and no coefficient depending on ``v`` (the t-free test)."""
        i = self.ctx.check_var(v)
        return all(mi[i] == 0 and c.derive(v).is_zero() for mi, c in self.terms.items())

    def __str__(self):
        return format_operator(self)

    def __repr__(self):
        return f"LinOp({format_operator(self)})"


class SymbolPoly:
    """Principal symbol: a homogeneous commutative polynomial in ``xi_v``."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx, terms):
        self.ctx = ctx
        self.terms = {mi: c for mi, c in terms.items() if not c.is_zero()}

    @property
    def degree(self):
        return sum(next(iter(self.terms))) if self.terms else NEG_INF

    def __mul__(self, other):
        out = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                _add_into(out, tuple(x + y for x, y in zip(a, b)), ca * cb)
        return SymbolPoly(self.ctx, out)

    def __eq__(self, other):
        if not isinstance(other, SymbolPoly):
            return NotImplemented
        return self.ctx is other.ctx and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for mi, c in sorted(self.terms.items(), key=lambda item: _grlex_desc(item[0])):
            xi = "*".join(
                f"xi_{v}" if e == 1 else f"xi_{v}^{e}" for v, e in zip(self.ctx.variables, mi) if e
            )
            cs = f"({c})" if c.is_sum() else str(c)
            parts.append(xi if c == 1 else f"{cs}*{xi}" if xi else cs)
        return " + ".join(parts)

    def __repr__(self):
        return f"SymbolPoly({self})"


# ------------------------------------------------------------------ operations


def op_mul(A, B):
    """Normal-form product ``A * B``."""
    ctx = A.ctx
    if B.ctx is not ctx:
        raise ContextMismatch("operators from different contexts")
    if not A.terms or not B.terms:
        return LinOp.zero(ctx)
    plan = []
    needed = set()
    for alpha, a in A.terms.items():
        subs = []
        for gamma in _sub_indices(alpha):
            shift = tuple(x - g for x, g in zip(alpha, gamma))
            subs.append((gamma, _binom(alpha, gamma), shift))
            needed.add(gamma)
        plan.append((a, subs))
    # derivatives may create jets, so take them all before fixing the ring
    raw = {beta: {g: b.partial(g) for g in needed} for beta, b in B.terms.items()}
    R = ctx._ring
    partials = []
    for beta, parts in raw.items():
        nd = {}
        for g, p in parts.items():
            if not p.is_zero():
                nd[g] = p._in(R)
        partials.append((beta, nd))
    # work on raw numerator/denominator pairs; summands with equal
    # denominators are merged, and each group is cancelled once at the end
    out = {}
    for a, subs in plan:
        n1, d1 = a._in(R)
        d1_one = d1.is_one()
        for beta, nd in partials:
            for gamma, k, shift in subs:
                pair = nd.get(gamma)
                if pair is None:
                    continue
                n2, d2 = pair
                num = n1 * n2
                if k != 1:
                    num = num * k
                den = d2 if d1_one else d1 if d2.is_one() else d1 * d2
                mi = tuple(map(_iadd, shift, beta))
                groups = out.get(mi)
                if groups is None:
                    out[mi] = [[den, num]]
                    continue
                for grp in groups:
                    if grp[0] is den or grp[0] == den:
                        grp[1] = grp[1] + num
                        break
                else:
                    groups.append([den, num])
    terms = {}
    for mi, groups in out.items():
        total = None
        for den, num in groups:
            if num.is_zero():
                continue
            piece = FieldElement._make(ctx, num, den)
            total = piece if total is None else total + piece
        if total is not None:
            terms[mi] = total
    return LinOp._raw(ctx, terms)


def op_add(A, B):
    return A + B


def op_apply(A, f):
    """Apply ``A`` to a field element ``f``."""
    f = A.ctx.coerce(f)
    total = A.ctx.zero
    for mi, c in A.terms.items():
        total = total + c * f.partial(mi)
    return total


def op_symbol(A):
    if A.is_zero():
        raise ZeroOperator("the zero operator has no principal symbol")
    top = A.order
    return SymbolPoly(A.ctx, {mi: c for mi, c in A.terms.items() if sum(mi) == top})


def op_conjugate(A, g):
    """Gauge transformation ``g^{-1} * A * g``."""
    g = A.ctx.coerce(g)
    if g.is_zero():
        raise DivisionByZero("gauge by zero")
    return op_mul(LinOp.scalar(A.ctx, g.inverse()), op_mul(A, LinOp.scalar(A.ctx, g)))


def op_commutator(A, B):
    return op_mul(A, B) - op_mul(B, A)


def op_tdivide(L, t):
    """Split ``L = A * D_t + Lp`` with ``Lp`` free of ``D_t``."""
    i = L.ctx.check_var(t)
    a_terms, rest = {}, {}
    for mi, c in L.terms.items():
        if mi[i]:
            a_terms[mi[:i] + (mi[i] - 1,) + mi[i + 1:]] = c
        else:
            rest[mi] = c
    return LinOp._raw(L.ctx, a_terms), LinOp._raw(L.ctx, rest)


def _indices_up_to(n, d):
    for total in range(d + 1):
        for mi in product(range(total + 1), repeat=n):
            if sum(mi) == total:
                yield mi


def op_right_divide(X, L):
    """Some ``A`` with ``X = A * L``, or ``None`` if ``L`` is not a right factor.

    Orders add in ``K[D]``, so an ansatz of order ``ord X - ord L`` with unknown
    coefficients is exhaustive; the coefficients come from coefficient matching.
    """
    ctx = L.ctx
    if L.is_zero():
        raise ZeroOperator("division by the zero operator")
    if X.is_zero():
        return LinOp.zero(ctx)
    d = X.order - L.order
    if d < 0:
        return None
    if L.is_scalar():
        return op_mul(X, LinOp.scalar(ctx, L.scalar_value().inverse()))
    basis = list(_indices_up_to(len(ctx.variables), d))
    columns = [op_mul(LinOp.monomial(ctx, beta), L) for beta in basis]
    rows = set(X.terms)
    for col in columns:
        rows.update(col.terms)
    rows = sorted(rows, key=_grlex_desc)
    system = [[col.coeff(mi) for col in columns] for mi in rows]
    rhs = [X.coeff(mi) for mi in rows]
    u = linear_solve(system, rhs, ctx)
    if u is None:
        return None
    A = LinOp._raw(ctx, dict(zip(basis, u)))
    assert op_mul(A, L) == X
    return A


def wronskian_operator(seeds, v):
    """Monic operator in ``D_v`` of order ``len(seeds)`` whose kernel holds every seed.

    ``M(f) = W(f_1, ..., f_m, f) / W(f_1, ..., f_m)``, expanded along the last
    column of the Wronskian matrix.
    """
    if not seeds:
        raise ValueError("at least one seed is required")
    ctx = seeds[0].ctx
    ctx.check_var(v)
    m = len(seeds)
    rows = [[s] for s in seeds]
    for _ in range(m):
        for r in rows:
            r.append(r[-1].derive(v))
    # rows[j][i] = i-th derivative of seed j; matrix rows are derivative orders
    wmat = [[rows[j][i] for j in range(m)] for i in range(m + 1)]
    w = determinant(wmat[:m], ctx)
    if w.is_zero():
        raise SingularWronskian("seeds are linearly dependent (zero Wronskian)")
    i = ctx.check_var(v)
    terms = {}
    winv = w.inverse()
    for j in range(m + 1):
        minor = wmat[:j] + wmat[j + 1:]
        c = determinant(minor, ctx) * winv
        if (j + m) % 2:
            c = -c
        mi = [0] * len(ctx.variables)
        mi[i] = j
        terms[tuple(mi)] = c
    return LinOp._raw(ctx, terms)


# ------------------------------------------------------------------- rendering


def _dstr(ctx, mi):
    return "*".join(
        f"D{v}" if e == 1 else f"D{v}^{e}" for v, e in zip(ctx.variables, mi) if e
    )


def format_operator(A):
    """Canonical text, e.g. ``"x*Dx^2*Dy + (2+x)*Dy"``; parses back to ``A``."""
    if A.is_zero():
        return "0"
    items = A.sorted_terms()
    pieces = []
    for mi, c in items:
        ds = _dstr(A.ctx, mi)
        if not ds:
            s = f"({c})" if c.is_sum() and len(items) > 1 else str(c)
        elif c == 1:
            s = ds
        elif c == -1:
            s = "-" + ds
        else:
            s = (f"({c})" if c.is_sum() else str(c)) + "*" + ds
        if not pieces:
            pieces.append(s)
        elif s.startswith("-"):
            pieces.append(" - " + s[1:])
        else:
            pieces.append(" + " + s)
    return "".join(pieces)
