"""The coefficient field K: rational functions over QQ with commuting derivations.

Three kinds of symbols generate K over QQ, all algebraically independent:

* *variables*, each carrying its own derivation ``d/dv``;
* *adjoined* transcendentals with a user-declared derivative table
  (``E`` with ``E_y = 3*E`` stands in for ``exp(3*y)``);
* *jets* of generic functions: ``a`` and every partial derivative ``a_x``,
  ``a_xy``, ... which are created on first use.

Elements are kept in canonical form: numerator and denominator are coprime
integer polynomials (FLINT ``fmpz_mpoly``, graded lex order) and the
leading coefficient of the denominator is positive. Equality is identity of
canonical forms, so zero testing is exact.
"""

import threading
from fractions import Fraction
from math import gcd
from numbers import Rational

from flint import fmpz_mpoly_ctx

from .errors import (
    ContextMismatch,
    DivisionByZero,
    InconsistentDerivations,
    UnknownSymbol,
    UnknownVariable,
)

_RINGS = {}
_RING_INFO = {}
_RINGS_LOCK = threading.Lock()


def _ring(names):
    key = tuple(names)
    R = _RINGS.get(key)
    if R is None:
        with _RINGS_LOCK:
            R = _RINGS.get(key)
            if R is None:
                R = fmpz_mpoly_ctx.get(key, "deglex")
                _RING_INFO[id(R)] = (
                    {name: i for i, name in enumerate(key)},
                    key,
                    R.constant(0),
                    R.constant(1),
                )
                _RINGS[key] = R
    return R


def _index(R):
    return _RING_INFO[id(R)][0]


def _names(R):
    return _RING_INFO[id(R)][1]


def _zero(R):
    return _RING_INFO[id(R)][2]


def _one(R):
    return _RING_INFO[id(R)][3]


def _gen(R, name):
    index = _index(R)
    if name not in index:
        raise UnknownSymbol(f"unknown symbol {name!r}")
    return R.gen(index[name])


def _used_gens(*polys):
    used = set()
    for p in polys:
        used.update(i for i, d in enumerate(p.degrees()) if d > 0)
    return sorted(used)


def _is_one(p):
    return p.is_one()


def _cofactors(f, g):
    h = f.gcd(g)
    if h.is_one():
        return h, f, g
    return h, f / h, g / h


def _cancel(num, den):
    if den.is_zero():
        raise DivisionByZero("zero denominator")
    R = den.context()
    if num.is_zero():
        return num, _one(R)
    if den.is_one():
        return num, den
    _, num, den = _cofactors(num, den)
    if den.leading_coefficient() < 0:
        num, den = -num, -den
    return num, den


def _valid_name(name):
    return all(ch.isalnum() or ch == "_" for ch in name) and name[:1].isalpha()


class FieldContext:
    """Symbol registry and derivation rules of K.

    ``variables`` fixes the derivations (and the order of multi-indices used by
    the operator ring). ``adjoined`` maps a symbol name to its derivative table
    ``{variable: expression}``; missing entries mean derivative zero.
    ``generic`` lists generic-function names, optionally as a mapping
    ``{name: variables it depends on}`` (default: all variables).
    """

    def __init__(self, variables, adjoined=None, generic=None):
        self.variables = tuple(variables)
        if not self.variables:
            raise ValueError("at least one variable is required")
        adjoined = dict(adjoined or {})
        if isinstance(generic, dict):
            deps = {g: tuple(vs) for g, vs in generic.items()}
        else:
            deps = {g: self.variables for g in (generic or ())}

        names = list(self.variables) + list(adjoined) + list(deps)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate symbol names in {names}")
        for name in names:
            if not _valid_name(name):
                raise ValueError(f"invalid symbol name {name!r}")
            if name.startswith("D") and name[1:] in self.variables:
                raise ValueError(f"symbol {name!r} clashes with a derivation")
        for g in deps:
            if "_" in g:
                raise ValueError(f"generic function name {g!r} may not contain '_'")
            for v in deps[g]:
                if v not in self.variables:
                    raise UnknownVariable(f"{g} depends on unknown variable {v!r}")
        for name in list(self.variables) + list(adjoined):
            base = name.split("_", 1)[0]
            if "_" in name and base in deps:
                raise ValueError(f"symbol {name!r} collides with jets of {base!r}")

        self.adjoined_names = tuple(sorted(adjoined))
        self.generic = deps
        self._index = {v: i for i, v in enumerate(self.variables)}
        self._lock = threading.RLock()
        self._jet_name = {}
        self._jet_of = {}
        self._dsym_cache = {}
        for g in deps:
            key = (g, (0,) * len(self.variables))
            self._jet_name[key] = g
            self._jet_of[g] = key
        self._kind = {v: "variable" for v in self.variables}
        self._kind.update({a: "adjoined" for a in adjoined})
        self._rebuild_ring(list(deps))

        from .parsing import parse_field

        tables = {}
        for name, table in adjoined.items():
            tables[name] = {}
            for v, expr in dict(table).items():
                if v not in self._index:
                    raise UnknownVariable(f"derivative table of {name} names unknown variable {v!r}")
                tables[name][v] = expr if isinstance(expr, FieldElement) else parse_field(str(expr), self)
        self._tables = tables
        self._check_commuting()

    # ------------------------------------------------------------------ symbols

    def _rebuild_ring(self, jets=None):
        if jets is not None:
            self._jets = jets
        order = sorted(self.variables) + list(self.adjoined_names) + sorted(self._jets)
        self._symbols = tuple(order)
        self._ring = _ring(order)

    def _jet_label(self, base, mi):
        if not any(mi):
            return base
        return base + "_" + "".join(v * e for v, e in zip(self.variables, mi))

    def jet(self, base, mi):
        """Symbol for the partial derivative ``mi`` of generic function ``base``."""
        key = (base, tuple(mi))
        name = self._jet_name.get(key)
        if name is None:
            if base not in self.generic:
                raise UnknownSymbol(f"{base!r} is not a generic function")
            with self._lock:
                name = self._jet_name.get(key)
                if name is None:
                    name = self._jet_label(*key)
                    if name in self._kind or name in self._jet_of:
                        raise ContextMismatch(f"jet name {name!r} clashes with another symbol")
                    # publish the grown ring before the name becomes visible
                    self._rebuild_ring(self._jets + [name])
                    self._jet_of[name] = key
                    self._jet_name[key] = name
        return self.symbol(name)

    def _resolve_jet(self, name):
        base, sep, suffix = name.partition("_")
        if not sep or base not in self.generic or not suffix:
            return None
        mi = self._split_suffix(suffix)
        if mi is None:
            return None
        return base, mi

    def _split_suffix(self, suffix):
        # variable names may have several characters, so backtrack
        if not suffix:
            return (0,) * len(self.variables)
        for v in sorted(self.variables, key=len, reverse=True):
            if suffix.startswith(v):
                rest = self._split_suffix(suffix[len(v):])
                if rest is not None:
                    i = self._index[v]
                    return rest[:i] + (rest[i] + 1,) + rest[i + 1:]
        return None

    def has_symbol(self, name):
        return name in self._kind or name in self._jet_of or self._resolve_jet(name) is not None

    def symbol(self, name):
        """The field element for a registered symbol name (jets accepted)."""
        if name not in self._kind and name not in self._jet_of:
            jet = self._resolve_jet(name)
            if jet is None:
                raise UnknownSymbol(f"unknown symbol {name!r}")
            return self.jet(*jet)
        R = self._ring
        return FieldElement._raw(self, _gen(R, name), _one(R))

    def var(self, name):
        self.check_var(name)
        return self.symbol(name)

    def check_var(self, v):
        if v not in self._index:
            raise UnknownVariable(f"unknown variable {v!r}")
        return self._index[v]

    def var_index(self, v):
        return self.check_var(v)

    def symbol_kind(self, name):
        if name in self._kind:
            return self._kind[name]
        if self.has_symbol(name):
            return "jet"
        raise UnknownSymbol(f"unknown symbol {name!r}")

    def derivative_table(self, name):
        return dict(self._tables[name])

    @property
    def symbols(self):
        return self._symbols

    # ---------------------------------------------------------------- constants

    def const(self, value):
        value = Fraction(value)
        R = self._ring
        return FieldElement._raw(self, R.constant(value.numerator), R.constant(value.denominator))

    @property
    def zero(self):
        return self.const(0)

    @property
    def one(self):
        return self.const(1)

    def coerce(self, value):
        if isinstance(value, FieldElement):
            if value.ctx is not self:
                raise ContextMismatch("field elements from different contexts")
            return value
        if isinstance(value, (int, Rational)):
            return self.const(value)
        if isinstance(value, str):
            return self.fe(value)
        raise TypeError(f"cannot coerce {type(value).__name__} into K")

    def fe(self, src):
        """Parse a field expression such as ``"x*(x-1)/(8*E)"``."""
        from .parsing import parse_field

        return parse_field(src, self)

    def op(self, src, bindings=None):
        """Parse an operator expression such as ``"Dx^2 + x*Dy"``."""
        from .parsing import parse_operator

        return parse_operator(src, self, bindings)

    # -------------------------------------------------------------- derivations

    def _dsym(self, name, v):
        """Derivative of a generator by ``v`` as a FieldElement, or None for 0."""
        key = (name, v)
        try:
            return self._dsym_cache[key]
        except KeyError:
            pass
        kind = self._kind.get(name)
        if kind == "variable":
            d = self.one if name == v else None
        elif kind == "adjoined":
            d = self._tables[name].get(v)
            if d is not None and d.is_zero():
                d = None
        else:
            base, mi = self._jet_of[name]
            if v not in self.generic[base]:
                d = None
            else:
                i = self._index[v]
                d = self.jet(base, mi[:i] + (mi[i] + 1,) + mi[i + 1:])
        self._dsym_cache[key] = d
        return d

    def _poly_derive(self, p, v):
        names = _names(p.context())
        parts = []
        for i in _used_gens(p):
            d = self._dsym(names[i], v)
            if d is not None:
                parts.append((p.derivative(i), d))
        R = self._ring
        if not parts:
            return FieldElement._raw(self, _zero(R), _one(R))
        if all(d._is_poly() for _, d in parts):
            total = _zero(R)
            for dp, d in parts:
                total = total + dp.project_to_context(R) * d._in(R)[0]
            return FieldElement._raw(self, total, _one(R))
        total = self.zero
        for dp, d in parts:
            total = total + FieldElement._raw(self, dp.project_to_context(R), _one(R)) * d
        return total

    def _check_commuting(self):
        for name in self.adjoined_names:
            table = self._tables[name]
            for i, u in enumerate(self.variables):
                for w in self.variables[i + 1:]:
                    du = table.get(u, self.zero).derive(w)
                    dw = table.get(w, self.zero).derive(u)
                    if du != dw:
                        raise InconsistentDerivations(
                            f"d/d{w}(d{name}/d{u}) = {du} but d/d{u}(d{name}/d{w}) = {dw}"
                        )

    def __repr__(self):
        return (
            f"FieldContext(variables={list(self.variables)}, "
            f"adjoined={list(self.adjoined_names)}, generic={list(self.generic)})"
        )


class FieldElement:
    """Immutable element of K in canonical form."""

    __slots__ = ("ctx", "_nd", "_dcache", "_hash")

    def __init__(self, ctx, num, den=None):
        R = ctx._ring
        num = num.project_to_context(R)
        den = _one(R) if den is None else den.project_to_context(R)
        self.ctx = ctx
        self._nd = _cancel(num, den)
        self._dcache = {}
        self._hash = None

    @classmethod
    def _raw(cls, ctx, num, den):
        self = object.__new__(cls)
        self.ctx = ctx
        self._nd = (num, den)
        self._dcache = {}
        self._hash = None
        return self

    @classmethod
    def _make(cls, ctx, num, den):
        return cls._raw(ctx, *_cancel(num, den))

    def _in(self, R):
        num, den = self._nd
        if num.context() is not R:
            num, den = num.project_to_context(R), den.project_to_context(R)
            if R is self.ctx._ring:
                self._nd = (num, den)
        return num, den

    def _is_poly(self):
        return self._nd[1].is_one()

    @property
    def numerator(self):
        return self._in(self.ctx._ring)[0]

    @property
    def denominator(self):
        return self._in(self.ctx._ring)[1]

    def size(self):
        num, den = self._nd
        return len(num) + len(den)

    # -------------------------------------------------------------- predicates

    def is_zero(self):
        return self._nd[0].is_zero()

    def __bool__(self):
        return not self._nd[0].is_zero()

    def is_constant(self):
        num, den = self._nd
        return num.is_constant() and den.is_constant()

    def as_fraction(self):
        if not self.is_constant():
            raise ValueError(f"{self} is not a rational constant")
        num, den = self._nd
        top = 0 if num.is_zero() else int(num.leading_coefficient())
        return Fraction(top, int(den.leading_coefficient()))

    def free_symbols(self):
        num, den = self._nd
        names = _names(num.context())
        return {names[i] for i in _used_gens(num, den)}

    # -------------------------------------------------------------- arithmetic

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.ctx is not self.ctx:
                raise ContextMismatch("field elements from different contexts")
            return other
        if isinstance(other, (int, Rational)):
            return self.ctx.const(other)
        return None

    def _pair(self, other):
        R = self.ctx._ring
        return self._in(R), other._in(R), R

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        (n1, d1), (n2, d2), R = self._pair(other)
        if d1 == d2:
            if d1.is_one():
                return FieldElement._raw(self.ctx, n1 + n2, d1)
            return FieldElement._make(self.ctx, n1 + n2, d1)
        g, c1, c2 = _cofactors(d1, d2)
        return FieldElement._make(self.ctx, n1 * c2 + n2 * c1, d1 * c2)

    __radd__ = __add__

    def __neg__(self):
        num, den = self._nd
        return FieldElement._raw(self.ctx, -num, den)

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

    def scale(self, k):
        """Product with the integer ``k``."""
        num, den = self._nd
        if k == 0 or num.is_zero():
            R = num.context()
            return FieldElement._raw(self.ctx, _zero(R), _one(R))
        if den.is_one():
            return FieldElement._raw(self.ctx, num * k, den)
        g = gcd(k, int(den.content()))
        if g > 1:
            k //= g
            den = den / g
        return FieldElement._raw(self.ctx, num * k, den)

    def __mul__(self, other):
        if type(other) is int:
            return self.scale(other)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        (n1, d1), (n2, d2), R = self._pair(other)
        if n1.is_zero() or n2.is_zero():
            return FieldElement._raw(self.ctx, _zero(R), _one(R))
        if d1.is_one() and d2.is_one():
            return FieldElement._raw(self.ctx, n1 * n2, d1)
        if not d2.is_one():
            _, n1, d2 = _cofactors(n1, d2)
        if not d1.is_one():
            _, n2, d1 = _cofactors(n2, d1)
        num, den = n1 * n2, d1 * d2
        if den.leading_coefficient() < 0:
            num, den = -num, -den
        return FieldElement._raw(self.ctx, num, den)

    __rmul__ = __mul__

    def inverse(self):
        num, den = self._nd
        if num.is_zero():
            raise DivisionByZero("inverse of zero in K")
        if num.leading_coefficient() < 0:
            return FieldElement._raw(self.ctx, -den, -num)
        return FieldElement._raw(self.ctx, den, num)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        base = self if n >= 0 else self.inverse()
        num, den = base._nd
        return FieldElement._raw(self.ctx, num ** abs(n), den ** abs(n))

    # ------------------------------------------------------------- derivations

    def derive(self, v):
        """Partial derivative by the variable ``v``."""
        key = v
        cached = self._dcache.get(key)
        if cached is not None:
            return cached
        ctx = self.ctx
        ctx.check_var(v)
        num, den = self._nd
        dn = ctx._poly_derive(num, v)
        if den.is_constant():
            result = dn if den.is_one() else dn * FieldElement._raw(ctx, _one(den.context()), den)
        else:
            dd = ctx._poly_derive(den, v)
            R = ctx._ring
            n, d = self._in(R)
            if dn._is_poly() and dd._is_poly():
                result = FieldElement._make(ctx, dn._in(R)[0] * d - n * dd._in(R)[0], d * d)
            else:
                D = FieldElement._raw(ctx, d, _one(R))
                N = FieldElement._raw(ctx, n, _one(R))
                result = (dn * D - N * dd) / (D * D)
        self._dcache[key] = result
        return result

    def partial(self, mi):
        """Mixed partial derivative for a multi-index over ``ctx.variables``."""
        mi = tuple(mi)
        if not any(mi):
            return self
        cached = self._dcache.get(mi)
        if cached is not None:
            return cached
        i = next(j for j, e in enumerate(mi) if e)
        lower = mi[:i] + (mi[i] - 1,) + mi[i + 1:]
        result = self.partial(lower).derive(self.ctx.variables[i])
        self._dcache[mi] = result
        return result

    # --------------------------------------------------------------- identity

    def _key(self):
        num, den = self._nd
        names = _names(num.context())

        def named(p):
            return frozenset(
                (tuple((names[i], e) for i, e in enumerate(m) if e), int(c)) for m, c in p.terms()
            )

        return named(num), named(den)

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            if other.ctx is not self.ctx:
                return False
        else:
            other = self._coerce(other)
            if other is None:
                return NotImplemented
        (n1, d1), (n2, d2), _ = self._pair(other)
        return n1 == n2 and d1 == d2

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._key())
        return self._hash

    # --------------------------------------------------------------- printing

    def is_sum(self):
        """True when the text form has a top-level ``+``/``-`` (needs parens in products)."""
        num, den = self._nd
        return len(num) > 1 and den.is_one()

    def __str__(self):
        num, den = self._nd
        return _format_fraction(num, den)

    def __repr__(self):
        return f"FieldElement({self})"


def _monomial_sort_key(m):
    return (sum(m), tuple(-e for e in m))


def _format_monomial(names, m):
    parts = []
    for name, e in zip(names, m):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def _format_poly(p):
    if p.is_zero():
        return "0"
    names = _names(p.context())
    out = []
    for m, c in sorted(p.terms(), key=lambda t: _monomial_sort_key(t[0])):
        c = int(c)
        mono = _format_monomial(names, m)
        if not mono:
            term = str(c)
        elif c == 1:
            term = mono
        elif c == -1:
            term = "-" + mono
        else:
            term = f"{c}*{mono}"
        if out and not term.startswith("-"):
            out.append("+")
        out.append(term)
    return "".join(out)


def _is_single_factor(p):
    if len(p) != 1:
        return False
    (m, c), = p.terms()
    if not any(m):
        return c > 0
    return c == 1 and sum(1 for e in m if e) == 1


def _format_fraction(num, den):
    n = _format_poly(num)
    if den.is_one():
        return n
    if len(num) > 1:
        n = f"({n})"
    d = _format_poly(den)
    if not _is_single_factor(den):
        d = f"({d})"
    return f"{n}/{d}"


# ---------------------------------------------------------------- operations


def fe_arith(op, x, y):
    """Field operation ``op`` in {"add", "sub", "mul", "div"}."""
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise ValueError(f"unknown field operation {op!r}")


def fe_sum(items, ctx):
    """Sum of field elements; summands sharing a denominator are added first."""
    R = ctx._ring
    groups = []
    for x in items:
        n, d = x._in(R)
        if n.is_zero():
            continue
        for g in groups:
            if g[0] == d:
                g[1] = g[1] + n
                break
        else:
            groups.append([d, n])
    total = ctx.zero
    for d, n in groups:
        total = total + FieldElement._make(ctx, n, d)
    return total


def fe_derive(x, v):
    return x.derive(v)


def fe_is_zero(x):
    return x.is_zero()


def _pick_pivot(rows, col, start):
    best = None
    for i in range(start, len(rows)):
        e = rows[i][col]
        if not e.is_zero() and (best is None or e.size() < rows[best][col].size()):
            best = i
    return best


def linear_solve(system, rhs, ctx=None):
    """Solve ``system * u = rhs`` over K.

    Returns one solution (free unknowns set to zero) or ``None`` when the
    system is inconsistent.
    """
    m = len(system)
    n = len(system[0]) if m else 0
    if len(rhs) != m or any(len(row) != n for row in system):
        raise ValueError("inconsistent dimensions")
    if ctx is None:
        for row, b in zip(system, rhs):
            ctx = b.ctx if isinstance(b, FieldElement) else next(
                (e.ctx for e in row if isinstance(e, FieldElement)), None
            )
            if ctx is not None:
                break
    if ctx is None:
        return [] if n == 0 else None if any(rhs) else [0] * n
    rows = [[ctx.coerce(e) for e in row] + [ctx.coerce(b)] for row, b in zip(system, rhs)]
    pivots = []
    r = 0
    for col in range(n):
        if r == m:
            break
        p = _pick_pivot(rows, col, r)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = rows[r][col].inverse()
        rows[r] = [e * inv if not e.is_zero() else e for e in rows[r]]
        for i in range(m):
            factor = rows[i][col]
            if i != r and not factor.is_zero():
                rows[i] = [a - factor * b if not b.is_zero() else a for a, b in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
    for i in range(r, m):
        if not rows[i][n].is_zero():
            return None
    solution = [ctx.zero] * n
    for i, col in enumerate(pivots):
        solution[col] = rows[i][n]
    return solution


def determinant(matrix, ctx=None):
    """Determinant of a square matrix over K by elimination."""
    n = len(matrix)
    if ctx is None:
        ctx = next(e.ctx for row in matrix for e in row if isinstance(e, FieldElement))
    rows = [[ctx.coerce(e) for e in row] for row in matrix]
    det = ctx.one
    for col in range(n):
        p = _pick_pivot(rows, col, col)
        if p is None:
            return ctx.zero
        if p != col:
            rows[col], rows[p] = rows[p], rows[col]
            det = -det
        pivot = rows[col][col]
        det = det * pivot
        inv = pivot.inverse()
        for i in range(col + 1, n):
            factor = rows[i][col] * inv
            if not factor.is_zero():
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[col])]
    return det
