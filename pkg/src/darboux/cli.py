"""Command-line front end.

Every operator or field argument is an expression in the session's context;
names bound in the session may appear inside expressions. Exit codes: 0 for
true or a computed value, 1 for a negative verdict, 2 for usage and parse
errors, 3 for mathematical errors.
"""

import argparse
import json
import sys
from dataclasses import dataclass, field

from . import continued as cont
from . import criterion as crit
from . import dtcore, laplace
from .errors import DarbouxError, MathError, UsageError
from .kfield import FieldContext
from .opring import LinOp, format_operator, op_apply, wronskian_operator
from .parsing import parse_field, parse_operator

EXIT = {"true": 0, "value": 0, "false": 1}


@dataclass
class CommandResult:
    status: str
    payload: dict = field(default_factory=dict)
    diagnostics: str = ""
    exit_code: int = None

    def __post_init__(self):
        if self.exit_code is None:
            self.exit_code = EXIT.get(self.status, 3)

    def to_json(self):
        return json.dumps(
            {"status": self.status, "payload": self.payload, "diagnostics": self.diagnostics},
            indent=2,
        )

    def to_text(self):
        lines = [self.status]
        for key, value in self.payload.items():
            if isinstance(value, dict):
                lines.append(f"{key}:")
                lines.extend(f"  {k} = {v}" for k, v in value.items())
            elif isinstance(value, list):
                lines.append(f"{key}:")
                lines.extend(f"  [{i}] {v}" for i, v in enumerate(value))
            else:
                lines.append(f"{key} = {value}")
        if self.diagnostics:
            lines.append(self.diagnostics)
        return "\n".join(lines)


class Session:
    """A context declaration plus named bindings."""

    def __init__(self, variables, adjoined=None, generic=None, bindings=None):
        self.ctx = FieldContext(variables, adjoined, generic)
        self.bindings = {}
        for name, src in (bindings or {}).items():
            if name in self.bindings or self.ctx.has_symbol(name):
                raise UsageError(f"binding {name!r} clashes with an existing name")
            self.bindings[name] = parse_operator(str(src), self.ctx, self.bindings)

    @classmethod
    def from_document(cls, doc):
        if "variables" not in doc:
            raise UsageError("session document needs a 'variables' list")
        return cls(doc["variables"], doc.get("adjoined"), doc.get("generic"), doc.get("bindings"))

    @classmethod
    def load(cls, path):
        try:
            with open(path) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read session {path}: {exc}") from exc
        return cls.from_document(doc)

    def op(self, src):
        return parse_operator(src, self.ctx, self.bindings)

    def fe(self, src):
        return parse_field(src, self.ctx, self.bindings)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _quad_args(p, *names):
    for name in names or ("L", "L1", "M", "N"):
        p.add_argument(f"--{name}", required=True, metavar="EXPR")


def build_parser():
    parser = _Parser(prog="darboux", description="Exact calculus of Darboux transformations.")
    parser.add_argument("--session", help="JSON session document")
    parser.add_argument("--vars", help="comma-separated variables (without a session)")
    parser.add_argument("--generic", help="comma-separated generic function names")
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    _quad_args(sub.add_parser("verify-dt", help="check N*L = L1*M and equal symbols"))
    p = sub.add_parser("compose", help="first (M,N): L -> L1, then (M2,N2): L1 -> L2")
    _quad_args(p, "L", "L1", "M", "N", "L2", "M2", "N2")
    p.add_argument("--source2", metavar="EXPR", help="source of the second transformation (default L1)")
    p = sub.add_parser("equivalent", help="search A with M2 = M + A*L, N2 = N + L1*A")
    _quad_args(p, "L", "L1", "M", "N", "M2", "N2")
    p = sub.add_parser("shift", help="shift by C")
    _quad_args(p, "L", "L1", "M", "N", "C")
    _quad_args(sub.add_parser("dual", help="swap objects and morphisms"))
    p = sub.add_parser("invert-check", help="verify an inverse witness")
    _quad_args(p, "L", "L1", "M", "N", "Mp", "Np", "A", "B")

    for name, text in (
        ("laplace", "Laplace transformation"),
        ("laplace-inverse", "inverse of a Laplace transformation"),
        ("laplace-compose", "compose both Laplace transformations"),
    ):
        p = sub.add_parser(name, help=text)
        for coeff in ("a", "b", "c"):
            p.add_argument(f"--{coeff}", required=True, metavar="EXPR")
        p.add_argument("--x", default="x")
        p.add_argument("--y", default="y")
        if name == "laplace-compose":
            p.add_argument("--first", help="direction applied first (default x)")
        else:
            p.add_argument("--direction", help="x or y variable name (default x)")

    p = sub.add_parser("type1", help="Type I transformation of C*M + f")
    _quad_args(p, "C", "M", "f")
    for name in ("continued", "continued-inverse"):
        p = sub.add_parser(name, help="continued Type I or Wronskian chain")
        p.add_argument("--A", nargs="+", required=True, metavar="EXPR")
        p.add_argument("--M", nargs="+", required=True, metavar="EXPR")
        p.add_argument("--f", metavar="EXPR", help="scalar tail")
        p.add_argument("--c", metavar="EXPR", help="commuting tail factor")
        p.add_argument("--B", metavar="EXPR", help="commuting tail operator")
    p = sub.add_parser("decompose-xxy", help="two-step chain for a Dxxy-shaped operator")
    p.add_argument("--op", required=True, metavar="EXPR")
    p.add_argument("--x", default="x")
    p.add_argument("--y", default="y")

    p = sub.add_parser("criterion", help="does M = Dt give a transformation of L?")
    p.add_argument("--op", required=True, metavar="EXPR")
    p.add_argument("--var", default="t")
    p = sub.add_parser("wronskian-criterion", help="criterion for M = Dt - psi_t/psi")
    p.add_argument("--op", required=True, metavar="EXPR")
    p.add_argument("--psi", required=True, metavar="EXPR")
    p.add_argument("--var", default="t")
    p = sub.add_parser("classify", help="classify L = C*M + c*B")
    _quad_args(p, "C", "M", "c", "B")
    p = sub.add_parser("unique", help="do L and M determine their transformation?")
    p.add_argument("--op", required=True, metavar="EXPR")
    p.add_argument("--M", required=True, metavar="EXPR")
    p = sub.add_parser("wronskian-op", help="monic operator killing the seeds")
    p.add_argument("--seeds", nargs="+", required=True, metavar="EXPR")
    p.add_argument("--var", required=True)
    p = sub.add_parser("apply", help="apply an operator to a field element")
    p.add_argument("--op", required=True, metavar="EXPR")
    p.add_argument("--f", required=True, metavar="EXPR")
    p = sub.add_parser("mul", help="product of operators, left to right")
    p.add_argument("ops", nargs="+", metavar="EXPR")
    p = sub.add_parser("normalize", help="canonical form of an expression")
    p.add_argument("expr", metavar="EXPR")
    p.add_argument("--field", action="store_true", help="treat as a field element")
    sub.add_parser("landau-demo", help="built-in check of Landau's factorization example")
    return parser


def _session(args):
    if args.command == "landau-demo":
        return Session(["x", "y"])
    if args.session:
        if args.vars or args.generic:
            raise UsageError("--vars/--generic cannot be combined with --session")
        return Session.load(args.session)
    if not args.vars:
        raise UsageError("give --session or --vars")
    generic = [g for g in (args.generic or "").split(",") if g]
    return Session([v.strip() for v in args.vars.split(",") if v.strip()], generic=generic)


def _quad(s, args, names=("L", "L1", "M", "N")):
    return dtcore.DTQuad(*(s.op(getattr(args, n)) for n in names))


def _verdict(ok, payload=None, diagnostics=""):
    return CommandResult("true" if ok else "false", payload or {}, diagnostics)


def _value(payload, diagnostics=""):
    return CommandResult("value", payload, diagnostics)


def _chain(s, args):
    A = [s.op(e) for e in args.A]
    M = [s.op(e) for e in args.M]
    if args.f is not None:
        if args.c is not None or args.B is not None:
            raise UsageError("give either --f or --c/--B")
        tail = cont.ScalarTail(s.fe(args.f))
    elif args.c is not None and args.B is not None:
        tail = cont.CommutingTail(s.fe(args.c), s.op(args.B))
    else:
        raise UsageError("a chain needs --f or both --c and --B")
    return cont.Chain(A, M, tail)


def _cmd_verify_dt(s, args):
    q = _quad(s, args)
    ok = dtcore.dt_verify(q)
    diag = "" if ok else f"N*L - L1*M = {q.intertwining_defect()}" + (
        "" if dtcore.same_symbol(q.L, q.L1) else "; principal symbols of L and L1 differ"
    )
    return _verdict(ok, {"quad": q.as_dict()}, diag)


def _cmd_compose(s, args):
    q1 = _quad(s, args)
    src2 = s.op(args.source2) if args.source2 else q1.L1
    q2 = dtcore.DTQuad(src2, s.op(args.L2), s.op(args.M2), s.op(args.N2))
    q = dtcore.dt_compose(q1, q2)
    return _value({"quad": q.as_dict(), "valid": dtcore.dt_verify(q)})


def _cmd_equivalent(s, args):
    q = _quad(s, args)
    q2 = dtcore.DTQuad(q.L, q.L1, s.op(args.M2), s.op(args.N2))
    w = dtcore.dt_equivalent(q, q2)
    if w is None:
        return _verdict(False, diagnostics="no operator A with M2 = M + A*L and N2 = N + L1*A")
    return _verdict(True, {"A": str(w.A)})


def _cmd_shift(s, args):
    q = dtcore.dt_shift(_quad(s, args), s.op(args.C))
    return _value({"quad": q.as_dict(), "valid": dtcore.dt_verify(q)})


def _cmd_dual(s, args):
    q = dtcore.dt_dual(_quad(s, args))
    return _value({"quad": q.as_dict(), "valid": dtcore.dt_verify(q)})


def _cmd_invert_check(s, args):
    q = _quad(s, args)
    w = dtcore.InverseWitness(*(s.op(getattr(args, n)) for n in ("Mp", "Np", "A", "B")))
    ok = dtcore.dt_verify_inverse(q, w)
    failed = [name for name, d in dtcore.inverse_defects(q, w).items() if not d.is_zero()]
    if not dtcore.dt_verify(dtcore.DTQuad(q.L1, q.L, w.Mp, w.Np)):
        failed.append("(Mp, Np): L1 -> L")
    return _verdict(ok, {"witness": w.as_dict()}, "" if ok else "failed: " + "; ".join(failed))


def _schrodinger(s, args):
    return laplace.Schrodinger2D(s.fe(args.a), s.fe(args.b), s.fe(args.c), args.x, args.y)


def _cmd_laplace(s, args):
    sch = _schrodinger(s, args)
    inv = laplace.laplace_invariants(sch)
    q = laplace.laplace_transform(sch, args.direction or args.x)
    return _value({"quad": q.as_dict(), "invariants": {"h": str(inv.h), "k": str(inv.k)}})


def _cmd_laplace_inverse(s, args):
    sch = _schrodinger(s, args)
    direction = args.direction or args.x
    q = laplace.laplace_transform(sch, direction)
    w = laplace.laplace_inverse(q, direction)
    return _value({"quad": q.as_dict(), "witness": w.as_dict()})


def _cmd_laplace_compose(s, args):
    sch = _schrodinger(s, args)
    mhat, gauge = laplace.laplace_compose_check(sch, args.first or args.x)
    return _value({"Mhat": str(mhat), "gauge": str(gauge)}, "composite equals the gauge transformation L -> L^gauge")


def _cmd_type1(s, args):
    C, M, f = s.op(args.C), s.op(args.M), s.fe(args.f)
    q = cont.type1_build(C, M, f)
    w = cont.type1_inverse(C, M, f)
    return _value({"quad": q.as_dict(), "witness": w.as_dict(), "inverse_verified": dtcore.dt_verify_inverse(q, w)})


def _cmd_continued(s, args):
    q, ns = cont.continued_build(_chain(s, args))
    return _value({"quad": q.as_dict(), "N": [str(n) for n in ns]})


def _cmd_continued_inverse(s, args):
    w, seq = cont.continued_inverse(_chain(s, args))
    return _value({"witness": w.as_dict(), **{k: [str(p) for p in v] for k, v in seq.items()}})


def _cmd_decompose_xxy(s, args):
    ch = cont.decompose_xxy(s.op(args.op), args.x, args.y)
    return _value({"A": [str(a) for a in ch.A], "M": [str(m) for m in ch.M], "f": str(ch.tail.f)})


def _criterion_payload(res):
    payload = {}
    if res.admits:
        A, c, B = res.decomposition
        payload = {"A": str(A), "c": str(c), "B": str(B), "quad": res.quad.as_dict()}
    elif res.offending:
        payload = {"offending": list(res.offending)}
    return _verdict(res.admits, payload, res.diagnostics)


def _cmd_criterion(s, args):
    return _criterion_payload(crit.tfree_criterion(s.op(args.op), args.var))


def _cmd_wronskian_criterion(s, args):
    return _criterion_payload(crit.wronskian_criterion(s.op(args.op), s.fe(args.psi), args.var))


def _cmd_classify(s, args):
    res = crit.classify_first_order(s.op(args.C), s.op(args.M), s.fe(args.c), s.op(args.B))
    return _value({"tag": res.tag, "quad": res.quad.as_dict()})


def _cmd_unique(s, args):
    ok = crit.unique_determination(s.op(args.op), s.op(args.M))
    return _verdict(ok, diagnostics="" if ok else "L = A*M for some operator A")


def _cmd_wronskian_op(s, args):
    return _value({"operator": str(wronskian_operator([s.fe(e) for e in args.seeds], args.var))})


def _cmd_apply(s, args):
    return _value({"result": str(op_apply(s.op(args.op), s.fe(args.f)))})


def _cmd_mul(s, args):
    out = LinOp.one(s.ctx)
    for e in args.ops:
        out = out * s.op(e)
    return _value({"product": format_operator(out)})


def _cmd_normalize(s, args):
    value = s.fe(args.expr) if args.field else s.op(args.expr)
    return _value({"normal_form": str(value)})


def _cmd_landau_demo(s, args):
    P, Q = s.op("Dx + x*Dy"), s.op("Dx + 1")
    R = s.op("Dx^2 + x*Dx*Dy + Dx + (2+x)*Dy")
    defect = R * Q - Q * Q * P
    q = dtcore.DTQuad(Q, Q, Q * P, R)
    ok = defect.is_zero() and dtcore.dt_verify(q)
    return _verdict(ok, {"RQ - QQP": str(defect), "R": str(R), "quad": q.as_dict()},
                    "(QP, R): Q -> Q is a Darboux transformation" if ok else "")


COMMANDS = {
    name: globals()["_cmd_" + name.replace("-", "_")]
    for name in (
        "verify-dt", "compose", "equivalent", "shift", "dual", "invert-check",
        "laplace", "laplace-inverse", "laplace-compose", "type1", "continued",
        "continued-inverse", "decompose-xxy", "criterion", "wronskian-criterion",
        "classify", "unique", "wronskian-op", "apply", "mul", "normalize", "landau-demo",
    )
}


def run_command(argv, raise_errors=False):
    """Run one CLI invocation and return its :class:`CommandResult`.

    Library errors become ``status="error"`` results (exit code 2 for usage or
    parse problems, 3 for mathematical ones) unless ``raise_errors`` is set.
    """
    try:
        args = build_parser().parse_args(list(argv))
        if not args.command:
            raise UsageError("missing subcommand")
        return COMMANDS[args.command](_session(args), args)
    except DarbouxError as exc:
        if raise_errors:
            raise
        code = 3 if isinstance(exc, MathError) else 2
        return CommandResult("error", {"error": type(exc).__name__}, str(exc), code)


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    as_json = "--json" in argv
    result = run_command(argv)
    stream = sys.stderr if result.status == "error" and not as_json else sys.stdout
    print(result.to_json() if as_json else result.to_text(), file=stream)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
