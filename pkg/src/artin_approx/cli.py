"""Command-line front end.

Usage::

    artin-approx COMMAND [--order C] [--out PATH] [--max-shear K]
                 [--strict-precision] [--strict-moduli] [--timestamp] problem.json

The problem file is a JSON document with ``"schema": "weierstrass-artin/v1"``.
See the README for the field list.  The report is JSON with sorted keys, so
identical inputs give byte-identical output unless ``--timestamp`` is set.

Exit codes: 0 success, 1 parse or usage error, 2 mathematical precondition
failure, 3 precision shortfall.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from fractions import Fraction

from .artin import (
    artin_approximate,
    corollary1_lift,
    extract_approximate,
    reduce_system,
    solve_recursive,
)
from .errors import PrecisionError, PreconditionError
from .ift import AnalyticSystem, newton_solve, verify_system
from .linalg import SeriesMatrix, det, det_and_adjugate, identity, jacobian, rank_lower_bound
from .series import Series, embed, mul, order
from .textform import (
    ParseError,
    format_rational,
    parse_rational,
    read_series,
    series_to_json,
)
from .tougeron import check_approximate, parametric_solution, subordinate_params
from .weierstrass import (
    DistinguishedPolynomial,
    XnPolynomial,
    euclid_pseudo_divide,
    regularize,
    weierstrass_divide,
    weierstrass_prepare,
)

SCHEMA = "weierstrass-artin/v1"

COMMANDS = (
    "divide", "prepare", "regularize", "pseudo-div", "jacobian", "adjugate", "rank",
    "newton", "check-approx", "parametric", "subordinate", "extract", "reduce",
    "solve", "approximate", "lift", "verify",
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- document handling ------------------------------------------------------------


class Problem:
    """A validated problem document."""

    def __init__(self, doc, order_override=None, strict_precision=False):
        if not isinstance(doc, dict):
            raise ParseError("document must be a JSON object")
        if doc.get("schema") != SCHEMA:
            raise ParseError(f"schema must be {SCHEMA!r}")
        ring = doc.get("ring")
        if not isinstance(ring, dict):
            raise ParseError("missing ring block")
        self.x = self._names(ring, "x", required=True)
        self.y = self._names(ring, "y")
        self.t = self._names(ring, "t")
        self.s = self._names(ring, "s")
        allnames = self.x + self.y + self.t + self.s
        if len(set(allnames)) != len(allnames):
            raise ParseError("variable names must be unique")
        c = doc.get("order") if order_override is None else order_override
        if not isinstance(c, int) or isinstance(c, bool) or c < 1:
            raise ParseError("order must be a positive integer")
        self.order = c
        prec = doc.get("prec", 2 * c + 4)
        if not isinstance(prec, int) or isinstance(prec, bool) or prec < 1:
            raise ParseError("prec must be a positive integer")
        self.prec = prec
        self.doc = doc
        self.strict = strict_precision

    @staticmethod
    def _names(ring, key, required=False):
        names = ring.get(key, [])
        if required and key not in ring:
            raise ParseError(f"ring block needs {key!r}")
        if not isinstance(names, list) or not all(isinstance(n, str) and n.isidentifier() for n in names):
            raise ParseError(f"ring.{key} must be a list of identifiers")
        return names

    def _check(self, s: Series, what: str, need: int | None = None):
        need = self.order if need is None else need
        if self.strict and s.prec < need:
            raise PrecisionError(
                f"{what} is given modulo m^{s.prec}, below the working order {need}",
                required=need, available=s.prec, step="input",
            )
        return s

    def field(self, key):
        if key not in self.doc:
            raise ParseError(f"document needs a {key!r} field")
        return self.doc[key]

    def series(self, key, names=None):
        names = self.x if names is None else names
        return self._check(read_series(self.field(key), names, self.prec), key)

    def series_list(self, key, names=None, length=None):
        names = self.x if names is None else names
        raw = self.field(key)
        if not isinstance(raw, list):
            raise ParseError(f"{key!r} must be a list")
        out = [self._check(read_series(r, names, self.prec), key) for r in raw]
        if length is not None and len(out) != length:
            raise ParseError(f"{key!r} must have {length} entries")
        return out

    def system(self) -> AnalyticSystem:
        fs = self.series_list("system", self.x + self.y)
        return AnalyticSystem(len(self.x), len(self.y), tuple(fs))

    def matrix(self, key="matrix") -> SeriesMatrix:
        raw = self.field(key)
        if not isinstance(raw, list) or not raw or not all(isinstance(r, list) for r in raw):
            raise ParseError(f"{key!r} must be a nonempty list of rows")
        rows = [[read_series(e, self.x, self.prec) for e in r] for r in raw]
        try:
            return SeriesMatrix.from_rows(rows)
        except ValueError as exc:
            raise ParseError(str(exc)) from exc

    def param_names(self, prefix, count, given):
        if len(given) >= count:
            return given[:count]
        return [f"{prefix}{i + 1}" for i in range(count)]


def _ser(s: Series, names) -> dict:
    out = series_to_json(s)
    out["text"] = s.to_str(list(names))
    return out


def _ord(o):
    return None if o == float("inf") else o


def _xnpoly(p: XnPolynomial, names) -> dict:
    return {"series": _ser(p.to_series(), names), "degree": p.degree}


# -- command implementations --------------------------------------------------------


def _divide(pb: Problem, opts):
    h = pb.series("h")
    w = DistinguishedPolynomial.from_series(pb.series("w"))
    q, r, g = weierstrass_divide(h, w)
    back = mul(q, w.to_series(), sharp=True) + r.to_series()
    ok = back.agrees(h, g)
    return {
        "q": _ser(q, pb.x), "r": _xnpoly(r, pb.x), "guaranteed_prec": g,
    }, {"identity": ok, "remainder_degree": r.degree < w.degree}


def _prepare(pb: Problem, opts):
    f = pb.series("f")
    unit, w, g = weierstrass_prepare(f)
    ok = mul(unit, w.to_series(), sharp=True).agrees(f, g)
    return {
        "unit": _ser(unit, pb.x), "w": _ser(w.to_series(), pb.x), "degree": w.degree,
        "guaranteed_prec": g,
    }, {"identity": ok, "distinguished": all(a.constant_term == 0 for a in w.coeffs)}


def _frac_matrix(M):
    return [[format_rational(Fraction(v)) for v in row] for row in M]


def _regularize(pb: Problem, opts):
    fs = pb.series_list("series")
    reg = regularize(fs, max_shear=opts.max_shear)
    return {
        "matrix": _frac_matrix(reg.matrix),
        "inverse": _frac_matrix(reg.inverse),
        "series": [_ser(s, pb.x) for s in reg.series],
        "orders": [_ord(o) for o in reg.orders],
        "shear": reg.shear,
    }, {"regular": all(o == order(s) for o, s in zip(reg.orders, reg.series))}


def _pseudo_div(pb: Problem, opts):
    h = XnPolynomial.from_series(pb.series("h"))
    h1 = XnPolynomial.from_series(pb.series("h1"))
    res = euclid_pseudo_divide(h, h1)
    c0 = h1.coeffs[h1.degree]
    lead = embed(c0, h.nvars, [i for i in range(h.nvars) if i != h.var])
    lhs = lead ** res.p * h.to_series()
    rhs = res.q.to_series() * h1.to_series() + res.r1.to_series()
    p = min(lhs.prec, rhs.prec)
    return {
        "p": res.p, "q": _xnpoly(res.q, pb.x), "r1": _xnpoly(res.r1, pb.x),
    }, {"identity": lhs.agrees(rhs, p), "remainder_degree": res.r1.degree < h1.degree}


def _jacobian(pb: Problem, opts):
    f = pb.system()
    names = pb.x + pb.y
    wrt = pb.doc.get("vars", pb.y)
    if not isinstance(wrt, list) or any(v not in names for v in wrt):
        raise ParseError("vars must list declared variable names")
    J = jacobian(f.fs, [names.index(v) for v in wrt])
    return {"matrix": [[_ser(e, names) for e in row] for row in J.to_rows()]}, {}


def _adjugate(pb: Problem, opts):
    A = pb.matrix()
    delta, M = det_and_adjugate(A)
    m = A.rows
    dI = identity(m, A.nvars, A.prec).map(lambda e: e * delta)
    p = min(A.prec, M.prec, delta.prec)
    ok1 = all(a.agrees(b, p) for a, b in zip((M @ A).entries, dI.entries))
    ok2 = all(a.agrees(b, p) for a, b in zip((A @ M).entries, dI.entries))
    ok3 = det(M).agrees(delta ** (m - 1) if m > 1 else identity(1, A.nvars, p)[0, 0], p)
    return {
        "delta": _ser(delta, pb.x),
        "adjugate": [[_ser(e, pb.x) for e in row] for row in M.to_rows()],
    }, {"MA": ok1, "AM": ok2, "det_adjugate": ok3}


def _rank(pb: Problem, opts):
    cert = rank_lower_bound(pb.matrix())
    return {
        "rank": cert.rank, "rows": list(cert.rows), "cols": list(cert.cols),
        "minor": None if cert.minor is None else _ser(cert.minor, pb.x),
        "exact": cert.exact,
    }, {}


def _solution_block(pb, key, f):
    return pb.series_list(key, pb.x, length=f.N)


def _verify_out(f, y, c):
    rep = verify_system(f, y, c)
    return rep.as_dict(), rep.passed


def _newton(pb: Problem, opts):
    f = pb.system()
    u = newton_solve(f, pb.order)
    rep, ok = _verify_out(f, u, pb.order)
    return {"u": [_ser(s, pb.x) for s in u], "verify": rep}, {"residual": ok}


def _check_approx(pb: Problem, opts):
    f = pb.system()
    cert = check_approximate(f, _solution_block(pb, "candidate", f))
    return {
        "certified": cert.certified,
        "reason": cert.reason,
        "delta": _ser(cert.delta, pb.x),
        "residuals": [_ser(s, pb.x) for s in cert.g_residuals],
        "quotients": [_ser(s, pb.x) for s in cert.quotients],
    }, {}


def _parametric(pb: Problem, opts):
    f = pb.system()
    cert = check_approximate(f, _solution_block(pb, "candidate", f))
    ps = parametric_solution(cert, f, pb.order)
    tn = pb.param_names("t", ps.r, pb.t)
    names = pb.x + tn
    return {
        "params": tn,
        "y": [_ser(s, names) for s in ps.y],
        "u": [_ser(s, names) for s in ps.u],
        "delta": _ser(ps.delta, pb.x),
        "prec": ps.prec,
    }, {"substitution": ps.verified}


def _subordinate(pb: Problem, opts):
    f = pb.system()
    cert = check_approximate(f, _solution_block(pb, "candidate", f))
    ps = parametric_solution(cert, f, pb.order)
    ybar = _solution_block(pb, "solution", f)
    tbar = subordinate_params(ps, f, ybar, pb.order, strict=opts.strict_moduli)
    tn = pb.param_names("t", ps.r, pb.t)
    return {"params": tn, "tbar": [_ser(s, pb.x) for s in tbar]}, {"round_trip": True}


def _extract(pb: Problem, opts):
    f = pb.system()
    ext = extract_approximate(f, _solution_block(pb, "solution", f))
    xp = pb.x[:-1]
    return {
        "p": ext.p,
        "abar": _ser(ext.abar.to_series(), pb.x),
        "unit": _ser(ext.unit, pb.x),
        "vbar": [_ser(s, pb.x) for s in ext.vbar],
        "coefficients": [[_ser(s, xp) for s in row] for row in ext.coeffs],
        "tbar": [_ser(s, pb.x) for s in ext.tbar],
        "ubar": [_ser(s, pb.x) for s in ext.ubar],
        "constants": [format_rational(c) for c in ext.consts],
    }, {"property1": ext.property1, "property2": ext.property2}


def _reduce(pb: Problem, opts):
    f = pb.system()
    raw = pb.field("constants")
    if not isinstance(raw, list) or not all(isinstance(r, list) for r in raw):
        raise ParseError("constants must be a list of lists of rationals")
    c0 = [[parse_rational(v) for v in row] for row in raw]
    p = pb.field("p")
    if not isinstance(p, int) or isinstance(p, bool):
        raise ParseError("p must be an integer")
    degrees = pb.doc.get("D", [len(row) - 1 for row in c0])
    rs = reduce_system(f, c0, degrees, p)
    vnames = [f"V{nu + 1}_{j}" for nu, j in rs.index]
    names = pb.x[:-1] + vnames
    return {
        "unknowns": vnames,
        "components": rs.M,
        "F": [_ser(s, names) for s in rs.F.fs],
    }, {"component_count": rs.M == 2 * p * f.m}


def _solve(pb: Problem, opts):
    f = pb.system()
    c = pb.order
    if "solution" not in pb.doc:
        y = newton_solve(f, c)
        rep, ok = _verify_out(f, y, c)
        return {"path": "ift", "params": [], "y": [_ser(s, pb.x) for s in y],
                "specialization": [], "verify": rep}, {"residual": ok}
    ybar = _solution_block(pb, "solution", f)
    sol = solve_recursive(f, ybar, c, max_shear=opts.max_shear, strict=opts.strict_moduli)
    S = sol.s_count
    sn = pb.param_names("s", S, pb.s)
    tn = pb.param_names("t", sol.nparams - S, pb.t)
    names = pb.x + sn + tn
    spec = sol.specialized()
    return {
        "path": sol.path,
        "params": sn + tn,
        "y": [_ser(s, names) for s in sol.y],
        "specialization": [_ser(s, pb.x) for s in sol.tbar_full],
        "shear": sol.shear,
        "p": sol.p,
        "prec": sol.prec,
    }, {
        "reproduces_solution": all(a.agrees(b, c) for a, b in zip(spec, ybar)),
        "family_residual": True,
    }


def _approximate(pb: Problem, opts):
    f = pb.system()
    c = pb.order
    ybar = _solution_block(pb, "solution", f)
    y = artin_approximate(f, ybar, c, max_shear=opts.max_shear, strict=opts.strict_moduli)
    rep, ok = _verify_out(f, y, c)
    agree = min(c, min(s.prec for s in ybar))
    return {"y": [_ser(s, pb.x) for s in y], "verify": rep}, {
        "residual": ok, "agrees": all(a.agrees(b, agree) for a, b in zip(y, ybar)),
    }


def _lift(pb: Problem, opts):
    f = pb.system()
    y = corollary1_lift(f, _solution_block(pb, "lift", f), pb.order)
    rep, ok = _verify_out(f, y, pb.order)
    return {"y": [_ser(s, pb.x) for s in y], "verify": rep}, {"residual": ok}


def _verify(pb: Problem, opts):
    f = pb.system()
    rep, ok = _verify_out(f, _solution_block(pb, "solution", f), pb.order)
    return {"verify": rep}, {"residual": ok}


HANDLERS = {
    "divide": _divide, "prepare": _prepare, "regularize": _regularize,
    "pseudo-div": _pseudo_div, "jacobian": _jacobian, "adjugate": _adjugate,
    "rank": _rank, "newton": _newton, "check-approx": _check_approx,
    "parametric": _parametric, "subordinate": _subordinate, "extract": _extract,
    "reduce": _reduce, "solve": _solve, "approximate": _approximate,
    "lift": _lift, "verify": _verify,
}


# -- driver ---------------------------------------------------------------------


def build_parser():
    ap = _Parser(prog="artin-approx", description="Truncated power series toolkit")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("problem", help="path to a JSON problem document")
    ap.add_argument("--order", type=int, default=None, help="working order c (overrides the document)")
    ap.add_argument("--out", default=None, help="write the report here instead of stdout")
    ap.add_argument("--max-shear", type=int, default=16, help="largest shear coefficient tried")
    ap.add_argument("--strict-precision", action="store_true",
                    help="reject input series known to fewer orders than the working order")
    ap.add_argument("--strict-moduli", action="store_true",
                    help="use the m_x^2 congruence moduli when reading off parameters")
    ap.add_argument("--timestamp", action="store_true", help="add a generation timestamp to the report")
    return ap


def render(report) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def run(argv=None) -> tuple:
    """Return ``(exit_code, report_text_or_None, error_message_or_None)``."""
    try:
        opts = build_parser().parse_args(argv)
        if opts.order is not None and opts.order < 1:
            raise UsageError("--order must be positive")
        if opts.max_shear < 1:
            raise UsageError("--max-shear must be positive")
        try:
            with open(opts.problem, encoding="utf-8") as fh:
                doc = json.load(fh)
        except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot read problem document: {exc}") from exc
        pb = Problem(doc, opts.order, opts.strict_precision)
    except (UsageError, ParseError) as exc:
        return 1, None, str(exc)

    report = {"schema": SCHEMA, "command": opts.command, "order": pb.order, "inputs": doc}
    try:
        outputs, checks = HANDLERS[opts.command](pb, opts)
        report.update(status="ok", outputs=outputs, checks=checks)
        code = 0
    except ParseError as exc:
        return 1, None, str(exc)
    except PrecisionError as exc:
        report.update(status="precision-shortfall", error={
            "type": type(exc).__name__, "message": str(exc), "required": exc.required,
            "available": exc.available, "step": exc.step,
        })
        code = 3
    except PreconditionError as exc:
        report.update(status="precondition-failed", error={
            "type": type(exc).__name__, "message": str(exc),
        })
        code = 2
    if opts.timestamp:
        report["generated_at"] = datetime.now(timezone.utc).isoformat()
    text = render(report)
    if opts.out:
        with open(opts.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        return code, None, None
    return code, text, None


def main(argv=None) -> int:
    code, text, err = run(argv)
    if err is not None:
        print(f"artin-approx: error: {err}", file=sys.stderr)
    if text is not None:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
