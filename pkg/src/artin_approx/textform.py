"""Canonical text form for series and a small expression reader.

The canonical form of a series is a JSON object::

    {"nvars": 2, "prec": 8,
     "terms": [{"exps": [1, 0], "coef": "1/2"}, ...]}

with terms in graded-lexicographic order and every coefficient written as
``"p/q"``.  Emitting and re-reading a series reproduces it exactly.

For hand-written problem files a series may also be given as a polynomial
expression over named variables, e.g. ``"y^2 - x2^2*(1 + x1)"``.
"""

from __future__ import annotations

import ast
from fractions import Fraction
from typing import Sequence

from .errors import ArtinError
from .series import Series, constant, invert_unit, variable


class ParseError(ValueError):
    pass


def format_rational(c: Fraction) -> str:
    return f"{c.numerator}/{c.denominator}"


def parse_rational(text) -> Fraction:
    if isinstance(text, bool):
        raise ParseError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise ParseError(f"coefficient must be a 'p/q' string, got {text!r}")
    try:
        num, _, den = text.strip().partition("/")
        value = Fraction(int(num), int(den) if den else 1)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational {text!r}") from exc
    return value


def series_to_json(s: Series) -> dict:
    return {
        "nvars": s.nvars,
        "prec": s.prec,
        "terms": [{"exps": list(e), "coef": format_rational(c)} for e, c in s.items()],
    }


def series_from_json(obj) -> Series:
    try:
        nvars = obj["nvars"]
        prec = obj["prec"]
        terms = obj["terms"]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"series record missing field: {exc}") from exc
    if not isinstance(nvars, int) or not isinstance(prec, int) or nvars < 0 or prec < 0:
        raise ParseError("nvars and prec must be non-negative integers")
    pairs = []
    for t in terms:
        exps = t.get("exps") if isinstance(t, dict) else None
        if not isinstance(exps, list) or len(exps) != nvars:
            raise ParseError(f"bad exponent list in {t!r}")
        if not all(isinstance(e, int) and e >= 0 for e in exps):
            raise ParseError(f"bad exponent list in {t!r}")
        pairs.append((tuple(exps), parse_rational(t.get("coef"))))
    try:
        return Series(nvars, pairs, prec)
    except (ValueError, TypeError) as exc:
        raise ParseError(str(exc)) from exc


def sqrt_unit(f: Series) -> Series:
    """Square root of a unit whose constant term is a rational square.

    The root with positive constant term is returned.
    """
    c = f.constant_term
    if c <= 0:
        raise ParseError("sqrt needs a positive constant term")
    r0 = Fraction(_isqrt_exact(c.numerator), _isqrt_exact(c.denominator))
    g = constant(r0, f.nvars, f.prec)
    known = 1
    while known < f.prec:
        known = min(2 * known, f.prec)
        gk = g.with_prec(known)
        g = (gk + f.truncate(known) * invert_unit(gk)) * Fraction(1, 2)
    return g


def _isqrt_exact(k: int) -> int:
    import math

    r = math.isqrt(k)
    if r * r != k:
        raise ParseError(f"{k} is not a perfect square")
    return r


_FUNCS = {"sqrt": sqrt_unit, "inv": invert_unit}


def parse_expr(text: str, names: Sequence[str], prec: int) -> Series:
    """Read a polynomial/series expression over ``names`` modulo m^prec.

    Supports ``+ - * /``, integer powers (``**`` or ``^``), rational
    literals, division by units, and ``sqrt(...)`` of units.
    """
    if len(set(names)) != len(names):
        raise ParseError("variable names must be unique")
    index = {n: i for i, n in enumerate(names)}
    n = len(names)
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"cannot parse expression {text!r}") from exc

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant):
            if isinstance(node.value, bool) or not isinstance(node.value, int):
                raise ParseError(f"only integer literals allowed, got {node.value!r}")
            return constant(node.value, n, prec)
        if isinstance(node, ast.Name):
            if node.id not in index:
                raise ParseError(f"undeclared variable {node.id!r}")
            return variable(index[node.id], n, prec)
        if isinstance(node, ast.UnaryOp):
            v = ev(node.operand)
            if isinstance(node.op, ast.USub):
                return -v
            if isinstance(node.op, ast.UAdd):
                return v
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                exp = node.right
                if isinstance(exp, ast.Constant) and isinstance(exp.value, int) and exp.value >= 0:
                    return ev(node.left) ** exp.value
                raise ParseError("exponents must be non-negative integer literals")
            a, b = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            if isinstance(node.op, ast.Div):
                if b.constant_term == 0:
                    raise ParseError("division by a non-unit")
                return a * invert_unit(b)
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name):
            fn = _FUNCS.get(node.func.id)
            if fn is None or len(node.args) != 1 or node.keywords:
                raise ParseError(f"unsupported function call {ast.dump(node.func)}")
            return fn(ev(node.args[0]))
        raise ParseError(f"unsupported syntax: {ast.dump(node)}")

    try:
        return ev(tree)
    except ParseError:
        raise
    except (ArithmeticError, ArtinError) as exc:
        raise ParseError(str(exc)) from exc


def read_series(obj, names: Sequence[str], prec: int) -> Series:
    """Accept either canonical JSON, ``{"expr": ..., "prec": ...}``, or a bare string."""
    if isinstance(obj, str):
        return parse_expr(obj, names, prec)
    if isinstance(obj, dict) and "expr" in obj:
        p = obj.get("prec", prec)
        if not isinstance(p, int) or p < 0:
            raise ParseError("prec must be a non-negative integer")
        return parse_expr(obj["expr"], names, p)
    if isinstance(obj, dict):
        s = series_from_json(obj)
        if s.nvars != len(names):
            raise ParseError(f"series has {s.nvars} variables, ring declares {len(names)}")
        return s
    raise ParseError(f"cannot read a series from {obj!r}")
