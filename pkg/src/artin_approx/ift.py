"""Analytic systems, the formal implicit function theorem, and substitution checks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import PrecisionError, PreconditionError, SingularJacobianError
from .linalg import det_and_adjugate, jacobian
from .series import INF, Series, compose, constant, embed, invert_unit, mul, order, variable


@dataclass(frozen=True)
class AnalyticSystem:
    """Equations ``f_1, ..., f_m`` in variables ``(x_1..x_n, y_1..y_N)``."""

    n: int
    N: int
    fs: tuple

    def __post_init__(self):
        object.__setattr__(self, "fs", tuple(self.fs))
        for f in self.fs:
            if f.nvars != self.n + self.N:
                raise ValueError(
                    f"equation has {f.nvars} variables, expected n + N = {self.n + self.N}"
                )

    @property
    def m(self) -> int:
        return len(self.fs)

    @property
    def prec(self) -> int:
        return min((f.prec for f in self.fs), default=0)

    @property
    def y_indices(self) -> list:
        return list(range(self.n, self.n + self.N))

    def jacobian_y(self, cols: Sequence[int] | None = None):
        cols = range(self.N) if cols is None else cols
        return jacobian(self.fs, [self.n + j for j in cols])

    def permute_y(self, order_: Sequence[int]) -> "AnalyticSystem":
        """System in new unknowns ``y'_k = y_{order_[k]}``."""
        pos = {old: new for new, old in enumerate(order_)}
        positions = list(range(self.n)) + [self.n + pos[j] for j in range(self.N)]
        return AnalyticSystem(
            self.n, self.N, tuple(embed(f, self.n + self.N, positions) for f in self.fs)
        )

    def insert_x(self, count: int) -> "AnalyticSystem":
        """View the system over ``n + count`` x-variables (new ones appended to x)."""
        total = self.n + count + self.N
        positions = list(range(self.n)) + [self.n + count + j for j in range(self.N)]
        return AnalyticSystem(
            self.n + count, self.N, tuple(embed(f, total, positions) for f in self.fs)
        )

    def select(self, rows: Sequence[int]) -> "AnalyticSystem":
        return AnalyticSystem(self.n, self.N, tuple(self.fs[i] for i in rows))


def coordinates(n: int, prec: int) -> list:
    return [variable(i, n, max(prec, 2)) for i in range(n)]


def substitute(fs: Sequence[Series], n: int, ys: Sequence[Series], prec: int | None = None) -> tuple:
    """Evaluate series in ``(x, y)`` at ``y = ys(x)``."""
    if n == 0 and not ys:
        raise ValueError("nothing to substitute")
    nv = ys[0].nvars if ys else n
    p = max(y.prec for y in ys) if ys else max(f.prec for f in fs)
    if prec is not None:
        p = prec
    args = coordinates(nv, p)[:n] if nv == n else None
    if args is None:
        raise ValueError("solution vector lives in a different ring")
    args = args + list(ys)
    return tuple(compose(f, args) for f in fs)


def _sharp_matvec(M, v):
    out = []
    for i in range(M.rows):
        acc = None
        for j in range(M.cols):
            t = mul(M[i, j], v[j], sharp=True)
            acc = t if acc is None else acc + t
        out.append(acc)
    return out


def default_rounds(c: int) -> int:
    return max(1, math.ceil(math.log2(c))) + 1 if c > 1 else 1


def newton_solve(
    G: AnalyticSystem,
    c: int,
    initial: Sequence[Series] | None = None,
    rounds: int | None = None,
) -> tuple:
    """Solve ``G(x, u) = 0`` for ``u(x)`` with ``u(0) = 0`` modulo m^c.

    The unknowns are the last ``G.N`` variables (``G.m == G.N``).  Each round
    is a full Newton step ``u <- u - J(x,u)^{-1} G(x,u)`` at doubled
    precision, so after ``k`` rounds the residual vanishes modulo
    ``m^(2^k)``.  The number of rounds is fixed by ``c``.
    """
    n, m = G.n, G.m
    if G.N != m:
        raise ValueError("newton_solve needs as many equations as unknowns")
    if m == 0:
        return ()
    for g in G.fs:
        if g.prec == 0:
            raise PrecisionError("equation known to no order", required=c, available=0)
        if g.constant_term != 0:
            raise PreconditionError("equation has a nonzero constant term at the origin")
    if G.prec < c:
        raise PrecisionError(
            f"system known modulo m^{G.prec}, cannot solve modulo m^{c}",
            required=c, available=G.prec, step="newton",
        )
    J = jacobian(G.fs, [n + j for j in range(m)])
    delta0, _ = det_and_adjugate(J)
    if delta0.constant_term == 0:
        raise SingularJacobianError("Jacobian with respect to the unknowns is singular at the origin")
    if n == 0:
        # no x-variables: the only solution without constant term is u = 0
        return tuple(Series._raw(0, {}, c) for _ in range(m))
    if initial is None:
        u = [Series._raw(n, {}, 1) for _ in range(m)]
    else:
        u = list(initial)
        if len(u) != m or any(s.nvars != n or s.constant_term != 0 for s in u):
            raise ValueError("initial guess must be m series without constant term")
    known = max(1, min(s.prec for s in u))
    if rounds is None:
        rounds = default_rounds(c) if initial is None else default_rounds(-(-c // known))
    for _ in range(rounds):
        p = min(2 * known, c)
        known = p
        guess = [s.truncate(p).with_prec(p) for s in u]
        args = coordinates(n, p) + guess
        res = [compose(g, args).truncate(p) for g in G.fs]
        Jx = J.map(lambda e: compose(e, args))
        delta, M = det_and_adjugate(Jx)
        inv = invert_unit(delta)
        corr = _sharp_matvec(M, res)
        u = [(g - mul(inv, cr, sharp=True)).truncate(p) for g, cr in zip(guess, corr)]
    if initial is not None:
        res = substitute(G.fs, n, u)
        if any(order(r.truncate(c)) < min(c, r.prec) for r in res):
            raise PreconditionError("Newton iteration from the given start did not converge")
    return tuple(u)


@dataclass(frozen=True)
class VerifyReport:
    orders: tuple  # residual order per equation (math.inf if zero at precision)
    passed: bool
    order_target: int
    prec: int

    def as_dict(self):
        return {
            "residual_orders": [None if o == INF else o for o in self.orders],
            "passed": self.passed,
            "order": self.order_target,
            "prec": self.prec,
        }


def verify_system(f: AnalyticSystem, y: Sequence[Series], c: int) -> VerifyReport:
    """Check ``f(x, y(x)) = 0`` modulo m^c and report residual orders."""
    if len(y) != f.N:
        raise ValueError(f"expected {f.N} series, got {len(y)}")
    for s in y:
        if s.nvars != f.n:
            raise ValueError("solution series live in the wrong ring")
        if s.constant_term != 0:
            raise ValueError("solution series must have zero constant term")
    if f.N == 0:
        res = tuple(f.fs)
    elif f.n == 0:
        # over a field the solution is y = 0, so the residual is f(0)
        p = min(s.prec for s in y)
        res = tuple(constant(g.constant_term, 0, min(g.prec, p)) for g in f.fs)
    else:
        res = substitute(f.fs, f.n, y)
    prec = min((r.prec for r in res), default=c)
    orders = tuple(order(r.truncate(c)) for r in res)
    if prec < c and not all(o < prec for o in orders):
        raise PrecisionError(
            f"residuals known modulo m^{prec} only; cannot decide vanishing modulo m^{c}",
            required=c, available=prec, step="verify",
        )
    return VerifyReport(orders, all(o >= c for o in orders), c, prec)
