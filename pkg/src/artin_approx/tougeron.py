"""Parametric solutions built from approximate solutions.

Given equations ``f(x, y) = 0`` with ``m <= N`` and the Jacobian minor taken
over the trailing ``m`` unknowns, let ``delta = det J`` and ``M`` its
adjugate, and put ``g = M f``.  A candidate ``y0(x)`` is an approximate
solution when ``g(x, y0) = 0 mod delta(x, y0)^2 m_x``.  From such a
candidate we build

* free unknowns ``y_nu = y0_nu + delta0^2 t_nu`` (the first ``N - m``),
* solved unknowns ``y_nu = y0_nu + delta0 u_nu(x, t)`` (the last ``m``),

where ``u`` is the unique solution with ``u(0) = 0`` of the system
``G = M(x, y0) F / delta0^2`` whose Jacobian in ``u`` is the identity
at the origin.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import (
    CertificateError,
    CongruenceError,
    InexactDivisionError,
    PrecisionError,
    PreconditionError,
    VanishingMinorError,
)
from .ift import AnalyticSystem, coordinates, newton_solve, substitute, verify_system
from .linalg import SeriesMatrix, det_and_adjugate, jacobian, matvec
from .series import INF, Series, compose, constant, embed, invert_unit, mul, order, variable
from .weierstrass import exact_divide


def adjoint_system(f: AnalyticSystem):
    """``(delta, M, g)`` for the trailing ``m x m`` Jacobian block of ``f``."""
    n, N, m = f.n, f.N, f.m
    if m > N:
        raise PreconditionError(f"more equations ({m}) than unknowns ({N})")
    if m == 0:
        one = constant(1, n + N, max(f.prec, 1) if f.fs else 1 << 30)
        return one, None, ()
    J = jacobian(f.fs, [n + N - m + j for j in range(m)])
    delta, M = det_and_adjugate(J)
    g = matvec(M, f.fs)
    return delta, M, g


@dataclass(frozen=True)
class ApproximateSolution:
    y0: tuple
    delta: Series
    g_residuals: tuple
    certified: bool
    quotients: tuple = ()  # g_i(x, y0) / delta^2 when certified
    M0: SeriesMatrix | None = None
    reason: str = ""

    @property
    def delta_order(self):
        return order(self.delta)


def check_approximate(f: AnalyticSystem, y0: Sequence[Series]) -> ApproximateSolution:
    """Decide whether ``y0`` is an approximate solution of ``f``.

    Membership of ``g(x, y0)`` in ``delta0^2 m_x`` is tested by exact
    division: the quotient must exist and vanish at the origin.
    """
    y0 = tuple(y0)
    n, N, m = f.n, f.N, f.m
    if len(y0) != N:
        raise ValueError(f"expected {N} candidate series, got {len(y0)}")
    if any(s.nvars != n for s in y0):
        raise ValueError("candidate series live in the wrong ring")
    if any(s.constant_term != 0 for s in y0):
        raise PreconditionError("candidate must vanish at the origin")
    if m > N:
        raise PreconditionError(f"more equations ({m}) than unknowns ({N})")
    if m == 0:
        p = min((s.prec for s in y0), default=1)
        return ApproximateSolution(y0, constant(1, n, p), (), True)
    delta, M, g = adjoint_system(f)
    delta0 = substitute([delta], n, y0)[0]
    g0 = substitute(g, n, y0)
    M0 = M.map(lambda e: substitute([e], n, y0)[0])
    if delta0.is_zero():
        if any(not r.is_zero() for r in g0):
            raise VanishingMinorError(
                "Jacobian minor vanishes along the candidate while residuals do not"
            )
        return ApproximateSolution(
            y0, delta0, g0, False, M0=M0,
            reason="Jacobian minor vanishes at working precision",
        )
    quotients = []
    for r in g0:
        if r.prec < 1:
            raise PrecisionError("residual known to no order", required=1, available=0)
        if delta0.is_unit():
            quotients.append(mul(r, _unit_inverse_sq(delta0), sharp=True))
            continue
        try:
            q = exact_divide(r, delta0 * delta0)
        except InexactDivisionError:
            return ApproximateSolution(
                y0, delta0, g0, False, M0=M0, reason="residual not divisible by delta^2"
            )
        if q.prec < 1:
            raise PrecisionError(
                "quotient by delta^2 known to no order; candidate precision too low",
                required=2 * order(delta0) + 1, available=r.prec, step="check_approximate",
            )
        quotients.append(q)
    if any(q.constant_term != 0 for q in quotients):
        return ApproximateSolution(
            y0, delta0, g0, False, tuple(quotients), M0,
            reason="quotient by delta^2 does not vanish at the origin",
        )
    return ApproximateSolution(y0, delta0, g0, True, tuple(quotients), M0)


def _unit_inverse_sq(d: Series) -> Series:
    inv = invert_unit(d)
    return inv * inv


@dataclass(frozen=True)
class TougeronData:
    """Objects of the construction in the joint ring ``(x, t, u)``."""

    n: int
    r: int  # number of free unknowns (parameters t)
    m: int
    F: tuple
    G: tuple
    M0: SeriesMatrix | None
    delta0: Series  # embedded in (x, t, u)


@dataclass(frozen=True)
class ParametricSolution:
    """``y(x, t)`` in the ring of ``n + r`` variables (x first, then t)."""

    n: int
    N: int
    m: int
    y: tuple
    u: tuple
    y0: tuple
    delta: Series  # delta0 in the x-ring
    prec: int
    data: TougeronData | None = field(default=None, compare=False)
    verified: bool = False

    @property
    def r(self) -> int:
        return self.N - self.m

    @property
    def nvars(self) -> int:
        return self.n + self.r

    def specialize(self, tbar: Sequence[Series]) -> tuple:
        """``y(x, tbar(x))``."""
        tbar = tuple(tbar)
        if len(tbar) != self.r:
            raise ValueError(f"expected {self.r} parameter series")
        if self.r == 0:
            return self.y
        p = min([s.prec for s in tbar] + [self.prec])
        args = coordinates(self.n, p) + list(tbar)
        return tuple(compose(yv, args) for yv in self.y)


def tougeron_system(cert: ApproximateSolution, f: AnalyticSystem) -> TougeronData:
    """Build ``F(x, t, u)`` and ``G = M0 F / delta0^2``."""
    if not cert.certified:
        raise CertificateError(f"candidate is not a certified approximate solution: {cert.reason}")
    n, N, m = f.n, f.N, f.m
    r = N - m
    total = n + r + m
    xs = list(range(n))
    d0 = embed(cert.delta, total, xs)
    d0sq = d0 * d0
    args = coordinates(total, max(f.prec, 2))[:n]
    for nu in range(N):
        base = embed(cert.y0[nu], total, xs)
        if nu < r:
            args.append(base + mul(d0sq, _var(n + nu, total, base.prec), sharp=True))
        else:
            args.append(base + mul(d0, _var(n + nu, total, base.prec), sharp=True))
    F = tuple(compose(fi, args) for fi in f.fs)
    if m == 0:
        return TougeronData(n, r, m, F, (), None, d0)
    M0 = cert.M0.map(lambda e: embed(e, total, xs))
    MF = matvec(M0, F)
    try:
        G = tuple(exact_divide(h, d0sq) for h in MF)
    except InexactDivisionError as exc:
        raise InexactDivisionError(
            "M(x, y0) F is not divisible by delta^2 at working precision"
        ) from exc
    return TougeronData(n, r, m, F, G, M0, d0)


def _var(i, nvars, prec):
    return variable(i, nvars, max(prec, 2))


def required_precision(cert: ApproximateSolution, c: int) -> int:
    """Candidate precision needed for a parametric solution valid modulo m^c.

    Dividing by ``delta0^2`` costs ``2 d`` orders on ``G`` (``d = ord delta0``),
    so ``u`` is known modulo ``m^(P - 2d)`` and ``delta0 u`` modulo
    ``m^(P - d)``.  Hence ``P >= c + d`` suffices.
    """
    d = order(cert.delta)
    if d == INF:
        raise VanishingMinorError("Jacobian minor vanishes along the candidate")
    return c + d


def parametric_solution(
    cert: ApproximateSolution, f: AnalyticSystem, c: int, verify: bool = True
) -> ParametricSolution:
    """Construct ``y(x, t)`` with ``f(x, y(x, t)) = 0`` modulo m^c."""
    if not cert.certified:
        raise CertificateError(f"candidate is not a certified approximate solution: {cert.reason}")
    n, N, m = f.n, f.N, f.m
    r = N - m
    need = required_precision(cert, c)
    d = order(cert.delta)
    avail = min([s.prec for s in cert.y0] + [f.prec])
    if avail < need:
        raise PrecisionError(
            f"parametric solution modulo m^{c} needs inputs modulo m^{need}, have m^{avail}",
            required=need, available=avail, step="parametric_solution",
        )
    data = tougeron_system(cert, f)
    nx = n + r
    if m == 0:
        u = ()
    else:
        c_u = max(c - d, 1)
        Gsys = AnalyticSystem(nx, m, data.G)
        if Gsys.prec < c_u:
            raise PrecisionError(
                f"reduced system known modulo m^{Gsys.prec}, need m^{c_u}",
                required=need + c_u - Gsys.prec, available=avail, step="parametric_solution",
            )
        u = newton_solve(Gsys, c_u)
    xs = list(range(n))
    d0 = embed(cert.delta, nx, xs)
    d0sq = d0 * d0
    y = []
    for nu in range(N):
        base = embed(cert.y0[nu], nx, xs)
        if nu < r:
            yv = base + mul(d0sq, _var(n + nu, nx, c), sharp=True)
        else:
            yv = base + mul(d0, u[nu - r], sharp=True)
        y.append(yv.truncate(c))
    ps = ParametricSolution(n, N, m, tuple(y), tuple(u), cert.y0, cert.delta, c, data)
    if verify:
        fx = f.insert_x(r) if r else f
        rep = verify_system(fx, ps.y, c)
        if not rep.passed:
            raise CertificateError(
                f"constructed family fails substitution check, residual orders {rep.orders}"
            )
        ps = ParametricSolution(n, N, m, ps.y, ps.u, ps.y0, ps.delta, c, data, True)
    return ps


def subordinate_params(
    ps: ParametricSolution,
    f: AnalyticSystem,
    ybar: Sequence[Series],
    c: int,
    strict: bool = False,
) -> tuple:
    """Parameters ``tbar(x)`` with ``y(x, tbar(x)) = ybar(x)``.

    The free block must satisfy ``ybar - y0 = 0 mod delta0^2 m_x`` and the
    solved block ``ybar - y0 = 0 mod delta0 m_x``.  With ``strict`` both
    moduli carry ``m_x^2`` instead.
    """
    ybar = tuple(ybar)
    N, r = ps.N, ps.r
    if len(ybar) != N:
        raise ValueError(f"expected {N} series, got {len(ybar)}")
    rep = verify_system(f, ybar, c)
    if not rep.passed:
        raise PreconditionError(f"ybar is not a solution modulo m^{c}: residual orders {rep.orders}")
    need_ord = 2 if strict else 1
    d0 = ps.delta
    tbar, utilde = [], []
    for nu in range(N):
        diff = ybar[nu] - ps.y0[nu]
        div = d0 * d0 if nu < r else d0
        try:
            q = exact_divide(diff, div)
        except InexactDivisionError as exc:
            raise CongruenceError(
                f"component {nu + 1}: ybar - y0 not divisible by delta^{2 if nu < r else 1}"
            ) from exc
        if q.prec < need_ord:
            raise PrecisionError(
                f"component {nu + 1}: quotient known only modulo m^{q.prec}",
                required=need_ord, available=q.prec, step="subordinate_params",
            )
        if order(q.truncate(need_ord)) < need_ord:
            raise CongruenceError(
                f"component {nu + 1}: ybar - y0 is not in the required congruence class"
            )
        (tbar if nu < r else utilde).append(q)
    got = ps.specialize(tbar)
    p = min([c] + [s.prec for s in got] + [s.prec for s in ybar])
    if not all(a.agrees(b, p) for a, b in zip(got, ybar)):
        raise CertificateError("specialized family does not reproduce ybar")
    return tuple(tbar)
