"""Parametric solutions through a given formal solution.

For a simple formal solution ``ybar(x)`` of ``f(x, y) = 0`` the solver
returns a family ``y(x, s, t)`` of solutions together with parameter
series ``sbar(x), tbar(x)`` without constant term such that
``y(x, sbar(x), tbar(x)) = ybar(x)``.  The construction inducts on the
number of x-variables:

* with no x-variables the solution is the origin;
* when the selected Jacobian minor is a unit at the origin the implicit
  function theorem applies directly;
* otherwise the minor is made x_n-regular of order ``p``, ``ybar`` is
  replaced by an approximate solution polynomial in ``x_n``, and the
  coefficients of that polynomial are themselves solutions of a smaller
  system in ``x' = (x_1, ..., x_{n-1})``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .errors import (
    CertificateError,
    NotRegularError,
    PrecisionError,
    PreconditionError,
    SimplicityError,
    SingularJacobianError,
)
from .ift import AnalyticSystem, coordinates, newton_solve, substitute, verify_system
from .linalg import SeriesMatrix, det, jacobian, rank_lower_bound
from .series import (
    INF, Series, compose, constant, embed, linear_substitute, monomial, mul, order, variable,
)
from .tougeron import (
    ApproximateSolution,
    ParametricSolution,
    adjoint_system,
    check_approximate,
    parametric_solution,
    subordinate_params,
)
from .weierstrass import (
    DistinguishedPolynomial,
    divide_by_regular,
    regularize,
    split_var,
    weierstrass_divide,
    weierstrass_prepare,
    xn_regular_order,
)


# -- minors and simplicity ------------------------------------------------------


def jacobian_at(f: AnalyticSystem, ybar: Sequence[Series]) -> SeriesMatrix:
    """``J(f)/J(y)`` evaluated along ``y = ybar(x)``."""
    J = f.jacobian_y()
    return J.map(lambda e: substitute([e], f.n, ybar)[0])


def select_minor(Jbar: SeriesMatrix) -> tuple:
    """Columns of the full-rank ``m x m`` minor of least order.

    Ties are broken by the lexicographically first column set.  Returns
    ``(cols, minor)``; raises :class:`SimplicityError` when every maximal
    minor vanishes at working precision.
    """
    m, N = Jbar.rows, Jbar.cols
    best = None
    for cols in combinations(range(N), m):
        d = det(Jbar.submatrix(range(m), cols))
        if d.is_zero():
            continue
        o = order(d)
        if best is None or o < best[0]:
            best = (o, cols, d)
    if best is None:
        raise SimplicityError(
            f"no {m}x{m} minor of the Jacobian is nonzero along the solution at working precision"
        )
    return best[1], best[2]


def rank_identity(h: AnalyticSystem, ybar: Sequence[Series]) -> tuple:
    """Certified ranks of ``J(h)/J(x, y)`` and ``J(h)/J(y)`` along ``ybar``.

    For the kernel equations of a formal point the two agree; the third
    entry reports whether the certificates match.
    """
    full = jacobian(h.fs, range(h.n + h.N)).map(lambda e: substitute([e], h.n, ybar)[0])
    part = jacobian_at(h, ybar)
    a, b = rank_lower_bound(full), rank_lower_bound(part)
    return a.rank, b.rank, a.rank == b.rank


def _block(C, N):
    n = len(C)
    size = n + N
    out = [[Fraction(0)] * size for _ in range(size)]
    for i in range(n):
        for j in range(n):
            out[i][j] = Fraction(C[i][j])
    for i in range(n, size):
        out[i][i] = Fraction(1)
    return out


def _shear_system(f: AnalyticSystem, C) -> AnalyticSystem:
    B = _block(C, f.N)
    return AnalyticSystem(f.n, f.N, tuple(linear_substitute(g, B) for g in f.fs))


# -- approximate solution polynomial in x_n --------------------------------------


@dataclass(frozen=True)
class ExtractionResult:
    """Approximate solution ``vbar`` polynomial in ``x_n`` under ``ybar``.

    ``ybar_nu = vbar_nu + abar^2 tbar_nu`` for the free unknowns and
    ``ybar_nu = vbar_nu + abar ubar_nu`` for the solved ones, with
    ``vbar_nu = r_nu + abar^2 c_nu`` (resp. ``r_nu + abar c_nu``).
    """

    abar: DistinguishedPolynomial
    unit: Series
    p: int
    vbar: tuple
    coeffs: tuple  # coeffs[nu][j]: coefficient of x_n^j in vbar_nu, a series in x'
    degrees: tuple  # x_n-degree bound per unknown: 2p (free) or p (solved)
    tbar: tuple
    ubar: tuple
    consts: tuple
    delta_bar: Series
    property1: bool
    property2: bool
    certificate: ApproximateSolution | None = field(default=None, compare=False)


def extract_approximate(f: AnalyticSystem, ybar: Sequence[Series]) -> ExtractionResult:
    """Divide the formal solution by powers of the distinguished part of ``delta``."""
    ybar = tuple(ybar)
    n, N, m = f.n, f.N, f.m
    r = N - m
    if n == 0:
        raise PreconditionError("extraction needs at least one x-variable")
    delta, _, _ = adjoint_system(f)
    dbar = substitute([delta], n, ybar)[0]
    p = xn_regular_order(dbar, n - 1)
    if p == INF:
        raise NotRegularError(
            "delta(x, ybar) is not x_n-regular at working precision; regularize first"
        )
    if p == 0:
        raise PreconditionError("delta(x, ybar) is a unit; use the implicit function theorem directly")
    unit, abar, _ = weierstrass_prepare(dbar, n - 1)
    a1 = abar.to_series()
    a2 = a1 * a1
    abar2 = DistinguishedPolynomial.from_series(a2, n - 1)
    vbar, tbar, ubar, consts, degs = [], [], [], [], []
    for nu in range(N):
        free = nu < r
        q, rem, _ = weierstrass_divide(ybar[nu], abar2 if free else abar)
        c = q.constant_term
        base = a2 if free else a1
        vb = rem.to_series() + base.scale(c).with_prec(max(base.prec, rem.prec))
        vbar.append(vb)
        consts.append(c)
        (tbar if free else ubar).append(q - c)
        degs.append(2 * p if free else p)
    coeffs = []
    for nu, vb in enumerate(vbar):
        parts = split_var(vb, n - 1)
        coeffs.append(tuple(parts.get(j, Series._raw(n - 1, {}, vb.prec - j))
                            for j in range(degs[nu] + 1)))
    # property 1: delta(x, vbar) = abar * unit
    dv = substitute([delta], n, vbar)[0]
    try:
        _, wv, _ = weierstrass_prepare(dv, n - 1)
        ws = wv.to_series()
        prop1 = wv.degree == p and ws.agrees(a1, min(ws.prec, a1.prec))
    except NotRegularError:
        prop1 = False
    cert = check_approximate(f, vbar)
    prop2 = cert.certified
    if not (prop1 and prop2):
        which = [name for name, ok in (("1", prop1), ("2", prop2)) if not ok]
        raise PrecisionError(
            f"extracted polynomial fails property {' and '.join(which)} at working precision",
            step="extract_approximate",
        )
    return ExtractionResult(
        abar, unit, p, tuple(vbar), tuple(coeffs), tuple(degs), tuple(tbar), tuple(ubar),
        tuple(consts), dbar, prop1, prop2, cert,
    )


# -- the system for the coefficients -------------------------------------------


@dataclass(frozen=True)
class ReducedSystem:
    """Remainder equations ``F(x', V)`` for the coefficients of ``v``.

    ``v_nu = sum_j (c0[nu][j] + V_{nu,j}) x_n^j``; the unknowns ``V`` are
    ordered by ``(nu, j)``.  ``F`` lists ``R_{i,j}`` ordered by ``(i, j)``
    where ``g_i(x, v) = Q_i delta(x, v)^2 + sum_{j<2p} R_{i,j} x_n^j``.
    """

    c0: tuple
    degrees: tuple
    p: int
    F: AnalyticSystem
    index: tuple  # (nu, j) per unknown
    Q: tuple  # cofactors, in the ring (x', V, x_n)
    delta_v: Series  # delta(x, v) in the ring (x', V, x_n)

    @property
    def M(self) -> int:
        return self.F.m

    def family(self, coeffs) -> tuple:
        """Flatten ``coeffs[nu][j] - c0[nu][j]`` into the unknown order."""
        out = []
        for nu, j in self.index:
            s = coeffs[nu][j]
            out.append(s - self.c0[nu][j])
        return tuple(out)

    def assemble(self, V: Sequence[Series], nx: int, extra: int = 0) -> tuple:
        """``v_nu(x, ...) = sum_j (c0 + V_{nu,j}) x_n^j``.

        ``V`` are series in ``(x', extra)`` variables; the result lives in
        ``(x', x_n, extra)``.
        """
        total = nx + extra
        positions = list(range(nx - 1)) + list(range(nx, total))
        out = []
        k = 0
        for nu, deg in enumerate(self.degrees):
            acc = None
            for j in range(deg + 1):
                coef = embed(V[k], total, positions) + self.c0[nu][j]
                k += 1
                if j:
                    # coef * x_n^j is known modulo m^(prec(coef) + j)
                    e = [0] * total
                    e[nx - 1] = j
                    coef = mul(coef, monomial(e, total, coef.prec + j), sharp=True)
                acc = coef if acc is None else acc + coef
            out.append(acc)
        return tuple(out)


def reduce_system(
    f: AnalyticSystem,
    c0: Sequence[Sequence],
    degrees: Sequence[int] | int,
    p: int,
    prec: int | None = None,
) -> ReducedSystem:
    """Remainders of ``g_i(x, v)`` on division by ``delta(x, v)^2`` in ``x_n``."""
    n, N = f.n, f.N
    if p <= 0:
        raise PreconditionError("p = 0: the Jacobian minor is a unit, use the implicit function theorem")
    if p == INF:
        raise PrecisionError("order p is not finite at working precision", step="reduce_system")
    if n == 0:
        raise PreconditionError("reduction needs at least one x-variable")
    if isinstance(degrees, int):
        degrees = [degrees] * N
    degrees = tuple(degrees)
    c0 = tuple(tuple(Fraction(c) for c in row) for row in c0)
    if len(c0) != N or any(len(row) != d + 1 for row, d in zip(c0, degrees)):
        raise ValueError("constant family does not match the degree bounds")
    if any(row[0] != 0 for row in c0):
        raise PreconditionError("constant coefficients c0[nu][0] must vanish")
    index = tuple((nu, j) for nu in range(N) for j in range(degrees[nu] + 1))
    K = len(index)
    total = (n - 1) + K + 1
    W = f.prec if prec is None else prec
    last = total - 1
    xs = [variable(i, total, W) for i in range(n - 1)] + [variable(last, total, W)]
    xn = xs[-1]
    vs = []
    k = 0
    for nu in range(N):
        acc = Series._raw(total, {}, W)
        for j in range(degrees[nu] + 1):
            coef = variable(n - 1 + k, total, W) + c0[nu][j]
            k += 1
            acc = acc + (coef * xn ** j if j else coef)
        vs.append(acc)
    args = xs + vs
    delta, _, g = adjoint_system(f)
    dv = compose(delta, args)
    ordp = xn_regular_order(dv, last)
    if ordp != p:
        raise PreconditionError(
            f"delta(0, x_n, sum c0 x_n^j) has order {ordp}, expected p = {p}"
        )
    dv2 = dv * dv
    Fs, Qs = [], []
    for gi in g:
        h = compose(gi, args)
        q, rem, _ = divide_by_regular(h, dv2, last)
        Qs.append(q)
        rs = rem.to_series()
        parts = split_var(rs, last)
        for j in range(2 * p):
            part = parts.get(j, Series._raw(total - 1, {}, max(rs.prec - j, 0)))
            Fs.append(part)
    Fsys = AnalyticSystem(n - 1, K, tuple(Fs))
    return ReducedSystem(c0, degrees, p, Fsys, index, tuple(Qs), dv)


def family_certifies(rs: ReducedSystem, f: AnalyticSystem, family: Sequence[Series]):
    """Check a coefficient family both ways.

    Returns ``(annihilates, certified)``: whether ``F(x', family)`` vanishes at
    working precision, and whether the assembled ``v`` passes
    :func:`check_approximate`.
    """
    n = f.n
    fam = tuple(family)
    if n - 1 == 0:
        vals = tuple(constant(g.constant_term, 0, g.prec) for g in rs.F.fs)
    else:
        vals = substitute(rs.F.fs, n - 1, fam)
    annihilates = all(v.is_zero() for v in vals)
    v = rs.assemble(fam, n)
    if any(s.constant_term != 0 for s in v):
        return annihilates, False
    cert = check_approximate(f, v)
    return annihilates, cert.certified


# -- the recursion ----------------------------------------------------------------


@dataclass(frozen=True)
class StrongSolution:
    """A family ``y(x, s, t)`` with ``f(x, y) = 0`` and a specialization.

    ``y`` lives in ``n + len(tbar_full)`` variables: ``x`` first, then the
    parameters ``s`` inherited from the recursion, then ``t``.
    ``tbar_full`` holds the specialization ``(sbar(x), tbar(x))``.
    """

    n: int
    N: int
    y: tuple
    tbar_full: tuple
    prec: int
    path: str
    s_count: int = 0
    perm: tuple = ()
    shear: dict | None = None
    p: int | None = None
    inner: "StrongSolution | None" = field(default=None, compare=False)
    parametric: ParametricSolution | None = field(default=None, compare=False)

    @property
    def nparams(self) -> int:
        return len(self.tbar_full)

    def evaluate(self, params: Sequence[Series]) -> tuple:
        """``y(x, params(x))``."""
        params = tuple(params)
        if len(params) != self.nparams:
            raise ValueError(f"expected {self.nparams} parameter series")
        if not params:
            return self.y
        p = min([s.prec for s in params] + [self.prec])
        args = coordinates(self.n, p) + list(params)
        return tuple(compose(yv, args) for yv in self.y)

    def specialized(self) -> tuple:
        return self.evaluate(self.tbar_full)


def _zero(nv, prec):
    return Series._raw(nv, {}, prec)


def _check_solution_input(f: AnalyticSystem, ybar, c):
    if len(ybar) != f.N:
        raise ValueError(f"expected {f.N} series, got {len(ybar)}")
    if any(s.nvars != f.n for s in ybar):
        raise ValueError("solution series live in the wrong ring")
    if f.m > f.N:
        raise PreconditionError(f"more equations ({f.m}) than unknowns ({f.N})")
    rep = verify_system(f, ybar, c)
    if not rep.passed:
        raise PreconditionError(f"ybar is not a solution modulo m^{c}: residual orders {rep.orders}")


def solve_recursive(
    f: AnalyticSystem,
    ybar: Sequence[Series],
    c: int,
    *,
    max_shear: int = 16,
    strict: bool = False,
) -> StrongSolution:
    """Build ``y(x, s, t)`` and ``(sbar, tbar)`` through the simple solution ``ybar``."""
    ybar = tuple(ybar)
    n, N, m = f.n, f.N, f.m
    if n == 0:
        if any(not s.is_zero() for s in ybar):
            raise PreconditionError("a solution in no variables must be the origin")
        if any(g.constant_term != 0 for g in f.fs):
            raise PreconditionError("the origin is not a solution")
        return StrongSolution(0, N, tuple(_zero(0, c) for _ in range(N)), (), c, "trivial")
    _check_solution_input(f, ybar, c)
    if m == 0:
        y = tuple(variable(n + i, n + N, c) for i in range(N))
        return StrongSolution(n, N, y, ybar, c, "free", perm=tuple(range(N)))

    Jbar = jacobian_at(f, ybar)
    cols, dbar = select_minor(Jbar)
    perm = tuple(j for j in range(N) if j not in cols) + tuple(cols)
    fp = f.permute_y(perm)
    yp = tuple(ybar[j] for j in perm)

    if dbar.constant_term != 0:
        sol = _ift_path(fp, yp, c, strict)
    else:
        sol = _recursive_path(fp, yp, dbar, c, max_shear, strict)
    y = [None] * N
    for k, j in enumerate(perm):
        y[j] = sol.y[k]
    sol = StrongSolution(
        n, N, tuple(y), sol.tbar_full, sol.prec, sol.path, sol.s_count, perm,
        sol.shear, sol.p, sol.inner, sol.parametric,
    )
    _final_check(f, sol, ybar, c)
    return sol


def _final_check(f, sol: StrongSolution, ybar, c):
    got = sol.specialized()
    if not all(a.agrees(b, c) for a, b in zip(got, ybar)):
        raise CertificateError("specialized family does not reproduce ybar modulo m^c")
    fx = f.insert_x(sol.nparams) if sol.nparams else f
    rep = verify_system(fx, sol.y, c)
    if not rep.passed:
        raise CertificateError(f"family fails f(x, y) = 0 modulo m^{c}: orders {rep.orders}")


def _ift_path(f: AnalyticSystem, ybar, c, strict) -> StrongSolution:
    n, N = f.n, f.N
    y0 = tuple(_zero(n, c) for _ in range(N))
    cert = check_approximate(f, y0)
    if not cert.certified:
        raise CertificateError(f"origin is not an approximate solution: {cert.reason}")
    ps = parametric_solution(cert, f, c)
    tbar = subordinate_params(ps, f, ybar, c, strict=strict)
    return StrongSolution(n, N, ps.y, tuple(tbar), c, "ift", parametric=ps)


def _recursive_path(f: AnalyticSystem, ybar, dbar, c, max_shear, strict) -> StrongSolution:
    n, N = f.n, f.N
    reg = regularize([dbar], var=n - 1, max_shear=max_shear)
    if reg.is_identity:
        fC, yC = f, ybar
    else:
        fC = _shear_system(f, reg.matrix)
        yC = tuple(linear_substitute(s, reg.matrix) for s in ybar)
    ext = extract_approximate(fC, yC)
    p = ext.p
    c0 = tuple(tuple(s.constant_term for s in row) for row in ext.coeffs)
    rs = reduce_system(fC, c0, ext.degrees, p)
    family = rs.family(ext.coeffs)
    c_in = c + p

    # solve for the coefficients over x' using a maximal independent subsystem
    if n - 1 == 0:
        inner = solve_recursive(rs.F, tuple(_zero(0, c_in) for _ in family), c_in)
        Vx = tuple(_zero(0, c_in) for _ in family)
        S = 0
        sbar = ()
    else:
        Jf = jacobian_at(rs.F, family)
        cert = rank_lower_bound(Jf)
        sub = rs.F.select(cert.rows)
        inner = solve_recursive(sub, family, c_in, max_shear=max_shear, strict=strict)
        S = inner.nparams
        Vx = inner.y
        sbar = inner.tbar_full
        fx = rs.F.insert_x(S) if S else rs.F
        rep = verify_system(fx, Vx, c_in)
        if not rep.passed:
            raise PreconditionError(
                "coefficient system is not cut out by an independent subsystem; "
                "this needs kernel equations that are not constructed here"
            )
    v = rs.assemble(Vx, n, S)
    v = tuple(s.truncate(c_in) for s in v)

    fxs = fC.insert_x(S) if S else fC
    cert = check_approximate(fxs, v)
    if not cert.certified:
        raise CertificateError(f"assembled polynomial is not an approximate solution: {cert.reason}")
    ps = parametric_solution(cert, fxs, c)

    # specialize s = sbar(x') and read off t
    nx = n + S
    if S:
        x_to_n = list(range(n - 1))
        sb = tuple(embed(s, n, x_to_n) for s in sbar)
        ps_s = _specialize_s(ps, n, S, sb)
    else:
        sb = ()
        ps_s = ps
    tbar = subordinate_params(ps_s, fC, yC, c, strict=strict)

    y = ps.y
    spec = tuple(sb) + tuple(tbar)
    if not reg.is_identity:
        total = nx + ps.r
        B = _block(reg.inverse, total - n)
        y = tuple(linear_substitute(s, B) for s in y)
        spec = tuple(linear_substitute(s, reg.inverse) for s in spec)
    return StrongSolution(
        n, N, y, spec, c, "recursive", S, (), reg.shear, p, inner, ps,
    )


def _specialize_s(ps: ParametricSolution, n: int, S: int, sb: Sequence[Series]) -> ParametricSolution:
    """Substitute ``s = sb(x)`` in a parametric solution over ``(x, s, t)``."""
    r = ps.r
    p_sb = min([s.prec for s in sb] + [ps.prec])
    # (x, s, t) -> (x, t)
    xt = n + r
    args_xt = [variable(i, xt, p_sb) for i in range(n)]
    args_xt += [embed(s, xt, list(range(n))) for s in sb]
    args_xt += [variable(n + i, xt, p_sb) for i in range(r)]
    args_x = coordinates(n, p_sb) + list(sb)
    y = tuple(compose(s, args_xt) for s in ps.y)
    u = tuple(compose(s, args_xt) for s in ps.u)
    y0 = tuple(compose(s, args_x) for s in ps.y0)
    delta = compose(ps.delta, args_x)
    return ParametricSolution(n, ps.N, ps.m, y, u, y0, delta, min(ps.prec, p_sb), None, ps.verified)


def artin_approximate(
    f: AnalyticSystem, ybar: Sequence[Series], c: int, **kwargs
) -> tuple:
    """A solution ``y(x)`` with ``f(x, y) = 0`` and ``y = ybar`` modulo m^c.

    The specialization is truncated to polynomials of degree below ``c`` and
    substituted into the parametric family.

    When ``ybar`` is known to less than ``c`` orders, the request only makes
    sense if the solution is determined by its low-order terms: a square
    system with a unit Jacobian.  That case is delegated to
    :func:`corollary1_lift` and the result agrees with ``ybar`` to its own
    precision.
    """
    ybar = tuple(ybar)
    known = min((s.prec for s in ybar), default=c)
    if known < c:
        if f.m == f.N and f.n > 0 and det(f.jacobian_y()).constant_term != 0:
            return corollary1_lift(f, ybar, c)
        raise PrecisionError(
            f"formal solution known modulo m^{known}, approximation requested modulo m^{c}",
            required=c, available=known, step="artin_approximate",
        )
    sol = solve_recursive(f, ybar, c, **kwargs)
    params = tuple(s.truncate(c) for s in sol.tbar_full)
    y = tuple(s.truncate(c) for s in sol.evaluate(params))
    rep = verify_system(f, y, c)
    if not rep.passed:
        raise CertificateError(f"approximation fails modulo m^{c}: orders {rep.orders}")
    if not all(a.agrees(b, c) for a, b in zip(y, ybar)):
        raise CertificateError("approximation does not agree with ybar modulo m^c")
    return y


def corollary1_lift(f: AnalyticSystem, ybar_trunc: Sequence[Series], c: int) -> tuple:
    """Lift a truncated solution of a square system with unit Jacobian to order ``c``."""
    ybar_trunc = tuple(ybar_trunc)
    n, N, m = f.n, f.N, f.m
    if m != N:
        raise PreconditionError("lifting needs as many equations as unknowns")
    if len(ybar_trunc) != N or any(s.nvars != n for s in ybar_trunc):
        raise ValueError("truncated solution has the wrong shape")
    if any(s.constant_term != 0 for s in ybar_trunc):
        raise PreconditionError("truncated solution must vanish at the origin")
    if any(g.constant_term != 0 for g in f.fs):
        raise PreconditionError("the origin is not a solution")
    k = min(s.prec for s in ybar_trunc)
    d0 = det(f.jacobian_y()).constant_term
    if d0 == 0:
        raise SingularJacobianError("Jacobian determinant vanishes at the origin")
    rep = verify_system(f, ybar_trunc, k)
    if not rep.passed:
        raise PreconditionError(
            f"truncated input is not a solution modulo its own precision m^{k}: orders {rep.orders}"
        )
    start = tuple(s.truncate(k) for s in ybar_trunc)
    return newton_solve(f, c, initial=start)
