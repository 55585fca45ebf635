"""Weierstrass division and preparation on truncated series.

The distinguished variable defaults to the last one (``x_n``); the other
variables ``x'`` form the coefficient ring of x_n-polynomials.

Precision.  Dividing by ``x_n^k - e`` with ``e`` in the ideal generated by
``x'`` is done by the fixed point iteration

    split off the x_n-degree < k part, peel x_n^k, multiply the rest by e

which raises the x'-order every round.  Let ``rho <= 1`` be the largest slope
such that every term ``x'^a x_n^b`` (b < k) of ``e`` has ``|a| >= rho*(k-b)``.
Giving x' weight 1 and x_n weight rho, the divisor has an initial form
containing ``x_n^k`` and division respects the weighted filtration, so an
unknown tail of total degree >= P only disturbs the remainder in total degree
>= ceil(rho*P) and the quotient in total degree >= ceil(rho*(P-k)).  When the
divisor comes from a series that is x_n-regular of order equal to its total
order (the situation produced by :func:`regularize`), rho = 1 and the loss
is k orders on the quotient and none on the remainder.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from .errors import (
    InexactDivisionError,
    NotRegularError,
    PrecisionError,
    PreconditionError,
    RegularizationError,
)
from .series import (
    INF,
    Series,
    constant,
    invert_unit,
    linear_substitute,
    mul,
    order,
)


# -- x_n-polynomials -----------------------------------------------------------


def _drop(exps, v):
    return exps[:v] + exps[v + 1:]


def _insert(exps, v, k):
    return exps[:v] + (k,) + exps[v:]


def split_var(f: Series, var: int) -> dict:
    """Coefficients of ``f`` as a series in ``var`` over the other variables.

    The coefficient of ``x_var^j`` is known modulo ``m^(prec - j)``.
    """
    parts = {}
    for e, c in f.terms.items():
        parts.setdefault(e[var], {})[_drop(e, var)] = c
    return {
        j: Series._raw(f.nvars - 1, t, max(f.prec - j, 0)) for j, t in parts.items()
    }


@dataclass(frozen=True)
class XnPolynomial:
    """A polynomial in ``x_var`` with coefficients in the series ring of the others."""

    nvars: int
    coeffs: tuple  # coeffs[j] multiplies x_var^j; each a Series in nvars-1 variables
    prec: int
    var: int = -1

    def __post_init__(self):
        if self.var < 0:
            object.__setattr__(self, "var", self.nvars - 1)

    @classmethod
    def from_series(cls, f: Series, var: int | None = None, degree: int | None = None):
        v = f.nvars - 1 if var is None else var
        parts = split_var(f, v)
        top = max(parts, default=-1) if degree is None else degree
        if degree is not None and any(j > degree for j in parts):
            raise ValueError(f"series has x_n-degree above {degree}")
        coeffs = tuple(
            parts.get(j, Series._raw(f.nvars - 1, {}, max(f.prec - j, 0)))
            for j in range(top + 1)
        )
        return cls(f.nvars, coeffs, f.prec, v)

    @property
    def degree(self) -> int:
        """Highest power with a coefficient that is nonzero at its precision."""
        for j in range(len(self.coeffs) - 1, -1, -1):
            if not self.coeffs[j].is_zero():
                return j
        return -1

    def to_series(self) -> Series:
        out = {}
        for j, c in enumerate(self.coeffs):
            for e, v in c.terms.items():
                ne = _insert(e, self.var, j)
                if sum(ne) < self.prec:
                    out[ne] = v
        return Series._raw(self.nvars, out, self.prec)

    def is_zero(self) -> bool:
        return self.degree < 0


@dataclass(frozen=True)
class DistinguishedPolynomial:
    """``x_n^k + a_1 x_n^(k-1) + ... + a_k`` with every ``a_j(0) = 0``."""

    nvars: int
    coeffs: tuple  # (a_1, ..., a_k), Series in nvars-1 variables
    prec: int
    var: int = -1

    def __post_init__(self):
        if self.var < 0:
            object.__setattr__(self, "var", self.nvars - 1)
        for a in self.coeffs:
            if a.constant_term != 0:
                raise PreconditionError("distinguished polynomial coefficient has a constant term")

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    @classmethod
    def from_series(cls, w: Series, var: int | None = None):
        v = w.nvars - 1 if var is None else var
        parts = split_var(w, v)
        k = max(parts, default=-1)
        if k < 0 or dict(parts[k].terms) != {(0,) * (w.nvars - 1): 1}:
            raise PreconditionError("series is not monic in the distinguished variable")
        if w.prec <= k:
            raise PrecisionError("precision too small to see the leading power", required=k + 1,
                                 available=w.prec)
        coeffs = tuple(
            parts.get(k - j, Series._raw(w.nvars - 1, {}, max(w.prec - (k - j), 0)))
            for j in range(1, k + 1)
        )
        return cls(w.nvars, coeffs, w.prec, v)

    def tail(self) -> Series:
        """``e = x_n^k - w`` as a series in all variables."""
        out = {}
        k = self.degree
        for j, a in enumerate(self.coeffs, start=1):
            for e, c in a.terms.items():
                ne = _insert(e, self.var, k - j)
                if sum(ne) < self.prec:
                    out[ne] = -c
        return Series._raw(self.nvars, out, self.prec)

    def to_series(self) -> Series:
        e = [0] * self.nvars
        e[self.var] = self.degree
        return Series(self.nvars, {tuple(e): 1}, self.prec) - self.tail()


# -- regularity ----------------------------------------------------------------


def xn_regular_order(f: Series, var: int | None = None):
    """Order of ``f(0, ..., 0, x_var)``; ``math.inf`` if it vanishes at precision."""
    v = f.nvars - 1 if var is None else var
    best = INF
    for e, c in f.terms.items():
        if sum(e) == e[v] and e[v] < best:
            best = e[v]
    return best


@dataclass(frozen=True)
class Regularization:
    matrix: tuple  # C, with transformed f(x) = f(C x)
    inverse: tuple
    series: tuple
    orders: tuple
    shear: dict

    @property
    def is_identity(self) -> bool:
        return self.shear["kind"] == "identity"


def _initial_form(f: Series):
    d = order(f)
    return d, [(e, c) for e, c in f.terms.items() if sum(e) == d]


def _eval(form, point):
    total = Fraction(0)
    for e, c in form:
        t = c
        for k, p in zip(e, point):
            if k:
                t *= Fraction(p) ** k
        total += t
    return total


def _shear_candidates(n, v, others, max_shear):
    yield {"kind": "identity"}, {}
    for lam in range(1, max_shear + 1):
        for i in others:
            yield {"kind": "single", "var": i, "lambda": lam}, {i: lam}
    if len(others) > 1:
        for lam in range(1, max_shear + 1):
            cols = {i: lam ** (j + 1) for j, i in enumerate(others)}
            yield {"kind": "full", "lambda": lam}, cols


def shear_matrices(n: int, v: int, cols: dict):
    C = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    Ci = [row[:] for row in C]
    for i, lam in cols.items():
        C[i][v] = Fraction(lam)
        Ci[i][v] = Fraction(-lam)
    return tuple(tuple(r) for r in C), tuple(tuple(r) for r in Ci)


def regularize(
    fs: Sequence[Series],
    var: int | None = None,
    max_shear: int = 16,
    among: Sequence[int] | None = None,
) -> Regularization:
    """Find a shear making every series x_var-regular.

    Input that is already x_var-regular is returned unchanged.  Otherwise
    the shear is chosen so that each x_var-order equals the total order.  Shears ``x_i -> x_i + lambda x_var`` are tried for lambda = 1, 2, ...,
    one variable at a time, before shearing all variables together with
    ``lambda_i = lambda^i``.  ``among`` restricts the variables that may be
    sheared.
    """
    fs = list(fs)
    if not fs:
        raise ValueError("nothing to regularize")
    n = fs[0].nvars
    v = n - 1 if var is None else var
    forms = []
    for f in fs:
        if f.is_zero():
            raise RegularizationError("series vanishes at working precision; cannot regularize")
        forms.append(_initial_form(f))
    orders = tuple(xn_regular_order(f, v) for f in fs)
    if all(o != INF for o in orders):
        C, _ = shear_matrices(n, v, {})
        return Regularization(C, C, tuple(fs), orders, {"kind": "identity"})
    others = [i for i in range(n) if i != v and (among is None or i in among)]
    for shear, cols in _shear_candidates(n, v, others, max_shear):
        point = [0] * n
        point[v] = 1
        for i, lam in cols.items():
            point[i] = lam
        if all(_eval(form, point) != 0 for _, form in forms):
            C, Ci = shear_matrices(n, v, cols)
            if cols:
                out = tuple(linear_substitute(f, C) for f in fs)
            else:
                out = tuple(fs)
            orders = tuple(xn_regular_order(g, v) for g in out)
            return Regularization(C, Ci, out, orders, shear)
    raise RegularizationError(f"no shear with lambda <= {max_shear} makes the input regular")


# -- division ------------------------------------------------------------------


class Division(NamedTuple):
    q: Series
    r: XnPolynomial
    prec: int  # h == q*w + r is guaranteed modulo m^prec


def _slope(e: Series, k: int, v: int, prec_e) -> Fraction:
    rho = Fraction(1)
    if e.nvars == 1:
        return rho
    for ex, _ in e.terms.items():
        b = ex[v]
        if b < k:
            a = sum(ex) - b
            if a == 0:
                raise NotRegularError("divisor is not regular in the distinguished variable")
            rho = min(rho, Fraction(a, k - b))
    if prec_e != INF:
        # unknown terms have total degree >= prec_e and x'-degree >= 1
        for b in range(k):
            rho = min(rho, Fraction(max(1, prec_e - b), k - b))
    return rho


def _divide_core(h: Series, e: Series, k: int, v: int, prec_e):
    """Divide ``h`` by ``x_v^k - e``; returns (q, r) as Series."""
    n = h.nvars
    if n == 1:
        prec_e = INF
    rho = _slope(e, k, v, prec_e)
    num, den = rho.numerator, rho.denominator
    base = h.prec if prec_e == INF else min(h.prec, prec_e)
    T = num * base

    def weight(ex):
        b = ex[v]
        return den * (sum(ex) - b) + num * b

    e_list = sorted(((weight(ex), ex, c) for ex, c in e.terms.items()), key=lambda t: t[0])
    cur = {ex: c for ex, c in h.terms.items() if weight(ex) < T}
    q_terms, r_terms = {}, {}
    shift = num * k
    while cur:
        qi = {}
        for ex, c in cur.items():
            b = ex[v]
            if b < k:
                r_terms[ex] = r_terms.get(ex, 0) + c
            else:
                ne = ex[:v] + (b - k,) + ex[v + 1:]
                qi[ne] = qi.get(ne, 0) + c
                q_terms[ne] = q_terms.get(ne, 0) + c
        nxt = {}
        for ex, c in qi.items():
            wq = weight(ex)
            for we, ee, ce in e_list:
                if wq + we >= T:
                    break
                key = tuple(a + b for a, b in zip(ex, ee))
                nxt[key] = nxt.get(key, 0) + c * ce
        cur = {ex: c for ex, c in nxt.items() if c}

    r_prec = -((-T) // den)
    q_prec = max(0, -((-(T - shift)) // den))
    q = Series(n, {ex: c for ex, c in q_terms.items() if c}, q_prec)
    r = Series(n, {ex: c for ex, c in r_terms.items() if c}, r_prec)
    return q, r


def weierstrass_divide(h: Series, w: DistinguishedPolynomial) -> Division:
    """Weierstrass division ``h = q*w + r`` with ``deg_{x_n} r < k``."""
    if h.nvars != w.nvars:
        raise ValueError(f"variable count mismatch: {h.nvars} vs {w.nvars}")
    k, v = w.degree, w.var
    if k == 0:
        r = XnPolynomial(h.nvars, (), h.prec, v)
        return Division(h, r, h.prec)
    q, r = _divide_core(h, w.tail(), k, v, w.prec)
    rpoly = XnPolynomial.from_series(r, v, k - 1)
    guaranteed = min(h.prec, r.prec, q.prec + _ord_w(w), w.prec + q.ord_lb())
    return Division(q, rpoly, guaranteed)


def _ord_w(w: DistinguishedPolynomial) -> int:
    """Certified lower bound for the total order of ``w``."""
    return min([w.degree] + [a.ord_lb() + (w.degree - j) for j, a in enumerate(w.coeffs, 1)])


def divide_by_regular(h: Series, f: Series, var: int | None = None) -> Division:
    """Weierstrass division by a series that is x_var-regular of finite order."""
    if h.nvars != f.nvars:
        raise ValueError(f"variable count mismatch: {h.nvars} vs {f.nvars}")
    v = f.nvars - 1 if var is None else var
    k = xn_regular_order(f, v)
    if k == INF:
        raise NotRegularError("divisor is not regular in the distinguished variable at working precision")
    n = f.nvars
    if k == 0:
        q = mul(h, invert_unit(f), sharp=True)
        return Division(q, XnPolynomial(n, (), h.prec, v), min(h.prec, q.prec + f.ord_lb()))
    low, high = {}, {}
    for e, c in f.terms.items():
        if e[v] < k:
            low[e] = c
        else:
            high[e[:v] + (e[v] - k,) + e[v + 1:]] = c
    R = Series._raw(n, low, f.prec)
    U = Series._raw(n, high, max(f.prec - k, 0))
    if U.prec == 0:
        raise PrecisionError("precision too small to see the regular power", required=k + 1,
                             available=f.prec)
    Uinv = invert_unit(U)
    e = -mul(R, Uinv, sharp=True)
    q1, r = _divide_core(h, e, k, v, e.prec)
    q = mul(q1, Uinv, sharp=True)
    guaranteed = min(h.prec, r.prec, q.prec + f.ord_lb(), f.prec + q.ord_lb())
    return Division(q, XnPolynomial.from_series(r, v, k - 1), guaranteed)


class Preparation(NamedTuple):
    unit: Series
    w: DistinguishedPolynomial
    prec: int  # f == unit*w is guaranteed modulo m^prec


def weierstrass_prepare(f: Series, var: int | None = None) -> Preparation:
    """Factor ``f = unit * w`` with ``w`` distinguished of degree = x_n-order of f.

    Divides ``x_n^k`` by ``f``: if ``x_n^k = Q f + r`` then ``w = x_n^k - r``
    and the unit is ``1/Q``.
    """
    v = f.nvars - 1 if var is None else var
    k = xn_regular_order(f, v)
    if k == INF:
        raise NotRegularError("series is not regular in the distinguished variable at working precision")
    e = [0] * f.nvars
    e[v] = k
    xk = Series(f.nvars, {tuple(e): 1}, f.prec)
    if k == 0:
        w = DistinguishedPolynomial(f.nvars, (), f.prec, v)
        return Preparation(f, w, f.prec)
    Q, r, _ = divide_by_regular(xk, f, v)
    rs = r.to_series()
    if rs.prec <= k:
        raise PrecisionError(
            f"remainder known modulo m^{rs.prec}, too coarse to hold a degree {k} polynomial",
            required=k + 1, available=rs.prec, step="prepare",
        )
    w = DistinguishedPolynomial.from_series((xk - rs).with_prec(rs.prec), v)
    unit = invert_unit(Q)
    ws = w.to_series()
    guaranteed = min(f.prec, w.prec, unit.prec + ws.ord_lb())
    return Preparation(unit, w, guaranteed)


def distinguished_power(w: DistinguishedPolynomial, e: int) -> DistinguishedPolynomial:
    """``w^e`` as a distinguished polynomial."""
    s = w.to_series() ** e
    return DistinguishedPolynomial.from_series(s, w.var)


def exact_divide(a: Series, b: Series, max_shear: int = 16) -> Series:
    """Quotient ``a / b`` when ``b`` divides ``a``.

    ``b`` is regularized by a shear of the variables it involves, prepared as
    ``unit * w``, and ``a`` is Weierstrass-divided by ``w``.  A remainder that
    is nonzero at its guaranteed precision raises
    :class:`InexactDivisionError`.
    """
    if a.nvars != b.nvars:
        raise ValueError(f"variable count mismatch: {a.nvars} vs {b.nvars}")
    if b.is_unit():
        return mul(a, invert_unit(b), sharp=True)
    if b.is_zero():
        raise PrecisionError("divisor vanishes at working precision", available=b.prec)
    support = sorted({i for e in b.terms for i, k in enumerate(e) if k})
    v = support[-1]
    reg = regularize([b], var=v, max_shear=max_shear, among=support)
    bC = reg.series[0]
    aC = a if reg.is_identity else linear_substitute(a, reg.matrix)
    unit, w, _ = weierstrass_prepare(bC, v)
    q, r, _ = weierstrass_divide(aC, w)
    if not r.to_series().is_zero():
        raise InexactDivisionError("division leaves a nonzero remainder at working precision")
    qC = mul(q, invert_unit(unit), sharp=True)
    return qC if reg.is_identity else linear_substitute(qC, reg.inverse)


# -- Euclid's pseudo-division --------------------------------------------------


class PseudoDivision(NamedTuple):
    p: int
    q: XnPolynomial
    r1: XnPolynomial


def _poly_trim(cs):
    cs = list(cs)
    while cs and cs[-1].is_zero():
        cs.pop()
    return cs


def _constant_ratio(a: Series, b: Series):
    """Return kappa in Q with a == kappa*b at common precision, else None."""
    if b.is_zero():
        return None
    lead_e, lead_c = b.items()[0]
    kappa = a.coeff(lead_e) / lead_c
    return kappa if a.agrees(b.scale(kappa)) else None


def euclid_pseudo_divide(h: XnPolynomial, h1: XnPolynomial) -> PseudoDivision:
    """Pseudo-division ``c0^p h = q h1 + r1`` over the series ring in x'.

    At each step the leading coefficient of the running remainder is removed
    with a constant multiple of ``h1`` when it is a constant multiple of
    ``c0``; otherwise the remainder is first multiplied by ``c0`` and ``p``
    increases.
    """
    if h.nvars != h1.nvars:
        raise ValueError("variable count mismatch")
    l = h1.degree
    if l < 0:
        raise PreconditionError("pseudo-division by zero")
    B = list(h1.coeffs[: l + 1])
    c0 = B[l]
    nv = h.nvars - 1
    prec = min(h.prec, h1.prec)
    r = _poly_trim(h.coeffs)
    zero_c = Series._raw(nv, {}, prec)
    q = []
    p = 0
    while len(r) - 1 >= l:
        d = len(r) - 1
        lc = r[d]
        kappa = _constant_ratio(lc, c0)
        shift = d - l
        if kappa is not None:
            while len(q) <= shift:
                q.append(zero_c)
            q[shift] = q[shift] + constant(kappa, nv, prec)
            for j, b in enumerate(B):
                r[j + shift] = r[j + shift] - b.scale(kappa)
        else:
            p += 1
            q = [c * c0 for c in q]
            while len(q) <= shift:
                q.append(zero_c)
            q[shift] = q[shift] + lc
            r = [c * c0 for c in r]
            for j, b in enumerate(B):
                r[j + shift] = r[j + shift] - lc * b
        r[d] = Series._raw(nv, {}, r[d].prec)
        r = _poly_trim(r)
    pr = min([prec] + [c.prec for c in r] + [c.prec for c in q])
    qp = XnPolynomial(h.nvars, tuple(q), pr, h.var)
    rp = XnPolynomial(h.nvars, tuple(r), pr, h.var)
    return PseudoDivision(p, qp, rp)
