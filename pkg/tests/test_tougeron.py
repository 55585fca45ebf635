from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from artin_approx import (
    AnalyticSystem, CertificateError, CongruenceError, PrecisionError, PreconditionError, VanishingMinorError,
    check_approximate, det, jacobian, newton_solve, parametric_solution, subordinate_params,
    tougeron_system, verify_system,
)
from artin_approx.linalg import matvec
from artin_approx.series import Series, constant, embed, mul

from conftest import P, coefs, series

XY = ["x", "y"]
X = ["x"]
XYY = ["x", "y1", "y2"]


def binom_half(k):
    """Coefficient of x^k in sqrt(1 + x)."""
    out = Fraction(1)
    for i in range(k):
        out *= (Fraction(1, 2) - i) / (i + 1)
    return out


def node(prec=16):
    return AnalyticSystem(1, 1, [P("y^2 - x^2*(1 + x)", XY, prec)])


def at_origin_of(s, keep):
    """Drop every term involving a variable beyond the first ``keep``."""
    return Series(s.nvars, {e: c for e, c in s.terms.items() if not any(e[keep:])}, s.prec)


# -- check_approximate ---------------------------------------------------------------


def test_check_approximate_examples():
    cert = check_approximate(node(), [P("x", X)])
    assert cert.certified
    assert cert.delta.agrees(P("2*x", X, cert.delta.prec))
    assert cert.g_residuals[0].agrees(P("-x^3", X, cert.g_residuals[0].prec))
    cert = check_approximate(AnalyticSystem(1, 2, [P("y2 - x - y1^2", XYY)]), [P("0", X), P("0", X)])
    assert cert.certified and cert.delta.agrees(constant(1, 1, 10), 10)
    with pytest.raises(VanishingMinorError):
        check_approximate(node(), [P("0", X)])


def test_check_approximate_rejects():
    # y0 = 2x leaves -3x^2 - x^3, which is not in (4x)^2 m_x
    cert = check_approximate(node(), [P("2*x", X)])
    assert not cert.certified
    with pytest.raises(CertificateError):
        parametric_solution(cert, node(), 4)


# -- parametric solutions ------------------------------------------------------------


def test_parametric_node_is_binomial_series():
    f = node()
    cert = check_approximate(f, [P("x", X)])
    ps = parametric_solution(cert, f, 9)
    assert ps.verified and ps.r == 0
    (y,) = ps.y
    for k in range(1, 9):
        assert y.coeff((k,)) == binom_half(k - 1)
    (u,) = ps.u
    assert u.agrees(P("x/4 - x^2/16 + x^3/32", X), 4)


def test_parametric_free_block():
    f = AnalyticSystem(1, 2, [P("y2 - x - y1^2", XYY, 12)])
    cert = check_approximate(f, [Series(1, {}, 12), Series(1, {}, 12)])
    ps = parametric_solution(cert, f, 8)
    XT = ["x", "t"]
    assert ps.y[0].agrees(P("t", XT, 8)) and ps.y[1].agrees(P("x + t^2", XT, 8))


def test_parametric_trivial():
    f = AnalyticSystem(1, 1, [P("y", XY)])
    ps = parametric_solution(check_approximate(f, [Series(1, {}, 10)]), f, 6)
    assert ps.y[0].is_zero()


def test_parametric_precision_budget():
    cert = check_approximate(node(6), [P("x", X, 6)])
    with pytest.raises(PrecisionError):
        parametric_solution(cert, node(6), 6)


def construction_identities(f, cert):
    data = tougeron_system(cert, f)
    n, r, m = data.n, data.r, data.m
    d0sq = data.delta0 * data.delta0
    for lhs, g in zip(matvec(data.M0, data.F), data.G):
        rhs = mul(d0sq, g, sharp=True)
        assert lhs.agrees(rhs, min(lhs.prec, rhs.prec))
    uvars = [n + r + j for j in range(m)]
    dF = det(jacobian(data.F, uvars))
    expect = data.delta0 ** (m + 1)
    got = at_origin_of(dF, n)
    assert got.agrees(expect, min(got.prec, expect.prec))
    dG = det(jacobian(data.G, uvars))
    assert dG.constant_term == 1


def test_construction_identities_on_examples():
    construction_identities(node(), check_approximate(node(), [P("x", X)]))
    f = AnalyticSystem(1, 2, [P("y2 - x - y1^2", XYY)])
    construction_identities(f, check_approximate(f, [Series(1, {}, 10)] * 2))


# -- subordination ----------------------------------------------------------------


def chain():
    f = AnalyticSystem(1, 2, [P("y2 - x - y1^2", XYY, 12)])
    ps = parametric_solution(check_approximate(f, [Series(1, {}, 12)] * 2), f, 8)
    return f, ps


def test_subordinate_examples():
    f, ps = chain()
    (t,) = subordinate_params(ps, f, [P("x^2", X), P("x + x^4", X)], 8)
    assert t.agrees(P("x^2", X), 6)
    (t,) = subordinate_params(ps, f, [Series(1, {}, 10), P("x", X)], 8)
    assert t.is_zero()


def test_subordinate_moduli_default_and_strict():
    f, ps = chain()
    ybar = [P("x", X), P("x + x^2", X)]
    (t,) = subordinate_params(ps, f, ybar, 8)
    assert t.agrees(P("x", X), 6)
    with pytest.raises(CongruenceError):
        subordinate_params(ps, f, ybar, 8, strict=True)
    with pytest.raises(CongruenceError):
        subordinate_params(ps, f, [P("x^2", X), P("x + x^4", X)], 8, strict=True)


def test_subordinate_rejects_non_solution():
    f, ps = chain()
    with pytest.raises(PreconditionError):
        subordinate_params(ps, f, [P("x", X), P("x", X)], 8)


# -- properties ------------------------------------------------------------------


@st.composite
def node_family(draw):
    """y^2 - x1^2 w(x) with w(0) = 1 and candidate y0 = x1."""
    n = draw(st.integers(1, 2))
    prec = 12
    w = draw(series(n, prec, max_terms=4, unit=False))
    w = Series(n, dict(w.terms) | {(0,) * n: 1}, prec)
    names = [f"x{i + 1}" for i in range(n)] + ["y"]
    ys = P("y^2", names, prec)
    x1sq = P("x1^2", names, prec)
    f = ys - x1sq * embed(w, n + 1, list(range(n)), prec)
    y0 = P("x1", names[:n], prec)
    return AnalyticSystem(n, 1, [f]), [y0]


@given(node_family())
def test_node_family_properties(case):
    f, y0 = case
    cert = check_approximate(f, y0)
    assert cert.certified
    construction_identities(f, cert)
    ps = parametric_solution(cert, f, 6)
    assert verify_system(f, ps.y, 6).passed
    data = ps.data
    G = AnalyticSystem(data.n + data.r, data.m, data.G)
    again = newton_solve(G, 5, initial=[ps.u[0].truncate(2).with_prec(2)])
    assert again[0].agrees(ps.u[0], 5)


@st.composite
def unit_family(draw):
    """y2 - a(x) - b * y1^2 - e(x) y1 with y0 = 0: unit Jacobian, one free unknown."""
    a = draw(series(1, 8, max_terms=3, unit=False))
    e = draw(series(1, 8, max_terms=2, unit=False))
    b = draw(coefs)
    f = P("y2", XYY, 8) - embed(a, 3, [0]) - P("y1^2", XYY, 8).scale(b) \
        - embed(e, 3, [0]) * P("y1", XYY, 8)
    return AnalyticSystem(1, 2, [f])


@given(unit_family())
def test_unit_family_round_trip(f):
    y0 = [Series(1, {}, 8)] * 2
    cert = check_approximate(f, y0)
    assert cert.certified
    construction_identities(f, cert)
    ps = parametric_solution(cert, f, 6)
    assert verify_system(f.insert_x(1), ps.y, 6).passed
    # specialize at t = x^2, then recover the parameter
    ybar = ps.specialize([P("x^2", X, 8)])
    (t,) = subordinate_params(ps, f, ybar, 6)
    assert t.agrees(P("x^2", X), min(t.prec, 4))
