from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from artin_approx import (
    AnalyticSystem, NotRegularError, PreconditionError, SingularJacobianError,
    artin_approximate, corollary1_lift, extract_approximate, reduce_system,
    solve_recursive, verify_system, weierstrass_divide, weierstrass_prepare,
)
from artin_approx.artin import family_certifies, rank_identity, select_minor, jacobian_at
from artin_approx.series import Series, constant, variable

from conftest import P, coefs

X = ["x"]
XY = ["x", "y"]
X12 = ["x1", "x2"]
X12Y = ["x1", "x2", "y"]


def binom_half(k):
    out = Fraction(1)
    for i in range(k):
        out *= (Fraction(1, 2) - i) / (i + 1)
    return out


def node(prec=14):
    return AnalyticSystem(1, 1, [P("y^2 - x^2*(1 + x)", XY, prec)])


def split_node(prec=14):
    return AnalyticSystem(2, 1, [P("y^2 - x2^2*(1 + x1)", X12Y, prec)])


def split_node_solution(prec=10):
    """x2 * sqrt(1 + x1) written out from the binomial coefficients."""
    return Series(2, {(k, 1): binom_half(k) for k in range(prec - 1)}, prec)


# -- extraction -------------------------------------------------------------------


def test_extract_node_example():
    res = extract_approximate(node(), [P("x + x^2/2 - x^3/8", X, 12)])
    assert res.p == 1
    assert res.abar.to_series().agrees(P("x", X), res.abar.prec)
    assert res.vbar[0].agrees(P("x", X), 10)
    assert res.ubar[0].agrees(P("x/2 - x^2/8", X), 10)
    assert res.consts == (1,)
    assert res.property1 and res.property2


def test_extract_fixed_point_and_idempotence():
    f = AnalyticSystem(1, 1, [P("y^2 - x^2", XY, 12)])
    res = extract_approximate(f, [P("x", X, 12)])
    assert res.abar.to_series().agrees(P("x", X), res.abar.prec)
    assert res.vbar[0].agrees(P("x", X), 11)
    again = extract_approximate(f, res.vbar)
    assert again.vbar[0].agrees(res.vbar[0], 11)


def test_extract_properties_by_prepare_and_divide():
    f = node()
    ybar = [P("x + x^2/2 - x^3/8 + x^4/16", X, 12)]
    res = extract_approximate(f, ybar)
    # property 1: delta(x, vbar) = 2 vbar has distinguished part abar
    unit, w, _ = weierstrass_prepare(P("2*x", X, 12))
    assert w.to_series().agrees(res.abar.to_series(), w.prec)
    # property 2: g(x, vbar) divided by abar^2 leaves no remainder and a cofactor in m_x
    g = res.certificate.g_residuals[0]
    a2 = weierstrass_prepare(res.abar.to_series() ** 2)[1]
    q, r, _ = weierstrass_divide(g, a2)
    assert r.is_zero() and q.constant_term == 0


def test_extract_not_regular():
    f = AnalyticSystem(2, 1, [P("y^2 - x1^2", X12Y, 12)])
    with pytest.raises(NotRegularError):
        extract_approximate(f, [P("x1", X12, 12)])


def test_extract_rejects_unit_minor():
    f = AnalyticSystem(1, 1, [P("y - x - y^2", XY, 12)])
    with pytest.raises(PreconditionError):
        extract_approximate(f, [P("x + x^2", X, 12)])


# -- reduced system ------------------------------------------------------------------


def reduce_oracle(k):
    """R0 = (1+x1) V0^2 / (1+V1)^2 and R1 = 2 (1+x1) V0 / (1+V1), ring (x1, V0, V1),
    expanded by the binomial series of (1 + V1)^(-e)."""
    r0, r1 = {}, {}
    for i in range(k):
        for a in (0, 1):
            r0[(a, 2, i)] = (-1) ** i * (i + 1)
            r1[(a, 1, i)] = 2 * (-1) ** i
    return r0, r1


def test_reduce_example():
    rs = reduce_system(split_node(), [[0, 1]], 1, 1)
    assert rs.M == 2 == 2 * rs.p * split_node().m
    assert rs.index == ((0, 0), (0, 1))
    R0, R1 = rs.F.fs
    o0, o1 = reduce_oracle(12)
    for R, o in ((R0, o0), (R1, o1)):
        want = Series(3, {e: c for e, c in o.items() if sum(e) < R.prec}, R.prec)
        assert R.agrees(want)


def test_reduce_errors():
    with pytest.raises(PreconditionError):
        reduce_system(split_node(), [[0, 1]], 1, 0)
    with pytest.raises(PreconditionError):
        reduce_system(split_node(), [[1, 1]], 1, 1)


def test_reduce_both_directions():
    f = split_node(20)
    rs = reduce_system(f, [[0, 1]], 1, 1)
    ybar = [split_node_solution(10)]
    res = extract_approximate(f, ybar)
    family = rs.family(res.coeffs)
    annihilates, certified = family_certifies(rs, f, family)
    assert annihilates and certified
    bumped = (family[0] + P("x1", ["x1"], family[0].prec), family[1])
    annihilates, certified = family_certifies(rs, f, bumped)
    assert not annihilates and not certified


# -- recursion -----------------------------------------------------------------------


def test_solve_trivial_in_zero_variables():
    sol = solve_recursive(AnalyticSystem(0, 1, [P("y^2 - y", ["y"])]), [Series(0, {}, 5)], 4)
    assert sol.path == "trivial" and sol.nparams == 0 and sol.y[0].is_zero()


def test_solve_ift_path_catalan():
    f = AnalyticSystem(1, 1, [P("y - x - y^2", XY, 12)])
    ybar = [P("x + x^2 + 2*x^3 + 5*x^4 + 14*x^5 + 42*x^6 + 132*x^7", X, 8)]
    sol = solve_recursive(f, ybar, 8)
    assert sol.path == "ift" and sol.nparams == 0
    assert sol.y[0].agrees(ybar[0], 8)


def test_solve_split_node():
    f = split_node(20)
    ybar = [split_node_solution(10)]
    sol = solve_recursive(f, ybar, 8)
    assert sol.path == "recursive" and sol.p == 1
    fx = f.insert_x(sol.nparams)
    assert verify_system(fx, sol.y, 8).passed
    assert sol.specialized()[0].agrees(ybar[0], 8)


def test_select_minor_prefers_lowest_order():
    names = ["x", "y1", "y2"]
    f = AnalyticSystem(1, 2, [P("x*y1 + y2 - y1^2", names, 8)])
    J = jacobian_at(f, [P("x", X, 8), Series(1, {}, 8)])
    cols, minor = select_minor(J)
    assert cols == (1,) and minor.constant_term == 1


def test_rank_identity_on_simple_solution():
    rf, ry, same = rank_identity(split_node(), [split_node_solution(10)])
    assert rf == ry == 1 and same


# -- Artin deduction ---------------------------------------------------------------


def test_artin_catalan_from_truncation():
    f = AnalyticSystem(1, 1, [P("y - x - y^2", XY, 12)])
    (y,) = artin_approximate(f, [P("x + x^2", X, 3)], 6)
    assert y.agrees(P("x + x^2 + 2*x^3 + 5*x^4 + 14*x^5", X), 6)


def test_artin_exact_polynomial_solution():
    f = AnalyticSystem(1, 1, [P("y - x", XY, 12)])
    (y,) = artin_approximate(f, [P("x", X, 12)], 6)
    assert y.agrees(P("x", X), 6)


def test_artin_split_node():
    (y,) = artin_approximate(split_node(20), [split_node_solution(10)], 4)
    assert y.agrees(P("x2 + x1*x2/2 - x1^2*x2/8", X12), 4)


def test_corollary1_examples():
    f = AnalyticSystem(1, 1, [P("y - x - y^2", XY, 12)])
    (y,) = corollary1_lift(f, [P("x + x^2", X, 3)], 6)
    assert y.agrees(P("x + x^2 + 2*x^3 + 5*x^4 + 14*x^5", X), 6)
    (y,) = corollary1_lift(AnalyticSystem(1, 1, [P("y - x", XY)]), [P("x", X, 2)], 7)
    assert y.agrees(P("x", X), 7)
    with pytest.raises(SingularJacobianError):
        corollary1_lift(AnalyticSystem(1, 1, [P("y^2 - x", XY)]), [Series(1, {}, 2)], 5)


@st.composite
def scaled_node(draw):
    """y^2 - lam^2 x2^2 (1 + mu x1) with ybar = lam x2 sqrt(1 + mu x1)."""
    lam = draw(coefs.filter(lambda q: q != 0))
    mu = draw(coefs.filter(lambda q: q != 0))
    f = P("y^2", X12Y, 16) - P("x2^2", X12Y, 16).scale(lam * lam) \
        * (constant(1, 3, 16) + variable(0, 3, 16).scale(mu))
    ybar = Series(2, {(k, 1): lam * binom_half(k) * mu ** k for k in range(9)}, 10)
    return AnalyticSystem(2, 1, [f]), [ybar]


@settings(max_examples=10)
@given(scaled_node())
def test_end_to_end_on_scaled_nodes(case):
    f, ybar = case
    (y,) = artin_approximate(f, ybar, 5)
    assert verify_system(f, [y], 5).passed
    assert y.agrees(ybar[0], 5)
