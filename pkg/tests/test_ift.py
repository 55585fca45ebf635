from itertools import product

import pytest
from hypothesis import given, strategies as st

from artin_approx import (
    AnalyticSystem, PrecisionError, PreconditionError, SingularJacobianError, newton_solve,
    verify_system,
)
from artin_approx.ift import default_rounds, substitute
from artin_approx.series import Series, compose, order, variable

from conftest import P, coefs, series

XU = ["x", "u"]


def catalan(k):
    c = [0, 1]
    for j in range(2, k + 1):
        c.append(sum(c[i] * c[j - i] for i in range(1, j)))
    return c


def test_catalan_against_convolution_oracle():
    c = 12
    G = AnalyticSystem(1, 1, [P("u - x - u^2", XU, c + 2)])
    (u,) = newton_solve(G, c)
    cat = catalan(c - 1)
    for k in range(1, c):
        assert u.coeff((k,)) == cat[k]
    assert u.prec == c


def test_linear_and_triangular_examples():
    (u,) = newton_solve(AnalyticSystem(1, 1, [P("u - x", XU)]), 8)
    assert u.agrees(P("x", ["x"], 8))
    names = ["x", "u1", "u2"]
    G = AnalyticSystem(1, 2, [P("u1 - x - u2^2", names), P("u2 - x^2", names)])
    u1, u2 = newton_solve(G, 8)
    assert u2.agrees(P("x^2", ["x"], 8))
    assert u1.agrees(P("x + x^4", ["x"], 8))


def test_newton_errors():
    with pytest.raises(PreconditionError):
        newton_solve(AnalyticSystem(1, 1, [P("u - x + 1", XU)]), 5)
    with pytest.raises(SingularJacobianError):
        newton_solve(AnalyticSystem(1, 1, [P("u^2 - x^2", XU)]), 5)
    with pytest.raises(PrecisionError):
        newton_solve(AnalyticSystem(1, 1, [P("u - x", XU, 4)]), 6)


def test_quadratic_convergence_on_catalan():
    G = AnalyticSystem(1, 1, [P("u - x - u^2", XU, 18)])
    for k in range(1, 5):
        (u,) = newton_solve(G, 16, rounds=k)
        (res,) = substitute(G.fs, 1, [u.with_prec(16)], prec=16)
        assert order(res.truncate(16)) >= 2 ** k


def test_default_rounds():
    assert default_rounds(1) == 1
    assert default_rounds(8) == 4
    assert default_rounds(9) == 5


def test_uniqueness_from_different_starts():
    G = AnalyticSystem(1, 1, [P("u - x - u^2", XU, 12)])
    a = newton_solve(G, 10)
    b = newton_solve(G, 10, initial=[P("x", ["x"], 2)])
    c = newton_solve(G, 10, initial=[P("x + x^2 + 7*x^3", ["x"], 4)])
    assert a[0].agrees(b[0], 10) and a[0].agrees(c[0], 10)


def triangular_oracle(g, n, c):
    """Solve g(x, u) = 0 degree by degree: at degree k the unknown
    coefficients enter linearly with slope dg/du(0)."""
    slope = g.coeff((0,) * n + (1,))
    u = Series(n, {}, c)
    for k in range(1, c):
        args = [variable(i, n, c) for i in range(n)] + [u]
        res = compose(g, args)
        new = dict(u.terms)
        for e in product(range(k + 1), repeat=n):
            if sum(e) == k:
                r = res.coeff(e)
                if r:
                    new[e] = -r / slope
        u = Series(n, new, c)
    return u


@st.composite
def single_equation(draw):
    n = draw(st.integers(1, 2))
    prec = draw(st.integers(3, 7))
    g = draw(series(n + 1, prec, max_terms=6, unit=False))
    lin = (0,) * n + (1,)
    terms = dict(g.terms)
    terms[lin] = draw(coefs.filter(lambda q: q != 0))
    return Series(n + 1, terms, prec)


@given(single_equation())
def test_matches_triangular_oracle(g):
    n = g.nvars - 1
    c = g.prec
    (u,) = newton_solve(AnalyticSystem(n, 1, [g]), c)
    assert u.agrees(triangular_oracle(g, n, c), c)


def test_verify_examples():
    names = ["x", "y"]
    rep = verify_system(AnalyticSystem(1, 1, [P("y - x", names)]), [P("x", ["x"])], 8)
    assert rep.passed
    f = AnalyticSystem(1, 1, [P("y^2 - x^2*(1 + x)", names)])
    rep = verify_system(f, [P("x", ["x"])], 4)
    assert not rep.passed and rep.orders == (3,)
    rep = verify_system(f, [P("x + x^2/2 - x^3/8", ["x"])], 4)
    assert rep.passed
    with pytest.raises(ValueError):
        verify_system(f, [P("1 + x", ["x"])], 4)
    with pytest.raises(ValueError):
        verify_system(f, [P("x", ["x"]), P("x", ["x"])], 4)
