"""Shared helpers and hypothesis strategies."""

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from artin_approx import Series
from artin_approx.textform import parse_expr

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def P(text, names, prec=12):
    """Parse an expression over named variables."""
    return parse_expr(text, names, prec)


coefs = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@st.composite
def series(draw, nvars, prec, max_terms=6, unit=None, min_order=0):
    """Random series with small rational coefficients.

    ``unit=True`` forces a nonzero constant term, ``unit=False`` a zero one.
    """
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        e = tuple(draw(st.integers(0, prec - 1)) for _ in range(nvars))
        if min_order <= sum(e) < prec:
            terms[e] = draw(coefs)
    zero = (0,) * nvars
    if unit is True:
        terms[zero] = draw(coefs.filter(lambda c: c != 0))
    elif unit is False:
        terms.pop(zero, None)
    return Series(nvars, terms, prec)


@pytest.fixture
def names2():
    return ["x1", "x2"]


# one line per acceptance criterion, printed after the run
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line[1])
