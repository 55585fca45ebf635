"""Truncated multivariate power series with exact rational coefficients.

A :class:`Series` is an element of ``Q[[x_1, ..., x_n]]`` known modulo
``m^prec``, where ``m`` is the maximal ideal.  Truncation is by total degree.
Terms are stored sparsely as ``{exponent tuple: Fraction}``; no stored
coefficient is zero and every stored exponent has total degree ``< prec``.

Every operation returns the largest precision it can justify.  For ``add``
and ``mul`` that is the minimum of the operand precisions; ``partial`` loses
one order; ``compose`` is bounded by the arguments and by how fast the
arguments vanish.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from operator import add as _add
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple, Sequence

Exponent = tuple

INF = math.inf


def grlex_key(exps):
    """Sort key: total degree first, then lexicographic with x_1 largest."""
    return (sum(exps), tuple(-e for e in exps))


class OrderInfo(NamedTuple):
    value: float  # int, or math.inf
    truncation_limited: bool


class Series:
    """Immutable truncated power series."""

    __slots__ = ("nvars", "prec", "_terms")

    def __init__(self, nvars: int, terms: Mapping | Iterable = (), prec: int = 1):
        if nvars < 0 or prec < 0:
            raise ValueError("nvars and prec must be non-negative")
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean = {}
        for exps, coef in items:
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars:
                raise ValueError(f"exponent {exps} has wrong length for {nvars} variables")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent {exps}")
            if sum(exps) >= prec:
                continue
            coef = _to_rational(coef)
            c = clean.get(exps, 0) + coef
            if c:
                clean[exps] = c
            else:
                clean.pop(exps, None)
        self.nvars = nvars
        self.prec = int(prec)
        self._terms = clean

    @classmethod
    def _raw(cls, nvars, terms, prec):
        # trusted constructor: terms already clean and truncated
        obj = object.__new__(cls)
        obj.nvars = nvars
        obj.prec = prec
        obj._terms = terms
        return obj

    # -- accessors ---------------------------------------------------------

    @property
    def terms(self) -> Mapping:
        return MappingProxyType(self._terms)

    def items(self):
        """Terms in graded-lexicographic order."""
        return sorted(self._terms.items(), key=lambda kv: grlex_key(kv[0]))

    def coeff(self, exps) -> Fraction:
        return self._terms.get(tuple(exps), Fraction(0))

    @property
    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * self.nvars, Fraction(0))

    def is_zero(self) -> bool:
        """True iff the series vanishes modulo m^prec."""
        return not self._terms

    def is_unit(self) -> bool:
        return self.constant_term != 0

    def order(self):
        return order(self)

    def ord_lb(self) -> int:
        """A certified lower bound for the true order."""
        if self._terms:
            return min(sum(e) for e in self._terms)
        return self.prec

    def degree(self) -> int:
        """Largest total degree of a stored term (-1 for zero)."""
        return max((sum(e) for e in self._terms), default=-1)

    def truncate(self, prec: int) -> "Series":
        prec = min(prec, self.prec)
        if prec == self.prec:
            return self
        return Series._raw(
            self.nvars, {e: c for e, c in self._terms.items() if sum(e) < prec}, max(prec, 0)
        )

    def with_prec(self, prec: int) -> "Series":
        """Re-declare the precision (used for data known to be exact)."""
        return Series(self.nvars, self._terms, prec)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Series):
            return add(self, other)
        if isinstance(other, (int, Rational)):
            return add(self, constant(other, self.nvars, self.prec))
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return Series._raw(self.nvars, {e: -c for e, c in self._terms.items()}, self.prec)

    def __sub__(self, other):
        if isinstance(other, Series):
            return add(self, -other)
        if isinstance(other, (int, Rational)):
            return add(self, constant(-other, self.nvars, self.prec))
        return NotImplemented

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, Series):
            return mul(self, other)
        if isinstance(other, (int, Rational)):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers")
        result = constant(1, self.nvars, self.prec)
        base = self
        while k:
            if k & 1:
                result = mul(result, base)
            k >>= 1
            if k:
                base = mul(base, base)
        return result

    def scale(self, c) -> "Series":
        c = _to_rational(c)
        if c == 0:
            return Series._raw(self.nvars, {}, self.prec)
        return Series._raw(self.nvars, {e: c * v for e, v in self._terms.items()}, self.prec)

    # -- comparison / display ----------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        return (
            self.nvars == other.nvars
            and self.prec == other.prec
            and self._terms == other._terms
        )

    __hash__ = None

    def agrees(self, other: "Series", prec: int | None = None) -> bool:
        """Equality modulo m^prec (default: the common precision)."""
        if self.nvars != other.nvars:
            return False
        if prec is None:
            prec = min(self.prec, other.prec)
        if prec > min(self.prec, other.prec):
            return False
        return self.truncate(prec)._terms == other.truncate(prec)._terms

    def __repr__(self):
        return f"Series({self.to_str()}, prec={self.prec})"

    def to_str(self, names: Sequence[str] | None = None) -> str:
        if names is None:
            names = [f"x{i + 1}" for i in range(self.nvars)]
        if not self._terms:
            return "0"
        parts = []
        for exps, c in self.items():
            mono = "*".join(
                n if e == 1 else f"{n}^{e}" for n, e in zip(names, exps) if e
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def _to_rational(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, float):
        raise TypeError("floating-point coefficients are not supported")
    return Fraction(c)


def _check_same(a: Series, b: Series):
    if a.nvars != b.nvars:
        raise ValueError(f"variable count mismatch: {a.nvars} vs {b.nvars}")


# -- constructors ------------------------------------------------------------


def zero(nvars: int, prec: int) -> Series:
    return Series._raw(nvars, {}, prec)


def constant(c, nvars: int, prec: int) -> Series:
    c = _to_rational(c)
    terms = {(0,) * nvars: c} if (c and prec > 0) else {}
    return Series._raw(nvars, terms, prec)


def variable(i: int, nvars: int, prec: int) -> Series:
    if not 0 <= i < nvars:
        raise IndexError(f"variable index {i} out of range for {nvars} variables")
    e = [0] * nvars
    e[i] = 1
    terms = {tuple(e): Fraction(1)} if prec > 1 else {}
    return Series._raw(nvars, terms, prec)


def monomial(exps, nvars: int, prec: int, coef=1) -> Series:
    return Series(nvars, {tuple(exps): coef}, prec)


# -- ring operations -----------------------------------------------------------


def add(a: Series, b: Series) -> Series:
    _check_same(a, b)
    prec = min(a.prec, b.prec)
    out = {e: c for e, c in a._terms.items() if sum(e) < prec}
    for e, c in b._terms.items():
        if sum(e) >= prec:
            continue
        v = out.get(e, 0) + c
        if v:
            out[e] = v
        else:
            out.pop(e, None)
    return Series._raw(a.nvars, out, prec)


def _bucket(terms):
    buckets = {}
    for e, c in terms.items():
        buckets.setdefault(sum(e), []).append((e, c))
    return buckets


def _mul_terms(at, bt, prec):
    """Truncated product of two term dictionaries (degrees < prec kept)."""
    if not at or not bt:
        return {}
    if len(at) > len(bt):
        at, bt = bt, at
    bb = sorted(_bucket(bt).items())
    out = {}
    get = out.get
    for ea, ca in at.items():
        lim = prec - sum(ea)
        if lim <= 0:
            continue
        for db, lst in bb:
            if db >= lim:
                break
            for eb, cb in lst:
                key = tuple(map(_add, ea, eb))
                out[key] = get(key, 0) + ca * cb
    return {e: c for e, c in out.items() if c}


def mul(a: Series, b: Series, *, sharp: bool = False) -> Series:
    """Product modulo m^prec.

    The default precision is ``min(a.prec, b.prec)``.  With ``sharp=True``
    the bound ``min(a.prec + ord b, b.prec + ord a)`` is used, which is
    still certified because the unknown tail of one factor is multiplied by
    a series whose order is known.
    """
    _check_same(a, b)
    if sharp:
        prec = min(a.prec + b.ord_lb(), b.prec + a.ord_lb())
    else:
        prec = min(a.prec, b.prec)
    return Series._raw(a.nvars, _mul_terms(a._terms, b._terms, prec), prec)


def order(f: Series):
    """Least total degree of a stored term; ``math.inf`` if none."""
    if f._terms:
        return min(sum(e) for e in f._terms)
    return INF


def order_info(f: Series) -> OrderInfo:
    """Order together with a flag telling whether it is only a truncation bound."""
    o = order(f)
    return OrderInfo(o, o == INF)


def invert_unit(f: Series) -> Series:
    """Inverse of a unit modulo m^prec.

    Expands ``1/(c + h) = (1/c) * sum (-h/c)^k`` one homogeneous degree at a
    time: ``g_d = -(1/c) * sum_{i>=1} h_i g_{d-i}``.
    """
    from .errors import NonUnitError

    c0 = f.constant_term
    if c0 == 0:
        raise NonUnitError("series has zero constant term and is not invertible")
    n, prec = f.nvars, f.prec
    inv_c0 = 1 / c0
    h = _bucket({e: c for e, c in f._terms.items() if any(e)})
    g = [[((0,) * n, inv_c0)]]
    out = {(0,) * n: inv_c0}
    for d in range(1, prec):
        acc = {}
        for i in range(1, d + 1):
            hi = h.get(i)
            gl = g[d - i]
            if not hi or not gl:
                continue
            for ea, ca in hi:
                for eb, cb in gl:
                    key = tuple(map(_add, ea, eb))
                    acc[key] = acc.get(key, 0) + ca * cb
        gd = [(e, -inv_c0 * c) for e, c in acc.items() if c]
        g.append(gd)
        out.update(gd)
    return Series._raw(n, out, prec)


def partial(f: Series, i: int) -> Series:
    """Formal partial derivative in variable ``i``; precision drops by one."""
    if not 0 <= i < f.nvars:
        raise IndexError(f"variable index {i} out of range for {f.nvars} variables")
    out = {}
    for e, c in f._terms.items():
        k = e[i]
        if k:
            ne = e[:i] + (k - 1,) + e[i + 1:]
            out[ne] = c * k
    return Series._raw(f.nvars, out, max(f.prec - 1, 0))


def embed(f: Series, nvars: int, positions: Sequence[int], prec: int | None = None) -> Series:
    """Map variable ``i`` of ``f`` to variable ``positions[i]`` of a larger ring."""
    if len(positions) != f.nvars:
        raise ValueError("positions must list one target per variable")
    prec = f.prec if prec is None else min(prec, f.prec)
    out = {}
    for e, c in f._terms.items():
        if sum(e) >= prec:
            continue
        ne = [0] * nvars
        for k, p in zip(e, positions):
            ne[p] += k
        ne = tuple(ne)
        v = out.get(ne, 0) + c
        if v:
            out[ne] = v
        else:
            out.pop(ne, None)
    return Series._raw(nvars, out, prec)


def _trivial_target(arg: Series):
    """If ``arg`` is exactly a single variable, return its index."""
    if len(arg._terms) != 1:
        return None
    (e, c), = arg._terms.items()
    if c != 1 or sum(e) != 1:
        return None
    return e.index(1)


def compose(f: Series, args: Sequence[Series]) -> Series:
    """Substitute ``args[i]`` for variable ``i`` of ``f``.

    Every argument must lie in the maximal ideal.  The result is known
    modulo ``m^P`` with ``P = min(min arg.prec, f.prec * min ord(arg))``.
    Arguments that are bare variables are handled by exponent relabelling;
    only the remaining ones are raised to powers.
    """
    if len(args) != f.nvars:
        raise ValueError(f"compose: expected {f.nvars} arguments, got {len(args)}")
    if not args:
        raise ValueError("compose: a series in zero variables has no arguments to substitute")
    n = args[0].nvars
    for a in args:
        if a.nvars != n:
            raise ValueError("compose: arguments live in different rings")
        if a.constant_term != 0:
            raise ValueError("compose: argument has a nonzero constant term")
    prec = min(a.prec for a in args)
    prec = min(prec, f.prec * min(max(a.ord_lb(), 1) for a in args))

    trivial = {}
    nontrivial = []
    for i, a in enumerate(args):
        t = _trivial_target(a)
        if t is None:
            nontrivial.append(i)
        else:
            trivial[i] = t

    # group f's terms by their exponents in the non-trivial variables
    groups = {}
    for e, c in f._terms.items():
        key = tuple(e[i] for i in nontrivial)
        mono = [0] * n
        for i, t in trivial.items():
            mono[t] += e[i]
        groups.setdefault(key, {})
        mono = tuple(mono)
        if sum(mono) < prec:
            g = groups[key]
            v = g.get(mono, 0) + c
            if v:
                g[mono] = v
            else:
                g.pop(mono, None)

    powers = {i: [{(0,) * n: Fraction(1)}] for i in nontrivial}

    def power(i, k):
        lst = powers[i]
        while len(lst) <= k:
            lst.append(_mul_terms(lst[-1], args[i]._terms, prec))
        return lst[k]

    out = {}
    for key, coeff_terms in groups.items():
        if not coeff_terms:
            continue
        prod = None
        for i, k in zip(nontrivial, key):
            if k == 0:
                continue
            p = power(i, k)
            prod = p if prod is None else _mul_terms(prod, p, prec)
        if prod is None:
            contrib = coeff_terms
        else:
            contrib = _mul_terms(coeff_terms, prod, prec)
        for e, c in contrib.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
    return Series._raw(n, out, prec)


def linear_substitute(f: Series, matrix: Sequence[Sequence], prec: int | None = None) -> Series:
    """Return ``f(C x)`` for a square constant matrix ``C``."""
    n = f.nvars
    p = f.prec if prec is None else prec
    args = []
    for row in matrix:
        terms = {}
        for j, cij in enumerate(row):
            if cij:
                e = [0] * n
                e[j] = 1
                terms[tuple(e)] = _to_rational(cij)
        args.append(Series(n, terms, max(p, 2)))
    return compose(f, args)


def vector_prec(vec: Iterable[Series]) -> int:
    return min(s.prec for s in vec)
