"""Certified intervals with exact dyadic endpoints.

Endpoints are stored as :class:`fractions.Fraction` values whose denominators
are powers of two.  Every operation computes the exact result where it can
and rounds outward to ``prec`` significant bits.  ``exp`` and ``log`` go
through mpmath's raw ``libmp`` routines with directed rounding, widened by one
extra unit in the last place so that containment does not depend on mpmath's
rounding being exact.

Bulk sums are done in fixed point: an integer ``a`` at scale ``W`` stands for
``a / 2**W``.  The helpers at the bottom produce floor/ceiling bounds of
rational expressions at a given scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from mpmath import libmp

DEFAULT_PREC = 128

Number = int | Fraction


def _floor_div(a: int, b: int) -> int:
    return a // b


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def round_dyadic(x: Fraction, prec: int, up: bool) -> Fraction:
    """Round ``x`` to ``prec`` significant bits, toward +inf if ``up`` else -inf."""
    x = Fraction(x)
    if x == 0:
        return x
    num, den = x.numerator, x.denominator
    if den & (den - 1) == 0 and abs(num).bit_length() <= prec:
        return x
    e = abs(num).bit_length() - den.bit_length()
    shift = prec - e
    if shift >= 0:
        a, b = num << shift, den
    else:
        a, b = num, den << (-shift)
    m = _ceil_div(a, b) if up else _floor_div(a, b)
    return Fraction(m, 1 << shift) if shift >= 0 else Fraction(m << (-shift))


def _to_mpf(x: Fraction, prec: int, rnd: str):
    return libmp.from_rational(x.numerator, x.denominator, prec, rnd)


def _from_mpf(v) -> Fraction:
    p, q = libmp.to_rational(v)
    return Fraction(p, q)


def _ulp_widen(x: Fraction, prec: int, up: bool) -> Fraction:
    """Move ``x`` outward by roughly one unit in the ``prec``-bit last place."""
    if x == 0:
        step = Fraction(1, 1 << (prec + 64))
    else:
        e = abs(x.numerator).bit_length() - x.denominator.bit_length()
        step = Fraction(2) ** (e - prec + 1)
    return x + step if up else x - step


@dataclass(frozen=True)
class Enclosure:
    """Closed interval ``[lo, hi]`` guaranteed to contain some real value."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = Fraction(self.lo), Fraction(self.hi)
        if lo > hi:
            raise ValueError(f"empty enclosure [{float(lo)}, {float(hi)}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    # -- construction -------------------------------------------------------
    @classmethod
    def point(cls, x: Number) -> "Enclosure":
        return cls(Fraction(x), Fraction(x))

    @classmethod
    def around(cls, x: Number, prec: int = DEFAULT_PREC) -> "Enclosure":
        """Dyadic enclosure of an exact rational."""
        x = Fraction(x)
        return cls(round_dyadic(x, prec, False), round_dyadic(x, prec, True))

    @classmethod
    def from_fixed(cls, lo: int, hi: int, scale: int) -> "Enclosure":
        d = 1 << scale
        return cls(Fraction(lo, d), Fraction(hi, d))

    @classmethod
    def hull(cls, items: Iterable["Enclosure"]) -> "Enclosure":
        items = list(items)
        return cls(min(e.lo for e in items), max(e.hi for e in items))

    # -- queries --------------------------------------------------------------
    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x: "Number | Enclosure") -> bool:
        if isinstance(x, Enclosure):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= Fraction(x) <= self.hi

    def strictly_contains(self, other: "Enclosure") -> bool:
        return self.lo < other.lo and other.hi < self.hi

    def intersects(self, other: "Enclosure") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def intersection(self, other: "Enclosure") -> "Enclosure | None":
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        return Enclosure(lo, hi) if lo <= hi else None

    def is_positive(self) -> bool:
        return self.lo > 0

    # -- arithmetic -------------------------------------------------------------
    @staticmethod
    def _lift(x: "Number | Enclosure") -> "Enclosure":
        return x if isinstance(x, Enclosure) else Enclosure.point(x)

    def rounded(self, prec: int = DEFAULT_PREC) -> "Enclosure":
        return Enclosure(round_dyadic(self.lo, prec, False), round_dyadic(self.hi, prec, True))

    def add(self, other, prec: int = DEFAULT_PREC) -> "Enclosure":
        o = self._lift(other)
        return Enclosure(self.lo + o.lo, self.hi + o.hi).rounded(prec)

    def sub(self, other, prec: int = DEFAULT_PREC) -> "Enclosure":
        o = self._lift(other)
        return Enclosure(self.lo - o.hi, self.hi - o.lo).rounded(prec)

    def mul(self, other, prec: int = DEFAULT_PREC) -> "Enclosure":
        o = self._lift(other)
        c = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Enclosure(min(c), max(c)).rounded(prec)

    def div(self, other, prec: int = DEFAULT_PREC) -> "Enclosure":
        o = self._lift(other)
        if o.lo <= 0 <= o.hi:
            raise ZeroDivisionError("divisor enclosure contains 0")
        c = (self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi)
        return Enclosure(min(c), max(c)).rounded(prec)

    def neg(self) -> "Enclosure":
        return Enclosure(-self.hi, -self.lo)

    def __add__(self, other):
        return self.add(other)

    __radd__ = __add__

    def __sub__(self, other):
        return self.sub(other)

    def __rsub__(self, other):
        return self._lift(other).sub(self)

    def __mul__(self, other):
        return self.mul(other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self.div(other)

    def __rtruediv__(self, other):
        return self._lift(other).div(self)

    def __neg__(self):
        return self.neg()

    def __pow__(self, n: int) -> "Enclosure":
        if n < 0:
            return Enclosure.point(1).div(self ** (-n))
        if n % 2 == 0 and self.lo < 0 < self.hi:
            return Enclosure(Fraction(0), max(self.lo ** n, self.hi ** n)).rounded()
        ends = sorted((self.lo ** n, self.hi ** n))
        return Enclosure(ends[0], ends[1]).rounded()

    def exp(self, prec: int = DEFAULT_PREC) -> "Enclosure":
        lo = _from_mpf(libmp.mpf_exp(_to_mpf(self.lo, prec + 8, libmp.round_floor), prec, libmp.round_floor))
        hi = _from_mpf(libmp.mpf_exp(_to_mpf(self.hi, prec + 8, libmp.round_ceiling), prec, libmp.round_ceiling))
        lo = max(_ulp_widen(lo, prec, False), Fraction(0))
        return Enclosure(lo, _ulp_widen(hi, prec, True))

    def log(self, prec: int = DEFAULT_PREC) -> "Enclosure":
        if self.lo <= 0:
            raise ValueError("log of an enclosure reaching 0 or below")
        lo = _from_mpf(libmp.mpf_log(_to_mpf(self.lo, prec + 8, libmp.round_floor), prec, libmp.round_floor))
        hi = _from_mpf(libmp.mpf_log(_to_mpf(self.hi, prec + 8, libmp.round_ceiling), prec, libmp.round_ceiling))
        return Enclosure(_ulp_widen(lo, prec, False), _ulp_widen(hi, prec, True))

    # -- display --------------------------------------------------------------------
    def decimal(self, digits: int = 20) -> tuple[str, str]:
        """Outward-rounded scientific strings for ``lo`` and ``hi``."""
        return format_decimal(self.lo, digits, up=False), format_decimal(self.hi, digits, up=True)

    def __str__(self) -> str:
        lo, hi = self.decimal(17)
        return f"[{lo}, {hi}]"

    def __repr__(self) -> str:
        return f"Enclosure{self}"


def format_decimal(x: Fraction, digits: int, up: bool) -> str:
    """Scientific notation with ``digits`` significant digits, rounded toward
    +inf (``up``) or -inf."""
    x = Fraction(x)
    if x == 0:
        return "0"
    sign = "-" if x < 0 else ""
    ax = -x if x < 0 else x
    # round the magnitude away from zero when the requested direction says so
    away = up != (x < 0)
    e10 = math.floor(math.log10(ax.numerator) - math.log10(ax.denominator))
    for cand in (e10 - 1, e10, e10 + 1):
        if Fraction(10) ** cand <= ax < Fraction(10) ** (cand + 1):
            e10 = cand
            break
    scaled = ax * Fraction(10) ** (digits - 1 - e10)
    m = math.ceil(scaled) if away else math.floor(scaled)
    if m >= 10 ** digits:
        m //= 10
        if away and m * Fraction(10) ** (e10 + 2 - digits) < ax:
            m += 1
        e10 += 1
    s = str(m)
    mant = s[0] + ("." + s[1:] if len(s) > 1 else "")
    return f"{sign}{mant}e{e10}"


# -- fixed-point helpers --------------------------------------------------------------

def fixed_floor(x: Number, scale: int) -> int:
    x = Fraction(x)
    return (x.numerator << scale) // x.denominator


def fixed_ceil(x: Number, scale: int) -> int:
    x = Fraction(x)
    return -((-x.numerator << scale) // x.denominator)


def fixed_mul(a: int, b: int, scale: int, up: bool) -> int:
    """Product of two fixed-point values, rounded in the given direction."""
    p = a * b
    return -((-p) >> scale) if up else p >> scale


def log1p_bounds(x: Fraction, scale: int, weight: int = 1) -> tuple[int, int]:
    """Fixed-point floor/ceiling of ``weight * log(1 + x)`` for ``|x| <= 1/2``.

    Sums the Taylor series exactly term by term; the remainder is bounded by a
    geometric majorant.
    """
    x = Fraction(x)
    if abs(x) > Fraction(1, 2):
        raise ValueError("log1p_bounds needs |x| <= 1/2")
    if x == 0:
        return 0, 0
    lo = hi = 0
    ax = abs(x)
    power = Fraction(1)
    j = 0
    bound_one = Fraction(1, 1 << scale)
    while True:
        j += 1
        power *= x
        term = weight * power / j if j % 2 else -weight * power / j
        lo += fixed_floor(term, scale)
        hi += fixed_ceil(term, scale)
        # |remaining| <= w*|x|^(j+1)/(j+1) / (1-|x|)
        rem = weight * abs(power) * ax / ((j + 1) * (1 - ax))
        if rem < bound_one:
            r = fixed_ceil(rem, scale)
            return lo - r, hi + r


def exp_series_chain(
    lam0: tuple[int, int],
    power_sums: list[tuple[int, int]],
    K: int,
    scale: int,
) -> list[tuple[int, int]]:
    """Coefficients of ``exp(l0 + sum_m P_m z^m / m)`` for ``k <= K``.

    ``power_sums[m-1]`` is a fixed-point bound pair for ``P_m``, all assumed
    nonnegative, so every coefficient is monotone in the inputs and the lower
    and upper chains can run separately with directed rounding.
    """
    one = 1 << scale
    elo, ehi = [one], [one]
    for k in range(1, K + 1):
        slo = shi = 0
        for m in range(1, k + 1):
            plo, phi = power_sums[m - 1]
            if plo < 0:
                raise ValueError("power sums must be nonnegative")
            slo += plo * elo[k - m]
            shi += phi * ehi[k - m]
        elo.append((slo >> scale) // k)
        c = -((-shi) >> scale)
        ehi.append(-((-c) // k))
    exp_lo = Enclosure.from_fixed(lam0[0], lam0[0], scale).exp(scale + 8).lo
    exp_hi = Enclosure.from_fixed(lam0[1], lam0[1], scale).exp(scale + 8).hi
    flo, fhi = fixed_floor(exp_lo, scale), fixed_ceil(exp_hi, scale)
    return [
        (fixed_mul(flo, a, scale, False), fixed_mul(fhi, b, scale, True))
        for a, b in zip(elo, ehi)
    ]
