"""Truncated power series with exact coefficients, and the counting series.

``Series1`` is a power series in ``t``; ``Series2`` is a series in ``t`` and
``z`` stored as a dense ``(N_t+1) x (N_z+1)`` array of Python integers or
Fractions.  The product constructions expand each per-degree factor with the
binomial theorem, stopping at the t-valuation cutoff.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Sequence

from .irreducibles import NuTable

Coeff = int | Fraction


class SeriesError(ValueError):
    pass


@dataclass(frozen=True)
class Series1:
    coeffs: tuple[Coeff, ...]

    @classmethod
    def make(cls, coeffs: Sequence[Coeff], order: int | None = None) -> "Series1":
        c = list(coeffs)
        if order is not None:
            c = (c + [0] * (order + 1))[: order + 1]
        if not c:
            raise SeriesError("a series needs at least one coefficient")
        return cls(tuple(c))

    @classmethod
    def one(cls, order: int) -> "Series1":
        return cls.make([1], order)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n: int) -> Coeff:
        return self.coeffs[n]

    def __len__(self) -> int:
        return len(self.coeffs)

    def _align(self, other: "Series1 | Coeff") -> tuple["Series1", "Series1"]:
        if not isinstance(other, Series1):
            other = Series1.make([other], self.order)
        n = min(self.order, other.order)
        return self.truncate(n), other.truncate(n)

    def truncate(self, order: int) -> "Series1":
        return Series1.make(self.coeffs[: order + 1], order)

    def __add__(self, other):
        a, b = self._align(other)
        return Series1(tuple(x + y for x, y in zip(a.coeffs, b.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return Series1(tuple(-x for x in self.coeffs))

    def __sub__(self, other):
        return self + (-other if isinstance(other, Series1) else -other)

    def __mul__(self, other):
        if not isinstance(other, Series1):
            return Series1(tuple(x * other for x in self.coeffs))
        a, b = self._align(other)
        n = a.order
        out = [0] * (n + 1)
        for i, x in enumerate(a.coeffs):
            if x:
                for j in range(n + 1 - i):
                    out[i + j] += x * b.coeffs[j]
        return Series1(tuple(out))

    __rmul__ = __mul__

    def inverse(self) -> "Series1":
        c0 = self.coeffs[0]
        if c0 == 0:
            raise SeriesError("inverse needs a nonzero constant term")
        inv0 = Fraction(1, 1) / c0
        out = [inv0]
        for n in range(1, self.order + 1):
            s = sum(self.coeffs[j] * out[n - j] for j in range(1, n + 1))
            out.append(-s * inv0)
        return Series1(tuple(_normalize(x) for x in out))

    def __truediv__(self, other: "Series1") -> "Series1":
        return self * other.inverse()

    def __pow__(self, n: int) -> "Series1":
        if n < 0:
            return self.inverse() ** (-n)
        result = Series1.one(self.order)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, Series1):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)


def _normalize(x: Coeff) -> Coeff:
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


@dataclass(frozen=True)
class Series2:
    """``coeffs[n][k]`` is the coefficient of ``t^n z^k``."""

    coeffs: tuple[tuple[Coeff, ...], ...]

    @classmethod
    def zeros(cls, nt: int, nz: int) -> "Series2":
        return cls(tuple((0,) * (nz + 1) for _ in range(nt + 1)))

    @classmethod
    def one(cls, nt: int, nz: int) -> "Series2":
        rows = [[0] * (nz + 1) for _ in range(nt + 1)]
        rows[0][0] = 1
        return cls.from_rows(rows)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Coeff]]) -> "Series2":
        return cls(tuple(tuple(r) for r in rows))

    @property
    def nt(self) -> int:
        return len(self.coeffs) - 1

    @property
    def nz(self) -> int:
        return len(self.coeffs[0]) - 1

    def __getitem__(self, nk: tuple[int, int]) -> Coeff:
        n, k = nk
        if 0 <= n <= self.nt and 0 <= k <= self.nz:
            return self.coeffs[n][k]
        raise IndexError(nk)

    def row(self, n: int) -> tuple[Coeff, ...]:
        return self.coeffs[n]

    def truncate(self, nt: int, nz: int) -> "Series2":
        rows = [list(r[: nz + 1]) + [0] * (nz + 1 - len(r)) for r in self.coeffs[: nt + 1]]
        rows += [[0] * (nz + 1) for _ in range(nt + 1 - len(rows))]
        return Series2.from_rows(rows)

    def __add__(self, other: "Series2") -> "Series2":
        nt, nz = min(self.nt, other.nt), min(self.nz, other.nz)
        return Series2.from_rows(
            [[self.coeffs[n][k] + other.coeffs[n][k] for k in range(nz + 1)] for n in range(nt + 1)]
        )

    def __mul__(self, other: "Series2 | Series1 | Coeff") -> "Series2":
        if isinstance(other, Series1):
            other = Series2.from_rows([[c] + [0] * self.nz for c in other.coeffs])
        if not isinstance(other, Series2):
            return Series2.from_rows([[c * other for c in r] for r in self.coeffs])
        nt, nz = min(self.nt, other.nt), min(self.nz, other.nz)
        return Series2.from_rows(_mul_dense(self.coeffs, _sparse(other.coeffs), nt, nz))

    __rmul__ = __mul__

    def eval_t(self, t: Coeff) -> list[Coeff]:
        """Substitute a number for ``t``: the polynomial in ``z`` of the truncation."""
        out = [Fraction(0)] * (self.nz + 1)
        tp = Fraction(1)
        for n in range(self.nt + 1):
            for k, c in enumerate(self.coeffs[n]):
                if c:
                    out[k] += c * tp
            tp *= t
        return [_normalize(x) for x in out]

    def __eq__(self, other) -> bool:
        if isinstance(other, Series2):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)


def _sparse(rows) -> list[tuple[int, int, Coeff]]:
    return [(n, k, c) for n, r in enumerate(rows) for k, c in enumerate(r) if c]


def _mul_dense(acc, factor: list[tuple[int, int, Coeff]], nt: int, nz: int):
    out = [[0] * (nz + 1) for _ in range(nt + 1)]
    for a, b, c in factor:
        if a > nt or b > nz:
            continue
        for n in range(nt + 1 - a):
            src = acc[n]
            dst = out[n + a]
            for k in range(nz + 1 - b):
                v = src[k]
                if v:
                    dst[k + b] += c * v
    return out


# -- the product expansions ---------------------------------------------------------------


def _nu(q: int, n: int) -> NuTable:
    return NuTable.build(q, max(n, 1))


def one_minus_qt_product(q: int, nt: int, nu: NuTable | None = None) -> Series1:
    """``prod_{i<=nt} (1 - t^i)^{nu_i}`` truncated at ``t^nt``."""
    if nt < 1:
        raise SeriesError("truncation order must be >= 1")
    nu = nu or _nu(q, nt)
    acc = [1] + [0] * nt
    for i in range(1, nt + 1):
        v = nu[i]
        terms = [(i * m, (-1) ** m * comb(v, m)) for m in range(1, nt // i + 1)]
        new = acc[:]
        for shift, c in terms:
            for n in range(nt + 1 - shift):
                if acc[n]:
                    new[n + shift] += c * acc[n]
        acc = new
    return Series1(tuple(acc))


def _h_power(i: int, m: int, nt: int, nz: int) -> list[tuple[int, int, int]]:
    """Sparse terms of ``(t^i / (1 - t^i z))^m``: negative-binomial expansion."""
    out = []
    j = 0
    while i * (m + j) <= nt and j <= nz:
        out.append((i * (m + j), j, comb(m + j - 1, j)))
        j += 1
    return out


def count_factor(i: int, nu_i: int, nt: int, nz: int) -> list[tuple[int, int, int]]:
    """Sparse terms of ``(1 + t^i/(1 - t^i z))^{nu_i}`` up to the truncation.

    ``t^i/(1-t^i z) = sum_{j>=1} t^{ij} z^{j-1}`` is the contribution of one
    irreducible of degree ``i`` raised to multiplicity ``j``.
    """
    acc: dict[tuple[int, int], int] = {(0, 0): 1}
    for m in range(1, nt // i + 1):
        c = comb(nu_i, m)
        if c == 0:
            break
        for a, b, w in _h_power(i, m, nt, nz):
            acc[(a, b)] = acc.get((a, b), 0) + c * w
    return [(a, b, c) for (a, b), c in sorted(acc.items()) if c]


def count_gf(q: int, nt: int, nz: int, nu: NuTable | None = None) -> Series2:
    """The bivariate counting series ``E(t, z) = sum e_{n,k} t^n z^k``."""
    if nt < 0 or nz < 0:
        raise SeriesError("truncation orders must be >= 0")
    nu = nu or _nu(q, nt)
    acc = Series2.one(nt, nz).coeffs
    for i in range(1, nt + 1):
        acc = _mul_dense(acc, count_factor(i, nu[i], nt, nz), nt, nz)
    return Series2.from_rows(acc)


def _binomial_row(m: int) -> list[int]:
    """Coefficients of ``(z - 1)^m`` in ascending powers of ``z``."""
    return [comb(m, j) * (-1) ** (m - j) for j in range(m + 1)]


def combined_factor(i: int, nu_i: int, nt: int, nz: int) -> list[tuple[int, int, int]]:
    """Sparse terms of ``[(1 - t^i)(1 + t^i/(1 - t^i z))]^{nu_i}``.

    One base factor equals ``1 + w`` with ``w = (z-1) t^{2i} / (1 - t^i z)``,
    so ``w^m = (z-1)^m t^{2im} (1 - t^i z)^{-m}``.
    """
    acc: dict[tuple[int, int], int] = {(0, 0): 1}
    for m in range(1, nt // (2 * i) + 1):
        c = comb(nu_i, m)
        if c == 0:
            break
        zrow = _binomial_row(m)
        j = 0
        while 2 * i * m + i * j <= nt:
            a = 2 * i * m + i * j
            w = comb(m + j - 1, j)
            for r, zc in enumerate(zrow):
                b = j + r
                if b <= nz:
                    acc[(a, b)] = acc.get((a, b), 0) + c * w * zc
            j += 1
    return [(a, b, c) for (a, b), c in sorted(acc.items()) if c]


def product_G(q: int, nt: int, nz: int, nu: NuTable | None = None) -> Series2:
    """``(1 - q t) E(t, z)`` built directly as a product over degrees."""
    if nt < 0 or nz < 0:
        raise SeriesError("truncation orders must be >= 0")
    nu = nu or _nu(q, nt)
    acc = Series2.one(nt, nz).coeffs
    for i in range(1, nt // 2 + 1):
        acc = _mul_dense(acc, combined_factor(i, nu[i], nt, nz), nt, nz)
    return Series2.from_rows(acc)


def squarefree_gf(q: int, nt: int) -> Series1:
    """``E(t, 0)`` from the closed form ``(1 - q t^2) / (1 - q t)``."""
    if nt < 0:
        raise SeriesError("truncation order must be >= 0")
    num = Series1.make([1, 0, -q], nt)
    den = Series1.make([1, -q], nt)
    return num / den


def squarefree_euler(q: int, nt: int, nu: NuTable | None = None) -> Series1:
    """``E(t, 0)`` as the product ``prod_i (1 + t^i)^{nu_i}``."""
    if nt < 0:
        raise SeriesError("truncation order must be >= 0")
    nu = nu or _nu(q, nt)
    acc = [1] + [0] * nt
    for i in range(1, nt + 1):
        new = acc[:]
        for m in range(1, nt // i + 1):
            c = comb(nu[i], m)
            for n in range(nt + 1 - i * m):
                if acc[n]:
                    new[n + i * m] += c * acc[n]
        acc = new
    return Series1(tuple(acc))


def squarefree_closed(q: int, n: int) -> int:
    """Number of squarefree monic degree-n polynomials over GF(q)."""
    if n < 0:
        raise ValueError("degree must be >= 0")
    return q ** n if n < 2 else q ** n - q ** (n - 1)


@dataclass(frozen=True)
class ExcessTable:
    """``rows[n][k] = e_{n,k}`` for ``n <= N`` and ``k <= K``."""

    q: int
    rows: tuple[tuple[int, ...], ...]

    @classmethod
    def build(cls, q: int, N: int, K: int) -> "ExcessTable":
        return cls(q, count_gf(q, N, K).coeffs)

    @property
    def N(self) -> int:
        return len(self.rows) - 1

    @property
    def K(self) -> int:
        return len(self.rows[0]) - 1

    def e(self, n: int, k: int) -> int:
        return self.rows[n][k]

    def d(self, n: int, k: int) -> Fraction:
        return Fraction(self.rows[n][k], self.q ** n)

    def row_sums_ok(self) -> bool:
        """Mass check on rows whose excess range is not truncated."""
        return all(
            sum(self.rows[n]) == self.q ** n
            for n in range(self.N + 1)
            if n == 0 or self.K >= n - 1
        )
