"""Monic irreducibles over GF(q): counts by formula, lists and SPF tables by sieve.

The sieve works on integer codes.  A polynomial over GF(p^e) is a vector over
GF(p) (the base-p digits of its code), and multiplication by a fixed ``g`` is
a GF(p)-linear map, so the codes of ``g*h`` for every monic ``h`` of a given
degree come out of one small matrix product per chunk.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator

import numpy as np

from .finite_field import FieldSpec
from .polyring import Poly, decode

DEFAULT_BUDGET = 1 << 24
LOW_DIGITS_CAP = 1 << 17


class MemoryBudgetError(ValueError):
    """Requested table would exceed the configured memory budget."""


def mobius(n: int) -> int:
    if n < 1:
        raise ValueError("mobius needs n >= 1")
    result, d = 1, 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            result = -result
        d += 1
    return -result if n > 1 else result


def divisors(n: int) -> list[int]:
    small = [d for d in range(1, int(n ** 0.5) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def nu_formula(q: int, i: int) -> int:
    """Number of monic irreducibles of degree ``i`` over GF(q)."""
    if q < 2 or i < 1:
        raise ValueError("need q >= 2 and i >= 1")
    s = sum(mobius(d) * q ** (i // d) for d in divisors(i))
    if s % i:
        raise AssertionError(f"Mobius sum {s} not divisible by {i}")
    return s // i


@dataclass(frozen=True)
class NuTable:
    q: int
    nu: tuple[int, ...]  # nu[i-1] is the count for degree i

    @classmethod
    def build(cls, q: int, max_degree: int) -> "NuTable":
        return cls(q, tuple(nu_formula(q, i) for i in range(1, max_degree + 1)))

    @property
    def max_degree(self) -> int:
        return len(self.nu)

    def __getitem__(self, i: int) -> int:
        if not 1 <= i <= len(self.nu):
            raise IndexError(i)
        return self.nu[i - 1]

    def degree_sum_ok(self) -> bool:
        return all(
            sum(d * self[d] for d in divisors(n)) == self.q ** n
            for n in range(1, self.max_degree + 1)
        )


# -- GF(p)-linear product kernel ---------------------------------------------------

def _poly_digits(field: FieldSpec, f: Poly, length: int) -> np.ndarray:
    """Base-p coordinates of ``f`` padded to ``length`` coefficients."""
    out = np.zeros(length * field.e, dtype=np.int64)
    for i, c in enumerate(f.coeffs):
        for j, v in enumerate(field.to_vector(c)):
            out[i * field.e + j] = v
    return out


def multiplication_matrix(field: FieldSpec, g: Poly, m: int) -> np.ndarray:
    """Matrix of ``h -> g*h`` from degree <= m coordinates to degree <= m+deg g ones."""
    p, e = field.p, field.e
    d = g.degree
    n = d + m
    base = [_poly_digits(field, g.scale(p ** j), d + 1) for j in range(e)]
    M = np.zeros(((m + 1) * e, (n + 1) * e), dtype=np.int64)
    for i in range(m + 1):
        for j in range(e):
            M[i * e + j, i * e : (i + d + 1) * e] = base[j]
    return M


@lru_cache(maxsize=64)
def _digit_matrix(p: int, ndig: int) -> np.ndarray:
    """All base-p digit vectors of ``range(p**ndig)`` as float64 rows."""
    r = np.arange(p ** ndig, dtype=np.int64)
    out = np.empty((len(r), ndig), dtype=np.float64)
    for j in range(ndig):
        out[:, j] = (r // p ** j) % p
    out.flags.writeable = False
    return out


@lru_cache(maxsize=16)
def _block_add_table(p: int, b: int) -> np.ndarray:
    """``T[o, y]``: digit-wise mod-p sum of two b-digit base-p numbers, as a code."""
    d = _digit_matrix(p, b).astype(np.int64)
    pw = p ** np.arange(b, dtype=np.int64)
    t = ((d[:, None, :] + d[None, :, :]) % p) @ pw
    t.flags.writeable = False
    return t


def _block_width(p: int) -> int:
    b = 1
    while p ** (b + 1) <= 1024:
        b += 1
    return b


def product_codes(
    field: FieldSpec, g: Poly, m: int, chunk: int = LOW_DIGITS_CAP
) -> Iterator[tuple[int, np.ndarray]]:
    """Yield ``(start, codes)`` where ``codes[j]`` is the code of ``g * h`` for the
    monic ``h`` of degree ``m`` with code ``q**m + start + j``; covers all ``h``
    in increasing code order.

    The low base-p digits of ``h`` run through one cached block of images; the
    high digits give a constant offset per chunk, added digit-wise through
    block lookup tables.
    """
    p, e = field.p, field.e
    n = g.degree + m
    M = multiplication_matrix(field, g, m)
    low_total = m * e  # coordinates of h below its leading coefficient
    lead_row = M[m * e]  # image of the monic leading x^m
    c = 0
    while c < low_total and p ** (c + 1) <= max(chunk, p):
        c += 1
    width = (n + 1) * e
    b = _block_width(p)
    nblocks = -(-width // b)
    table = _block_add_table(p, b)
    # float64 matmul is exact here: entries stay far below 2**53
    w_low = np.mod(_digit_matrix(p, c) @ M[:c].astype(np.float64), p).astype(np.int64)
    pad = np.zeros((w_low.shape[0], nblocks * b - width), dtype=np.int64)
    w_low = np.concatenate([w_low, pad], axis=1)
    bpw = p ** np.arange(b, dtype=np.int64)
    low_blocks = [w_low[:, k * b : (k + 1) * b] @ bpw for k in range(nblocks)]
    del w_low, pad
    scale = [p ** (k * b) for k in range(nblocks)]
    m_high = M[c:low_total]
    block = p ** c
    for hi in range(p ** (low_total - c)):
        offset = lead_row.copy()
        k = hi
        for j in range(low_total - c):
            k, dj = divmod(k, p)
            if dj:
                offset += dj * m_high[j]
        offset %= p
        off = np.concatenate([offset, np.zeros(nblocks * b - width, dtype=np.int64)])
        codes = None
        for kb in range(nblocks):
            ob = int(off[kb * b : (kb + 1) * b] @ bpw)
            part = table[ob][low_blocks[kb]]
            if codes is None:
                codes = part if scale[kb] == 1 else part * scale[kb]
            else:
                codes += part * scale[kb]
        yield hi * block, codes


def batch_multiply(field: FieldSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Multiply polynomials given by equal-length code arrays, pairwise.

    Schoolbook convolution through the dense addition/multiplication tables
    (carry-less shifts and XOR over GF(2)), deliberately unrelated to
    :func:`product_codes`.
    """
    q = field.q
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if q == 2:
        out = np.zeros_like(a)
        j = 0
        while len(b) and (b >> j).any():
            out ^= np.where((b >> j) & 1 == 1, a << j, 0)
            j += 1
        return out
    add, mul = field.add_table, field.mul_table
    da = _digits_of_codes(a, q)
    db = _digits_of_codes(b, q)
    nb = db.shape[1]
    out = np.zeros((len(a), da.shape[1] + nb - 1), dtype=np.int64)
    for i in range(da.shape[1]):
        out[:, i : i + nb] = add[out[:, i : i + nb], mul[da[:, i : i + 1], db]]
    pw = np.array([q ** k for k in range(out.shape[1])], dtype=np.int64)
    return out @ pw


def _digits_of_codes(codes: np.ndarray, q: int) -> np.ndarray:
    top = int(codes.max()) if len(codes) else 0
    nd = 1
    while q ** nd <= top:
        nd += 1
    return np.stack([(codes // q ** k) % q for k in range(nd)], axis=1)


def code_degree(code: int, q: int) -> int:
    d, v = 0, q
    while v <= code:
        v *= q
        d += 1
    return d


# -- the sieve ------------------------------------------------------------------------

@dataclass
class IrreducibleStore:
    """Irreducible codes by degree and smallest-irreducible-factor tables.

    ``spf[n][r]`` is the code of the smallest irreducible factor (by degree,
    then code) of the monic degree-n polynomial with code ``q**n + r``;
    ``cof[n][r]`` indexes the cofactor within degree ``n - deg spf``.
    """

    field: FieldSpec
    max_degree: int
    irreducibles: dict[int, np.ndarray] = field(default_factory=dict)
    spf: dict[int, np.ndarray] = field(default_factory=dict)
    cof: dict[int, np.ndarray] = field(default_factory=dict)

    @property
    def q(self) -> int:
        return self.field.q

    def counts(self) -> list[int]:
        return [len(self.irreducibles[d]) for d in range(1, self.max_degree + 1)]

    def irreducible_codes(self, d: int) -> np.ndarray:
        if d not in self.irreducibles:
            raise ValueError(f"sieve covers degrees <= {self.max_degree}, not {d}")
        return self.irreducibles[d]

    def irreducible_polys(self, d: int) -> list[Poly]:
        return [decode(self.field, int(c)) for c in self.irreducible_codes(d)]

    def has_spf(self, n: int) -> bool:
        return n in self.spf

    def smallest_factor(self, code: int) -> int:
        q = self.q
        n = code_degree(code, q)
        if not self.has_spf(n):
            raise ValueError(f"no SPF table for degree {n}")
        r = code - q ** n
        if not 0 <= r < q ** n:
            raise ValueError("code is not monic")
        return int(self.spf[n][r])

    def spf_chain(self, code: int) -> list[int]:
        """Irreducible factors (with repetition, ascending) of a monic code."""
        q = self.q
        n = code_degree(code, q)
        r = code - q ** n
        if not 0 <= r < q ** n:
            raise ValueError("code is not monic")
        out = []
        while n > 0:
            if not self.has_spf(n):
                raise ValueError(f"no SPF table for degree {n}")
            pi = int(self.spf[n][r])
            out.append(pi)
            r = int(self.cof[n][r])
            n -= code_degree(pi, q)
        return out


def sieve(
    field: FieldSpec, max_degree: int, *, spf: bool = True, budget: int = DEFAULT_BUDGET
) -> IrreducibleStore:
    """Sieve monic polynomials of degree <= ``max_degree``.

    Irreducibles of degree <= n/2 are applied in (degree, code) order and mark
    their unmarked multiples; survivors are the irreducibles of degree n.
    """
    q = field.q
    if max_degree < 0:
        raise ValueError("max_degree must be >= 0")
    if q ** max_degree > budget:
        raise MemoryBudgetError(
            f"q^D = {q}^{max_degree} = {q ** max_degree} exceeds budget {budget}"
        )
    store = IrreducibleStore(field, max_degree)
    store.spf[0] = np.zeros(1, dtype=np.int64)
    store.cof[0] = np.zeros(1, dtype=np.int64)
    for n in range(1, max_degree + 1):
        size = q ** n
        if not spf:
            hit = np.zeros(size, dtype=bool)
            for d in range(1, n // 2 + 1):
                for code in store.irreducibles[d]:
                    pi = decode(field, int(code))
                    for _, codes in product_codes(field, pi, n - d):
                        hit[codes - size] = True
            store.irreducibles[n] = np.flatnonzero(~hit) + size
            continue
        s = np.zeros(size, dtype=np.int64)
        cf = np.zeros(size, dtype=np.int64)
        for d in range(1, n // 2 + 1):
            for code in store.irreducibles[d]:
                pi = decode(field, int(code))
                for start, codes in product_codes(field, pi, n - d):
                    idx = codes - size
                    fresh = s[idx] == 0
                    sel = idx[fresh]
                    s[sel] = code
                    cf[sel] = start + np.flatnonzero(fresh)
        prime_idx = np.flatnonzero(s == 0)
        store.irreducibles[n] = prime_idx + size
        s[prime_idx] = prime_idx + size
        store.spf[n] = s
        store.cof[n] = cf
    return store


def irreducible_count_by_sieve(field: FieldSpec, max_degree: int, **kw) -> list[int]:
    return sieve(field, max_degree, **kw).counts()
