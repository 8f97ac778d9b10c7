"""Excess statistics of the positive integers and the corresponding Euler product.

Empirical side: a smallest-prime-factor sieve up to ``N`` and per-integer
excess ``sum_p max(v_p(n) - 1, 0)``.

Analytic side: ``sum_k d_k z^k = prod_p (1 - 1/p)(1 + 1/(p - z))``.  Exactly as
for polynomials, one factor is ``(1 - p^{-2})(1 - z/(p+1))/(1 - z/p)``, so

    log D(z) = sum_p log(1 - p^{-2}) + sum_m (z^m/m) sum_p (p^{-m} - (p+1)^{-m}).

The head ``p <= P`` is summed exactly; the tail ``p > P`` is handled either by
crude integral majorants or through prime zeta values
``P_{>P}(s) = sum_{p>P} p^{-s}``, obtained from certified ``zeta(s)`` by Moebius
inversion of ``log zeta_{>P}(s) = sum_j P_{>P}(js)/j``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np
from mpmath import bernfrac

from .densities import EpsilonNotAchieved
from .enclosure import Enclosure, exp_series_chain, fixed_ceil, fixed_floor, log1p_bounds
from .irreducibles import mobius

SIEVE_CAP = 10 ** 8


class SieveBudgetError(ValueError):
    pass


# -- sieves ---------------------------------------------------------------------------------


def primes_upto(n: int) -> np.ndarray:
    """Eratosthenes: all primes ``<= n``."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    is_p = np.ones(n + 1, dtype=bool)
    is_p[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if is_p[p]:
            is_p[p * p :: p] = False
    return np.flatnonzero(is_p).astype(np.int64)


def spf_sieve(N: int) -> np.ndarray:
    """``spf[n]`` = smallest prime factor of ``n`` for ``2 <= n <= N`` (``spf[1] = 1``)."""
    if N > SIEVE_CAP:
        raise SieveBudgetError(f"limit {N} exceeds sieve cap {SIEVE_CAP}")
    spf = np.zeros(N + 1, dtype=np.int32)
    for p in primes_upto(math.isqrt(N)):
        p = int(p)
        view = spf[p * p :: p]
        view[view == 0] = p
    idx = np.flatnonzero(spf == 0)
    spf[idx] = idx
    if N >= 1:
        spf[1] = 1
    return spf


def int_excess(n: int) -> int:
    """Excess of one positive integer by trial division."""
    if n < 1:
        raise ValueError("excess is defined for positive integers")
    total, p = 0, 2
    while p * p <= n:
        a = 0
        while n % p == 0:
            n //= p
            a += 1
        total += max(a - 1, 0)
        p += 1
    return total


def excess_by_spf(spf: np.ndarray, lo: int, hi: int) -> np.ndarray:
    """Excess of every integer in ``[lo, hi)`` by peeling smallest prime factors."""
    cur = np.arange(lo, hi, dtype=np.int64)
    ex = np.zeros(hi - lo, dtype=np.int8)
    prev = np.zeros(hi - lo, dtype=np.int64)
    live = np.flatnonzero(cur > 1)
    while len(live):
        c = cur[live]
        p = spf[c].astype(np.int64)
        ex[live] += p == prev[live]
        prev[live] = p
        c //= p
        cur[live] = c
        live = live[c > 1]
    return ex


def excess_by_prime_powers(N: int) -> np.ndarray:
    """Excess of ``0..N`` as ``sum_{p, j>=2} [p^j | n]`` (index 0 unused)."""
    ex = np.zeros(N + 1, dtype=np.int8)
    for p in primes_upto(math.isqrt(N)):
        pj = int(p) * int(p)
        while pj <= N:
            ex[pj::pj] += 1
            pj *= int(p)
    return ex


@dataclass(frozen=True)
class IntExcessCounts:
    N: int
    counts: tuple[int, ...]  # counts[k]: integers in [1, N] of excess k

    def __getitem__(self, k: int) -> int:
        return self.counts[k] if k < len(self.counts) else 0

    def fraction(self, k: int) -> Fraction:
        return Fraction(self[k], self.N)


def int_excess_counts(N: int, K: int | None = None, *, threads: int = 1, method: str = "spf") -> IntExcessCounts:
    """Excess histogram of ``1..N``; ``method`` is ``"spf"`` or ``"powers"``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if N > SIEVE_CAP:
        raise SieveBudgetError(f"limit {N} exceeds sieve cap {SIEVE_CAP}")
    if method == "powers":
        hist = np.bincount(excess_by_prime_powers(N)[1:])
    elif method == "spf":
        spf = spf_sieve(N)
        parts = max(1, threads)
        bounds = [1 + N * j // parts for j in range(parts + 1)]
        ranges = list(zip(bounds[:-1], bounds[1:]))

        def work(r):
            return np.bincount(excess_by_spf(spf, *r))

        if parts > 1:
            with ThreadPoolExecutor(max_workers=parts) as pool:
                chunks = list(pool.map(work, ranges))
        else:
            chunks = [work(r) for r in ranges]
        hist = np.zeros(max(len(c) for c in chunks), dtype=np.int64)
        for c in chunks:
            hist[: len(c)] += c
    else:
        raise ValueError(f"unknown method {method!r}")
    counts = [int(x) for x in hist]
    if K is not None:
        counts = (counts + [0] * (K + 1))[: max(K + 1, len(counts))]
    return IntExcessCounts(N, tuple(counts))


# -- certified zeta and prime zeta values -----------------------------------------------------


@lru_cache(maxsize=512)
def _bernoulli(n: int) -> Fraction:
    p, q = bernfrac(n)
    return Fraction(int(p), int(q))


@lru_cache(maxsize=1024)
def zeta_fixed(s: int, W: int) -> tuple[int, int]:
    """Fixed-point bounds on ``zeta(s)`` for an integer ``s >= 2`` (Euler-Maclaurin).

    For real ``s`` the remainder after the ``B_{2J}`` term is at most the first
    omitted term in absolute value; twice that is used.
    """
    if s < 2:
        raise ValueError("zeta_fixed needs s >= 2")
    N = max(16, W // 4)
    lo = hi = 0
    for n in range(1, N):
        t = Fraction(1, n ** s)
        lo += fixed_floor(t, W)
        hi += fixed_ceil(t, W)
    head = Fraction(1, (s - 1) * N ** (s - 1)) + Fraction(1, 2 * N ** s)
    lo += fixed_floor(head, W)
    hi += fixed_ceil(head, W)
    rising = s  # s (s+1) ... (s+2j-2)
    Npow = Fraction(1, N ** (s + 1))
    eps = Fraction(1, 1 << (W + 4))
    j = 1
    while True:
        term = _bernoulli(2 * j) / math.factorial(2 * j) * rising * Npow
        lo += fixed_floor(term, W)
        hi += fixed_ceil(term, W)
        rising *= (s + 2 * j - 1) * (s + 2 * j)
        Npow /= N * N
        nxt = abs(_bernoulli(2 * j + 2) / math.factorial(2 * j + 2) * rising * Npow)
        j += 1
        if nxt < eps:
            r = fixed_ceil(2 * nxt, W)
            return lo - r, hi + r
        if j > 4 * N:
            raise RuntimeError("Euler-Maclaurin series did not converge")


def _crude_tail(P: int, s: int) -> Fraction:
    """``sum_{n>P} n^{-s} <= (P+1)^{-s} + (P+1)^{1-s}/(s-1)``."""
    return Fraction(1, (P + 1) ** s) + Fraction(1, (s - 1) * (P + 1) ** (s - 1))


class PrimeZetaTail:
    """Fixed-point bounds on ``P_{>P}(s) = sum_{p > P} p^{-s}`` for integer ``s >= 2``."""

    def __init__(self, P: int, W: int):
        self.P = P
        self.W = W
        self.primes = [int(p) for p in primes_upto(P)]
        self.tiny = Fraction(1, 1 << (W + 8))
        self._A: dict[int, tuple[int, int]] = {}
        self._P: dict[int, tuple[int, int]] = {}

    def _log_zeta_rough(self, t: int) -> tuple[int, int]:
        """Bounds on ``log zeta_{>P}(t) = log(zeta(t) prod_{p<=P} (1 - p^{-t}))``."""
        if t in self._A:
            return self._A[t]
        W = self.W
        c = _crude_tail(self.P, t)
        if c < self.tiny:
            out = (0, fixed_ceil(c, W))
        else:
            G = W + 32
            zlo, zhi = zeta_fixed(t, G)
            plo = phi = 1 << G
            for p in self.primes:
                num, den = p ** t - 1, p ** t
                plo = (plo * ((num << G) // den)) >> G
                phi = -((-phi * -((-num << G) // den)) >> G)
            one = 1 << G
            xlo = max(Fraction(((zlo * plo) >> G) - one, one), Fraction(0))
            xhi = Fraction(-((-(zhi * phi)) >> G) - one, one)
            xhi = min(xhi, c)
            a, _ = log1p_bounds(xlo, W) if xlo else (0, 0)
            _, b = log1p_bounds(xhi, W)
            out = (max(a, 0), b)
        self._A[t] = out
        return out

    def __call__(self, s: int) -> tuple[int, int]:
        if s in self._P:
            return self._P[s]
        W = self.W
        c = _crude_tail(self.P, s)
        if c < self.tiny:
            out = (0, fixed_ceil(c, W))
        else:
            lo = hi = 0
            j = 1
            while True:
                mu = mobius(j)
                if mu:
                    a, b = self._log_zeta_rough(j * s)
                    wlo, whi = (a, b) if mu > 0 else (-b, -a)
                    lo += wlo // j
                    hi += -((-whi) // j)
                    # rest: |sum_{j'>j} mu(j')/j' A(j's)| <= 2 c((j+1) s)
                rest = 2 * _crude_tail(self.P, (j + 1) * s)
                if rest < self.tiny:
                    r = fixed_ceil(rest, W)
                    lo, hi = lo - r, hi + r
                    break
                j += 1
            lo = max(lo, 0)
            hi = min(hi, fixed_ceil(c, W))
            out = (lo, hi)
        self._P[s] = out
        return out


# -- density enclosures ------------------------------------------------------------------------------


@dataclass(frozen=True)
class RenyiReport:
    K: int
    P: int
    enclosures: tuple[Enclosure, ...]
    prec: int
    tail: str
    growth: int = 2

    def __getitem__(self, k: int) -> Enclosure:
        return self.enclosures[k]

    def mass(self) -> Enclosure:
        return Enclosure(sum(e.lo for e in self.enclosures), sum(e.hi for e in self.enclosures))


def _tail_const(P: int, W: int, tail: str, pz: PrimeZetaTail | None) -> tuple[int, int]:
    """Bounds on ``sum_{p>P} log(1 - p^{-2})``."""
    if tail == "majorant":
        # log(1 - 1/p^2) >= -1/(p^2 - 1) and sum_{n>P} 1/(n^2 - 1) = (1/P + 1/(P+1))/2
        return -fixed_ceil((Fraction(1, P) + Fraction(1, P + 1)) / 2, W), 0
    lo = hi = 0
    j = 1
    while True:
        a, b = pz(2 * j)
        lo -= -((-b) // j)
        hi -= a // j
        rest = 2 * _crude_tail(P, 2 * j + 2)
        if rest < pz.tiny:
            return lo - fixed_ceil(rest, W), min(hi, 0)
        j += 1


def _tail_power(P: int, m: int, W: int, tail: str, pz: PrimeZetaTail | None) -> tuple[int, int]:
    """Bounds on ``sum_{p>P} (p^{-m} - (p+1)^{-m})``."""
    if tail == "majorant":
        # p^{-m} - (p+1)^{-m} <= m p^{-m-1}
        return 0, fixed_ceil(m * _crude_tail(P, m + 1), W)
    # alternating expansion in 1/p; consecutive terms shrink once p > m
    lo = hi = 0
    j = 1
    while True:
        a, b = pz(m + j)
        w = comb(m + j - 1, j)
        if j % 2:
            lo += w * a
            hi += w * b
        else:
            lo -= w * b
            hi -= w * a
        nxt = comb(m + j, j + 1) * _crude_tail(P, m + j + 1)
        if nxt < pz.tiny:
            r = fixed_ceil(nxt, W)
            return max(lo - r, 0), hi + r
        j += 1


def _renyi_eval(K: int, P: int, W: int, tail: str) -> list[Enclosure]:
    primes = [int(p) for p in primes_upto(P)]
    pz = PrimeZetaTail(P, W) if tail == "zeta" else None
    c_lo = c_hi = 0
    for p in primes:
        a, b = log1p_bounds(Fraction(-1, p * p), W)
        c_lo += a
        c_hi += b
    a, b = _tail_const(P, W, tail, pz)
    c_lo += a
    c_hi += b
    sums = []
    for m in range(1, K + 1):
        lo = hi = 0
        for p in primes:
            x, y = p ** m, (p + 1) ** m
            num, den = y - x, x * y
            lo += (num << W) // den
            hi += -((-num << W) // den)
        a, b = _tail_power(P, m, W, tail, pz)
        sums.append((lo + a, hi + b))
    return [Enclosure.from_fixed(a, b, W) for a, b in exp_series_chain((c_lo, c_hi), sums, K, W)]


def _prec_for(eps: Fraction, K: int) -> int:
    return max(64, -math.floor(math.log2(eps)) + 24 + 2 * K.bit_length())


def renyi_density(
    K: int,
    P: int = 1000,
    eps=Fraction(1, 10 ** 12),
    *,
    tail: str = "zeta",
    prec: int | None = None,
) -> RenyiReport:
    """Certified enclosures of the integer excess densities ``d_0 .. d_K``.

    ``eps`` is one width or a list of per-k widths.  ``tail="zeta"`` uses
    prime zeta values for ``p > P`` (requires ``P > K + 1``); ``tail="majorant"``
    uses integral majorants and needs a large ``P`` for small widths.
    """
    if K < 0:
        raise ValueError("K must be >= 0")
    if P < 3:
        raise ValueError("prime cutoff must be >= 3")
    if tail not in ("zeta", "majorant"):
        raise ValueError(f"unknown tail mode {tail!r}")
    if tail == "zeta" and P <= K + 1:
        raise ValueError("zeta tail needs P > K + 1 so the 1/p expansion contracts")
    eps_k = list(eps) if isinstance(eps, (list, tuple)) else [eps] * (K + 1)
    eps_k = [Fraction(e) for e in eps_k]
    if len(eps_k) != K + 1:
        raise ValueError(f"need {K + 1} per-k widths")
    W = prec or _prec_for(min(eps_k), K)
    encl = _renyi_eval(K, P, W, tail)
    bad = [k for k, (e, t) in enumerate(zip(encl, eps_k)) if e.width > t]
    if bad and prec is None:
        raise EpsilonNotAchieved(f"widths exceed eps at k={bad} (P={P}, tail={tail})", [e.width for e in encl])
    return RenyiReport(K, P, tuple(encl), W, tail)


def delta_factor(p: int) -> Fraction:
    """``(p-1)^2 / (p(p-2))`` for an odd prime ``p``."""
    return Fraction((p - 1) ** 2, p * (p - 2))


def delta_constant(P: int = 1000, eps=Fraction(1, 10 ** 12), *, tail: str = "zeta", prec: int | None = None) -> Enclosure:
    """Certified ``(1/4) prod_{p>=3} (p-1)^2/(p(p-2))``.

    ``log`` of one factor is ``sum_{m>=2} (2^m - 2) p^{-m} / m``, so the tail over
    ``p > P`` is ``sum_m (2^m - 2)/m P_{>P}(m)``; ``tail="majorant"`` bounds it by
    ``sum_{odd n > P} 1/(n(n-2)) = 1/(2(n0 - 2))`` with ``n0`` the first odd number above P.
    """
    if P < 3:
        raise ValueError("prime cutoff must be >= 3")
    eps = Fraction(eps)
    W = prec or _prec_for(eps, 0)
    lo = hi = 0
    for p in primes_upto(P):
        p = int(p)
        if p == 2:
            continue
        a, b = log1p_bounds(Fraction(1, p * (p - 2)), W)
        lo += a
        hi += b
    if tail == "majorant":
        n0 = P + 1 if P % 2 == 0 else P + 2
        hi += fixed_ceil(Fraction(1, 2 * (n0 - 2)), W)
    elif tail == "zeta":
        pz = PrimeZetaTail(P, W)
        m = 2
        while True:
            a, b = pz(m)
            lo += ((2 ** m - 2) * a) // m
            hi += -((-(2 ** m - 2) * b) // m)
            rest = 2 * Fraction(2 ** (m + 1), m + 1) * _crude_tail(P, m + 1)
            if rest < pz.tiny:
                hi += fixed_ceil(rest, W)
                break
            m += 1
    else:
        raise ValueError(f"unknown tail mode {tail!r}")
    e = Enclosure.from_fixed(lo, hi, W).exp(W + 8).mul(Fraction(1, 4), W + 8)
    if e.width > eps and prec is None:
        raise EpsilonNotAchieved(f"delta width {float(e.width):.3g} exceeds eps", [e.width])
    return e
