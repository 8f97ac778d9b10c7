"""Exhaustive enumeration of monic polynomials: excess counts as ground truth.

Excess is computed from the SPF tables by a recurrence: if ``f = pi * g`` with
``pi`` the smallest irreducible factor of ``f``, then
``excess(f) = excess(g) + [pi == spf(g)]``, because ``pi`` is also the
smallest factor of ``g`` whenever it divides ``g``.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .finite_field import FieldSpec, field_of_order
from .irreducibles import (
    DEFAULT_BUDGET,
    IrreducibleStore,
    MemoryBudgetError,
    NuTable,
    batch_multiply,
    product_codes,
    sieve,
)
from .polyring import decode
from .series import count_gf

SQUAREFREE_BUDGET = 1 << 28
EXHAUSTIVE_CHECK = 1 << 20


def default_threads() -> int:
    return os.cpu_count() or 1


def _degrees_of(codes: np.ndarray, q: int, n: int) -> np.ndarray:
    thresholds = np.array([q ** d for d in range(n + 2)], dtype=np.int64)
    return np.searchsorted(thresholds, codes, side="right") - 1


class ExcessTables:
    """Per-degree arrays ``excess[n][r]`` for the monic code ``q**n + r``."""

    def __init__(self, store: IrreducibleStore):
        self.store = store
        self.q = store.q
        self.excess: dict[int, np.ndarray] = {0: np.zeros(1, dtype=np.int8)}

    def _range(self, n: int, lo: int, hi: int) -> np.ndarray:
        st, q = self.store, self.q
        spf = st.spf[n][lo:hi]
        cof = st.cof[n][lo:hi]
        d = _degrees_of(spf, q, n)
        out = np.zeros(hi - lo, dtype=np.int8)
        for dd in np.unique(d):
            dd = int(dd)
            sel = np.flatnonzero(d == dd)
            if dd == n:
                continue  # irreducible: excess 0
            c = cof[sel]
            out[sel] = self.excess[n - dd][c] + (st.spf[n - dd][c] == spf[sel])
        return out

    def build(self, n: int, threads: int = 1) -> np.ndarray:
        for m in range(1, n + 1):
            if m not in self.excess:
                if not self.store.has_spf(m):
                    raise ValueError(f"SPF table for degree {m} missing")
                size = self.q ** m
                self.excess[m] = np.concatenate(
                    [self._range(m, a, b) for a, b in _partition(size, threads)]
                ) if threads > 1 else self._range(m, 0, size)
        return self.excess[n]


def _partition(size: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, size))
    bounds = [size * j // parts for j in range(parts + 1)]
    return [(bounds[j], bounds[j + 1]) for j in range(parts)]


def enumerate_excess(
    field: FieldSpec,
    n: int,
    irr: IrreducibleStore,
    *,
    threads: int = 1,
    budget: int = DEFAULT_BUDGET,
    tables: ExcessTables | None = None,
) -> list[int]:
    """``[e_{n,0}, e_{n,1}, ...]`` by factoring every monic degree-n polynomial.

    The code range is split into ``threads`` contiguous pieces whose count
    vectors are added at the end.
    """
    q = field.q
    if q ** n > budget:
        raise MemoryBudgetError(f"q^n = {q ** n} exceeds budget {budget}")
    if n == 0:
        return [1]
    if not irr.has_spf(n):
        raise ValueError(f"store has no SPF table for degree {n}")
    tables = tables or ExcessTables(irr)
    if n > 1:
        tables.build(n - 1)
    size = q ** n
    width = n

    def work(bounds):
        a, b = bounds
        ex = tables._range(n, a, b)
        return np.bincount(ex, minlength=width)

    ranges = _partition(size, threads)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, ranges))
    else:
        parts = [work(r) for r in ranges]
    total = np.zeros(width, dtype=np.int64)
    for p in parts:
        total[: len(p)] += p
    if n not in tables.excess:
        tables.excess[n] = np.concatenate([tables._range(n, a, b) for a, b in ranges])
    return [int(x) for x in total]


def reconstruction_check(
    irr: IrreducibleStore, n: int, *, rate: float = 0.01, seed: int = 0
) -> tuple[int, int]:
    """Rebuild polynomials from their SPF chains with an independent multiplier.

    Exhaustive when ``q^n <= 2^20``, otherwise a seeded sample of ``rate``.
    Returns ``(checked, failures)``; also flags chain factors missing from the
    irreducible lists.
    """
    field, q = irr.field, irr.q
    size = q ** n
    if size <= EXHAUSTIVE_CHECK:
        r = np.arange(size, dtype=np.int64)
    else:
        rng = np.random.default_rng(seed)
        r = np.unique(rng.integers(0, size, size=max(1, int(size * rate))))
    target = r + size
    prod = np.ones(len(r), dtype=np.int64)
    deg = np.full(len(r), n, dtype=np.int64)
    cur = r.copy()
    bad = np.zeros(len(r), dtype=bool)
    known = {d: irr.irreducibles[d] for d in range(1, n + 1)}
    while True:
        live = np.flatnonzero(deg > 0)
        if not len(live):
            break
        for d in np.unique(deg[live]):
            d = int(d)
            sel = live[deg[live] == d]
            pi = irr.spf[d][cur[sel]]
            pd = _degrees_of(pi, q, d)
            for e in np.unique(pd):
                k = pd == e
                s2 = sel[k]
                bad[s2] |= ~np.isin(pi[k], known[int(e)])
                prod[s2] = batch_multiply(field, prod[s2], pi[k])
            cur[sel] = irr.cof[d][cur[sel]]
            deg[sel] = d - pd
    bad |= prod != target
    return len(r), int(bad.sum())


@dataclass
class VerifyReport:
    q: int
    n_max: int
    K: int
    oracle: list[list[int]]
    series: list[list[int]]
    mismatches: list[tuple[int, int, int, int]] = field(default_factory=list)
    seconds: float = 0.0
    polynomials: int = 0
    reconstruction: tuple[int, int] = (0, 0)

    @property
    def ok(self) -> bool:
        return not self.mismatches and self.reconstruction[1] == 0

    @property
    def throughput(self) -> float:
        return self.polynomials / self.seconds if self.seconds > 0 else 0.0


def verify_counts(
    q: int,
    n_max: int,
    K: int | None = None,
    *,
    threads: int = 1,
    budget: int = DEFAULT_BUDGET,
    nu: NuTable | None = None,
    reconstruct: bool = True,
) -> VerifyReport:
    """Compare enumerated excess rows with the series coefficients for n <= n_max.

    ``nu`` replaces the irreducible counts fed to the series (for fault
    injection); the enumeration never sees it.
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    K = max(n_max - 1, 0) if K is None else K
    t0 = time.perf_counter()
    field = field_of_order(q)
    irr = sieve(field, n_max, budget=budget)
    tables = ExcessTables(irr)
    oracle = []
    for n in range(n_max + 1):
        row = enumerate_excess(field, n, irr, threads=threads, budget=budget, tables=tables)
        oracle.append((row + [0] * (K + 1))[: K + 1])
    E = count_gf(q, n_max, K, nu=nu)
    series = [list(E.row(n)) for n in range(n_max + 1)]
    mism = [
        (n, k, oracle[n][k], series[n][k])
        for n in range(n_max + 1)
        for k in range(K + 1)
        if oracle[n][k] != series[n][k]
    ]
    rec = (0, 0)
    if reconstruct:
        checked = fails = 0
        for n in range(1, n_max + 1):
            c, f = reconstruction_check(irr, n)
            checked += c
            fails += f
        rec = (checked, fails)
    seconds = time.perf_counter() - t0
    polys = sum(q ** n for n in range(n_max + 1))
    return VerifyReport(q, n_max, K, oracle, series, mism, seconds, polys, rec)


def squarefree_count_bruteforce(
    field: FieldSpec, n: int, *, budget: int = SQUAREFREE_BUDGET
) -> int:
    """Monic degree-n polynomials with no repeated irreducible factor.

    Marks every multiple ``pi^2 * h`` of a square in a bitmap over all monic
    degree-n codes; needs irreducibles only up to degree n/2.
    """
    q = field.q
    size = q ** n
    if size > budget:
        raise MemoryBudgetError(f"q^n = {size} exceeds budget {budget}")
    if n < 2:
        return size
    irr = sieve(field, n // 2, spf=False)
    hit = np.zeros(size, dtype=bool)
    for d in range(1, n // 2 + 1):
        for code in irr.irreducible_codes(d):
            pi = decode(field, int(code))
            sq = pi * pi
            for _, codes in product_codes(field, sq, n - 2 * d):
                hit[codes - size] = True
    return size - int(np.count_nonzero(hit))
