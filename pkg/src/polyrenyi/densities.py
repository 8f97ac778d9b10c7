"""Certified densities d_k of excess k, exact d_{n,k}, and the asymptotic constants.

The density generating function is a product over degrees ``i`` of

    F_i(z) = [(1 - r)(1 + r/(1 - r z))]^{nu_i},   r = q^{-i},

and one base factor simplifies to ``c0 (1 - s z)/(1 - r z)`` with
``c0 = 1 - r^2`` and ``s = 1/(q^i + 1)``.  Taking logarithms,

    log D(z) = sum_i nu_i log(1 - q^{-2i}) + sum_{m>=1} (z^m/m) P_m,
    P_m = sum_i nu_i (r^m - s^m) > 0,

so the coefficients of ``D`` come from a positive exponential recurrence.
Truncating at degree ``I`` leaves explicit tails (with ``nu_i <= q^i/i``):

    0 >= tail of the constant >= -q^{-(I+1)} / ((I+1)(1-1/q)(1-q^{-2(I+1)}))
    0 <= tail of P_m <= m q^{-(I+1)m} / ((I+1)(1 - q^{-m}))
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Mapping, Sequence

from .enclosure import (
    Enclosure,
    exp_series_chain,
    fixed_ceil,
    fixed_floor,
    log1p_bounds,
)
from .finite_field import prime_power
from .irreducibles import nu_formula
from .series import count_gf, product_G

MAX_DEGREE = 4096
FIT_PREC = 192


class EpsilonNotAchieved(RuntimeError):
    """Requested width is out of reach; ``widths`` holds what was achieved."""

    def __init__(self, message: str, widths: Sequence[Fraction]):
        super().__init__(message)
        self.widths = list(widths)


def _check_q(q: int) -> None:
    prime_power(q)


# -- per-degree factor ------------------------------------------------------------------


def factor_coefficients(q: int, i: int, K: int) -> list[Fraction]:
    """z-coefficients of one base factor ``(1 - r)(1 + r/(1 - r z))``."""
    r = Fraction(1, q ** i)
    return [1 - r * r] + [(1 - r) * r ** (j + 1) for j in range(1, K + 1)]


def factor_value_at_one(p: int) -> Fraction:
    """``(1 - 1/N)(1 + 1/(N - 1))`` for a norm ``N``: exactly 1."""
    N = Fraction(p)
    return (1 - 1 / N) * (1 + 1 / (N - 1))


# -- fixed-point evaluation -------------------------------------------------------------------


@dataclass(frozen=True)
class DensityReport:
    q: int
    K: int
    enclosures: tuple[Enclosure, ...]
    degree: int  # truncation degree I of the head product
    prec: int  # fixed-point scale in bits
    tail_const: Fraction  # bound on the omitted part of sum nu_i log(1 - q^{-2i})
    tail_power: tuple[Fraction, ...]  # bounds on the omitted parts of P_m
    eps: tuple[Fraction, ...]
    growth: int = 0

    def __post_init__(self):
        if not self.growth:
            object.__setattr__(self, "growth", self.q)

    @property
    def tau(self) -> Fraction:
        return self.tail_const + (self.tail_power[0] if self.tail_power else 0)

    def __getitem__(self, k: int) -> Enclosure:
        return self.enclosures[k]

    def widths(self) -> list[Fraction]:
        return [e.width for e in self.enclosures]

    def mass(self) -> Enclosure:
        return Enclosure(sum(e.lo for e in self.enclosures), sum(e.hi for e in self.enclosures))


def _tail_const(q: int, I: int) -> Fraction:
    return Fraction(1, q ** (I + 1)) / ((I + 1) * (1 - Fraction(1, q)) * (1 - Fraction(1, q ** (2 * I + 2))))


def _tail_power(q: int, I: int, m: int) -> Fraction:
    return Fraction(m, q ** ((I + 1) * m)) / ((I + 1) * (1 - Fraction(1, q ** m)))


def _evaluate(q: int, K: int, I: int, W: int, nu: list[int]) -> tuple[list[Enclosure], Fraction, list[Fraction]]:
    c_lo = c_hi = 0
    for i in range(1, I + 1):
        lo, hi = log1p_bounds(Fraction(-1, q ** (2 * i)), W, nu[i])
        c_lo += lo
        c_hi += hi
    t0 = _tail_const(q, I)
    c_lo -= fixed_ceil(t0, W)
    sums = []
    tails = []
    for m in range(1, K + 1):
        lo = hi = 0
        for i in range(1, I + 1):
            a, b = q ** (i * m), (q ** i + 1) ** m
            num, den = nu[i] * (b - a), a * b
            lo += (num << W) // den
            hi += -((-num << W) // den)
        t = _tail_power(q, I, m)
        tails.append(t)
        sums.append((lo, hi + fixed_ceil(t, W)))
    chain = exp_series_chain((c_lo, c_hi), sums, K, W)
    return [Enclosure.from_fixed(a, b, W) for a, b in chain], t0, tails


def _default_prec(eps: Sequence[Fraction], K: int) -> int:
    tight = min(eps)
    bits = max(1, -math.floor(math.log2(tight)))
    return max(64, bits + 24 + 2 * K.bit_length())


def _as_eps(eps, K: int) -> list[Fraction]:
    if isinstance(eps, (list, tuple)):
        if len(eps) != K + 1:
            raise ValueError(f"need {K + 1} per-k widths, got {len(eps)}")
        out = [Fraction(e) for e in eps]
    else:
        out = [Fraction(eps)] * (K + 1)
    if any(not 0 < e < 1 for e in out):
        raise ValueError("eps must lie strictly between 0 and 1")
    return out


def _nu_list(q: int, I: int) -> list[int]:
    return [0] + [nu_formula(q, i) for i in range(1, I + 1)]


def _search_degree(ok, widths_at, start: int, cap: int) -> int:
    """Smallest I in [start, cap] with ``ok(I)``, assuming monotonicity.

    Doubles until success, then bisects.  Raises with the achieved widths.
    """
    lo, hi = start - 1, start
    while not ok(hi):
        if hi >= cap:
            raise EpsilonNotAchieved(
                f"target width not reached with truncation degree {cap}", widths_at(cap)
            )
        lo, hi = hi, min(2 * hi, cap)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def density_enclosures(
    q: int,
    K: int,
    eps=Fraction(1, 10 ** 12),
    *,
    degree: int | None = None,
    prec: int | None = None,
    max_degree: int = MAX_DEGREE,
) -> DensityReport:
    """Certified enclosures of ``d_0 .. d_K`` of width at most ``eps``.

    ``eps`` is one width or a list of per-k widths.  ``degree`` and ``prec``
    override the automatic choice of truncation degree and fixed-point scale;
    with an explicit ``degree`` the width target is not enforced.
    """
    _check_q(q)
    if K < 0:
        raise ValueError("K must be >= 0")
    eps_k = _as_eps(eps, K)
    W = prec if prec is not None else _default_prec(eps_k, K)
    cache: dict[int, list[Enclosure]] = {}
    nu_cache: list[int] = [0]

    def nu_upto(I):
        while len(nu_cache) <= I:
            nu_cache.append(nu_formula(q, len(nu_cache)))
        return nu_cache

    def run(I):
        if I not in cache:
            cache[I] = _evaluate(q, K, I, W, nu_upto(I))
        return cache[I]

    def ok(I):
        return all(e.width <= t / 2 for e, t in zip(run(I)[0], eps_k))

    if degree is None:
        try:
            I = _search_degree(ok, lambda c: [e.width for e in run(c)[0]], 1, max_degree)
        except EpsilonNotAchieved as exc:
            if all(w <= t for w, t in zip(exc.widths, eps_k)):
                I = max_degree
            else:
                raise
    else:
        if degree < 1:
            raise ValueError("degree must be >= 1")
        I = degree
    encl, t0, tails = run(I)
    if degree is None and prec is None:
        bad = [k for k, (e, t) in enumerate(zip(encl, eps_k)) if e.width > t]
        if bad:
            raise EpsilonNotAchieved(f"widths exceed eps at k={bad}", [e.width for e in encl])
    return DensityReport(q, K, tuple(encl), I, W, t0, tuple(tails), tuple(eps_k))


# -- exact finite-degree densities -------------------------------------------------------------


def dnk_table(q: int, N: int, K: int) -> list[list[Fraction]]:
    """``d_{n,k} = e_{n,k} / q^n`` for ``n <= N``, ``k <= K``."""
    E = count_gf(q, N, K)
    return [[Fraction(E[n, k], q ** n) for k in range(K + 1)] for n in range(N + 1)]


def telescoped_dnk(q: int, N: int, K: int) -> list[Fraction]:
    """``d_{N,k}`` as ``G(1/q, z)`` truncated at ``t^N``, where ``G = (1 - q t) E``."""
    G = product_G(q, N, K)
    return [Fraction(v) for v in G.eval_t(Fraction(1, q))]


def zeta_affine(q: int, s: int) -> Fraction:
    """Zeta value of the affine line over GF(q): ``sum_f q^{-s deg f} = 1/(1 - q^{1-s})``."""
    _check_q(q)
    if s <= 1:
        raise ValueError(f"divergent at s={s}: the series needs s >= 2")
    return 1 / (1 - Fraction(1, q ** (s - 1)))


# -- asymptotic constants ------------------------------------------------------------------------


def reduced_order_prefactor(q: int) -> Fraction:
    return Fraction(1, factorial(q - 2)) * (Fraction(1, q) - Fraction(1, q * q)) ** (q - 1)


def reduced_order_factor(q: int, i: int) -> Fraction:
    return (1 - Fraction(1, q ** i)) * (1 - Fraction(1, q ** i - q))


def pole_order_prefactor(q: int) -> Fraction:
    return Fraction(1, factorial(q - 1)) * (Fraction(1, q) - Fraction(1, q * q)) ** q


def pole_order_factor(q: int, i: int) -> Fraction:
    return (1 - Fraction(1, q ** i)) * (1 + Fraction(1, q ** i - q))


def _weighted_log(x: Fraction, weight: int, W: int) -> tuple[int, int]:
    """Fixed-point bounds on ``weight * log(x)`` for a positive rational ``x``."""
    if abs(x - 1) <= Fraction(1, 2):
        return log1p_bounds(x - 1, W, weight)
    e = Enclosure.point(x).log(W + weight.bit_length() + 16).mul(weight, W + 16)
    return fixed_floor(e.lo, W), fixed_ceil(e.hi, W)


def _log_sum(q: int, I: int, W: int, factor, nu: list[int]) -> tuple[int, int]:
    lo = hi = 0
    for i in range(2, I + 1):
        a, b = _weighted_log(factor(q, i), nu[i], W)
        lo += a
        hi += b
    return lo, hi


def _prefactor_log_exp(pre: Fraction, s_lo: int, s_hi: int, W: int) -> Enclosure:
    e = Enclosure.from_fixed(s_lo, s_hi, W).exp(W + 8)
    return e.mul(Enclosure.point(pre), W + 8)


def pole_order_asymptotic_A(
    q: int, eps=Fraction(1, 10 ** 12), *, degree: int | None = None, prec: int | None = None
) -> Enclosure:
    """Certified enclosure of the constant attached to a pole of order q at z = q.

    Tail: with ``y_i = (q-1)/(q^i (q^i - q))`` the omitted part of
    ``sum nu_i log(1 + y_i)`` lies in ``[0, q^{-I} / ((I+1)(1 - q^{-I}))]``.
    """
    _check_q(q)
    eps = Fraction(eps)
    W = prec or max(64, -math.floor(math.log2(eps)) + 24)
    pre = pole_order_prefactor(q)
    nu: list[int] = [0]

    def run(I):
        while len(nu) <= I:
            nu.append(nu_formula(q, len(nu)))
        lo, hi = _log_sum(q, I, W, pole_order_factor, nu)
        t = Fraction(1, q ** I) / ((I + 1) * (1 - Fraction(1, q ** I)))
        return _prefactor_log_exp(pre, lo, hi + fixed_ceil(t, W), W)

    if degree is not None:
        return run(degree)
    I = _search_degree(lambda I: run(I).width <= eps / 2, lambda c: [run(c).width], 1, MAX_DEGREE)
    return run(I)


def reduced_order_asymptotic_A(
    q: int, eps=Fraction(1, 10 ** 12), *, degree: int = 8, prec: int | None = None
) -> Enclosure:
    """Certified enclosure of the constant for a pole of order q-1 at z = q,
    prefactor ``(1/q - 1/q^2)^{q-1} / (q-2)!`` and factors
    ``(1 - q^{-i})(1 - 1/(q^i - q))`` for ``i >= 2``.

    Each factor is ``1 - y_i`` with ``y_i >= q^{-i}`` and ``nu_i >= (q^i - 2 q^{i/2})/i``,
    so ``sum_{i>I} nu_i log(1 - y_i)`` is at most
    ``-ln((M+1)/(I+1)) + 2 q^{-(I+1)/2} / ((I+1)(1 - q^{-1/2}))`` for every ``M``:
    the product diverges to 0.  The enclosure is ``[0, ub]`` with ``M`` picked so
    that ``ub <= eps``.
    """
    _check_q(q)
    eps = Fraction(eps)
    W = prec or max(64, -math.floor(math.log2(eps)) + 24)
    I = max(degree, 2)
    nu = _nu_list(q, I)
    lo_sum, hi_sum = _log_sum(q, I, W, reduced_order_factor, nu)
    pre = reduced_order_prefactor(q)
    # rational b >= q^{-1/2}: 1/floor(sqrt q) once that is >= 2, else 3/4
    r = math.isqrt(q)
    b = Fraction(1, r) if r >= 2 else Fraction(3, 4)
    small = 2 * b ** (I + 1) / ((I + 1) * (1 - b))
    small_fixed = fixed_ceil(small, W)
    head = Enclosure.from_fixed(lo_sum, hi_sum, W)
    need = math.log(float(pre)) + float(head.hi) - math.log(float(eps)) + float(small) + 2
    M = (I + 1) * math.ceil(math.exp(max(need, 1.0))) + 1
    harmonic_lo = Enclosure.point(Fraction(M + 1, I + 1)).log(W).lo
    s_hi = hi_sum - fixed_floor(harmonic_lo, W) + small_fixed
    ub = _prefactor_log_exp(pre, s_hi, s_hi, W).hi
    return Enclosure(Fraction(0), ub)


# -- exponent fitting ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FitResult:
    status: str  # "ok" or "indeterminate"
    beta: Enclosure | None
    A: Enclosure | None
    beta_integer: int | None
    order: int
    k_range: tuple[int, int]
    reason: str = ""
    beta_last: Enclosure | None = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def _lagrange_weights(nodes: Sequence[int]) -> list[Fraction]:
    """Weights extrapolating values at ``h = 1/k`` to ``h = 0``."""
    hs = [Fraction(1, k) for k in nodes]
    out = []
    for j, hj in enumerate(hs):
        w = Fraction(1)
        for l, hl in enumerate(hs):
            if l != j:
                w *= hl / (hl - hj)
        out.append(w)
    return out


def _extrapolate(seq: Mapping[int, Enclosure], R: int) -> Enclosure:
    ks = sorted(seq)
    last, first = ks[-1], ks[0]
    if R == 0:
        return seq[last]
    step = max(1, (last - first) // R)
    nodes = [last - j * step for j in range(R + 1)]
    if nodes[-1] < first:
        raise ValueError("not enough points for the extrapolation order")
    total = Enclosure.point(0)
    for w, k in zip(_lagrange_weights(nodes), nodes):
        total = total.add(seq[k].mul(w, FIT_PREC), FIT_PREC)
    return total


def richardson(seq: Mapping[int, Enclosure], max_order: int = 6) -> tuple[Enclosure, int]:
    """Limit estimate of a sequence in ``k`` with an expansion in ``1/k``.

    For ``R = 1..max_order`` the order-R Lagrange extrapolation through evenly
    spaced nodes is compared with order ``R-1``; the order minimising
    ``width + 2 |mid_R - mid_{R-1}|`` wins, and that difference is added to both
    ends of the interval.  The rigorous part covers only the interval inputs;
    the added margin is an empirical error estimate.
    """
    ks = sorted(seq)
    usable = min(max_order, len(ks) - 1)
    if usable < 1:
        e = seq[ks[-1]]
        return e, 0
    ests = [_extrapolate(seq, R) for R in range(usable + 1)]
    best, best_R, best_score = None, 0, None
    for R in range(1, usable + 1):
        diff = abs(ests[R].mid - ests[R - 1].mid)
        score = ests[R].width + 2 * diff
        if best_score is None or score < best_score:
            best_score, best_R = score, R
            best = Enclosure(ests[R].lo - 2 * diff, ests[R].hi + 2 * diff)
    return best, best_R


def fit_power_law(
    u: Mapping[int, Enclosure], *, max_order: int = 6, max_width: Fraction = Fraction(1, 2)
) -> FitResult:
    """Fit ``u_k ~ A k^beta`` from enclosures of ``u_k``.

    Local exponents ``ln(u_{k+1}/u_k) / ln((k+1)/k)`` are extrapolated to
    ``k -> inf``; if exactly one integer is compatible the constant comes from
    ``u_k / k^beta`` extrapolated the same way.
    """
    ks = sorted(k for k in u if k >= 1)
    if len(ks) < 3:
        return FitResult("indeterminate", None, None, None, 0, (0, 0), "fewer than 3 points")
    if any(u[k].lo <= 0 for k in ks):
        return FitResult("indeterminate", None, None, None, 0, (ks[0], ks[-1]), "u_k enclosure not positive")
    betas = {}
    for k in ks:
        if k + 1 in u:
            ratio = u[k + 1].div(u[k], FIT_PREC)
            step = Enclosure.point(Fraction(k + 1, k)).log(FIT_PREC)
            betas[k] = ratio.log(FIT_PREC).div(step, FIT_PREC)
    if len(betas) < 2:
        return FitResult("indeterminate", None, None, None, 0, (ks[0], ks[-1]), "no consecutive pairs")
    beta, R = richardson(betas, max_order)
    last = betas[max(betas)]
    rng = (min(betas), max(betas) + 1)
    if beta.width > max_width:
        return FitResult(
            "indeterminate", None, None, None, R, rng, f"beta interval width {float(beta.width):.3g}", last
        )
    ints = [n for n in range(math.floor(beta.lo), math.ceil(beta.hi) + 1) if beta.contains(n)]
    if len(ints) != 1:
        return FitResult("ok", beta, None, None, R, rng, f"{len(ints)} integers in beta interval", last)
    b = ints[0]
    scaled = {k: u[k].div(Fraction(k) ** b, FIT_PREC) for k in ks}
    A, _ = richardson(scaled, max_order)
    return FitResult("ok", beta, A, b, R, rng, "", last)


def exponent_fit(report: DensityReport, *, max_order: int = 6) -> FitResult:
    """Fit the coefficient growth of a density report over ``k`` in ``[K/2, K]``."""
    K = report.K
    g = report.growth
    u = {
        k: report.enclosures[k].mul(g ** k, FIT_PREC)
        for k in range(max(1, (K + 1) // 2), K + 1)
    }
    return fit_power_law(u, max_order=max_order)


@dataclass(frozen=True)
class Verdict:
    q: int
    fit: FitResult
    reduced_A: Enclosure
    pole_A: Enclosure
    form: str  # "pole-order", "reduced-order", or "indeterminate"
    A_matches: bool

    @property
    def exponent_exclusive(self) -> bool:
        b = self.fit.beta
        return b is not None and (b.contains(self.q - 2) != b.contains(self.q - 1))

    def line(self) -> str:
        if self.form == "indeterminate":
            return f"indeterminate ({self.fit.reason or 'beta interval admits both exponents'})"
        exp = self.q - 1 if self.form == "pole-order" else self.q - 2
        which = "pole-order constant" if self.form == "pole-order" else "reduced-order constant"
        agree = "intersects" if self.A_matches else "does NOT intersect"
        return f"beta ~ {exp} ({self.form} form); fitted A {agree} the {which}"


def adjudicate(q: int, fit: FitResult, reduced_A: Enclosure, pole_A: Enclosure) -> Verdict:
    b = fit.beta
    if b is None or b.contains(q - 2) == b.contains(q - 1):
        return Verdict(q, fit, reduced_A, pole_A, "indeterminate", False)
    if b.contains(q - 1):
        return Verdict(q, fit, reduced_A, pole_A, "pole-order", fit.A is not None and fit.A.intersects(pole_A))
    return Verdict(q, fit, reduced_A, pole_A, "reduced-order", fit.A is not None and fit.A.intersects(reduced_A))
