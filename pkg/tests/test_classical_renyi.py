import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from polyrenyi.classical_renyi import (
    PrimeZetaTail,
    SieveBudgetError,
    delta_constant,
    delta_factor,
    excess_by_prime_powers,
    excess_by_spf,
    int_excess,
    int_excess_counts,
    primes_upto,
    renyi_density,
    spf_sieve,
    zeta_fixed,
)
from polyrenyi.enclosure import Enclosure

# Oracles from mpmath.primezeta at 40 digits:
#   log delta = log(1/4) + sum_m (2^m - 2)/m (P(m) - 2^-m)
#   d_1 = (6/pi^2) sum_{j>=2} (-1)^j P(j)
DELTA = Fraction("0.378695032034372814447729813912")
D1 = Fraction("0.200755722019265986996250723114")


def _mp(x):
    return mpmath.mpf(x.numerator) / x.denominator


def test_primes():
    assert primes_upto(30).tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert len(primes_upto(10 ** 6)) == 78498
    assert primes_upto(1).tolist() == []


def test_spf_sieve():
    spf = spf_sieve(1000)
    for n in range(2, 1001):
        p = int(spf[n])
        assert n % p == 0
        assert all(n % d for d in range(2, p))
    assert spf.dtype == np.int32


def test_sieve_cap():
    with pytest.raises(SieveBudgetError):
        spf_sieve(10 ** 8 + 1)


def test_excess_examples():
    assert int_excess(1) == 0
    assert int_excess(12) == 1
    assert int_excess(360) == 3
    assert int_excess(2 ** 10) == 9


def test_counts_examples():
    assert int_excess_counts(100, 3)[0] == 61
    c = int_excess_counts(10)
    assert (c[0], c[1], c[2]) == (7, 2, 1)
    assert sum(c.counts) == 10


def test_squarefree_count_direct():
    N = 2000
    direct = sum(1 for n in range(1, N + 1) if all(n % (d * d) for d in range(2, math.isqrt(n) + 1)))
    assert int_excess_counts(N, 2)[0] == direct


def test_two_excess_routes_agree():
    N = 200000
    spf = spf_sieve(N)
    a = excess_by_spf(spf, 1, N + 1)
    b = excess_by_prime_powers(N)[1:]
    assert np.array_equal(a, b)
    assert int_excess_counts(N, 6).counts == int_excess_counts(N, 6, method="powers").counts


def test_threads_do_not_change_counts():
    N = 300000
    assert int_excess_counts(N, 5, threads=1).counts == int_excess_counts(N, 5, threads=4).counts


def test_spot_values_against_trial_division():
    spf = spf_sieve(5000)
    ex = excess_by_spf(spf, 1, 5001)
    for n in range(1, 5001, 37):
        assert ex[n - 1] == int_excess(n)


@pytest.mark.parametrize("s", [2, 3, 4, 7, 20])
def test_zeta_fixed(s):
    W = 120
    lo, hi = zeta_fixed(s, W)
    with mpmath.workprec(240):
        ref = mpmath.zeta(s) * mpmath.mpf(2) ** W
        assert lo <= ref <= hi
    assert hi - lo < 2 ** 10


@pytest.mark.parametrize("P,s", [(100, 2), (100, 3), (1000, 2), (1000, 5), (50, 12)])
def test_prime_zeta_tail(P, s):
    W = 110
    lo, hi = PrimeZetaTail(P, W)(s)
    with mpmath.workprec(260):
        head = sum(mpmath.mpf(int(p)) ** -s for p in primes_upto(P))
        ref = (mpmath.primezeta(s) - head) * mpmath.mpf(2) ** W
        assert lo <= ref <= hi
    assert hi - lo < 2 ** 30


def test_renyi_d0_and_d1():
    rep = renyi_density(4, 1000, Fraction(1, 10 ** 12))
    with mpmath.workprec(200):
        six = 6 / mpmath.pi ** 2
        assert _mp(rep[0].lo) <= six <= _mp(rep[0].hi)
    assert rep[1].contains(D1) or abs(rep[1].mid - D1) < Fraction(1, 10 ** 25)
    assert all(e.width <= Fraction(1, 10 ** 12) for e in rep.enclosures)


def test_renyi_mass_approaches_one():
    lows = [renyi_density(K, 1000, Fraction(1, 10 ** 10)).mass().lo for K in (2, 6, 12)]
    assert lows[0] < lows[1] < lows[2] < 1
    assert 1 - lows[2] < Fraction(1, 10 ** 3)


def test_majorant_contains_zeta_route():
    z = renyi_density(4, 2000, Fraction(1, 10 ** 12))
    m = renyi_density(4, 2000, Fraction(1, 10 ** 3), tail="majorant")
    for a, b in zip(m.enclosures, z.enclosures):
        assert a.contains(b)
    assert delta_constant(2000, Fraction(1, 10 ** 3), tail="majorant").contains(
        delta_constant(2000, Fraction(1, 10 ** 12))
    )


def test_renyi_arguments():
    with pytest.raises(ValueError):
        renyi_density(10, 5)
    with pytest.raises(ValueError):
        renyi_density(2, 100, tail="bogus")
    with pytest.raises(ValueError):
        renyi_density(-1, 100)


def test_delta_factors():
    assert delta_factor(3) == Fraction(4, 3)
    assert delta_factor(5) == Fraction(16, 15)
    assert delta_factor(7) == 1 + Fraction(1, 35)


def test_delta_constant():
    d = delta_constant(1000, Fraction(1, 10 ** 10))
    assert d.width <= Fraction(1, 10 ** 10)
    assert abs(d.mid - DELTA) < Fraction(1, 10 ** 10)
    tight = delta_constant(1000, Fraction(1, 10 ** 20))
    assert tight.contains(DELTA) or abs(tight.mid - DELTA) < Fraction(1, 10 ** 25)


def test_delta_head_product_exact():
    # the truncated product over 3 <= p <= 30 as an exact rational lies below delta
    head = Fraction(1, 4)
    for p in primes_upto(30)[1:]:
        head *= delta_factor(int(p))
    assert head < DELTA
    assert delta_constant(30, Fraction(1, 10), tail="majorant").lo >= head - Fraction(1, 10 ** 15)


def test_empirical_frequency_small():
    N = 10 ** 6
    c = int_excess_counts(N, 4)
    rep = renyi_density(4, 1000, Fraction(1, 10 ** 10))
    for k in range(5):
        assert abs(c.fraction(k) - rep[k].mid) < Fraction(10 ** 3) / math.isqrt(N) + rep[k].width
