from fractions import Fraction

import pytest

from polyrenyi.irreducibles import NuTable
from polyrenyi.series import (
    ExcessTable,
    Series1,
    Series2,
    SeriesError,
    count_gf,
    one_minus_qt_product,
    product_G,
    squarefree_closed,
    squarefree_euler,
    squarefree_gf,
)

# Excess rows e_{n,k} from a naive factorizer (trial division by every monic
# polynomial of increasing degree) run over all monic polynomials.
ENUMERATED = {
    2: [[1], [2], [2, 2], [4, 2, 2], [8, 3, 3, 2], [16, 8, 2, 4, 2],
        [32, 13, 10, 2, 5, 2], [64, 28, 16, 10, 2, 6, 2]],
    3: [[1], [3], [6, 3], [18, 6, 3], [54, 15, 9, 3]],
    4: [[1], [4], [12, 4], [48, 12, 4]],
}


def test_geometric_inverse():
    one_minus_t = Series1.make([1, -1], 12)
    geo = Series1.make([1] * 13)
    assert one_minus_t * geo == Series1.one(12)
    assert one_minus_t.inverse() == geo


def test_square():
    assert Series1.make([1, 1], 4) ** 2 == Series1.make([1, 2, 1], 4)


def test_inverse_needs_unit():
    with pytest.raises(SeriesError):
        Series1.make([0, 1, 1]).inverse()


def test_negative_power_and_division():
    a = Series1.make([2, 3, 5], 6)
    assert a ** -2 * a ** 2 == Series1.one(6)
    assert (a / a) == Series1.one(6)
    assert a.inverse()[0] == Fraction(1, 2)


def test_truncation_alignment():
    a = Series1.make([1, 1], 3)
    b = Series1.make([1, 1], 6)
    assert (a * b).order == 3


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9])
def test_one_minus_qt(q):
    assert one_minus_qt_product(q, 30).coeffs == (1, -q) + (0,) * 29


def test_one_minus_qt_examples():
    assert one_minus_qt_product(2, 10).coeffs == (1, -2) + (0,) * 9
    assert one_minus_qt_product(3, 8).coeffs == (1, -3) + (0,) * 7
    assert one_minus_qt_product(2, 1).coeffs == (1, -2)


def test_one_minus_qt_detects_wrong_counts():
    nu = NuTable.build(2, 10)
    bad = NuTable(2, nu.nu[:1] + (nu[2] + 1,) + nu.nu[2:])  # nu_2 off by one
    assert one_minus_qt_product(2, 10, bad).coeffs != (1, -2) + (0,) * 9


@pytest.mark.parametrize("q", sorted(ENUMERATED))
def test_count_gf_matches_enumeration(q):
    rows = ENUMERATED[q]
    N = len(rows) - 1
    E = count_gf(q, N, N)
    for n, row in enumerate(rows):
        assert list(E.row(n)) == row + [0] * (N + 1 - len(row))


def test_count_examples():
    E = count_gf(2, 3, 3)
    assert E.row(3)[:3] == (4, 2, 2)
    assert count_gf(3, 4, 0)[4, 0] == 54
    E = count_gf(5, 6, 4)
    assert E.row(0) == (1, 0, 0, 0, 0)


def test_product_g_examples():
    G = product_G(2, 6, 4)
    assert G[0, 0] == 1
    assert G[3, 1] == -2
    assert product_G(3, 4, 2)[2, 0] == -3


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_one_minus_qt_times_E_is_G(q):
    E = count_gf(q, 16, 12)
    G = product_G(q, 16, 12)
    assert E * Series1.make([1, -q], 16) == G


@pytest.mark.parametrize("q", [2, 3, 5])
def test_row_sums_and_support(q):
    T = ExcessTable.build(q, 14, 13)
    assert T.row_sums_ok()
    for n in range(1, 15):
        assert all(T.e(n, k) == 0 for k in range(n, 14))
        assert all(T.e(n, k) >= 0 for k in range(14))


def test_excess_table_densities():
    T = ExcessTable.build(2, 3, 2)
    assert T.d(3, 0) == Fraction(1, 2)
    assert T.d(3, 2) == Fraction(1, 4)
    assert (T.N, T.K) == (3, 2)


def test_squarefree_examples():
    assert squarefree_gf(2, 6).coeffs == (1, 2, 2, 4, 8, 16, 32)
    assert squarefree_gf(5, 3)[3] == 100


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7])
def test_squarefree_three_ways(q):
    closed = tuple(squarefree_closed(q, n) for n in range(21))
    assert squarefree_gf(q, 20).coeffs == closed
    assert squarefree_euler(q, 20).coeffs == closed
    assert tuple(count_gf(q, 20, 0)[n, 0] for n in range(21)) == closed


def test_eval_t_at_one_over_q():
    q = 3
    E = count_gf(q, 5, 4)
    cols = E.eval_t(Fraction(1, q))
    assert cols[0] == sum(Fraction(E[n, 0], q ** n) for n in range(6))


def test_series2_arith():
    a = Series2.from_rows([[1, 1], [0, 2]])
    assert (a + a)[1, 1] == 4
    assert (a * a)[1, 1] == 4
    assert Series2.one(2, 2)[0, 0] == 1 and Series2.zeros(2, 2)[0, 0] == 0


def test_negative_orders_rejected():
    with pytest.raises(SeriesError):
        count_gf(2, -1, 0)
    with pytest.raises(SeriesError):
        one_minus_qt_product(2, 0)
