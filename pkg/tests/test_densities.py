from fractions import Fraction

import pytest

from polyrenyi.enclosure import Enclosure
from polyrenyi.densities import (
    DensityReport,
    EpsilonNotAchieved,
    adjudicate,
    density_enclosures,
    dnk_table,
    exponent_fit,
    factor_coefficients,
    factor_value_at_one,
    fit_power_law,
    pole_order_asymptotic_A,
    pole_order_factor,
    pole_order_prefactor,
    reduced_order_asymptotic_A,
    reduced_order_factor,
    reduced_order_prefactor,
    richardson,
    telescoped_dnk,
    zeta_affine,
)
from polyrenyi.series import Series1

# Oracle values from an independent 40-digit floating-point evaluation
# (direct log/exp series per degree, degrees up to 70 or 140).
D_Q2 = [
    "0.5", "0.21596063085320806342", "0.12379223477690979877", "0.070847818995635123545",
    "0.040032519081271603907", "0.022343713537657746933", "0.01234031396192120193",
    "0.0067554424846414435084", "0.0036706124707643447381", "0.0019818119468205526183",
    "0.0010641735911769080325",
]
POLE_A = {
    2: "0.07504096772240158753653377",
    3: "0.00632239513020766645020102",
    4: "0.0002304465263186928275976469",
}


def F(s):
    return Fraction(s)


def test_factor_coefficients_direct_expansion():
    # (1 - r)(1 + r/(1 - r z)) expanded as a series in z with r = q^-i
    for q in (2, 3, 5):
        for i in (1, 2, 3):
            r = Fraction(1, q ** i)
            geo = Series1.make([r ** (j + 1) for j in range(9)])  # r/(1 - r z)
            direct = (geo + 1) * (1 - r)
            assert factor_coefficients(q, i, 8) == list(direct.coeffs)
            assert factor_coefficients(q, i, 0) == [1 - r * r]


@pytest.mark.parametrize("N", [2, 3, 4, 5, 8, 9, 1024, 7 ** 5])
def test_factor_at_one_is_exactly_one(N):
    assert factor_value_at_one(N) == 1


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9])
def test_d0_contains_squarefree_density(q):
    rep = density_enclosures(q, 0, Fraction(1, 10 ** 12))
    assert rep[0].contains(1 - Fraction(1, q))
    assert rep[0].width <= Fraction(1, 10 ** 12)


def test_dk_against_float_oracle():
    rep = density_enclosures(2, 10, Fraction(1, 10 ** 15))
    for k, s in enumerate(D_Q2):
        assert abs(rep[k].mid - F(s)) < Fraction(1, 10 ** 14)
        assert rep[k].width <= Fraction(1, 10 ** 15)


def test_q5_d0():
    assert density_enclosures(5, 3)[0].contains(Fraction(4, 5))


def test_d1_against_telescoped_value():
    rep = density_enclosures(2, 1)
    d40 = dnk_table(2, 40, 1)[40][1]
    # finite-degree densities converge geometrically; at n = 40 the gap is ~2^-20
    assert abs(d40 - rep[1].mid) <= rep[1].width + Fraction(1, 10 ** 5)


def test_consistency_with_finite_degrees():
    rep = density_enclosures(2, 8)
    table = dnk_table(2, 60, 8)
    for k in range(9):
        gaps = [abs(table[n][k] - rep[k].mid) for n in (20, 30, 40, 50, 60)]
        assert gaps[-1] < Fraction(1, 10 ** 9)
        for a, b in zip(gaps, gaps[1:]):
            assert b <= a + rep[k].width


def test_mass():
    rep = density_enclosures(2, 30, Fraction(1, 10 ** 12))
    m = rep.mass()
    assert m.hi <= 1 + sum(rep.widths())
    assert 1 - m.lo < Fraction(1, 10 ** 6)
    assert sum(e.hi for e in density_enclosures(2, 5).enclosures) <= 1


@pytest.mark.parametrize("q", [2, 3])
def test_nesting_under_refinement(q):
    a = density_enclosures(q, 10, Fraction(1, 10 ** 10))
    b = density_enclosures(q, 10, degree=2 * a.degree, prec=2 * a.prec)
    for x, y in zip(a.enclosures, b.enclosures):
        assert x.strictly_contains(y)


def test_report_fields():
    rep = density_enclosures(3, 4, Fraction(1, 10 ** 8))
    assert isinstance(rep, DensityReport)
    assert rep.K == 4 and len(rep.enclosures) == 5
    assert rep.tau > 0 and rep.degree >= 1
    assert rep.growth == 3


def test_per_k_widths():
    eps = [Fraction(1, 10 ** 6) / 2 ** k for k in range(6)]
    rep = density_enclosures(2, 5, eps)
    assert all(w <= e for w, e in zip(rep.widths(), eps))


def test_eps_not_achieved():
    with pytest.raises(EpsilonNotAchieved) as info:
        density_enclosures(2, 3, Fraction(1, 10 ** 30), max_degree=8)
    assert len(info.value.widths) == 4 and max(info.value.widths) > Fraction(1, 10 ** 30)


def test_bad_arguments():
    with pytest.raises(ValueError):
        density_enclosures(6, 2)
    with pytest.raises(ValueError):
        density_enclosures(2, 2, 2)
    with pytest.raises(ValueError):
        density_enclosures(2, -1)


def test_dnk_examples():
    t = dnk_table(2, 3, 2)
    assert t[3][0] == Fraction(1, 2)
    assert t[3][2] == Fraction(1, 4)
    assert t[0] == [1, 0, 0]


@pytest.mark.parametrize("q", [2, 3, 4])
def test_squarefree_density_is_constant_from_degree_two(q):
    t = dnk_table(q, 12, 0)
    assert all(t[n][0] == 1 - Fraction(1, q) for n in range(2, 13))


@pytest.mark.parametrize("q,N", [(2, 12), (3, 8), (5, 6)])
def test_telescoping(q, N):
    table = dnk_table(q, N, N)
    assert telescoped_dnk(q, N, N) == table[N]
    # partial sums of consecutive differences reproduce d_{N,k}
    for k in range(N + 1):
        s = table[0][k] + sum(table[m][k] - table[m - 1][k] for m in range(1, N + 1))
        assert s == table[N][k]


def test_zeta_affine():
    assert zeta_affine(2, 2) == 2
    assert zeta_affine(3, 2) == Fraction(3, 2)
    for q in (2, 3, 4, 5, 7):
        assert 1 / zeta_affine(q, 2) == 1 - Fraction(1, q)
        # partial sums of q^n q^{-sn} approach the value from below
        partial = sum(Fraction(q ** n, q ** (3 * n)) for n in range(40))
        assert 0 < zeta_affine(q, 3) - partial < Fraction(1, q ** 70)
    with pytest.raises(ValueError):
        zeta_affine(2, 1)


def test_constant_factors():
    assert reduced_order_prefactor(2) == Fraction(1, 4)
    assert reduced_order_factor(2, 2) == Fraction(3, 8)
    assert reduced_order_prefactor(3) == Fraction(2, 9) ** 2
    assert pole_order_prefactor(2) == Fraction(1, 16)
    assert pole_order_factor(2, 2) == Fraction(9, 8)


@pytest.mark.parametrize("q", sorted(POLE_A))
def test_pole_order_constant(q):
    A = pole_order_asymptotic_A(q, Fraction(1, 10 ** 12))
    assert A.width <= Fraction(1, 10 ** 12)
    assert abs(A.mid - F(POLE_A[q])) < Fraction(1, 10 ** 20) + A.width


def test_pole_order_constant_nesting():
    a = pole_order_asymptotic_A(2, Fraction(1, 10 ** 10))
    b = pole_order_asymptotic_A(2, Fraction(1, 10 ** 20))
    assert a.contains(b)


@pytest.mark.parametrize("q", [2, 3, 5])
def test_reduced_order_constant_diverges_to_zero(q):
    A = reduced_order_asymptotic_A(q, Fraction(1, 10 ** 12))
    assert A.lo == 0 and 0 < A.hi <= Fraction(1, 10 ** 12)


def test_richardson_polynomial_in_inverse_k():
    seq = {k: Enclosure.point(3 + Fraction(2, k) - Fraction(5, k * k)) for k in range(10, 30)}
    est, R = richardson(seq)
    assert est.contains(3) and est.width < Fraction(1, 10 ** 20)


def test_fit_synthetic_square():
    u = {k: Enclosure.around(7 * k * k) for k in range(10, 41)}
    fit = fit_power_law(u)
    assert fit.ok and fit.beta_integer == 2
    assert fit.beta.contains(2) and fit.A.contains(7)
    assert fit.beta.width < Fraction(1, 10 ** 6)


def test_fit_synthetic_constant():
    u = {k: Enclosure.point(5) for k in range(20, 41)}
    fit = fit_power_law(u)
    assert fit.beta_integer == 0 and fit.A.contains(5)


def test_fit_with_lower_order_term():
    u = {k: Enclosure.around(k * k + Fraction(k, 2)) for k in range(20, 41)}
    fit = fit_power_law(u)
    assert fit.beta_integer == 2 and fit.A.contains(1)


def test_fit_half_integer_exponent_gives_no_constant():
    u = {k: Enclosure.point(k).log(192).mul(Fraction(3, 2), 192).exp(192) for k in range(20, 41)}
    fit = fit_power_law(u)
    assert fit.beta.contains(Fraction(3, 2))
    assert fit.beta_integer is None and fit.A is None


def test_fit_indeterminate_when_wide():
    u = {k: Enclosure(Fraction(1, 2), Fraction(2)) for k in range(10, 20)}
    fit = fit_power_law(u)
    assert fit.status == "indeterminate" and fit.beta is None and fit.A is None
    u = {k: Enclosure(Fraction(-1), Fraction(1)) for k in range(10, 20)}
    assert fit_power_law(u).status == "indeterminate"
    assert fit_power_law({1: Enclosure.point(1)}).status == "indeterminate"


def test_adjudication_q2():
    K = 40
    eps = [Fraction(1, 2 ** k) / 10 ** 8 for k in range(K + 1)]
    rep = density_enclosures(2, K, eps)
    fit = exponent_fit(rep)
    v = adjudicate(2, fit, reduced_order_asymptotic_A(2), pole_order_asymptotic_A(2))
    assert fit.beta.width <= Fraction(1, 10)
    assert v.exponent_exclusive
    assert v.form == "pole-order" and v.A_matches
    assert "pole-order constant" in v.line()


def test_adjudication_indeterminate_verdict():
    u = {k: Enclosure(Fraction(1, 2), Fraction(2)) for k in range(10, 20)}
    fit = fit_power_law(u)
    v = adjudicate(2, fit, Enclosure(0, 1), Enclosure(0, 1))
    assert v.form == "indeterminate" and v.line().startswith("indeterminate")
