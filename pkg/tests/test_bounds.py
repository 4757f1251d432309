import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from randsum import biasing
from randsum import bounds as bd
from randsum import models as m
from randsum.errors import DegenerateSum, InvalidParameter, NegativeDPresent, NoSpecialization, NonzeroMean

EXP_D3 = 12 / math.e - 2
TWO_POINT = m.TwoPoint(-1.0, 1.0, 0.5)


def eps_oracle(n, r, s):
    pmf = m.Hypergeometric(n, r, s).exact_pmf()
    g = {k: (1 - Fraction(k, r)) * (1 - Fraction(k, n)) for k in pmf}
    mean = sum(p * g[k] for k, p in pmf.items())
    return sum(p * (g[k] - mean) ** 2 for k, p in pmf.items())


@pytest.mark.parametrize("n, r, s", [(2, 2, 2), (1, 3, 5), (4, 7, 4), (10, 12, 18), (20, 100, 300)])
def test_hyper_eps_matches_brute_force(n, r, s):
    assert bd.hyper_eps(n, r, s) == eps_oracle(n, r, s)


def test_hyper_eps_spot_value():
    assert bd.hyper_eps(2, 2, 2) == Fraction(7, 72)


@given(st.integers(1, 15), st.integers(1, 15), st.integers(1, 15))
def test_hyper_eps_property(n, r, s):
    if n > min(r, s) or r + s < 4:
        with pytest.raises(InvalidParameter):
            bd.hyper_eps(n, r, s)
        return
    assert bd.hyper_eps(n, r, s) == eps_oracle(n, r, s)


def test_thm3a_poisson_exponential_by_hand():
    lam = 100.0
    sigma = math.sqrt(2 * lam)
    # a = 1, b² = 2, c = 1; D = 1 so only E[D²] = 1 survives among the coupling terms
    expected = (2 * math.sqrt(2) * lam + 3 * lam * EXP_D3 + lam * 2) / sigma**3
    rep = bd.bound_wasserstein_thm3a(m.Poisson(lam), m.Exponential(1.0))
    assert rep.total == pytest.approx(expected, rel=1e-14)


def test_thm3a_terms_sum_to_total():
    rep = bd.bound_wasserstein_thm3a(m.Binomial(50, 0.2), m.Exponential(2.0))
    assert rep.total == math.fsum(v for _, v in rep.terms)
    assert len(rep.terms) == 5


@pytest.mark.parametrize("lam", [25.0, 100.0, 400.0])
@pytest.mark.parametrize("summand", [TWO_POINT, m.Exponential(1.0), m.Bernoulli(0.3)])
def test_poisson_specialization_equals_general_wasserstein(lam, summand):
    cor = bd.bound_specialized(m.Poisson(lam), summand, theorem="cor6")["wasserstein"]
    thm = bd.bound_wasserstein_thm3a(m.Poisson(lam), summand)
    assert cor.total == pytest.approx(thm.total, rel=1e-12)


@pytest.mark.parametrize("n", [10, 100, 10_000])
@pytest.mark.parametrize("summand", [TWO_POINT, m.Exponential(1.0), m.Bernoulli(0.3)])
def test_constant_index_specialization_equals_general(n, summand):
    cor = bd.bound_specialized(m.Dirac(n), summand, theorem="cor4")["wasserstein"]
    thm = bd.bound_wasserstein_thm3a(m.Dirac(n), summand)
    assert cor.total == pytest.approx(thm.total, rel=1e-12)


def test_constant_index_two_point_value():
    rep = bd.bound_specialized(m.Dirac(100), TWO_POINT, theorem="cor4")["wasserstein"]
    assert rep.total == pytest.approx(0.3, abs=1e-15)


def test_infdiv_second_moment_of_increment():
    assert bd.bound_specialized(m.Poisson(2.0), m.Exponential(1.0), theorem="cor3")["wasserstein"].extras["e_d2"] == pytest.approx(
        1.0, abs=1e-12
    )
    q = 0.4
    g1, g2 = (1 - q) / q, (1 - q) / q**2 + ((1 - q) / q) ** 2
    exact = biasing.index_statistics(m.NegativeBinomial(5, q)).e_d2
    cor = bd.bound_specialized(m.NegativeBinomial(5, q), m.Exponential(1.0))["wasserstein"]
    assert cor.extras["e_d2"] == pytest.approx(1 + 2 * g1 + g2, rel=1e-12)
    assert exact == pytest.approx(1 + 2 * g1 + g2, rel=1e-9)


def test_thm3b_matches_constant_index_kolmogorov():
    thm = bd.bound_kolmogorov_thm3b(m.Dirac(100), m.Exponential(1.0))
    cor = bd.bound_specialized(m.Dirac(100), m.Exponential(1.0), theorem="cor4")["kolmogorov"]
    assert thm.total == pytest.approx(cor.total, rel=1e-12)
    assert thm.total == pytest.approx(2.367201091760805, rel=1e-12)


@pytest.mark.parametrize(
    "index, summand, cor",
    [
        (m.Binomial(100, 0.3), m.Bernoulli(0.3), "cor7"),
        (m.Binomial(400, 0.1), m.Exponential(1.0), "cor7"),
        (m.Hypergeometric(20, 100, 300), TWO_POINT, "cor8"),
        (m.Hypergeometric(20, 100, 300), m.Exponential(1.0), "cor8"),
    ],
)
def test_specialized_totals_not_below_theorem(index, summand, cor):
    spec = bd.bound_specialized(index, summand, theorem=cor)
    assert spec["wasserstein"].total >= bd.bound_wasserstein_thm3a(index, summand).total * (1 - 1e-12)
    assert spec["kolmogorov"].total >= bd.bound_kolmogorov_thm3b(index, summand).total * (1 - 1e-12)


def test_meanzero_values():
    wass, kol = bd.bound_meanzero_thm5(m.Poisson(100.0), TWO_POINT)
    assert wass.total == pytest.approx(0.5, rel=1e-14)
    assert kol.total == pytest.approx(0.6168, abs=1e-4)
    with pytest.raises(NonzeroMean):
        bd.bound_meanzero_thm5(m.Poisson(100.0), m.Exponential(1.0))


def test_corrected_flag_changes_only_flagged_terms():
    plain = bd.bound_meanzero_thm5(m.Poisson(100.0), TWO_POINT)[1]
    fixed = bd.bound_meanzero_thm5(m.Poisson(100.0), TWO_POINT, bd.BoundConstants(corrected=True))[1]
    changed = [a for (a, x), (_, y) in zip(plain.terms, fixed.terms) if x != y]
    assert changed == ["(7/2·√2+2)d³/(c³α)"]


def test_exact_two_ck():
    one = bd.bound_kolmogorov_thm3b(m.Poisson(50.0), m.Exponential(1.0))
    exact = bd.bound_kolmogorov_thm3b(m.Poisson(50.0), m.Exponential(1.0), constants=bd.BoundConstants(use_2ck_as_one=False))
    assert exact.total < one.total
    assert exact.constants["use_2ck_as_one"] is False


def test_negative_increment_routing():
    conv = m.Convolution(m.Binomial(10, 0.5), 3)
    with pytest.raises(NegativeDPresent):
        bd.bound_kolmogorov_thm3b(conv, m.Exponential(1.0))
    rep = bd.bound_kolmogorov_general(conv, m.Exponential(1.0))
    assert [label for label, _ in rep.terms] == [f"B{i}" for i in range(1, 8)]
    assert rep.total > 0


def test_general_bound_not_below_thm3b_for_nonnegative_increment():
    for index in (m.Poisson(100.0), m.Binomial(100, 0.3)):
        assert bd.bound_kolmogorov_general(index, m.Exponential(1.0)).total >= bd.bound_kolmogorov_thm3b(index, m.Exponential(1.0)).total


def test_degenerate_summand():
    with pytest.raises(DegenerateSum):
        bd.bound_kolmogorov_thm3b(m.Poisson(10.0), m.Constant(1.0))
    # the Wasserstein bound stays defined for constant summands when the index varies
    assert bd.bound_wasserstein_thm3a(m.Poisson(10.0), m.Constant(1.0)).total > 0


def test_specialization_dispatch():
    assert bd.specialization_for(m.Poisson(2.0)) == "cor6"
    assert bd.specialization_for(m.Hypergeometric(3, 4, 5)) == "cor8"
    with pytest.raises(NoSpecialization):
        bd.specialization_for(m.FiniteIndex(m.DiscretePmf([1, 2], [0.5, 0.5])))
    with pytest.raises(NoSpecialization):
        bd.bound_specialized(m.Binomial(10, 0.5), TWO_POINT, theorem="cor6")


def test_hypergeometric_k_form_extras():
    rep = bd.bound_specialized(m.Hypergeometric(20, 100, 300), m.Exponential(1.0), k_const=2.0)["wasserstein"]
    assert rep.extras["K"] == 2.0
    assert rep.extras["sqrt_eps"] == pytest.approx(math.sqrt(float(bd.hyper_eps(20, 100, 300))))
    num, den = rep.extras["eps"]
    assert Fraction(num, den) == bd.hyper_eps(20, 100, 300)


def test_evaluate_metric_filter():
    assert [r.metric for r in bd.evaluate("cor6", m.Poisson(9.0), TWO_POINT, "kolmogorov")] == ["kolmogorov"]
    assert len(bd.evaluate("thm5", m.Poisson(9.0), TWO_POINT)) == 2
    with pytest.raises(InvalidParameter):
        bd.evaluate("thm3b", m.Poisson(9.0), TWO_POINT, "wasserstein")
    with pytest.raises(InvalidParameter):
        bd.evaluate("thm9", m.Poisson(9.0), TWO_POINT)


@given(st.floats(1.0, 1e4), st.floats(0.05, 0.95))
def test_poisson_bounds_nonnegative_and_decreasing(lam, p):
    summand = m.Bernoulli(p)
    small = bd.bound_specialized(m.Poisson(lam), summand)
    large = bd.bound_specialized(m.Poisson(4 * lam), summand)
    for metric in ("wasserstein", "kolmogorov"):
        assert all(v >= 0 for _, v in small[metric].terms)
        assert large[metric].total < small[metric].total


@given(st.integers(5, 400), st.floats(0.05, 0.95))
def test_binomial_theorem_bounds_scale(n, p):
    rep = bd.bound_wasserstein_thm3a(m.Binomial(n, p), m.Exponential(1.0))
    assert rep.total == math.fsum(v for _, v in rep.terms)
    # every term carries an n^(-1/2) rate, so √n · total stays bounded
    assert math.sqrt(n * p) * rep.total < 50


def test_report_json_round_trip():
    rep = bd.bound_kolmogorov_thm3b(m.Binomial(30, 0.4), m.Exponential(1.0))
    data = rep.to_json()
    assert data["total"] == rep.total
    assert {t["label"] for t in data["terms"]} == {label for label, _ in rep.terms}
    assert set(data["inputs"]["statistics"]) == set(biasing.STAT_FIELDS)
    assert np.isclose(sum(t["value"] for t in data["terms"]), data["total"])


# A valid coupling of N ~ Uniform{2, 3, 4} with its size-biased law, D in {-1, 0, 1}, P(D < 0) = 1/5.
USER_JOINT = [(2, 2, Fraction(1, 45)), (2, 3, Fraction(14, 45)), (3, 2, Fraction(9, 45)),
              (3, 3, Fraction(1, 45)), (3, 4, Fraction(5, 45)), (4, 4, Fraction(15, 45))]


def _user_coupling():
    index = m.FiniteIndex(m.DiscretePmf([2, 3, 4], [1 / 3] * 3))
    n, ns, p = zip(*USER_JOINT)
    joint = biasing.JointPmf(n, ns, [float(x) for x in p])
    return index, biasing.make_coupling(index, "user", joint=joint)


def test_user_coupling_statistics_by_hand():
    _, cp = _user_coupling()
    st_ = biasing.coupling_statistics(cp)
    r2, r3 = 1 / math.sqrt(2), 1 / math.sqrt(3)
    expected = {
        "e_d": 2 / 9,
        "e_d2": 28 / 45,
        "e_d2_neg": 9 / 45,
        "var_cond": ((14 / 15) ** 2 + (4 / 15) ** 2) / 3 - (2 / 9) ** 2,
        "e_cond_d2_sq": ((14 / 15) ** 2 + (5 / 15) ** 2) / 3,
        "e_cond_d2_neg_sq": 10 / 45 * 0.81,
        "p_n0": 0.0,
        "p_dneg": 0.2,
        "e_d_pos_ninvhalf": 14 / 45 * r2 + 5 / 45 * r3,
        "e_d2_pos_ninvhalf": 14 / 45 * r2 + 5 / 45 * r3,
        "e_pos_ninvhalf": 15 / 45 * r2 + 6 / 45 * r3 + 15 / 45 / 2,
        "e_ninvhalf": (r2 + r3 + 0.5) / 3,
        "e_d2_neg_nsinvhalf": 9 / 45 * r2,
        "e_ninv": (1 / 2 + 1 / 3 + 1 / 4) / 3,
    }
    for name, value in expected.items():
        assert getattr(st_, name) == pytest.approx(value, abs=1e-14), name


def test_general_bound_terms_against_transcription():
    index, cp = _user_coupling()
    summand = m.Exponential(1.0)
    rep = bd.bound_kolmogorov_general(index, summand, biasing.coupling_statistics(cp))

    a, b, c, d3 = 1.0, math.sqrt(2.0), 1.0, EXP_D3
    al, be2, de3, ga2 = 3.0, 29 / 3, 33.0, 2 / 3
    sig = math.sqrt(al * c * c + a * a * ga2)
    ck, two_ck, r2pi = 0.5, 1.0, math.sqrt(2 * math.pi)
    e_d2, e_neg, e_pos = 28 / 45, 9 / 45, 19 / 45
    var_cond = ((14 / 15) ** 2 + (4 / 15) ** 2) / 3 - (2 / 9) ** 2
    cond_pos_sq = ((14 / 15) ** 2 + (5 / 15) ** 2) / 3
    cond_neg_sq = 10 / 45 * 0.81
    p0, pneg = 0.0, 0.2
    r2, r3 = 1 / math.sqrt(2), 1 / math.sqrt(3)
    d_pos_nh = 14 / 45 * r2 + 5 / 45 * r3
    pos_nh = 15 / 45 * r2 + 6 / 45 * r3 + 15 / 45 / 2
    neg_nsh = 9 / 45 * r2
    wns = c * c * be2 + a * a * (de3 - 2 * al * be2 + al**3)

    b1 = (r2pi + 4) * b * c**2 * al / (4 * sig**3) * math.sqrt(e_d2) + d3 * al * (3 * r2pi + 4) / (8 * sig**3) + c**3 * al / sig**3
    b2 = ((3.5 * math.sqrt(2) + 2) * math.sqrt(al) * d3 / (c * sig**2) + c**2 * al / sig**2 * p0
          + al * b * c / (sig**2 * r2pi) * d_pos_nh + two_ck * d3 * al / (c * sig**2) * pos_nh
          + c * b * math.sqrt(al) / (sig**2 * r2pi) * math.sqrt(e_neg) + al * ck * d3 / (c * sig**2) * math.sqrt(pneg))
    b3 = al * a**2 / sig**2 * math.sqrt(var_cond)
    b4 = al * a**2 * b / (sig**2 * c * r2pi) * neg_nsh + two_ck * d3 * a**2 * math.sqrt(al) / (c**3 * sig**2) * math.sqrt(e_neg)
    b5 = al * a**2 * b * r2pi / (4 * sig**3) * e_neg + a**2 * b * wns / sig**5 * math.sqrt(cond_neg_sq)
    b6 = (al * a * b**2 / (2 * sig**3) * math.sqrt(cond_pos_sq) + al * a * b**2 * r2pi / (8 * sig**3) * e_pos
          + al * a * b / sig**2 * math.sqrt(p0) * math.sqrt(e_pos) + al * a * b**2 / (c * sig**2 * r2pi) * d_pos_nh
          + two_ck * d3 * al * a * b / sig**2 * d_pos_nh)
    b7 = (al * a * b**2 * r2pi / (8 * sig**3) * e_neg
          + al * a * b**2 / (2 * sig**3) * math.sqrt(cond_neg_sq) * math.sqrt(wns / (al * sig**2))
          + al * a * b**2 / (sig**2 * c * r2pi) * neg_nsh + math.sqrt(al) * a * two_ck * b * d3 / sig**2 * math.sqrt(e_neg))

    for label, value in zip([f"B{i}" for i in range(1, 8)], (b1, b2, b3, b4, b5, b6, b7)):
        assert rep.term(label) == pytest.approx(value, rel=1e-12, abs=1e-15), label


@pytest.mark.parametrize("index", [m.Poisson(40.0), m.Binomial(60, 0.3), m.Hypergeometric(20, 100, 300)])
def test_general_bound_reduces_without_negative_increments(index):
    summand = m.Exponential(1.0)
    gen = bd.bound_kolmogorov_general(index, summand)
    assert gen.term("B4") == gen.term("B5") == gen.term("B7") == 0.0
    assert gen.total == pytest.approx(bd.bound_kolmogorov_thm3b(index, summand).total, rel=1e-12)
