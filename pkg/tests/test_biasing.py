import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from randsum import biasing as b
from randsum import metrics
from randsum import models as m
from randsum.errors import IncompatibleKind, InvalidCoupling, NotCentered, ZeroMean, ZeroVariance

ALL_MODELS = [
    m.Poisson(2.0),
    m.Binomial(20, 0.3),
    m.Hypergeometric(5, 10, 10),
    m.NegativeBinomial(5, 0.4),
    m.Dirac(6),
    m.Convolution(m.Binomial(10, 0.5), 3),
    m.FiniteIndex(m.DiscretePmf([0, 1, 3, 4], [0.1, 0.4, 0.3, 0.2])),
]


def size_bias_oracle(pmf):
    alpha = sum(k * p for k, p in zip(pmf.support, pmf.probs))
    return {float(k): k * p / alpha for k, p in zip(pmf.support, pmf.probs) if k * p > 0}


def brute_cond_var(joint):
    """Var(E[D | N]) from explicit group sums."""
    groups = {}
    for n, ns, p in zip(joint.n, joint.ns, joint.prob):
        w, s = groups.get(n, (0.0, 0.0))
        groups[n] = (w + p, s + p * (ns - n))
    mean = sum(s for _, s in groups.values())
    return sum(w * (s / w - mean) ** 2 for w, s in groups.values() if w > 0)


@given(st.lists(st.floats(0.01, 1.0), min_size=1, max_size=8), st.integers(0, 4))
def test_size_bias_pmf_definition(weights, offset):
    probs = np.array(weights) / sum(weights)
    pmf = m.DiscretePmf(np.arange(len(probs)) + offset, probs)
    if pmf.mean <= 0:
        return
    got = b.size_bias_pmf(pmf).as_dict()
    want = size_bias_oracle(pmf)
    assert set(got) == set(want)
    for k in want:
        assert got[k] == pytest.approx(want[k], abs=1e-14)


@pytest.mark.parametrize("model", [mod for mod in ALL_MODELS if not isinstance(mod, m.Dirac)])
def test_distance_identities(model):
    pmf = m.materialize_pmf(model)
    biased = b.size_bias_pmf(pmf)
    alpha = model.moments.alpha
    mad = pmf.expect(lambda k: np.abs(k - alpha))
    d_k, d_tv, d_w = b.size_bias_distance_identities(model)
    assert d_k == pytest.approx(mad / (2 * alpha), abs=1e-12)
    assert d_tv == pytest.approx(d_k, abs=1e-12)
    assert d_w == pytest.approx(model.moments.gamma2 / alpha, abs=1e-10)
    assert metrics.exact_kolmogorov(pmf, biased) == pytest.approx(d_k, abs=1e-10)
    assert metrics.exact_total_variation(pmf, biased) == pytest.approx(d_tv, abs=1e-10)
    assert metrics.exact_wasserstein(pmf, biased) == pytest.approx(d_w, abs=1e-10)


@pytest.mark.parametrize("model", ALL_MODELS)
def test_default_coupling_marginals(model):
    joint = b.make_coupling(model).joint_pmf()
    pmf = model.pmf()
    tol = 1e-9 + pmf.tail_defect
    first, second = joint.marginal("n").as_dict(), joint.marginal("ns").as_dict()
    for k, p in pmf.as_dict().items():
        assert first.get(k, 0.0) == pytest.approx(p, abs=tol)
    if isinstance(model, m.Dirac):
        return
    for k, p in size_bias_oracle(pmf).items():
        assert second.get(k, 0.0) == pytest.approx(p, abs=10 * tol)


@pytest.mark.parametrize("model", ALL_MODELS)
def test_expected_increment_is_variance_over_mean(model):
    stats_ = b.index_statistics(model)
    mom = model.moments
    assert stats_.e_d == pytest.approx(mom.gamma2 / mom.alpha, rel=1e-9, abs=1e-12)


@given(st.integers(1, 60), st.floats(0.05, 0.95))
def test_drop_one_conditional_variance(n, p):
    # E[D | N] = 1 - N/n, so Var(E[D | N]) = p(1 - p)/n
    st_ = b.index_statistics(m.Binomial(n, p))
    assert st_.var_cond == pytest.approx(p * (1 - p) / n, rel=1e-9, abs=1e-14)
    assert st_.e_d2 == pytest.approx(1 - p, rel=1e-12)


@pytest.mark.parametrize("n, r, s", [(2, 2, 2), (5, 10, 10), (3, 4, 9), (20, 100, 300)])
def test_marked_ball_conditional_variance(n, r, s):
    model = m.Hypergeometric(n, r, s)
    exact = model.exact_pmf()
    cond = {k: (1 - Fraction(k, n)) * (1 - Fraction(k, r)) for k in exact}
    mean = sum(p * cond[k] for k, p in exact.items())
    var = sum(p * (cond[k] - mean) ** 2 for k, p in exact.items())
    st_ = b.index_statistics(model)
    assert st_.var_cond == pytest.approx(float(var), rel=1e-10, abs=1e-15)
    assert st_.var_cond == pytest.approx(brute_cond_var(b.make_coupling(model).joint_pmf()), rel=1e-10, abs=1e-15)


def test_hypergeometric_small_values():
    assert b.index_statistics(m.Hypergeometric(2, 2, 2)).var_cond == pytest.approx(7 / 72, rel=1e-12)
    assert b.index_statistics(m.Hypergeometric(5, 10, 10)).e_d == pytest.approx(15 / 38, rel=1e-12)


def test_poisson_shift_statistics():
    st_ = b.index_statistics(m.Poisson(1.0))
    assert (st_.e_d, st_.e_d2, st_.var_cond, st_.p_dneg) == pytest.approx((1.0, 1.0, 0.0, 0.0), abs=1e-11)
    assert st_.p_n0 == pytest.approx(math.exp(-1), rel=1e-12)


def test_conv_single_negative_increment_probability():
    base = stats.binom(10, 0.5)
    biased = {k: k * base.pmf(k) / 5 for k in range(11)}
    oracle = sum(base.pmf(i) * biased[j] for i in range(11) for j in range(11) if j < i)
    st_ = b.index_statistics(m.Convolution(m.Binomial(10, 0.5), 3))
    assert st_.p_dneg == pytest.approx(oracle, abs=1e-12)
    assert st_.e_d2_neg > 0
    assert not b.make_coupling(m.Convolution(m.Binomial(10, 0.5), 3)).nonnegative_increment


def test_negative_binomial_infdiv_increment_law():
    model = m.NegativeBinomial(3, 0.4)
    joint = b.make_coupling(model).joint_pmf()
    d = joint.ns - joint.n
    assert d.min() == 1
    # D - 1 is geometric (failures) with success probability q, independent of N
    p1 = math.fsum(joint.prob[d == 1])
    p3 = math.fsum(joint.prob[d == 3])
    assert p1 == pytest.approx(0.4, abs=1e-10)
    assert p3 == pytest.approx(0.4 * 0.6**2, abs=1e-10)


def test_quantile_joint_is_monotone():
    pmf = m.Poisson(3.0).pmf()
    joint = b.quantile_joint(pmf, b.size_bias_pmf(pmf))
    assert np.all(joint.ns >= joint.n)
    assert math.fsum(joint.prob) == pytest.approx(1.0, abs=1e-12)


def test_user_coupling_round_trip(tmp_path):
    model = m.Binomial(4, 0.5)
    pmf = model.pmf()
    joint = b.quantile_joint(pmf, b.size_bias_pmf(pmf))
    path = tmp_path / "joint.csv"
    path.write_text("n,ns,prob\n" + "".join(f"{int(n)},{int(ns)},{float(p)!r}\n" for n, ns, p in zip(joint.n, joint.ns, joint.prob)))
    cp = b.coupling_from_csv(model, path)
    assert b.coupling_statistics(cp).e_d == pytest.approx(0.5, abs=1e-12)

    path.write_text("n,ns,prob\n0,1,0.5\n4,4,0.5\n")
    with pytest.raises(InvalidCoupling):
        b.coupling_from_csv(model, path)


def test_incompatible_kinds():
    with pytest.raises(IncompatibleKind):
        b.make_coupling(m.Poisson(2.0), "drop-one")
    with pytest.raises(IncompatibleKind):
        b.make_coupling(m.Binomial(5, 0.5), "marked-ball")
    with pytest.raises(ZeroMean):
        b.make_coupling(m.Dirac(0))


@pytest.mark.parametrize(
    "model, kind",
    [(m.Poisson(4.0), None), (m.Binomial(30, 0.2), None), (m.Hypergeometric(8, 12, 20), None),
     (m.NegativeBinomial(4, 0.5), None), (m.Convolution(m.Poisson(1.5), 3), None), (m.Poisson(4.0), "quantile")],
)
def test_mc_statistics_agree_with_exact(model, kind):
    cp = b.make_coupling(model, kind)
    exact = b.coupling_statistics(cp)
    mc = b.coupling_statistics(cp, "mc", reps=200_000, seed=5)
    for name in ("e_d", "e_d2", "p_dneg", "e_ninvhalf"):
        se = mc.provenance.std_errors[name]
        assert abs(getattr(mc, name) - getattr(exact, name)) <= 5 * se + 1e-9, name


def test_mc_statistics_reproducible():
    cp = b.make_coupling(m.Hypergeometric(8, 12, 20))
    first = b.coupling_statistics(cp, "mc", reps=20_000, seed=9)
    second = b.coupling_statistics(cp, "mc", reps=20_000, seed=9)
    assert first.values() == second.values()


def test_zero_bias_three_point():
    dens = b.zero_bias_density(m.DiscretePmf([-1.0, 0.0, 2.0], [0.5, 0.25, 0.25]))
    np.testing.assert_allclose(dens.values, [1 / 3, 1 / 3], atol=1e-15)


def test_zero_bias_bernoulli_square():
    pmf = m.DiscretePmf([-0.3, 0.7], [0.7, 0.3])
    dens = b.zero_bias_density(pmf)
    lhs = pmf.expect(lambda x: x**3)
    rhs = 0.21 * dens.expect_derivative(lambda x: x**2)
    assert lhs == pytest.approx(0.084, abs=1e-12)
    assert rhs == pytest.approx(0.084, abs=1e-12)


@st.composite
def centered_pmfs(draw):
    k = draw(st.integers(2, 6))
    support = sorted(set(draw(st.lists(st.integers(-10, 10), min_size=k, max_size=k))))
    if len(support) < 2:
        support = [-1, 1]
    w = np.array(draw(st.lists(st.floats(0.05, 1.0), min_size=len(support), max_size=len(support))))
    w /= w.sum()
    x = np.array(support, dtype=float)
    return m.DiscretePmf(x - float(np.dot(w, x)), w)


@given(centered_pmfs())
def test_zero_bias_identity_random_laws(pmf):
    dens = b.zero_bias_density(pmf)
    var = pmf.expect(lambda x: x * x)
    for f in (lambda x: x**2, lambda x: x**3, np.sin):
        lhs = pmf.expect(lambda x: x * f(x))
        assert lhs == pytest.approx(var * dens.expect_derivative(f), abs=1e-9 * max(1.0, var * 100))


def test_zero_bias_rejects_bad_input():
    with pytest.raises(NotCentered):
        b.zero_bias_density(m.DiscretePmf([0.0, 1.0], [0.5, 0.5]))
    with pytest.raises(ZeroVariance):
        b.non_zero_bias_sample(m.Constant(1.0), np.random.default_rng(0), 5)


def test_step_density_cdf_ppf_inverse():
    dens = b.zero_bias_density(m.DiscretePmf([-1.0, 0.0, 2.0], [0.5, 0.25, 0.25]))
    u = np.linspace(0.01, 0.99, 50)
    np.testing.assert_allclose(dens.cdf(dens.ppf(u)), u, atol=1e-13)


@pytest.mark.parametrize("model", [m.Exponential(1.0), m.Exponential(2.5), m.Uniform(-1.0, 3.0)])
def test_continuous_non_zero_bias_identity(model):
    # E[(X - a) f(X - a)] = c² E[f'(Y - a)] with f(x) = x², checked against the closed-form third central moment
    rng = np.random.default_rng(11)
    y = b.non_zero_bias_sample(model, rng, 400_000) - model.moments.a
    mom = model.moments
    third = {m.Exponential: 2 / model.rate**3 if isinstance(model, m.Exponential) else 0.0, m.Uniform: 0.0}[type(model)]
    rhs = mom.c2 * 2 * y
    assert abs(rhs.mean() - third) <= 5 * rhs.std() / math.sqrt(y.size)


def test_sum_non_zero_bias_mean():
    rng = np.random.default_rng(2)
    draws = b.sum_non_zero_bias(m.Exponential(1.0), 10, rng, 200_000)
    # S_9 + Y with E[Y] = 2
    assert abs(draws.mean() - 11.0) <= 5 * draws.std() / math.sqrt(draws.size)
