import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import ndtr

from randsum import stein

mp.mp.dps = 40


def fz_oracle(z, x):
    """Closed form in 40-digit arithmetic."""
    z, x = mp.mpf(z), mp.mpf(x)

    def Q(t):  # upper tail without cancellation
        return mp.erfc(t / mp.sqrt(2)) / 2

    if x <= z:
        return float(Q(z) * Q(-x) / mp.npdf(x))
    return float(Q(-z) * Q(x) / mp.npdf(x))


@given(st.floats(-4, 4), st.floats(-30, 30))
def test_fz_matches_high_precision(z, x):
    got = float(stein.fz_value(z, x))
    assert got == pytest.approx(fz_oracle(z, x), rel=1e-12, abs=1e-300)


def test_fz_known_values():
    assert float(stein.fz_value(0.0, 0.0)) == pytest.approx(math.sqrt(2 * math.pi) / 4, abs=1e-15)
    assert float(stein.fz_value(1.0, 0.0)) == pytest.approx(fz_oracle(1.0, 0.0), rel=1e-14)
    assert float(stein.fz_derivative(0.0, 0.0)) == pytest.approx(0.5, abs=1e-15)
    assert float(stein.fz_derivative(1.0, 0.0)) == pytest.approx(1 - ndtr(1.0), abs=1e-15)


def test_fz_tails_finite():
    x = np.array([-60.0, -38.0, 38.0, 60.0])
    for z in (-3.0, 0.0, 3.0):
        f, fp = stein.fz_value(z, x), stein.fz_derivative(z, x)
        assert np.all(np.isfinite(f)) and np.all(f > 0)
        assert np.all(np.isfinite(fp))


@given(st.floats(-3, 3), st.floats(-8, 8))
def test_fz_derivative_by_finite_difference(z, x):
    if abs(x - z) < 1e-3:
        return
    h = 1e-6
    fd = (fz_oracle(z, x + h) - fz_oracle(z, x - h)) / (2 * h)
    assert float(stein.fz_derivative(z, x)) == pytest.approx(fd, abs=1e-7)


def test_ode_residual_grid():
    xs = np.linspace(-8, 8, 10_000)
    for z in (-2.0, -1.0, 0.0, 1.0, 2.0):
        f, fp = stein.fz_value(z, xs), stein.fz_derivative(z, xs)
        off = xs != z
        res = fp - xs * f - ((xs <= z) - ndtr(z))
        assert np.max(np.abs(res[off])) <= 1e-9
        assert f.max() <= stein.F0_MAX + 1e-12
        assert np.max(np.abs(fp)) <= 1 + 1e-9


def fh_oracle(h, x):
    """f_h(x) = e^{x²/2} ∫_{-∞}^x (h(t) - E h(Z)) e^{-t²/2} dt in 40 digits."""
    eh = mp.quad(lambda t: h(t) * mp.npdf(t), [-mp.inf, 0, mp.inf])
    x = mp.mpf(x)
    val = mp.quad(lambda t: (h(t) - eh) * mp.exp((x - t) * (x + t) / 2), [-mp.inf, min(x, 0), x] if x > 0 else [-mp.inf, x])
    return float(val)


@pytest.mark.parametrize("x", [-3.0, -0.7, 0.0, 0.4, 2.5])
def test_fh_abs_matches_high_precision(x):
    sol = stein.SteinSolution(abs, (0.0,), math.sqrt(2 / math.pi))
    assert sol.value(x) == pytest.approx(fh_oracle(abs, x), abs=1e-9)


def test_fh_linear_h_is_constant():
    sol = stein.SteinSolution(lambda t: t, (), 0.0)
    for x in (-2.0, 0.0, 1.5):
        assert sol.value(x) == pytest.approx(-1.0, abs=1e-9)
        assert sol.derivative(x) == pytest.approx(0.0, abs=1e-9)


def test_fh_mean_computed_when_absent():
    sol = stein.SteinSolution(abs, (0.0,))
    assert sol.eh == pytest.approx(math.sqrt(2 / math.pi), abs=1e-11)


@given(st.floats(-5, 5))
def test_fh_abs_lipschitz_bounds(x):
    sol = stein.SteinSolution(abs, (0.0,), math.sqrt(2 / math.pi))
    assert abs(sol.value(x)) <= 2 + 1e-9
    assert abs(sol.derivative(x)) <= math.sqrt(2 / math.pi) + 1e-9


def test_taylor_remainders_random_triples():
    rng = np.random.default_rng(0)
    triples = np.column_stack([rng.normal(0, 2, 1000), rng.normal(0, 1, 1000), rng.normal(0, 1.5, 1000)])
    rep = stein.taylor_remainder_bounds_check(triples)
    assert rep.count == 1000
    assert rep.passed, rep


def test_taylor_check_detects_violation():
    # a solution scaled by 10 breaks |R| <= y²
    base = stein.SteinSolution(abs, (0.0,), math.sqrt(2 / math.pi))
    scaled = stein.SteinSolution(lambda t: 10 * abs(t), (0.0,), 10 * math.sqrt(2 / math.pi))
    rep = stein.taylor_remainder_bounds_check([[0.0, 1.0, 0.0], [0.5, -1.0, 0.0]], scaled)
    assert not rep.passed
    assert stein.taylor_remainder_bounds_check([[0.0, 1.0, 0.0]], base).passed
