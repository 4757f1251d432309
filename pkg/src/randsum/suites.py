"""Property grids behind ``randsum verify``; each check returns a ``Check``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from . import biasing, metrics, stein
from . import models as m


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""


def stein_suite(seed: int = 0) -> list[Check]:
    xs = np.linspace(-8.0, 8.0, 10_000)
    out = []
    worst_res, worst_sup, worst_slope = 0.0, -math.inf, 0.0
    for z in (-2.0, -1.0, 0.0, 1.0, 2.0):
        f = stein.fz_value(z, xs)
        fp = stein.fz_derivative(z, xs)
        off = xs != z
        res = np.abs(fp - xs * f - ((xs <= z) - ndtr(z)))[off]
        worst_res = max(worst_res, float(res.max()))
        worst_sup = max(worst_sup, float(f.max()))
        worst_slope = max(worst_slope, float(np.abs(fp).max()))
        if f.min() <= 0:
            out.append(Check(f"f_z positive (z={z})", False, f"min {f.min():.3g}"))
    out.append(Check("Stein ODE residual <= 1e-9", worst_res <= 1e-9, f"max {worst_res:.3g}"))
    out.append(Check("sup f_z <= f_0(0)", worst_sup <= stein.F0_MAX + 1e-12, f"max {worst_sup!r}"))
    out.append(Check("|f_z'| <= 1", worst_slope <= 1 + 1e-9, f"max {worst_slope!r}"))
    f00 = float(stein.fz_value(0.0, 0.0))
    out.append(Check("f_0(0) = sqrt(2 pi)/4", abs(f00 - stein.F0_MAX) <= 1e-12, repr(f00)))

    rng = np.random.default_rng(seed)
    triples = np.column_stack([rng.normal(0, 2, 1000), rng.normal(0, 1, 1000), rng.normal(0, 1.5, 1000)])
    rep = stein.taylor_remainder_bounds_check(triples)
    out.append(Check("Taylor remainder bounds", rep.passed, f"min slack {min(rep.min_slack_fh, rep.min_slack_fz):.3g}"))

    x, u, v, z = rng.normal(0, 2, (4, 2000))
    lhs = np.abs((x + u) * stein.fz_value(z, x + u) - (x + v) * stein.fz_value(z, x + v))
    rhs = (np.abs(x) + stein.F0_MAX) * (np.abs(u) + np.abs(v))
    out.append(Check("x f_z(x) increment bound", bool(np.all(lhs <= rhs + 1e-12))))
    return out


_BIAS_MODELS = (
    m.Poisson(2.0),
    m.Binomial(20, 0.3),
    m.Hypergeometric(5, 10, 10),
    m.NegativeBinomial(5, 0.4),
    m.Dirac(4),
    m.Convolution(m.Binomial(10, 0.5), 3),
    m.FiniteIndex(m.DiscretePmf([0, 1, 3, 4], [0.1, 0.4, 0.3, 0.2])),
)


def bias_suite() -> list[Check]:
    out = []
    for model in _BIAS_MODELS:
        label = type(model).__name__
        if not isinstance(model, m.Dirac):
            pmf = m.materialize_pmf(model)
            biased = biasing.size_bias_pmf(pmf)
            d_k, d_tv, d_w = biasing.size_bias_distance_identities(model)
            gaps = (
                abs(metrics.exact_kolmogorov(pmf, biased) - d_k),
                abs(metrics.exact_total_variation(pmf, biased) - d_tv),
                abs(metrics.exact_wasserstein(pmf, biased) - d_w),
            )
            out.append(Check(f"distance identities ({label})", max(gaps) <= 1e-10, f"max gap {max(gaps):.3g}"))
            dominated = np.all(biased.cdf(pmf.support) <= pmf.cdf(pmf.support) + pmf.tail_defect + 1e-15)
            out.append(Check(f"size bias dominates ({label})", bool(dominated)))
        stats = biasing.coupling_statistics(biasing.make_coupling(model))
        mom = model.moments
        target = mom.gamma2 / mom.alpha
        out.append(Check(f"E[D] = Var/mean ({label})", abs(stats.e_d - target) <= 1e-9 * max(1, target), f"{stats.e_d!r}"))

    for name, pmf in (
        ("centered Bernoulli(0.3)", m.DiscretePmf([-0.3, 0.7], [0.7, 0.3])),
        ("three-point", m.DiscretePmf([-1.0, 0.0, 2.0], [0.5, 0.25, 0.25])),
    ):
        dens = biasing.zero_bias_density(pmf)
        var = pmf.expect(lambda x: x * x)
        for fname, f in (("x^2", lambda x: x**2), ("x^3", lambda x: x**3), ("bump", lambda x: np.exp(-x * x))):
            lhs = pmf.expect(lambda x: x * f(x))
            rhs = var * dens.expect_derivative(f)
            out.append(Check(f"zero-bias identity {name} f={fname}", abs(lhs - rhs) <= 1e-10, f"{lhs!r} vs {rhs!r}"))
    return out


def metric_suite(seed: int = 0, trials: int = 200) -> list[Check]:
    rng = np.random.default_rng(seed)
    tri, sym, order = True, True, True
    for _ in range(trials):
        pmfs = []
        for _ in range(3):
            k = rng.integers(1, 6)
            support = np.unique(rng.integers(-5, 6, k)).astype(float)
            w = rng.random(support.size) + 0.01
            pmfs.append(m.DiscretePmf(support, w / w.sum()))
        p, q, r = pmfs
        for dist in (metrics.exact_kolmogorov, metrics.exact_total_variation, metrics.exact_wasserstein):
            tri &= dist(p, r) <= dist(p, q) + dist(q, r) + 1e-12
            sym &= abs(dist(p, q) - dist(q, p)) <= 1e-12
        order &= metrics.exact_kolmogorov(p, q) <= metrics.exact_total_variation(p, q) + 1e-12
    dk, dw = metrics.empirical_distance_to_normal([0.0])
    return [
        Check("triangle inequality", bool(tri)),
        Check("symmetry", bool(sym)),
        Check("d_K <= d_TV", bool(order)),
        Check("point mass d_K = 1/2", abs(dk.value - 0.5) <= 1e-15),
        Check("point mass d_W = sqrt(2/pi)", abs(dw.value - math.sqrt(2 / math.pi)) <= 1e-15),
        Check("Holder interpolation", abs(metrics.lp_interpolation(0.04, 0.25, 2) - 0.1) <= 1e-15),
    ]


SUITES = {"stein": stein_suite, "bias": bias_suite, "metric": metric_suite}


def run_suites(names) -> list[tuple[str, Check]]:
    out = []
    for name in names:
        out.extend((name, check) for check in SUITES[name]())
    return out
