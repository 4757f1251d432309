"""Explicit Wasserstein and Kolmogorov error bounds for the normal approximation of W = (S - μ)/σ.

Every bound is a list of named terms evaluated over one input snapshot, so a
report can be compared term by term with the printed statement.  The general
theorems consume ``CouplingStatistics``; the specialized forms for particular
index families use only moments and the closed-form estimates those forms
are stated with.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from . import biasing
from . import models as m
from .errors import (
    DegenerateSum,
    InvalidParameter,
    MissingStatistic,
    NegativeDPresent,
    NonzeroMean,
    NoSpecialization,
)

SQRT2PI = math.sqrt(2.0 * math.pi)
SQRT2 = math.sqrt(2.0)
SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)

THEOREMS = ("thm3a", "thm3b", "general", "thm5", "cor3", "cor4", "cor5", "cor6", "cor7", "cor8")
MEAN_ZERO_TOL = 1e-12


@dataclass(frozen=True)
class BoundConstants:
    """Constants entering the Kolmogorov bounds.

    ``use_2ck_as_one`` replaces 2·C_K by 1 (and C_K by 1/2), as the stated
    theorems do.  ``corrected`` applies the rederived coefficients to the
    handful of theorem-level terms whose printed form drops a factor; it is
    off by default so that reports match the printed statements.
    """

    c_k: float = 0.4748
    use_2ck_as_one: bool = True
    corrected: bool = False

    def __post_init__(self):
        if not 0 < self.c_k <= 0.5:
            raise InvalidParameter("c_k must lie in (0, 0.5]")

    @property
    def two_ck(self) -> float:
        return 1.0 if self.use_2ck_as_one else 2.0 * self.c_k

    @property
    def ck(self) -> float:
        return 0.5 * self.two_ck


@dataclass(frozen=True)
class BoundReport:
    theorem: str
    metric: str
    total: float
    terms: tuple[tuple[str, float], ...]
    inputs: dict = field(default_factory=dict)
    constants: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    def term(self, label: str) -> float:
        return dict(self.terms)[label]

    def to_json(self) -> dict:
        out = {
            "theorem": self.theorem,
            "metric": self.metric,
            "total": self.total,
            "terms": [{"label": k, "value": v} for k, v in self.terms],
            "inputs": self.inputs,
            "constants": self.constants,
        }
        if self.extras:
            out["extras"] = self.extras
        return out


@dataclass(frozen=True)
class _Snapshot:
    """Moments of the summand and index plus derived σ, shared by the term closures."""

    a: float
    b: float
    c: float
    d3: float
    alpha: float
    beta2: float
    gamma2: float
    delta3: float
    sigma: float

    @property
    def gamma(self):
        return math.sqrt(max(self.gamma2, 0.0))

    @property
    def absa(self):
        return abs(self.a)

    def as_dict(self):
        out = asdict(self)
        out["b2"] = self.b * self.b
        out["c2"] = self.c * self.c
        out["sigma2"] = self.sigma * self.sigma
        return out


def _snapshot(index: m.IndexModel, summand: m.SummandModel) -> _Snapshot:
    s, i = summand.moments, index.moments
    rs = m.random_sum_moments(index, summand)
    return _Snapshot(s.a, s.b, s.c, s.d3, i.alpha, i.beta2, i.gamma2, i.delta3, rs.sigma)


def _report(theorem, metric, terms, snap, constants, stats=None, extras=None, inputs=None) -> BoundReport:
    terms = tuple((label, float(value)) for label, value in terms)
    for label, value in terms:
        if not value >= 0 or math.isnan(value):
            raise ValueError(f"term {label} evaluated to {value!r}")
    snapshot = {"moments": snap.as_dict()}
    if stats is not None:
        snapshot["statistics"] = stats.values()
        snapshot["provenance"] = asdict(stats.provenance)
    if inputs:
        snapshot.update(inputs)
    return BoundReport(
        theorem,
        metric,
        math.fsum(v for _, v in terms),
        terms,
        snapshot,
        asdict(constants) if constants is not None else {},
        extras or {},
    )


def _need(stats, *names):
    for name in names:
        value = getattr(stats, name, None)
        if value is None or (isinstance(value, float) and math.isnan(value)):
            raise MissingStatistic(name)


def _need_c(snap):
    if not snap.c > 0:
        raise DegenerateSum("this bound needs a non-degenerate summand (c > 0)")


def _default_stats(index, stats):
    return biasing.index_statistics(index) if stats is None else stats


# ---------------------------------------------------------------- theorems


def bound_wasserstein_thm3a(index, summand, stats=None) -> BoundReport:
    """Wasserstein bound for an arbitrary coupling (N, N^s)."""
    stats = _default_stats(index, stats)
    _need(stats, "e_d2", "var_cond", "e_d2_neg")
    q = _snapshot(index, summand)
    s3, s2 = q.sigma**3, q.sigma**2
    terms = [
        ("2c²bγ²/σ³", 2 * q.c**2 * q.b * q.gamma2 / s3),
        ("3αd³/σ³", 3 * q.alpha * q.d3 / s3),
        ("(αa²/σ²)√(2/π)√Var(E[D|N])", q.alpha * q.a**2 / s2 * SQRT_2_OVER_PI * math.sqrt(stats.var_cond)),
        ("2αa²b/σ³·E[1{D<0}D²]", 2 * q.alpha * q.a**2 * q.b / s3 * stats.e_d2_neg),
        ("α|a|b²/σ³·E[D²]", q.alpha * q.absa * q.b**2 / s3 * stats.e_d2),
    ]
    return _report("thm3a", "wasserstein", terms, q, None, stats)


def _b1(q, stats):
    s3 = q.sigma**3
    return (
        (q.alpha * q.b * q.c**2 * (SQRT2PI + 4) / (4 * s3)) * math.sqrt(stats.e_d2)
        + q.d3 * q.alpha * (3 * SQRT2PI + 4) / (8 * s3)
        + q.c**3 * q.alpha / s3
    )


def bound_kolmogorov_thm3b(index, summand, stats=None, constants: BoundConstants | None = None) -> BoundReport:
    """Kolmogorov bound for couplings with D >= 0 (twelve terms)."""
    constants = constants or BoundConstants()
    stats = _default_stats(index, stats)
    _need(stats, "e_d2", "p_n0", "e_ninvhalf", "var_cond", "e_cond_d2_sq", "e_d2_pos_ninvhalf", "e_d_pos_ninvhalf", "p_dneg")
    if stats.p_dneg > 0:
        raise NegativeDPresent("P(D < 0) > 0; use the general bound")
    q = _snapshot(index, summand)
    _need_c(q)
    s2, s3 = q.sigma**2, q.sigma**3
    al, a, absa, b, c, d3, two_ck = q.alpha, q.a, q.absa, q.b, q.c, q.d3, constants.two_ck
    tail_d3 = d3 / c**3 if constants.corrected else d3
    terms = [
        ("(√2π+4)bc²α/(4σ³)·√E[D²]", (SQRT2PI + 4) * b * c**2 * al / (4 * s3) * math.sqrt(stats.e_d2)),
        ("d³α(3√2π+4)/(8σ³)", d3 * al * (3 * SQRT2PI + 4) / (8 * s3)),
        ("c³α/σ³", c**3 * al / s3),
        ("(7/2·√2+2)√α·d³/(cσ²)", (3.5 * SQRT2 + 2) * math.sqrt(al) * d3 / (c * s2)),
        ("c²α/σ²·P(N=0)", c**2 * al / s2 * stats.p_n0),
        ("2C_K·d³α/(cσ²)·E[N^-1/2 1{N≥1}]", two_ck * d3 * al / (c * s2) * stats.e_ninvhalf),
        ("αa²/σ²·√Var(E[D|N])", al * a**2 / s2 * math.sqrt(stats.var_cond)),
        ("α|a|b²/(2σ³)·√E[(E[D²|N])²]", al * absa * b**2 / (2 * s3) * math.sqrt(stats.e_cond_d2_sq)),
        ("α|a|b²√2π/(8σ³)·E[D²]", al * absa * b**2 * SQRT2PI / (8 * s3) * stats.e_d2),
        ("α|a|b/σ²·√P(N=0)·√E[D²]", al * absa * b / s2 * math.sqrt(stats.p_n0) * math.sqrt(stats.e_d2)),
        ("α|a|b²/(cσ²√2π)·E[D²N^-1/2 1{N≥1}]", al * absa * b**2 / (c * s2 * SQRT2PI) * stats.e_d2_pos_ninvhalf),
        (
            "(2C_K·d³α|a|b/σ²+αbc/(σ²√2π))·E[D N^-1/2 1{N≥1}]",
            (two_ck * tail_d3 * al * absa * b / s2 + al * b * c / (s2 * SQRT2PI)) * stats.e_d_pos_ninvhalf,
        ),
    ]
    return _report("thm3b", "kolmogorov", terms, q, constants, stats)


def bound_kolmogorov_general(index, summand, stats=None, constants: BoundConstants | None = None) -> BoundReport:
    """Kolmogorov bound B1 + ... + B7 valid for couplings with D of either sign."""
    constants = constants or BoundConstants()
    stats = _default_stats(index, stats)
    _need(stats, *biasing.STAT_FIELDS)
    q = _snapshot(index, summand)
    _need_c(q)
    s2, s3, s5 = q.sigma**2, q.sigma**3, q.sigma**5
    al, a, absa, b, c, d3 = q.alpha, q.a, q.absa, q.b, q.c, q.d3
    two_ck, ck, fix = constants.two_ck, constants.ck, constants.corrected
    e_neg, e_pos = stats.e_d2_neg, stats.e_d2_pos
    ns_moment = c**2 * q.beta2 + a**2 * (q.delta3 - 2 * al * q.beta2 + al**3)
    tail_d3 = d3 / c**3 if fix else d3

    b2 = (
        (3.5 * SQRT2 + 2) * math.sqrt(al) * d3 / (c * s2)
        + c**2 * al / s2 * stats.p_n0
        + al * b * c / (s2 * SQRT2PI) * stats.e_d_pos_ninvhalf
        + two_ck * d3 * al / (c * s2) * stats.e_pos_ninvhalf
        + c * b * math.sqrt(al) / (s2 * SQRT2PI) * math.sqrt(e_neg)
        + (two_ck * math.sqrt(al) if fix else al * ck) * d3 / (c * s2) * math.sqrt(stats.p_dneg)
    )
    b3 = al * a**2 / s2 * math.sqrt(stats.var_cond)
    b4 = al * a**2 * b / (s2 * c * SQRT2PI) * stats.e_d2_neg_nsinvhalf + two_ck * d3 * a**2 * math.sqrt(al) / (
        c**3 * s2
    ) * math.sqrt(e_neg)
    if fix:
        b5_second = a**2 * b * math.sqrt(al * ns_moment) / q.sigma**4 * math.sqrt(stats.e_cond_d2_neg_sq)
    else:
        b5_second = a**2 * b * ns_moment / s5 * math.sqrt(stats.e_cond_d2_neg_sq)
    b5 = al * a**2 * b * SQRT2PI / (4 * s3) * e_neg + b5_second
    b6 = (
        al * absa * b**2 / (2 * s3) * math.sqrt(stats.e_cond_d2_sq)
        + al * absa * b**2 * SQRT2PI / (8 * s3) * e_pos
        + al * absa * b / s2 * math.sqrt(stats.p_n0) * math.sqrt(e_pos)
        + al * absa * b**2 / (c * s2 * SQRT2PI) * stats.e_d2_pos_ninvhalf
        + two_ck * tail_d3 * al * absa * b / s2 * stats.e_d_pos_ninvhalf
    )
    b7 = (
        al * absa * b**2 * SQRT2PI / (8 * s3) * e_neg
        + al * absa * b**2 / (2 * s3) * math.sqrt(stats.e_cond_d2_neg_sq) * math.sqrt(ns_moment / (al * s2))
        + al * absa * b**2 / (s2 * c * SQRT2PI) * stats.e_d2_neg_nsinvhalf
        + math.sqrt(al) * absa * two_ck * b * tail_d3 / s2 * math.sqrt(e_neg)
    )
    terms = [("B1", _b1(q, stats)), ("B2", b2), ("B3", b3), ("B4", b4), ("B5", b5), ("B6", b6), ("B7", b7)]
    return _report("general", "kolmogorov", terms, q, constants, stats)


def _index_functionals(index: m.IndexModel):
    pmf = m.materialize_pmf(index)
    k = pmf.support
    pos = k >= 1
    p_n0 = math.fsum(pmf.probs[~pos])
    e_ninv = math.fsum(pmf.probs[pos] / k[pos])
    e_ninvhalf = math.fsum(pmf.probs[pos] / np.sqrt(k[pos]))
    return p_n0, e_ninv, e_ninvhalf


def bound_meanzero_thm5(index, summand, constants: BoundConstants | None = None) -> tuple[BoundReport, BoundReport]:
    """(Wasserstein, Kolmogorov) bounds for centered summands."""
    constants = constants or BoundConstants()
    q = _snapshot(index, summand)
    if abs(q.a) > MEAN_ZERO_TOL * max(1.0, q.b):
        raise NonzeroMean(f"summand mean {q.a!r} is not zero")
    _need_c(q)
    p_n0, e_ninv, _ = _index_functionals(index)
    al, g, ratio = q.alpha, q.gamma, q.d3 / q.c**3
    extra = {"index_functionals": {"p_n0": p_n0, "e_ninv": e_ninv}}
    wass = [("2γ/α", 2 * g / al), ("3d³/(c³√α)", 3 * ratio / math.sqrt(al))]
    kol_mid = ratio / math.sqrt(al) if constants.corrected else ratio / al
    kol = [
        ("(√2π+4)γ/(4α)", (SQRT2PI + 4) * g / (4 * al)),
        ("(d³(3√2π+4)/(8c³)+1)/√α", (q.d3 * (3 * SQRT2PI + 4) / (8 * q.c**3) + 1) / math.sqrt(al)),
        ("(7/2·√2+2)d³/(c³α)", (3.5 * SQRT2 + 2) * kol_mid),
        ("P(N=0)", p_n0),
        ("(2C_K·d³/c³+γ/(√α√2π))·√E[1{N≥1}/N]", (constants.two_ck * ratio + g / (math.sqrt(al) * SQRT2PI)) * math.sqrt(e_ninv)),
    ]
    return (
        _report("thm5", "wasserstein", wass, q, constants, inputs=extra),
        _report("thm5", "kolmogorov", kol, q, constants, inputs=extra),
    )


# ------------------------------------------------------------ specializations


def hyper_eps(n: int, r: int, s: int) -> Fraction:
    """Var(E[D|N]) under the marked-ball coupling of Hyp(n; r, s), in exact arithmetic."""
    if min(n, r, s) < 1 or n > min(r, s):
        raise InvalidParameter("need 1 <= n <= min(r, s)")
    t = r + s
    if t <= 3:
        raise InvalidParameter("need r + s >= 4")
    num = sum(coef * n**i * r**j * s**k for coef, i, j, k in _EPS_MONOMIALS)
    return Fraction(num, n * r * t**2 * (t - 1) ** 2 * (t - 2) * (t - 3))


# (coefficient, power of n, power of r, power of s)
_EPS_MONOMIALS = (
    (1, 1, 1, 1), (-1, 3, 1, 1), (-1, 0, 2, 1), (5, 2, 2, 1), (2, 3, 2, 1), (-8, 1, 3, 1),
    (-8, 2, 3, 1), (2, 1, 1, 5), (-1, 3, 3, 1), (4, 0, 4, 1), (10, 1, 4, 1), (3, 2, 4, 1),
    (-4, 0, 5, 1), (-3, 1, 5, 1), (1, 0, 6, 1), (1, 1, 0, 2), (-1, 3, 0, 2), (-2, 0, 1, 2),
    (4, 2, 1, 2), (-2, 3, 1, 2), (-14, 1, 2, 2), (-4, 2, 2, 2), (1, 3, 2, 2), (12, 0, 3, 2),
    (20, 1, 3, 2), (2, 2, 3, 2), (-14, 0, 4, 2), (-7, 1, 4, 2), (4, 0, 5, 2), (-1, 0, 0, 3),
    (-1, 2, 0, 3), (2, 3, 0, 3), (-5, 1, 1, 3), (4, 2, 1, 3), (1, 3, 1, 3), (13, 0, 2, 3),
    (8, 1, 2, 3), (-4, 2, 2, 3), (-18, 0, 3, 3), (-3, 1, 3, 3), (6, 0, 4, 3), (1, 1, 0, 4),
    (-1, 3, 0, 4), (6, 0, 1, 4), (-4, 1, 1, 4), (-2, 2, 1, 4), (-10, 0, 2, 4), (3, 1, 2, 4),
    (4, 0, 3, 4), (1, 0, 0, 5), (-2, 1, 0, 5), (1, 2, 0, 5), (-2, 0, 1, 5), (1, 0, 2, 5),
)


def _falling(x: int, k: int) -> int:
    out = 1
    for j in range(k):
        out *= x - j
    return out


def _cor3(q, index, constants):
    """Infinitely divisible index: D independent of N."""
    p_n0, _, e_ninvhalf = _index_functionals(index)
    al, b, c, absa, d3 = q.alpha, q.b, q.c, q.absa, q.d3
    s2, s3 = q.sigma**2, q.sigma**3
    beta4 = q.beta2**2
    gamma4 = q.gamma2**2
    e_d2 = q.delta3 / al + (gamma4 - beta4) / al**2 - q.gamma2
    core = q.delta3 * al + gamma4 - beta4 - q.gamma2 * al**2
    wass = [
        ("(2c²bγ²+3αd³)/σ³", (2 * c**2 * b * q.gamma2 + 3 * al * d3) / s3),
        ("(αδ³-α²γ²+γ⁴-β⁴)|a|b²/(ασ³)", (al * q.delta3 - al**2 * q.gamma2 + gamma4 - beta4) * absa * b**2 / (al * s3)),
    ]
    extras = {"e_d2": e_d2}
    if not c > 0:
        return wass, None, extras
    root = math.sqrt(max(core, 0.0))
    kol = [
        ("d³α(3√2π+4)/(8σ³)", d3 * al * (3 * SQRT2PI + 4) / (8 * s3)),
        ("c³α/σ³", c**3 * al / s3),
        ("(7/2·√2+2)√α·d³/(cσ²)", (3.5 * SQRT2 + 2) * math.sqrt(al) * d3 / (c * s2)),
        ("c²α/σ²·P(N=0)", c**2 * al / s2 * p_n0),
        ("|a|b²(δ³α+γ⁴-β⁴-γ²α²)/(ασ³)·(√2π/8+1/2)", absa * b**2 * core / (al * s3) * (SQRT2PI / 8 + 0.5)),
        (
            "√(δ³α+γ⁴-β⁴-γ²α²)·((√2π+4)bc²/(4σ³)+√P(N=0)|a|b/σ²)",
            root * ((SQRT2PI + 4) * b * c**2 / (4 * s3) + math.sqrt(p_n0) * absa * b / s2),
        ),
        (
            "E[N^-1/2 1{N≥1}]·(...)",
            e_ninvhalf
            * (
                absa * b**2 * core / (c * al * s2 * SQRT2PI)
                + constants.two_ck * q.gamma2 * d3 * absa * b / s2
                + constants.two_ck * d3 * al / (c * s2)
                + q.gamma2 * b * c / (s2 * SQRT2PI)
            ),
        ),
    ]
    return wass, kol, extras


def _cor4(q, index, constants):
    n = index.n
    ratio = q.d3 / q.c**3
    wass = [("3d³/(c³√N)", 3 * ratio / math.sqrt(n))]
    kol = [
        ("1/√N", 1 / math.sqrt(n)),
        ("(7/2(1+√2)+3√2π/8)d³/(c³√N)", (3.5 * (1 + SQRT2) + 3 * SQRT2PI / 8) * ratio / math.sqrt(n)),
    ]
    return wass, kol, {}


def _cor5(q, index, constants):
    base, copies = index.base, index.copies
    bm = base.moments
    a, b, c, d3 = q.a, q.b, q.c, q.d3
    s1 = math.sqrt(c**2 * bm.alpha + a**2 * bm.gamma2)
    inner = [
        ("2c²bγ₁²/σ₁³", 2 * c**2 * b * bm.gamma2 / s1**3),
        ("3α₁d³/σ₁³", 3 * bm.alpha * d3 / s1**3),
        ("√(2/π)α₁a²γ₁²/σ₁²", SQRT_2_OVER_PI * bm.alpha * a**2 * bm.gamma2 / s1**2),
        ("2α₁(a²b+|a|b²)/σ₁³·(δ₁³/α₁-β₁²)", 2 * bm.alpha * (a**2 * b + abs(a) * b**2) / s1**3 * (bm.delta3 / bm.alpha - bm.beta2)),
    ]
    wass = [(f"{label}/√n", value / math.sqrt(copies)) for label, value in inner]
    return wass, None, {"sigma1": s1}


def _cor6(q, index, constants):
    lam = index.lam
    a, absa, b, c, d3 = q.a, q.absa, q.b, q.c, q.d3
    rl = math.sqrt(lam)
    wass = [("2c²/(b²√λ)", 2 * c**2 / b**2 / rl), ("3d³/(b³√λ)", 3 * d3 / b**3 / rl), ("|a|/(b√λ)", absa / b / rl)]
    if not c > 0:
        return wass, None, {}
    kol = [
        ("(√2π/4+1)/√λ", (SQRT2PI / 4 + 1) / rl),
        ("(3√2π+4)d³/(8b³√λ)", (3 * SQRT2PI + 4) * d3 / (8 * b**3) / rl),
        ("c³/(b³√λ)", c**3 / b**3 / rl),
        ("(7/2·√2+3)d³/(cb²√λ)", (3.5 * SQRT2 + 3) * d3 / (c * b**2) / rl),
        ("|a|(√2π+4+8d³)/(8b√λ)", absa * (SQRT2PI + 4 + 8 * d3) / (8 * b) / rl),
        ("|a|/(c√2π√λ)", absa / (c * SQRT2PI) / rl),
        ("c/(b√2π√λ)", c / (b * SQRT2PI) / rl),
        ("c²e^-λ/b²", c**2 / b**2 * math.exp(-lam)),
        ("|a|e^-λ/2/b", absa / b * math.exp(-lam / 2)),
    ]
    return wass, kol, {}


def _cor7(q, index, constants):
    n, p = index.n, index.p
    a, absa, b, c, d3 = q.a, q.absa, q.b, q.c, q.d3
    w = b**2 - p * a**2
    lead = 1.0 / (math.sqrt(n * p) * w**1.5)
    wass = [
        ("(2c²b+|a|b²)(1-p)·L", (2 * c**2 * b + absa * b**2) * (1 - p) * lead),
        ("3d³·L", 3 * d3 * lead),
        ("√(2/π)a²p√(b²-pa²)√(1-p)·L", SQRT_2_OVER_PI * a**2 * p * math.sqrt(w) * math.sqrt(1 - p) * lead),
    ]
    if not c > 0:
        return wass, None, {}
    mid = 1.0 / (math.sqrt(n * p) * w)
    kol = [
        ("c³·L", c**3 * lead),
        ("(√2π+4)bc²√(1-p)/4·L", (SQRT2PI + 4) * b * c**2 * math.sqrt(1 - p) / 4 * lead),
        ("(3√2π+4)d³/8·L", (3 * SQRT2PI + 4) * d3 / 8 * lead),
        ("|a|b²√(1-p)/2·L", absa * b**2 * math.sqrt(1 - p) / 2 * lead),
        ("|a|b²√2π(1-p)/8·L", absa * b**2 * SQRT2PI * (1 - p) / 8 * lead),
        ("(9/2·√2+2)d³/c·M", (4.5 * SQRT2 + 2) * d3 / c * mid),
        ("√(1-p)(a²p+√2|a|bd³)·M", math.sqrt(1 - p) * (a**2 * p + SQRT2 * absa * b * d3) * mid),
        ("√(2(1-p))b(2b²-a²)/(c√2π)·M", math.sqrt(2 * (1 - p)) * b * (2 * b**2 - a**2) / (c * SQRT2PI) * mid),
        ("c²(1-p)^n/(b²-pa²)", c**2 / w * (1 - p) ** n),
        ("|a|b(1-p)^((n+1)/2)/(b²-pa²)", absa * b / w * (1 - p) ** ((n + 1) / 2)),
    ]
    return wass, kol, {}


def _cor8(q, index, constants, k_const=1.0):
    n, r, s = index.n, index.r, index.s
    if n > min(r, s):
        raise InvalidParameter("the hypergeometric form needs n <= min(r, s)")
    a, absa, b, c, d3 = q.a, q.absa, q.b, q.c, q.d3
    if not c > 0:
        raise DegenerateSum("the hypergeometric form needs c > 0")
    t = r + s
    lead = (n * r / t) ** -0.5
    ratio = s * (t - n) / (t * (t - 1))
    eps = hyper_eps(n, r, s)
    root_eps = math.sqrt(float(eps))
    kform = math.sqrt(min(r, s) / (n * t))
    p0 = _falling(s, n) / _falling(t, n)
    wass = [
        ("(2b/c)·s(r+s-n)/(r+s)₂·A", 2 * b / c * ratio * lead),
        ("3d³/c³·A", 3 * d3 / c**3 * lead),
        ("|a|b²/c²·s(r+s-n)/(r+s)₂·A", absa * b**2 / c**2 * ratio * lead),
        ("a²/c²·√(2/π)·√ε", a**2 / c**2 * SQRT_2_OVER_PI * root_eps),
    ]
    kol = [
        ("A", lead),
        ("(√2π+4)b/(4c)·√(s(r+s-n)/(r+s)₂)·A", (SQRT2PI + 4) * b / (4 * c) * math.sqrt(ratio) * lead),
        ("(3√2π/8+9/2·√2+5/2)d³/c³·A", (3 * SQRT2PI / 8 + 4.5 * SQRT2 + 2.5) * d3 / c**3 * lead),
        ("(√2π/8+1)|a|b²/c³·s(r+s-n)/(r+s)₂·A", (SQRT2PI / 8 + 1) * absa * b**2 / c**3 * ratio * lead),
        (
            "(|a|b²/(c³√2π)+|a|bd³/c²+b/(c√2π))·√(2s(r+s-n)/(r+s)₂)·A",
            (absa * b**2 / (c**3 * SQRT2PI) + absa * b * d3 / c**2 + b / (c * SQRT2PI)) * math.sqrt(2 * ratio) * lead,
        ),
        ("(s)_n/(r+s)_n", p0),
        ("a²/c²·√ε", a**2 / c**2 * root_eps),
        ("|a|b/c²·√((s)_n/(r+s)_n·s(r+s-n)/(r+s)₂)", absa * b / c**2 * math.sqrt(p0 * ratio)),
    ]
    wass_k = a**2 / c**2 * SQRT_2_OVER_PI * k_const * kform
    kol_k = a**2 / c**2 * k_const * kform
    extras = {
        "eps": [eps.numerator, eps.denominator],
        "sqrt_eps": root_eps,
        "K": k_const,
        "k_form_rate": kform,
        "wasserstein_total_k_form": math.fsum(v for _, v in wass[:3]) + wass_k,
        "kolmogorov_total_k_form": math.fsum(v for label, v in kol if label != "a²/c²·√ε") + kol_k,
    }
    return wass, kol, extras


_SPECIALIZATIONS = {
    "cor3": ((m.Poisson, m.NegativeBinomial), _cor3),
    "cor4": ((m.Dirac,), _cor4),
    "cor5": ((m.Convolution,), _cor5),
    "cor6": ((m.Poisson,), _cor6),
    "cor7": ((m.Binomial,), _cor7),
    "cor8": ((m.Hypergeometric,), _cor8),
}

_DEFAULT_SPECIALIZATION = {
    m.NegativeBinomial: "cor3",
    m.Dirac: "cor4",
    m.Convolution: "cor5",
    m.Poisson: "cor6",
    m.Binomial: "cor7",
    m.Hypergeometric: "cor8",
}


def specialization_for(index: m.IndexModel) -> str:
    try:
        return _DEFAULT_SPECIALIZATION[type(index)]
    except KeyError:
        raise NoSpecialization(f"no specialized bound for {type(index).__name__}") from None


def bound_specialized(
    index: m.IndexModel,
    summand: m.SummandModel,
    constants: BoundConstants | None = None,
    theorem: str | None = None,
    *,
    k_const: float = 1.0,
) -> dict[str, BoundReport]:
    """Specialized bounds for an index family; returns reports keyed by metric."""
    constants = constants or BoundConstants()
    theorem = theorem or specialization_for(index)
    if theorem not in _SPECIALIZATIONS:
        raise NoSpecialization(theorem)
    families, build = _SPECIALIZATIONS[theorem]
    if not isinstance(index, families):
        raise NoSpecialization(f"{theorem} does not apply to {type(index).__name__}")
    q = _snapshot(index, summand)
    if theorem == "cor4" and not q.c > 0:
        raise DegenerateSum("constant index needs c > 0")
    if theorem == "cor8":
        wass, kol, extras = build(q, index, constants, k_const)
    else:
        wass, kol, extras = build(q, index, constants)
    out = {"wasserstein": _report(theorem, "wasserstein", wass, q, constants, extras=extras)}
    if kol is not None:
        out["kolmogorov"] = _report(theorem, "kolmogorov", kol, q, constants, extras=extras)
    return out


def evaluate(theorem: str, index, summand, metric: str = "both", constants=None, stats=None, k_const=1.0) -> list[BoundReport]:
    """Dispatch on a theorem id and metric; returns the matching reports."""
    constants = constants or BoundConstants()
    want = ("wasserstein", "kolmogorov") if metric == "both" else (metric,)
    if theorem not in THEOREMS:
        raise InvalidParameter(f"unknown theorem {theorem!r}")
    out = []
    if theorem == "thm3a":
        if "wasserstein" in want:
            out.append(bound_wasserstein_thm3a(index, summand, stats))
    elif theorem == "thm3b":
        if "kolmogorov" in want:
            out.append(bound_kolmogorov_thm3b(index, summand, stats, constants))
    elif theorem == "general":
        if "kolmogorov" in want:
            out.append(bound_kolmogorov_general(index, summand, stats, constants))
    elif theorem == "thm5":
        w, k = bound_meanzero_thm5(index, summand, constants)
        out.extend(r for r in (w, k) if r.metric in want)
    else:
        reports = bound_specialized(index, summand, constants, theorem, k_const=k_const)
        out.extend(reports[x] for x in want if x in reports)
    if not out:
        raise InvalidParameter(f"{theorem} gives no {metric} bound")
    return out
