"""Reproducible Monte Carlo for standardized random sums.

Replications are split into fixed-size chunks.  Chunk ``i`` draws from its
own generator seeded by ``SeedSequence(seed, spawn_key=(tag, i))``, so the
merged sample depends only on (seed, chunk size) and never on the number of
worker processes.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import biasing, bounds, metrics
from . import models as m
from .errors import DegenerateSum, InvalidParameter, NonzeroMean
from .specs import parse_index, parse_summand

DEFAULT_SEED = 20160301
DEFAULT_CHUNK = 100_000
MAX_SAMPLE = 10_000_000
MIN_REPS = 1_000

_TAG_W = 0
_TAG_COUPLING = 1
_TAG_IDENTITY = 2
_TAG_CONCENTRATION = 3


def stream(seed: int, index: int, tag: int = _TAG_W) -> np.random.Generator:
    """Independent generator for chunk ``index`` of a run with master ``seed``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(tag, index))))


def _chunks(total: int, size: int):
    starts = range(0, total, size)
    return [(i, min(size, total - s)) for i, s in enumerate(starts)]


def _standardizer(index, summand):
    rs = m.random_sum_moments(index, summand)
    return rs.mu, rs.sigma


def sample_w_batch(index: m.IndexModel, summand: m.SummandModel, rng: np.random.Generator, count: int) -> np.ndarray:
    """``count`` sorted draws of W = (S - αa)/σ."""
    mu, sigma = _standardizer(index, summand)
    n = index.sample(rng, count)
    s = summand.sample_sums(rng, n)
    return np.sort((s - mu) / sigma)


def _w_chunk(args):
    index, summand, seed, chunk, count = args
    return sample_w_batch(index, summand, stream(seed, chunk, _TAG_W), count)


def sample_w(index, summand, reps: int, seed: int = DEFAULT_SEED, chunk_size: int = DEFAULT_CHUNK, jobs: int = 1) -> np.ndarray:
    """Merged sorted sample of W over all chunks; identical for any ``jobs``."""
    if reps > MAX_SAMPLE:
        raise InvalidParameter(f"{reps} replications exceed the {MAX_SAMPLE} sample cap")
    _standardizer(index, summand)
    tasks = [(index, summand, seed, i, c) for i, c in _chunks(reps, chunk_size)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_w_chunk, tasks))
    else:
        parts = [_w_chunk(t) for t in tasks]
    return np.sort(np.concatenate(parts), kind="stable")


# ---------------------------------------------------------------- experiments


@dataclass(frozen=True)
class ExperimentConfig:
    index: str
    summand: str
    coupling: str | None = None
    reps: int = 1_000_000
    seed: int = DEFAULT_SEED
    chunk_size: int = DEFAULT_CHUNK
    bounds: tuple[str, ...] = ("auto",)
    jobs: int = 1
    out: str | None = None
    c_k: float = 0.4748
    exact_2ck: bool = False

    def __post_init__(self):
        if self.reps < MIN_REPS:
            raise InvalidParameter(f"need at least {MIN_REPS} replications")
        if self.chunk_size < 1:
            raise InvalidParameter("chunk size must be positive")

    @property
    def constants(self) -> bounds.BoundConstants:
        return bounds.BoundConstants(self.c_k, use_2ck_as_one=not self.exact_2ck)


@dataclass(frozen=True)
class Verdict:
    theorem: str
    metric: str
    bound: float
    empirical: float
    band: float
    verdict: str


def verdict(empirical: float, band: float, total: float) -> str:
    if empirical - band > total:
        return "violated"
    if empirical + band <= total:
        return "dominates"
    return "inconclusive-within-band"


@dataclass(frozen=True)
class ExperimentReport:
    config: ExperimentConfig
    d_k: metrics.DistanceEstimate
    d_w: metrics.DistanceEstimate
    bounds: tuple[bounds.BoundReport, ...]
    verdicts: tuple[Verdict, ...]
    wall_time: float = field(compare=False, default=0.0)

    @property
    def violated(self) -> bool:
        return any(v.verdict == "violated" for v in self.verdicts)

    def to_json(self) -> dict:
        return {
            "config": asdict(self.config),
            "seed": self.config.seed,
            "empirical": {"kolmogorov": self.d_k.to_json(), "wasserstein": self.d_w.to_json()},
            "bounds": [b.to_json() for b in self.bounds],
            "verdicts": [asdict(v) for v in self.verdicts],
            "wall_time": self.wall_time,
        }


def default_theorems(index: m.IndexModel, summand: m.SummandModel, coupling=None) -> list[str]:
    """Theorem ids that apply to this model pair."""
    out = []
    try:
        out.append(bounds.specialization_for(index))
    except bounds.NoSpecialization:
        pass
    out.append("thm3a")
    if summand.moments.c2 > 0:
        cp = biasing.make_coupling(index, coupling)
        out.append("thm3b" if cp.nonnegative_increment else "general")
        if abs(summand.moments.a) <= bounds.MEAN_ZERO_TOL:
            out.append("thm5")
    return out


def evaluate_bounds(index, summand, theorems, constants, coupling=None) -> list[bounds.BoundReport]:
    stats = None
    if any(t in ("thm3a", "thm3b", "general") for t in theorems):
        stats = biasing.coupling_statistics(biasing.make_coupling(index, coupling))
    reports = []
    for t in theorems:
        try:
            reports.extend(bounds.evaluate(t, index, summand, "both", constants, stats))
        except (DegenerateSum, bounds.NegativeDPresent):
            continue
    return reports


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    start = time.perf_counter()
    index, summand = parse_index(config.index), parse_summand(config.summand)
    theorems = list(config.bounds)
    if "auto" in theorems:
        theorems = default_theorems(index, summand, config.coupling)
    reports = evaluate_bounds(index, summand, theorems, config.constants, config.coupling)
    w = sample_w(index, summand, config.reps, config.seed, config.chunk_size, config.jobs)
    d_k, d_w = metrics.empirical_distance_to_normal(w)
    verdicts = []
    for r in reports:
        est = d_k if r.metric == "kolmogorov" else d_w
        verdicts.append(Verdict(r.theorem, r.metric, r.total, est.value, est.conf_band, verdict(est.value, est.conf_band, r.total)))
    return ExperimentReport(config, d_k, d_w, tuple(reports), tuple(verdicts), time.perf_counter() - start)


# ------------------------------------------------------------ identity checks


@dataclass(frozen=True)
class IdentityResidual:
    name: str
    lhs: float
    rhs: float
    residual: float
    std_error: float
    exact: bool

    @property
    def passed(self) -> bool:
        if self.exact:
            return abs(self.residual) <= 1e-10
        return abs(self.residual) <= 4.0 * self.std_error


def _paired(name, lhs_draws, rhs_draws):
    diff = lhs_draws - rhs_draws
    se = float(np.std(diff, ddof=1) / math.sqrt(diff.size))
    return IdentityResidual(name, float(lhs_draws.mean()), float(rhs_draws.mean()), float(diff.mean()), se, False)


def _split_sums(summand, rng, n, m_):
    """Sums S_N and S_M sharing X_1.., together with X_1 (requires M >= max(N, 1))."""
    x1 = summand.sample(rng, n.size)
    head = np.maximum(n - 1, 0)
    r1 = summand.sample_sums(rng, head)
    r2 = summand.sample_sums(rng, m_ - np.maximum(n, 1))
    s_n = np.where(n >= 1, x1, 0.0) + r1
    s_m = x1 + r1 + r2
    return s_n, s_m, x1


def wstar_sample(index, summand, rng, count, coupling=None):
    """Paired draws (W, W*) with W* = W_M + (Y - X_1)/σ and M >= N."""
    cp = biasing.make_coupling(index, coupling or biasing.CouplingKind.QUANTILE)
    n, m_ = cp.sample(rng, count)
    if np.any(m_ < n):
        raise InvalidParameter("W* construction needs a coupling with M >= N")
    mu, sigma = _standardizer(index, summand)
    s_n, s_m, x1 = _split_sums(summand, rng, n, m_)
    y = biasing.non_zero_bias_sample(summand, rng, count)
    return (s_n - mu) / sigma, (s_m - mu + y - x1) / sigma


def verify_bias_identity(kind: str, model, functions, reps: int = 1_000_000, seed: int = DEFAULT_SEED, *, summand=None, exact=None):
    """Residuals of a biasing identity for each (name, f, f') in ``functions``.

    ``size``: E[N h(N)] = α E[h(N^s)] for an index model (h = f).
    ``zero``: E[(X-a) f(X-a)] = c² E[f'(X^nz - a)] for a summand model.
    ``wstar``: E[W f(W)] = E[f'(W*)] for an index ``model`` and centered ``summand``.
    Exact mode (finite supports) is used for size and zero unless ``exact=False``.
    """
    rng = stream(seed, 0, _TAG_IDENTITY)
    out = []
    if kind == "size":
        alpha = model.moments.alpha
        use_exact = exact if exact is not None else True
        if use_exact:
            pmf = m.materialize_pmf(model)
            biased = biasing.size_bias_pmf(pmf)
            for name, f, _ in functions:
                lhs = pmf.expect(lambda k: k * f(k))
                rhs = alpha * biased.expect(f)
                out.append(IdentityResidual(name, lhs, rhs, lhs - rhs, 0.0, True))
            return out
        n, ns = biasing.make_coupling(model).sample(rng, reps)
        n, ns = n.astype(float), ns.astype(float)
        return [_paired(name, n * f(n), alpha * f(ns)) for name, f, _ in functions]
    if kind == "zero":
        mom = model.moments
        pmf = model.finite_pmf()
        use_exact = exact if exact is not None else pmf is not None
        if use_exact:
            dens = biasing.non_zero_bias_density(model).shift(-mom.a)
            centered = pmf.support - mom.a
            for name, f, _ in functions:
                lhs = float(np.sum(pmf.probs * centered * f(centered)))
                rhs = mom.c2 * dens.expect_derivative(f)
                out.append(IdentityResidual(name, lhs, rhs, lhs - rhs, 0.0, True))
            return out
        x = model.sample(rng, reps) - mom.a
        y = biasing.non_zero_bias_sample(model, rng, reps) - mom.a
        return [_paired(name, x * f(x), mom.c2 * fp(y)) for name, f, fp in functions]
    if kind == "wstar":
        if summand is None:
            raise InvalidParameter("wstar needs a summand model")
        if abs(summand.moments.a) > bounds.MEAN_ZERO_TOL:
            raise NonzeroMean("the W* identity needs centered summands")
        w, ws = wstar_sample(model, summand, rng, reps)
        return [_paired(name, w * f(w), fp(ws)) for name, f, fp in functions]
    raise InvalidParameter(f"unknown identity kind {kind!r}")


# ------------------------------------------------------------- concentration


@dataclass(frozen=True)
class ConcentrationResult:
    n: int
    t: float
    u: float
    empirical: float
    std_error: float
    bound: float

    @property
    def passed(self) -> bool:
        return self.empirical - 4.0 * self.std_error <= self.bound


def concentration_check(
    n: int,
    summand: m.SummandModel,
    t: float,
    u: float,
    reps: int = 1_000_000,
    seed: int = DEFAULT_SEED,
    *,
    index: m.IndexModel | None = None,
    constants: bounds.BoundConstants | None = None,
) -> ConcentrationResult:
    """Empirical P(t < W_n <= u) against σ(u-t)/(c√(2πn)) + 2C_K d³/(c³√n).

    W_n = (S_n - αa)/σ uses the moments of ``index`` (a constant index n by default).
    """
    if n < 1 or not t < u:
        raise InvalidParameter("need n >= 1 and t < u")
    mom = summand.moments
    if not mom.c2 > 0:
        raise DegenerateSum("concentration bound needs c > 0")
    constants = constants or bounds.BoundConstants()
    index = index or m.Dirac(n)
    mu, sigma = _standardizer(index, summand)
    rng = stream(seed, n, _TAG_CONCENTRATION)
    w = (summand.sample_sums(rng, np.full(reps, n)) - mu) / sigma
    p = float(np.mean((w > t) & (w <= u)))
    se = math.sqrt(max(p * (1 - p), 1.0 / reps) / reps)
    bound = sigma * (u - t) / (mom.c * math.sqrt(2 * math.pi * n)) + constants.two_ck * mom.d3 / (mom.c**3 * math.sqrt(n))
    return ConcentrationResult(n, t, u, p, se, bound)


def coupling_marginal_check(coupling: biasing.SizeBiasCoupling, reps: int = 1_000_000, seed: int = DEFAULT_SEED):
    """TV distance between sampled N^s and the exact size-bias pmf, with its MC noise scale.

    The noise scale is E[TV] under exact sampling, ½ Σ √(2 q_k (1-q_k) / (π R)).
    """
    _, ns = coupling.sample(stream(seed, 0, _TAG_COUPLING), reps)
    target = biasing.size_bias_pmf(m.materialize_pmf(coupling.index))
    keys, counts = np.unique(ns, return_counts=True)
    emp = m.DiscretePmf(keys.astype(float), counts / reps)
    tv = metrics.exact_total_variation(emp, target)
    q = target.probs
    noise = 0.5 * float(np.sum(np.sqrt(2.0 * q * (1.0 - q) / (math.pi * reps))))
    return tv, noise
