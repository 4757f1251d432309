"""Index and summand laws for random sums S = X_1 + ... + X_N.

Every model is an immutable dataclass exposing exact moments, a
(possibly truncated) pmf and a vectorized sampler driven by a
``numpy.random.Generator``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np
from scipy import stats

from .errors import DegenerateSum, InvalidParameter, UnboundedSupport

DEFAULT_TAIL_TOL = 1e-12
_MASS_TOL = 1e-12
_EXACT_HYPER_LIMIT = 200


def _trim_excess(probs):
    """Rescale library pmf values whose rounding pushes the total a hair above 1."""
    probs = np.asarray(probs, dtype=float)
    mass = math.fsum(probs)
    return probs / mass if 1.0 < mass < 1.0 + 1e-9 else probs


def _frozen(arr, dtype=float):
    out = np.array(arr, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class DiscretePmf:
    """Finite pmf on sorted support points; ``tail_defect`` bounds omitted mass."""

    support: np.ndarray
    probs: np.ndarray
    tail_defect: float = 0.0

    def __post_init__(self):
        support = _frozen(self.support)
        probs = _frozen(self.probs)
        if support.ndim != 1 or support.shape != probs.shape:
            raise InvalidParameter("support and probs must be 1-d arrays of equal length")
        if support.size == 0:
            raise InvalidParameter("empty pmf")
        if np.any(np.diff(support) <= 0):
            raise InvalidParameter("support must be strictly increasing")
        if np.any(probs < 0):
            raise InvalidParameter("negative probability")
        if not 0.0 <= self.tail_defect:
            raise InvalidParameter("tail_defect must be nonnegative")
        # tail_defect is an upper bound on omitted mass, so only one side is tight
        mass = math.fsum(probs)
        if mass > 1.0 + _MASS_TOL or mass + self.tail_defect < 1.0 - _MASS_TOL:
            raise InvalidParameter(f"probabilities sum to {mass!r} with tail bound {self.tail_defect!r}")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def from_mapping(cls, mapping, tail_defect=0.0):
        items = sorted((float(k), float(v)) for k, v in mapping.items())
        return cls([k for k, _ in items], [v for _, v in items], tail_defect)

    @classmethod
    def from_csv(cls, path):
        """Read ``value,probability`` rows; a non-numeric first row is a header."""
        rows = np.genfromtxt(path, delimiter=",", dtype=float)
        rows = np.atleast_2d(rows)
        rows = rows[~np.isnan(rows).any(axis=1)]
        order = np.argsort(rows[:, 0])
        return cls(rows[order, 0], rows[order, 1])

    def __len__(self):
        return self.support.size

    def expect(self, func) -> float:
        return math.fsum(self.probs * func(self.support))

    @property
    def mean(self) -> float:
        return self.expect(lambda x: x)

    def raw_moment(self, k: int) -> float:
        return self.expect(lambda x: x**k)

    def cdf(self, points) -> np.ndarray:
        """Right-continuous CDF evaluated at ``points``."""
        cum = np.cumsum(self.probs)
        idx = np.searchsorted(self.support, np.asarray(points, dtype=float), side="right")
        return np.where(idx > 0, cum[np.maximum(idx - 1, 0)], 0.0)

    def as_dict(self):
        return dict(zip(self.support.tolist(), self.probs.tolist()))


@dataclass(frozen=True)
class SummandMoments:
    a: float
    b2: float
    c2: float
    d3: float

    @property
    def b(self):
        return math.sqrt(self.b2)

    @property
    def c(self):
        return math.sqrt(self.c2)


@dataclass(frozen=True)
class IndexMoments:
    alpha: float
    beta2: float
    gamma2: float
    delta3: float

    @property
    def gamma(self):
        return math.sqrt(self.gamma2)


@dataclass(frozen=True)
class RandomSumMoments:
    mu: float
    sigma2: float

    @property
    def sigma(self):
        return math.sqrt(self.sigma2)


# ---------------------------------------------------------------- summands


class SummandModel:
    """Law of a single summand X_1."""

    @cached_property
    def moments(self) -> SummandMoments:
        return self._moments()

    def _moments(self) -> SummandMoments:
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        raise NotImplementedError

    def sample_sums(self, rng: np.random.Generator, counts) -> np.ndarray:
        """Draw S_k = X_1 + ... + X_k independently for each entry k of ``counts``."""
        counts = np.asarray(counts, dtype=np.int64)
        draws = self.sample(rng, int(counts.sum()))
        owner = np.repeat(np.arange(counts.size), counts)
        return np.bincount(owner, weights=draws, minlength=counts.size)

    def finite_pmf(self) -> DiscretePmf | None:
        """The law as a pmf when it has finite support, else None."""
        return None


@dataclass(frozen=True)
class Constant(SummandModel):
    value: float

    def _moments(self):
        return SummandMoments(self.value, self.value**2, 0.0, 0.0)

    def sample(self, rng, count):
        return np.full(count, float(self.value))

    def sample_sums(self, rng, counts):
        return self.value * np.asarray(counts, dtype=float)

    def finite_pmf(self):
        return DiscretePmf([self.value], [1.0])

    @property
    def spec(self):
        return f"const:v={self.value!r}"


@dataclass(frozen=True)
class TwoPoint(SummandModel):
    """X = x1 with probability p, x0 otherwise."""

    x0: float
    x1: float
    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise InvalidParameter(f"p={self.p} outside [0, 1]")
        if not self.x0 < self.x1:
            raise InvalidParameter("two-point law needs x0 < x1")

    def _moments(self):
        p, q = self.p, 1.0 - self.p
        gap = self.x1 - self.x0
        a = q * self.x0 + p * self.x1
        c2 = gap * gap * p * q
        d3 = abs(gap) ** 3 * p * q * (p * p + q * q)
        return SummandMoments(a, a * a + c2, c2, d3)

    def sample(self, rng, count):
        hits = rng.random(count) < self.p
        return np.where(hits, float(self.x1), float(self.x0))

    def sample_sums(self, rng, counts):
        counts = np.asarray(counts, dtype=np.int64)
        ones = rng.binomial(counts, self.p)
        return self.x0 * counts + (self.x1 - self.x0) * ones

    def finite_pmf(self):
        if self.p in (0.0, 1.0):
            return DiscretePmf([self.x1 if self.p else self.x0], [1.0])
        return DiscretePmf([self.x0, self.x1], [1.0 - self.p, self.p])

    @property
    def spec(self):
        return f"twopoint:x0={self.x0!r},x1={self.x1!r},p={self.p!r}"


class Bernoulli(TwoPoint):
    def __init__(self, p: float):
        super().__init__(0.0, 1.0, p)

    @property
    def spec(self):
        return f"bern:p={self.p!r}"

    def __repr__(self):
        return f"Bernoulli(p={self.p!r})"


@dataclass(frozen=True)
class Exponential(SummandModel):
    rate: float

    def __post_init__(self):
        if not self.rate > 0:
            raise InvalidParameter("rate must be positive")

    def _moments(self):
        m = 1.0 / self.rate
        # E|X - 1/rate|^3 = (12/e - 2) / rate^3
        return SummandMoments(m, 2 * m * m, m * m, (12.0 / math.e - 2.0) * m**3)

    def sample(self, rng, count):
        return rng.exponential(1.0 / self.rate, count)

    def sample_sums(self, rng, counts):
        counts = np.asarray(counts, dtype=np.int64)
        # Gamma(k, scale) is the law of k i.i.d. exponentials; shape 0 gives 0.
        return rng.gamma(counts.astype(float), 1.0 / self.rate)

    @property
    def spec(self):
        return f"exp:rate={self.rate!r}"


@dataclass(frozen=True)
class Uniform(SummandModel):
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise InvalidParameter("uniform law needs lo < hi")

    def _moments(self):
        a = 0.5 * (self.lo + self.hi)
        h = 0.5 * (self.hi - self.lo)
        c2 = h * h / 3.0
        return SummandMoments(a, a * a + c2, c2, h**3 / 4.0)

    def sample(self, rng, count):
        return rng.uniform(self.lo, self.hi, count)

    @property
    def spec(self):
        return f"uniform:lo={self.lo!r},hi={self.hi!r}"


@dataclass(frozen=True, eq=False)
class FiniteSummand(SummandModel):
    pmf: DiscretePmf

    def __post_init__(self):
        if self.pmf.tail_defect > _MASS_TOL:
            raise InvalidParameter("summand pmf must be complete")

    def _moments(self):
        a = self.pmf.mean
        b2 = self.pmf.raw_moment(2)
        c2 = self.pmf.expect(lambda x: (x - a) ** 2)
        d3 = self.pmf.expect(lambda x: np.abs(x - a) ** 3)
        return SummandMoments(a, b2, c2, d3)

    def sample(self, rng, count):
        cum = np.cumsum(self.pmf.probs)
        idx = np.searchsorted(cum / cum[-1], rng.random(count), side="right")
        return self.pmf.support[np.minimum(idx, len(self.pmf) - 1)]

    def finite_pmf(self):
        return self.pmf

    @property
    def spec(self):
        return "pmf:" + ";".join(f"{x!r}={p!r}" for x, p in zip(self.pmf.support, self.pmf.probs))


def summand_moments(model: SummandModel) -> tuple[float, float, float, float]:
    """(a, b², c², d³) of the summand law."""
    m = model.moments
    return m.a, m.b2, m.c2, m.d3


# ------------------------------------------------------------------ indices


def _moments_from_factorial(f1, f2, f3) -> IndexMoments:
    beta2 = f2 + f1
    delta3 = f3 + 3 * f2 + f1
    return IndexMoments(f1, beta2, beta2 - f1 * f1, delta3)


class IndexModel:
    """Law of the nonnegative integer summation index N."""

    @cached_property
    def moments(self) -> IndexMoments:
        return self._moments()

    def _moments(self) -> IndexMoments:
        m = self.pmf()
        alpha = m.mean
        beta2 = m.raw_moment(2)
        return IndexMoments(alpha, beta2, m.expect(lambda x: (x - alpha) ** 2), m.raw_moment(3))

    def pmf(self, tail_tol: float = DEFAULT_TAIL_TOL) -> DiscretePmf:
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        raise NotImplementedError

    @property
    def is_finite(self) -> bool:
        return False


def _check_tail_tol(tail_tol):
    if not 0.0 < tail_tol <= 1e-6:
        raise InvalidParameter("tail_tol must lie in (0, 1e-6]")


@dataclass(frozen=True)
class Dirac(IndexModel):
    n: int

    def __post_init__(self):
        if self.n < 0 or int(self.n) != self.n:
            raise InvalidParameter("Dirac index needs a nonnegative integer")

    def _moments(self):
        n = float(self.n)
        return IndexMoments(n, n * n, 0.0, n**3)

    def pmf(self, tail_tol=DEFAULT_TAIL_TOL):
        return DiscretePmf([self.n], [1.0])

    def sample(self, rng, count):
        return np.full(count, self.n, dtype=np.int64)

    @property
    def is_finite(self):
        return True

    @property
    def spec(self):
        return f"dirac:n={self.n}"


def _poisson_chernoff(lam, k):
    """Upper bound on P(N >= k) for N ~ Poisson(lam), valid for k > lam."""
    return math.exp(-lam + k * (1.0 + math.log(lam / k)))


@dataclass(frozen=True)
class Poisson(IndexModel):
    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise InvalidParameter("Poisson rate must be positive")

    def _moments(self):
        lam = self.lam
        return IndexMoments(lam, lam * lam + lam, lam, lam**3 + 3 * lam**2 + lam)

    def pmf(self, tail_tol=DEFAULT_TAIL_TOL):
        _check_tail_tol(tail_tol)
        k = max(int(math.floor(self.lam)) + 1, 1)
        while _poisson_chernoff(self.lam, k) > tail_tol:
            k += 1 + k // 64
        defect = _poisson_chernoff(self.lam, k)
        ks = np.arange(k)
        probs = _trim_excess(stats.poisson.pmf(ks, self.lam))
        return DiscretePmf(ks, probs, defect)

    def sample(self, rng, count):
        return rng.poisson(self.lam, count)

    @property
    def spec(self):
        return f"poisson:lambda={self.lam!r}"


@dataclass(frozen=True)
class Binomial(IndexModel):
    n: int
    p: float

    def __post_init__(self):
        if self.n < 1 or int(self.n) != self.n:
            raise InvalidParameter("Binomial n must be a positive integer")
        if not 0.0 < self.p <= 1.0:
            raise InvalidParameter("Binomial p must lie in (0, 1]")

    def _moments(self):
        n, p = self.n, self.p
        return _moments_from_factorial(n * p, n * (n - 1) * p**2, n * (n - 1) * (n - 2) * p**3)

    def pmf(self, tail_tol=DEFAULT_TAIL_TOL):
        ks = np.arange(self.n + 1)
        return DiscretePmf(ks, _trim_excess(stats.binom.pmf(ks, self.n, self.p)))

    def sample(self, rng, count):
        return rng.binomial(self.n, self.p, count)

    @property
    def is_finite(self):
        return True

    @property
    def spec(self):
        return f"binomial:n={self.n},p={self.p!r}"


def _falling(m, k):
    out = 1
    for i in range(k):
        out *= m - i
    return out


@dataclass(frozen=True)
class Hypergeometric(IndexModel):
    """Number of red balls among n draws without replacement from r red, s silver."""

    n: int
    r: int
    s: int

    def __post_init__(self):
        for name in ("n", "r", "s"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise InvalidParameter(f"Hypergeometric {name} must be a positive integer")
        if self.n > self.r + self.s:
            raise InvalidParameter("Hypergeometric needs n <= r + s")

    def _moments(self):
        n, r, t = self.n, self.r, self.r + self.s
        f = [Fraction(_falling(n, k) * _falling(r, k), _falling(t, k)) for k in (1, 2, 3)]
        return _moments_from_factorial(*(float(x) for x in f))

    def exact_pmf(self) -> dict[int, Fraction]:
        total = math.comb(self.r + self.s, self.n)
        lo, hi = max(0, self.n - self.s), min(self.n, self.r)
        return {k: Fraction(math.comb(self.r, k) * math.comb(self.s, self.n - k), total) for k in range(lo, hi + 1)}

    def pmf(self, tail_tol=DEFAULT_TAIL_TOL):
        if self.r + self.s <= _EXACT_HYPER_LIMIT:
            exact = self.exact_pmf()
            return DiscretePmf(list(exact), [float(v) for v in exact.values()])
        ks = np.arange(max(0, self.n - self.s), min(self.n, self.r) + 1)
        return DiscretePmf(ks, _trim_excess(stats.hypergeom.pmf(ks, self.r + self.s, self.r, self.n)))

    def sample(self, rng, count):
        return rng.hypergeometric(self.r, self.s, self.n, count)

    @property
    def is_finite(self):
        return True

    @property
    def spec(self):
        return f"hyper:n={self.n},r={self.r},s={self.s}"


@dataclass(frozen=True)
class NegativeBinomial(IndexModel):
    """Failures before the r-th success, success probability q.

    P(N = k) = C(k + r - 1, k) q^r (1 - q)^k, matching
    ``numpy.random.Generator.negative_binomial(r, q)``.
    """

    r: float
    q: float

    def __post_init__(self):
        if not self.r > 0:
            raise InvalidParameter("negative binomial r must be positive")
        if not 0.0 < self.q < 1.0:
            raise InvalidParameter("negative binomial q must lie in (0, 1)")

    def _moments(self):
        r, odds = self.r, (1.0 - self.q) / self.q
        return _moments_from_factorial(r * odds, r * (r + 1) * odds**2, r * (r + 1) * (r + 2) * odds**3)

    def _chernoff(self, k):
        r, q = self.r, self.q
        z = k / ((1.0 - q) * (k + r))
        return math.exp(r * math.log(q) - r * math.log(1.0 - (1.0 - q) * z) - k * math.log(z))

    def pmf(self, tail_tol=DEFAULT_TAIL_TOL):
        _check_tail_tol(tail_tol)
        k = int(math.floor(self.moments.alpha)) + 1
        while self._chernoff(k) > tail_tol:
            k += 1 + k // 64
        defect = self._chernoff(k)
        ks = np.arange(k)
        probs = _trim_excess(stats.nbinom.pmf(ks, self.r, self.q))
        return DiscretePmf(ks, probs, defect)

    def sample(self, rng, count):
        return rng.negative_binomial(self.r, self.q, count)

    @property
    def spec(self):
        return f"negbin:r={self.r!r},q={self.q!r}"


@dataclass(frozen=True)
class Convolution(IndexModel):
    """N = N_1 + ... + N_m for i.i.d. copies N_j of ``base``."""

    base: IndexModel
    copies: int

    def __post_init__(self):
        if self.copies < 1 or int(self.copies) != self.copies:
            raise InvalidParameter("copies must be a positive integer")

    def _moments(self):
        b, m = self.base.moments, self.copies
        k1, k2 = m * b.alpha, m * b.gamma2
        k3_base = b.delta3 - 3 * b.alpha * b.beta2 + 2 * b.alpha**3
        k3 = m * k3_base
        beta2 = k2 + k1 * k1
        return IndexMoments(k1, beta2, k2, k3 + 3 * k2 * k1 + k1**3)

    def pmf(self, tail_tol=DEFAULT_TAIL_TOL):
        base = self.base.pmf(tail_tol / self.copies)
        shift = int(base.support[0])
        dense = np.zeros(int(base.support[-1]) - shift + 1)
        dense[base.support.astype(int) - shift] = base.probs
        out = np.array([1.0])
        for _ in range(self.copies):
            out = np.convolve(out, dense)
        ks = np.arange(out.size) + shift * self.copies
        keep = out > 0
        defect = min(self.copies * base.tail_defect, 1.0)
        return DiscretePmf(ks[keep], out[keep], defect)

    def sample(self, rng, count):
        total = np.zeros(count, dtype=np.int64)
        for _ in range(self.copies):
            total += self.base.sample(rng, count)
        return total

    @property
    def is_finite(self):
        return self.base.is_finite

    @property
    def spec(self):
        return f"conv[{self.copies}]:{self.base.spec}"


@dataclass(frozen=True, eq=False)
class FiniteIndex(IndexModel):
    table: DiscretePmf

    def __post_init__(self):
        sup = self.table.support
        if np.any(sup < 0) or np.any(sup != np.round(sup)):
            raise InvalidParameter("index support must be nonnegative integers")
        if self.table.tail_defect > 1e-12:
            raise InvalidParameter("index pmf tail_defect must not exceed 1e-12")

    def pmf(self, tail_tol=DEFAULT_TAIL_TOL):
        return self.table

    def sample(self, rng, count):
        cum = np.cumsum(self.table.probs)
        idx = np.searchsorted(cum / cum[-1], rng.random(count), side="right")
        return self.table.support[np.minimum(idx, len(self.table) - 1)].astype(np.int64)

    @property
    def is_finite(self):
        return True

    @property
    def spec(self):
        return "pmf:" + ";".join(f"{int(k)}={p!r}" for k, p in zip(self.table.support, self.table.probs))


def index_moments(model: IndexModel) -> tuple[float, float, float, float]:
    """(α, β², γ², δ³) of the index law."""
    m = model.moments
    return m.alpha, m.beta2, m.gamma2, m.delta3


def materialize_pmf(model: IndexModel, tail_tol: float = DEFAULT_TAIL_TOL) -> DiscretePmf:
    _check_tail_tol(tail_tol)
    out = model.pmf(tail_tol)
    if out.tail_defect > tail_tol:
        raise UnboundedSupport(f"could not certify tail mass below {tail_tol}")
    return out


def random_sum_moments(index: IndexModel, summand: SummandModel) -> RandomSumMoments:
    """Mean αa and variance αc² + a²γ² of the random sum."""
    im, sm = index.moments, summand.moments
    if not im.alpha > 0:
        raise InvalidParameter("index mean must be positive")
    sigma2 = im.alpha * sm.c2 + sm.a**2 * im.gamma2
    if sigma2 <= 0:
        raise DegenerateSum("Var(S) = 0; W is undefined")
    return RandomSumMoments(im.alpha * sm.a, sigma2)


def sample(model, rng: np.random.Generator, count: int) -> np.ndarray:
    return model.sample(rng, count)
