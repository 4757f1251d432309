"""Size-bias couplings of the index and zero-bias laws of the summands.

For a nonnegative N with mean α > 0 the size-biased law N^s has pmf
k·p_k/α.  A coupling (N, N^s) is described by its joint pmf over pairs
(n, n_s) and by a sampler; everything the error bounds need is a
functional of the increment D = N^s - N and is collected in
``CouplingStatistics``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, fields

import numpy as np
from scipy import stats

from . import models as m
from .errors import (
    ExactUnavailable,
    IncompatibleKind,
    InvalidCoupling,
    InvalidParameter,
    NotCentered,
    ZeroMean,
    ZeroVariance,
)

EXACT_SUPPORT_LIMIT = 100_000
_MARGINAL_TOL = 1e-9


def size_bias_pmf(pmf: m.DiscretePmf) -> m.DiscretePmf:
    """Reweight a pmf on [0, ∞) by x / mean."""
    if np.any(pmf.support < 0):
        raise InvalidParameter("size biasing needs nonnegative support")
    weights = pmf.support * pmf.probs
    total = math.fsum(weights)
    if not total > 0:
        raise ZeroMean("size biasing needs a positive mean")
    keep = weights > 0
    return m.DiscretePmf(pmf.support[keep], weights[keep] / total)


def size_bias_distance_identities(model: m.IndexModel, tail_tol: float = m.DEFAULT_TAIL_TOL):
    """(d_K, d_TV, d_W) between N and N^s from moments alone.

    d_K = d_TV = E|N - α| / (2α) and d_W = Var(N) / α.
    """
    mom = model.moments
    if not mom.alpha > 0:
        raise ZeroMean("index mean must be positive")
    pmf = m.materialize_pmf(model, tail_tol)
    mad = pmf.expect(lambda k: np.abs(k - mom.alpha))
    d_k = mad / (2.0 * mom.alpha)
    return d_k, d_k, mom.gamma2 / mom.alpha


# ----------------------------------------------------------------- couplings


class CouplingKind(str, enum.Enum):
    POISSON_SHIFT = "poisson-shift"
    DROP_ONE = "drop-one"
    MARKED_BALL = "marked-ball"
    QUANTILE = "quantile"
    IDENTITY = "identity"
    INFDIV = "infdiv"
    CONV_SINGLE = "conv-single"
    USER = "user"


@dataclass(frozen=True, eq=False)
class JointPmf:
    """Joint pmf of (N, N^s) on integer pairs, duplicates merged, sorted by (n, n_s)."""

    n: np.ndarray
    ns: np.ndarray
    prob: np.ndarray

    def __post_init__(self):
        n = np.asarray(self.n, dtype=np.int64)
        ns = np.asarray(self.ns, dtype=np.int64)
        prob = np.asarray(self.prob, dtype=float)
        if not n.shape == ns.shape == prob.shape:
            raise InvalidParameter("joint pmf arrays must have equal shapes")
        if np.any(prob < 0):
            raise InvalidParameter("negative joint probability")
        keep = prob > 0
        n, ns, prob = n[keep], ns[keep], prob[keep]
        pairs, inverse = np.unique(np.stack([n, ns], axis=1), axis=0, return_inverse=True)
        merged = np.bincount(inverse.ravel(), weights=prob, minlength=len(pairs))
        for name, arr in (("n", pairs[:, 0]), ("ns", pairs[:, 1]), ("prob", merged)):
            arr = np.ascontiguousarray(arr)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_csv(cls, path):
        """Rows ``n,n_s,probability``; a header row is skipped."""
        rows = np.atleast_2d(np.genfromtxt(path, delimiter=",", dtype=float))
        rows = rows[~np.isnan(rows).any(axis=1)]
        if rows.shape[0] == 0 or rows.shape[1] != 3:
            raise InvalidParameter(f"{path}: expected numeric rows n,n_s,probability")
        if np.any(rows[:, :2] != np.round(rows[:, :2])):
            raise InvalidParameter("joint pmf coordinates must be integers")
        return cls(rows[:, 0].astype(np.int64), rows[:, 1].astype(np.int64), rows[:, 2])

    @property
    def d(self):
        return self.ns - self.n

    def marginal(self, which: str) -> m.DiscretePmf:
        vals = self.n if which == "n" else self.ns
        keys, inverse = np.unique(vals, return_inverse=True)
        probs = np.bincount(inverse, weights=self.prob)
        return m.DiscretePmf(keys, probs, max(0.0, 1.0 - math.fsum(self.prob)))

    def sample(self, rng, count):
        cum = np.cumsum(self.prob)
        idx = np.searchsorted(cum / cum[-1], rng.random(count), side="right")
        idx = np.minimum(idx, self.prob.size - 1)
        return self.n[idx], self.ns[idx]


def _sample_from_pmf(pmf: m.DiscretePmf, u: np.ndarray) -> np.ndarray:
    """Generalized inverse F^{-1}(u) = inf{x : F(x) >= u}."""
    cum = np.cumsum(pmf.probs)
    cum = cum / cum[-1]
    idx = np.searchsorted(cum, u, side="left")
    return pmf.support[np.minimum(idx, len(pmf) - 1)]


def quantile_joint(p: m.DiscretePmf, q: m.DiscretePmf) -> JointPmf:
    """Joint law of (F_p^{-1}(U), F_q^{-1}(U)) for a common uniform U."""
    cp = np.cumsum(p.probs) / math.fsum(p.probs)
    cq = np.cumsum(q.probs) / math.fsum(q.probs)
    cp[-1] = cq[-1] = 1.0
    cuts = np.union1d(cp, cq)
    lengths = np.diff(np.concatenate([[0.0], cuts]))
    # each interval (u_{j-1}, u_j] maps to the first atom whose CDF reaches u_j
    i = np.searchsorted(cp, cuts, side="left")
    j = np.searchsorted(cq, cuts, side="left")
    i = np.minimum(i, len(p) - 1)
    j = np.minimum(j, len(q) - 1)
    return JointPmf(p.support[i].astype(np.int64), q.support[j].astype(np.int64), lengths)


def _geometric_pmf(q, tail_tol):
    """pmf of the failures before the first success, truncated with certified tail."""
    k = max(1, math.ceil(math.log(tail_tol) / math.log1p(-q)))
    ks = np.arange(k)
    return ks, q * (1.0 - q) ** ks, (1.0 - q) ** k


@dataclass(frozen=True, eq=False)
class SizeBiasCoupling:
    """A coupling (N, N^s) of an index law with its size-biased law."""

    index: m.IndexModel
    kind: CouplingKind
    user_joint: JointPmf | None = field(default=None, repr=False)
    tail_tol: float = m.DEFAULT_TAIL_TOL

    @property
    def nonnegative_increment(self) -> bool:
        """True for kinds that guarantee D >= 0 by construction."""
        return self.kind not in (CouplingKind.CONV_SINGLE, CouplingKind.USER)

    def joint_pmf(self) -> JointPmf:
        """Exact joint pmf (up to index-tail truncation at ``tail_tol``)."""
        idx, kind = self.index, self.kind
        if kind is CouplingKind.USER:
            return self.user_joint
        if kind is CouplingKind.IDENTITY:
            return JointPmf([idx.n], [idx.n], [1.0])
        if kind is CouplingKind.POISSON_SHIFT or (kind is CouplingKind.INFDIV and isinstance(idx, m.Poisson)):
            pmf = idx.pmf(self.tail_tol)
            k = pmf.support.astype(np.int64)
            return JointPmf(k, k + 1, pmf.probs)
        if kind is CouplingKind.INFDIV:
            pmf = idx.pmf(self.tail_tol / 2)
            g, gp, _ = _geometric_pmf(idx.q, self.tail_tol / 2)
            nn, gg = np.meshgrid(pmf.support.astype(np.int64), g, indexing="ij")
            self._check_size(nn.size)
            return JointPmf(nn.ravel(), (nn + 1 + gg).ravel(), np.outer(pmf.probs, gp).ravel())
        if kind is CouplingKind.DROP_ONE:
            rest = np.arange(idx.n)
            w = stats.binom.pmf(rest, idx.n - 1, idx.p)
            return JointPmf(
                np.concatenate([rest + 1, rest]),
                np.concatenate([rest + 1, rest + 1]),
                np.concatenate([idx.p * w, (1.0 - idx.p) * w]),
            )
        if kind is CouplingKind.MARKED_BALL:
            pmf = idx.pmf()
            k = pmf.support.astype(np.int64)
            move = (1.0 - k / idx.n) * (1.0 - k / idx.r)
            return JointPmf(
                np.concatenate([k, k]),
                np.concatenate([k + 1, k]),
                np.concatenate([pmf.probs * move, pmf.probs * (1.0 - move)]),
            )
        if kind is CouplingKind.QUANTILE:
            pmf = idx.pmf(self.tail_tol)
            self._check_size(len(pmf))
            return quantile_joint(pmf, size_bias_pmf(pmf))
        if kind is CouplingKind.CONV_SINGLE:
            base = idx.base.pmf(self.tail_tol / (idx.copies + 1))
            biased = size_bias_pmf(base)
            rest = m.Convolution(idx.base, idx.copies - 1).pmf(self.tail_tol) if idx.copies > 1 else m.DiscretePmf([0], [1.0])
            self._check_size(len(base) * len(biased) * len(rest))
            b1, b2, r = np.meshgrid(base.support, biased.support, rest.support, indexing="ij")
            w = base.probs[:, None, None] * biased.probs[None, :, None] * rest.probs[None, None, :]
            return JointPmf((b1 + r).ravel().astype(np.int64), (b2 + r).ravel().astype(np.int64), w.ravel())
        raise IncompatibleKind(kind)

    @staticmethod
    def _check_size(cells):
        if cells > EXACT_SUPPORT_LIMIT:
            raise ExactUnavailable(f"joint support of {cells} cells exceeds {EXACT_SUPPORT_LIMIT}")

    def sample(self, rng: np.random.Generator, count: int) -> tuple[np.ndarray, np.ndarray]:
        """Draw ``count`` i.i.d. pairs (N, N^s)."""
        idx, kind = self.index, self.kind
        if kind is CouplingKind.IDENTITY:
            n = idx.sample(rng, count)
            return n, n.copy()
        if kind is CouplingKind.POISSON_SHIFT:
            n = idx.sample(rng, count)
            return n, n + 1
        if kind is CouplingKind.INFDIV:
            n = idx.sample(rng, count)
            if isinstance(idx, m.Poisson):
                return n, n + 1
            return n, n + 1 + rng.negative_binomial(1, idx.q, count)
        if kind is CouplingKind.DROP_ONE:
            first = (rng.random(count) < idx.p).astype(np.int64)
            rest = rng.binomial(idx.n - 1, idx.p, count) if idx.n > 1 else np.zeros(count, dtype=np.int64)
            return first + rest, rest + 1
        if kind is CouplingKind.MARKED_BALL:
            return _marked_ball_draws(idx, rng, count)
        if kind is CouplingKind.QUANTILE:
            pmf = idx.pmf(self.tail_tol)
            u = rng.random(count)
            n = _sample_from_pmf(pmf, u).astype(np.int64)
            return n, _sample_from_pmf(size_bias_pmf(pmf), u).astype(np.int64)
        if kind is CouplingKind.CONV_SINGLE:
            first = idx.base.sample(rng, count)
            rest = m.Convolution(idx.base, idx.copies - 1).sample(rng, count) if idx.copies > 1 else 0
            biased = _sample_from_pmf(size_bias_pmf(idx.base.pmf(self.tail_tol)), rng.random(count))
            return first + rest, biased.astype(np.int64) + rest
        return self.joint_pmf().sample(rng, count)


def _marked_ball_draws(idx: m.Hypergeometric, rng, count):
    """Urn construction: first draw X_1, remaining draws, one fixed marked red ball.

    If X_1 = 1 then N^s = N; otherwise N^s = N + 1 - 1{marked ball drawn later}.
    Given X_1 = 0 and R red balls among draws 2..n, the marked ball is among
    them with probability R / r.
    """
    n, r, s = idx.n, idx.r, idx.s
    first = (rng.random(count) < r / (r + s)).astype(np.int64)
    rest = np.zeros(count, dtype=np.int64)
    if n > 1:
        for x1 in (0, 1):
            sel = first == x1
            good, bad = r - x1, s - (1 - x1)
            if good == 0:
                continue
            if bad == 0:
                rest[sel] = n - 1
                continue
            rest[sel] = rng.hypergeometric(good, bad, n - 1, int(sel.sum()))
    total = first + rest
    marked = rng.random(count) < rest / r
    ns = np.where(first == 1, total, total + 1 - marked)
    return total, ns


_DEFAULT_KIND = {
    m.Dirac: CouplingKind.IDENTITY,
    m.Poisson: CouplingKind.POISSON_SHIFT,
    m.Binomial: CouplingKind.DROP_ONE,
    m.Hypergeometric: CouplingKind.MARKED_BALL,
    m.NegativeBinomial: CouplingKind.INFDIV,
    m.Convolution: CouplingKind.CONV_SINGLE,
    m.FiniteIndex: CouplingKind.QUANTILE,
}

_ALLOWED = {
    CouplingKind.IDENTITY: (m.Dirac,),
    CouplingKind.POISSON_SHIFT: (m.Poisson,),
    CouplingKind.DROP_ONE: (m.Binomial,),
    CouplingKind.MARKED_BALL: (m.Hypergeometric,),
    CouplingKind.INFDIV: (m.Poisson, m.NegativeBinomial),
    CouplingKind.CONV_SINGLE: (m.Convolution,),
}


def default_kind(model: m.IndexModel) -> CouplingKind:
    return _DEFAULT_KIND.get(type(model), CouplingKind.QUANTILE)


def make_coupling(model: m.IndexModel, kind: CouplingKind | str | None = None, *, joint: JointPmf | None = None):
    """Build a size-bias coupling of ``model``; ``kind=None`` picks the family default."""
    if not model.moments.alpha > 0:
        raise ZeroMean("size-bias coupling needs a positive index mean")
    kind = default_kind(model) if kind is None else CouplingKind(kind)
    if kind is CouplingKind.USER:
        if joint is None:
            raise InvalidParameter("user coupling needs a joint pmf")
        _check_user_joint(model, joint)
        return SizeBiasCoupling(model, kind, joint)
    allowed = _ALLOWED.get(kind)
    if allowed is not None and not isinstance(model, allowed):
        raise IncompatibleKind(f"{kind.value} coupling does not apply to {type(model).__name__}")
    if kind is CouplingKind.MARKED_BALL and model.r < 1:
        raise IncompatibleKind("marked-ball coupling needs at least one red ball")
    return SizeBiasCoupling(model, kind)


def _check_user_joint(model, joint):
    first = joint.marginal("n")
    second = joint.marginal("ns")
    target = model.pmf()
    expected_bias = size_bias_pmf(target)
    for got, want, label in ((first, target, "N"), (second, expected_bias, "N^s")):
        keys = np.union1d(got.support, want.support)
        gap = np.abs(_dense(got, keys) - _dense(want, keys)).max()
        if gap > _MARGINAL_TOL:
            raise InvalidCoupling(f"marginal of {label} differs from the required law by {gap:.3g}")


def _dense(pmf, keys):
    out = np.zeros(keys.size)
    out[np.searchsorted(keys, pmf.support)] = pmf.probs
    return out


def coupling_from_csv(model: m.IndexModel, path) -> SizeBiasCoupling:
    return make_coupling(model, CouplingKind.USER, joint=JointPmf.from_csv(path))


# ---------------------------------------------------------------- statistics


@dataclass(frozen=True)
class Provenance:
    mode: str  # "exact" or "monte_carlo"
    reps: int | None = None
    seed: int | None = None
    std_errors: dict | None = None


@dataclass(frozen=True)
class CouplingStatistics:
    """Every functional of (N, N^s, D) consumed by the bounds."""

    e_d: float
    e_d2: float
    e_d2_neg: float
    var_cond: float
    e_cond_d2_sq: float
    e_cond_d2_neg_sq: float
    p_n0: float
    p_dneg: float
    e_d_pos_ninvhalf: float
    e_d2_pos_ninvhalf: float
    e_pos_ninvhalf: float
    e_ninvhalf: float
    e_d2_neg_nsinvhalf: float
    e_ninv: float
    provenance: Provenance = Provenance("exact")

    @property
    def e_d2_pos(self) -> float:
        return max(self.e_d2 - self.e_d2_neg, 0.0)

    def values(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self) if f.name != "provenance"}


STAT_FIELDS = tuple(f.name for f in fields(CouplingStatistics) if f.name != "provenance")


def _group_mean(keys, values, weights):
    """Return (group weights, weighted group means of values) over distinct keys."""
    uniq, inv = np.unique(keys, return_inverse=True)
    w = np.bincount(inv, weights=weights)
    s = np.bincount(inv, weights=weights * values)
    return w, np.divide(s, w, out=np.zeros_like(s), where=w > 0)


def _stats_from_pairs(n, ns, w) -> dict[str, float]:
    n = np.asarray(n, dtype=float)
    ns = np.asarray(ns, dtype=float)
    w = np.asarray(w, dtype=float)
    w = w / math.fsum(w)
    d = ns - n
    pos = d >= 0
    neg = ~pos
    with np.errstate(divide="ignore"):
        n_invhalf = np.where(n >= 1, 1.0 / np.sqrt(np.maximum(n, 1)), 0.0)
        n_inv = np.where(n >= 1, 1.0 / np.maximum(n, 1), 0.0)
        ns_invhalf = np.where(ns >= 1, 1.0 / np.sqrt(np.maximum(ns, 1)), 0.0)

    def e(x):
        return math.fsum(w * x)

    gw, cond_d = _group_mean(n, d, w)
    mean_cond = math.fsum(gw * cond_d)
    var_cond = max(math.fsum(gw * (cond_d - mean_cond) ** 2), 0.0)
    _, cond_d2_pos = _group_mean(n, np.where(pos, d * d, 0.0), w)
    gws, cond_d2_neg = _group_mean(ns, np.where(neg, d * d, 0.0), w)
    return {
        "e_d": e(d),
        "e_d2": e(d * d),
        "e_d2_neg": e(np.where(neg, d * d, 0.0)),
        "var_cond": var_cond,
        "e_cond_d2_sq": math.fsum(gw * cond_d2_pos**2),
        "e_cond_d2_neg_sq": math.fsum(gws * cond_d2_neg**2),
        "p_n0": e(n == 0),
        "p_dneg": e(neg),
        "e_d_pos_ninvhalf": e(np.where(pos, d, 0.0) * n_invhalf),
        "e_d2_pos_ninvhalf": e(np.where(pos, d * d, 0.0) * n_invhalf),
        "e_pos_ninvhalf": e(pos * n_invhalf),
        "e_ninvhalf": e(n_invhalf),
        "e_d2_neg_nsinvhalf": e(np.where(neg, d * d, 0.0) * ns_invhalf),
        "e_ninv": e(n_inv),
    }


def coupling_statistics(
    coupling: SizeBiasCoupling,
    mode: str = "exact",
    *,
    reps: int = 1_000_000,
    seed: int = 0,
    batches: int = 20,
) -> CouplingStatistics:
    """Evaluate all D-functionals exactly (joint pmf) or by Monte Carlo.

    Monte Carlo standard errors come from ``batches`` independent batch
    estimates, which also covers the nonlinear conditional functionals.
    """
    if mode == "exact":
        joint = coupling.joint_pmf()
        if joint.prob.size > EXACT_SUPPORT_LIMIT:
            raise ExactUnavailable("joint support too large for exact enumeration")
        return CouplingStatistics(**_stats_from_pairs(joint.n, joint.ns, joint.prob))
    if mode not in ("mc", "monte_carlo"):
        raise InvalidParameter(f"unknown mode {mode!r}")
    from .montecarlo import stream

    per = reps // batches
    rows = []
    for b in range(batches):
        n, ns = coupling.sample(stream(seed, b, tag=1), per)
        rows.append(_stats_from_pairs(n, ns, np.ones(per)))
    est = {k: float(np.mean([r[k] for r in rows])) for k in STAT_FIELDS}
    se = {k: float(np.std([r[k] for r in rows], ddof=1) / math.sqrt(batches)) for k in STAT_FIELDS}
    prov = Provenance("monte_carlo", per * batches, seed, se)
    return CouplingStatistics(**est, provenance=prov)


def index_statistics(model: m.IndexModel, kind=None, tail_tol=m.DEFAULT_TAIL_TOL) -> CouplingStatistics:
    """Exact statistics for the default (or given) coupling of ``model``."""
    return coupling_statistics(make_coupling(model, kind))


# ----------------------------------------------------------------- zero bias


@dataclass(frozen=True, eq=False)
class StepDensity:
    """Piecewise-constant density: ``values[i]`` on (breakpoints[i], breakpoints[i+1])."""

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        bp = np.asarray(self.breakpoints, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if bp.size != vals.size + 1 or np.any(np.diff(bp) <= 0):
            raise InvalidParameter("breakpoints must be increasing with one more entry than values")
        if np.any(vals < 0):
            raise InvalidParameter("density must be nonnegative")
        mass = math.fsum(vals * np.diff(bp))
        if abs(mass - 1.0) > 1e-12:
            raise InvalidParameter(f"density integrates to {mass!r}")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)

    def shift(self, by: float) -> "StepDensity":
        return StepDensity(self.breakpoints + by, self.values)

    def pdf(self, y):
        y = np.asarray(y, dtype=float)
        i = np.searchsorted(self.breakpoints, y, side="right") - 1
        inside = (i >= 0) & (i < self.values.size)
        return np.where(inside, self.values[np.clip(i, 0, self.values.size - 1)], 0.0)

    def _cum(self):
        return np.concatenate([[0.0], np.cumsum(self.values * np.diff(self.breakpoints))])

    def cdf(self, y):
        y = np.asarray(y, dtype=float)
        cum = self._cum()
        i = np.clip(np.searchsorted(self.breakpoints, y, side="right") - 1, 0, self.values.size - 1)
        inner = cum[i] + self.values[i] * (y - self.breakpoints[i])
        return np.clip(np.where(y <= self.breakpoints[0], 0.0, np.where(y >= self.breakpoints[-1], 1.0, inner)), 0.0, 1.0)

    def ppf(self, u):
        """Inverse of the piecewise-linear CDF."""
        u = np.asarray(u, dtype=float)
        cum = self._cum()
        cum = cum / cum[-1]
        i = np.searchsorted(cum, u, side="right") - 1
        i = np.clip(i, 0, self.values.size - 1)
        # skip zero-density pieces: searchsorted(right) already lands past flat stretches
        return self.breakpoints[i] + (u - cum[i]) / np.where(self.values[i] > 0, self.values[i], np.inf)

    def sample(self, rng, count):
        return self.ppf(rng.random(count))

    def expect_derivative(self, f) -> float:
        """E[f'(Y)] for Y with this density, exactly: Σ v_i (f(x_{i+1}) - f(x_i))."""
        fx = np.asarray(f(self.breakpoints), dtype=float)
        return math.fsum(self.values * np.diff(fx))


def zero_bias_density(pmf: m.DiscretePmf) -> StepDensity:
    """Zero-bias law of a centered finite pmf: density E[X 1{X > y}] / Var(X)."""
    if pmf.tail_defect > 1e-12:
        raise InvalidParameter("zero biasing needs a complete pmf")
    mean = pmf.mean
    if abs(mean) > 1e-12:
        raise NotCentered(f"pmf has mean {mean!r}")
    var = pmf.expect(lambda x: x * x)
    if not var > 0 or len(pmf) < 2:
        raise ZeroVariance("zero biasing needs positive variance")
    px = pmf.probs * pmf.support
    # tail sums E[X 1{X > x_i}] for i = 0..k-2, taken from whichever side cancels less
    upper = np.cumsum(px[::-1])[::-1][1:]
    lower = -np.cumsum(px)[:-1]
    tails = np.where(np.abs(upper) <= np.abs(lower), upper, lower)
    vals = np.clip(tails, 0.0, None) / var
    widths = np.diff(pmf.support)
    vals = vals / math.fsum(vals * widths)
    return StepDensity(pmf.support, vals)


def _centered_pmf(model: m.SummandModel):
    pmf = model.finite_pmf()
    if pmf is None:
        return None, None
    a = model.moments.a
    return m.DiscretePmf(pmf.support - a, pmf.probs), a


def non_zero_bias_sample(model: m.SummandModel, rng: np.random.Generator, count: int = 1) -> np.ndarray:
    """Draws from the non-zero-biased law (X - a)* + a."""
    mom = model.moments
    if not mom.c2 > 0:
        raise ZeroVariance("non-zero biasing needs positive variance")
    if isinstance(model, m.Exponential):
        # E[(X-a)1{X>t}] = t e^{-rate t}; normalized this is Gamma(2, 1/rate)
        return rng.gamma(2.0, 1.0 / model.rate, count)
    if isinstance(model, m.Uniform):
        # centered zero-bias density 3(h^2 - y^2)/(4h^3) on (-h, h): a scaled Beta(2, 2)
        h = 0.5 * (model.hi - model.lo)
        return mom.a + h * (2.0 * rng.beta(2.0, 2.0, count) - 1.0)
    centered, a = _centered_pmf(model)
    if centered is None:
        raise InvalidParameter(f"no zero-bias law available for {model!r}")
    return a + zero_bias_density(centered).sample(rng, count)


def non_zero_bias_density(model: m.SummandModel) -> StepDensity:
    """Step density of the non-zero-biased law for finite-support summands."""
    if not model.moments.c2 > 0:
        raise ZeroVariance("non-zero biasing needs positive variance")
    centered, a = _centered_pmf(model)
    if centered is None:
        raise InvalidParameter("step density only exists for finite-support summands")
    return zero_bias_density(centered).shift(a)


def sum_non_zero_bias(summand: m.SummandModel, n: int, rng: np.random.Generator, count: int = 1) -> np.ndarray:
    """Draws of S_n - X_1 + Y, Y non-zero biased and independent of the X_j."""
    if n < 1:
        raise InvalidParameter("n must be at least 1")
    if not summand.moments.c2 > 0:
        raise ZeroVariance("non-zero biasing needs positive variance")
    rest = summand.sample_sums(rng, np.full(count, n - 1))
    return rest + non_zero_bias_sample(summand, rng, count)
