"""Distances between discrete laws and between a sample and the standard normal."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import EmptySample
from .models import DiscretePmf

ATOM_TOL = 1e-14
DKW_ALPHA = 0.01


@dataclass(frozen=True)
class DistanceEstimate:
    value: float
    kind: str  # "exact" or "empirical"
    conf_band: float | None = None
    sample_size: int | None = None

    def to_json(self) -> dict:
        return {"value": self.value, "kind": self.kind, "band": self.conf_band, "n": self.sample_size}


def _merged(p: DiscretePmf, q: DiscretePmf):
    """Common grid plus dense probability vectors; atoms within ATOM_TOL are identified."""
    pts = np.concatenate([p.support, q.support]).astype(float)
    order = np.argsort(pts, kind="stable")
    pts = pts[order]
    new_group = np.concatenate([[True], np.diff(pts) > ATOM_TOL])
    group = np.cumsum(new_group) - 1
    grid = pts[new_group]
    probs = np.concatenate([p.probs, np.zeros(len(q))]), np.concatenate([np.zeros(len(p)), q.probs])
    dense = [np.bincount(group, weights=w[order], minlength=grid.size) for w in probs]
    return grid, dense[0], dense[1]


def exact_kolmogorov(p: DiscretePmf, q: DiscretePmf) -> float:
    """sup |F_p - F_q|, attained just after an atom of the merged support."""
    _, wp, wq = _merged(p, q)
    return float(np.max(np.abs(np.cumsum(wp) - np.cumsum(wq)), initial=0.0))


def exact_total_variation(p: DiscretePmf, q: DiscretePmf) -> float:
    _, wp, wq = _merged(p, q)
    return 0.5 * math.fsum(np.abs(wp - wq))


def exact_wasserstein(p: DiscretePmf, q: DiscretePmf) -> float:
    """∫ |F_p - F_q|, an exact finite sum over the merged support."""
    grid, wp, wq = _merged(p, q)
    gap = np.abs(np.cumsum(wp) - np.cumsum(wq))[:-1]
    return math.fsum(gap * np.diff(grid))


def _normal_integral(t):
    """Antiderivative of Φ: tΦ(t) + φ(t), finite at -∞ and equal to 0 there."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    fin = np.isfinite(t)
    tf = t[fin]
    out[fin] = tf * ndtr(tf) + np.exp(-0.5 * tf * tf) / math.sqrt(2 * math.pi)
    return out


def _upper_integral(t):
    """∫_t^∞ (1 - Φ) = φ(t) - t(1 - Φ(t))."""
    return _normal_integral(-np.asarray(t, dtype=float))


def empirical_distance_to_normal(sample, *, presorted: bool = True):
    """Return (d_K, d_W) estimates of the sample's empirical CDF against Φ.

    Both are exact functionals of the empirical CDF.  d_K carries the DKW
    band at 99%.  The d_W band is 3·∫√(F_n(1 - F_n)) / √n, a conservative
    normal-approximation band for the L¹ functional.
    """
    x = np.asarray(sample, dtype=float)
    if x.size == 0:
        raise EmptySample("empty sample")
    if not presorted:
        x = np.sort(x)
    n = x.size
    cdf = ndtr(x)
    i = np.arange(1, n + 1)
    d_k = float(max(np.max(i / n - cdf), np.max(cdf - (i - 1) / n)))
    dkw = math.sqrt(math.log(2.0 / DKW_ALPHA) / (2.0 * n))

    # pieces (x_i, x_{i+1}) carry F_n = i/n; split at Φ^{-1}(i/n)
    level = i[:-1] / n
    lo, hi = x[:-1], x[1:]
    cut = np.clip(ndtri(level), lo, hi)
    g_lo, g_cut, g_hi = _normal_integral(lo), _normal_integral(cut), _normal_integral(hi)
    below = level * (cut - lo) - (g_cut - g_lo)
    above = (g_hi - g_cut) - level * (hi - cut)
    inner = np.maximum(below, 0.0) + np.maximum(above, 0.0)
    total = math.fsum(inner) + float(_normal_integral(x[:1])[0]) + float(_upper_integral(x[-1:])[0])
    spread = math.fsum(np.sqrt(level * (1.0 - level)) * (hi - lo))
    band_w = 3.0 * spread / math.sqrt(n)
    return (
        DistanceEstimate(min(d_k, 1.0), "empirical", dkw, n),
        DistanceEstimate(total, "empirical", band_w, n),
    )


def lp_interpolation(d_k: float, d_w: float, p: float) -> float:
    """Hölder interpolation d_K^{(p-1)/p} d_W^{1/p} of the L^p distance; p = inf gives d_K."""
    if p < 1:
        raise ValueError("p must be at least 1")
    if math.isinf(p):
        return float(d_k)
    return float(d_k ** ((p - 1.0) / p) * d_w ** (1.0 / p))
