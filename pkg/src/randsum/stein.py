"""Solutions of the Stein equation f'(x) - x f(x) = h(x) - E h(Z).

Indicator test functions h_z = 1{· <= z} have the closed-form solution f_z,
evaluated here through the scaled complementary error function so that
neither branch forms 0/0 or inf/inf in the tails.  Lipschitz test functions
are handled by adaptive quadrature of the integral form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import integrate
from scipy.special import erfcx, ndtr

from .errors import QuadratureFailure

SQRT_HALF_PI = math.sqrt(math.pi / 2.0)
F0_MAX = math.sqrt(2.0 * math.pi) / 4.0
QUAD_TOL = 1e-10


def _mills_lower(x):
    """Φ(x)/φ(x) for x <= 0."""
    return SQRT_HALF_PI * erfcx(-x / math.sqrt(2.0))


def _lower_branch(z, x):
    """(1 - Φ(z)) Φ(x) / φ(x) for x <= z."""
    z, x = np.broadcast_arrays(np.asarray(z, dtype=float), np.asarray(x, dtype=float))
    out = np.empty(x.shape)
    neg = x <= 0
    out[neg] = ndtr(-z[neg]) * _mills_lower(x[neg])
    pos = ~neg
    # here 0 < x <= z: write Q(z)/φ(z) · φ(z)/φ(x) to stay finite
    zp, xp = z[pos], x[pos]
    out[pos] = ndtr(xp) * SQRT_HALF_PI * erfcx(zp / math.sqrt(2.0)) * np.exp(0.5 * (xp - zp) * (xp + zp))
    return out


def fz_value(z, x):
    """f_z(x); the upper branch uses the symmetry f_z(x) = f_{-z}(-x)."""
    z, x = np.broadcast_arrays(np.asarray(z, dtype=float), np.asarray(x, dtype=float))
    out = np.empty(x.shape)
    low = x <= z
    out[low] = _lower_branch(z[low], x[low])
    out[~low] = _lower_branch(-z[~low], -x[~low])
    return out[()] if out.ndim == 0 else out


def _lower_slope(z, x):
    """Q(z)(1 + x Φ(x)/φ(x)) for x < z, from differentiating the representation."""
    z, x = np.broadcast_arrays(np.asarray(z, dtype=float), np.asarray(x, dtype=float))
    out = np.empty(x.shape)
    neg = x <= 0
    out[neg] = ndtr(-z[neg]) * (1.0 + x[neg] * _mills_lower(x[neg]))
    pos = ~neg
    out[pos] = ndtr(-z[pos]) + x[pos] * _lower_branch(z[pos], x[pos])
    return out


def fz_derivative(z, x):
    """f_z'(x) off the kink, and z f_z(z) + 1 - Φ(z) at x = z."""
    z, x = np.broadcast_arrays(np.asarray(z, dtype=float), np.asarray(x, dtype=float))
    out = np.empty(x.shape)
    low, high, at = x < z, x > z, x == z
    out[low] = _lower_slope(z[low], x[low])
    out[high] = -_lower_slope(-z[high], -x[high])
    out[at] = z[at] * fz_value(z[at], z[at]) + ndtr(-z[at])
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class SteinSolution:
    """Solution f_h for a 1-Lipschitz test function ``h``.

    ``kinks`` lists the points where h is not differentiable; quadrature
    intervals are split there.  ``mean`` may be given when E h(Z) is known.
    """

    h: object
    kinks: tuple = ()
    mean: float | None = None
    tol: float = QUAD_TOL
    _splits: tuple = field(init=False, repr=False, default=())

    def __post_init__(self):
        object.__setattr__(self, "_splits", tuple(sorted(float(k) for k in self.kinks)))

    def _quad(self, f, lo, hi):
        cuts = [lo] + [k for k in self._splits if lo < k < hi] + [hi]
        total, err = 0.0, 0.0
        for a, b in zip(cuts[:-1], cuts[1:]):
            val, e = integrate.quad(f, a, b, epsabs=self.tol / 10, epsrel=1e-12, limit=200)
            total += val
            err += e
        if err > self.tol:
            raise QuadratureFailure(f"quadrature error estimate {err:.2e} exceeds {self.tol:.0e}")
        return total

    @cached_property
    def eh(self) -> float:
        if self.mean is not None:
            return float(self.mean)
        return self._quad(lambda t: self.h(t) * math.exp(-0.5 * t * t), -math.inf, math.inf) / math.sqrt(2 * math.pi)

    def lower_form(self, x: float) -> float:
        """e^{x²/2} ∫_{-∞}^x (h - Eh) e^{-t²/2} dt."""
        eh = self.eh
        return self._quad(lambda t: (self.h(t) - eh) * math.exp(0.5 * (x - t) * (x + t)), -math.inf, x)

    def upper_form(self, x: float) -> float:
        """-e^{x²/2} ∫_x^∞ (h - Eh) e^{-t²/2} dt."""
        eh = self.eh
        return -self._quad(lambda t: (self.h(t) - eh) * math.exp(0.5 * (x - t) * (x + t)), x, math.inf)

    def value(self, x: float) -> float:
        x = float(x)
        return self.lower_form(x) if x <= 0 else self.upper_form(x)

    def derivative(self, x: float) -> float:
        x = float(x)
        return x * self.value(x) + self.h(x) - self.eh


def fh_value(h, x, kinks=(), mean=None):
    return SteinSolution(h, tuple(kinks), mean).value(x)


def fh_derivative(h, x, kinks=(), mean=None):
    return SteinSolution(h, tuple(kinks), mean).derivative(x)


@dataclass(frozen=True)
class TaylorReport:
    count: int
    min_slack_fh: float
    min_slack_fz: float
    failures: int

    @property
    def passed(self) -> bool:
        return self.failures == 0


def fz_remainder_bound(x, u, z):
    x, u, z = (np.asarray(v, dtype=float) for v in (x, u, z))
    jump = (z - np.maximum(u, 0.0) < x) & (x <= z - np.minimum(u, 0.0))
    return 0.5 * u * u * (np.abs(x) + F0_MAX) + np.abs(u) * jump


def taylor_remainder_bounds_check(triples, solution: SteinSolution | None = None, tol: float = 1e-12) -> TaylorReport:
    """Check |R_{f_h}(x, y)| <= y² and the indicator remainder bound on (x, y, z) triples.

    ``solution`` defaults to h(t) = |t|.
    """
    if solution is None:
        solution = SteinSolution(abs, (0.0,), math.sqrt(2.0 / math.pi))
    trip = np.asarray(triples, dtype=float).reshape(-1, 3)
    x, y, z = trip.T
    rem_z = fz_value(z, x + y) - fz_value(z, x) - fz_derivative(z, x) * y
    slack_z = fz_remainder_bound(x, y, z) - np.abs(rem_z)
    slack_h = np.empty(len(trip))
    for i, (xi, yi) in enumerate(zip(x, y)):
        fx = solution.value(xi)
        deriv = xi * fx + solution.h(xi) - solution.eh
        slack_h[i] = yi * yi - abs(solution.value(xi + yi) - fx - deriv * yi)
    failures = int(np.sum(slack_h < -tol) + np.sum(slack_z < -tol))
    return TaylorReport(len(trip), float(slack_h.min()), float(slack_z.min()), failures)
