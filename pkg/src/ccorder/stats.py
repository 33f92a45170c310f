"""
Chi-square distribution functions for test thresholds.

The CDF is the regularized lower incomplete gamma function ``P(nu/2, x/2)``,
evaluated by its power series below ``a + 1`` and by the Lentz continued
fraction for the upper function ``Q`` above it. The quantile is a safeguarded
Newton iteration on ``log P`` (lower half) or ``log Q`` (upper half), started
from the Wilson-Hilferty approximation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from statistics import NormalDist

from .errors import ComputationError, ConfigError

__all__ = ["ChiSquare", "chi2_cdf", "chi2_sf", "chi2_pdf", "chi2_quantile"]

MAX_DOF = 2 * 512 ** 2

_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 100_000


def _check_dof(nu):
    if int(nu) != nu or not 1 <= nu <= MAX_DOF:
        raise ConfigError(f"degrees of freedom must be an integer in [1, {MAX_DOF}], got {nu}")
    return int(nu)


def _log_prefactor(a, x):
    # log(x^a e^-x / Gamma(a))
    return a * math.log(x) - x - math.lgamma(a)


def _log_p_series(a, x):
    term = total = 1.0 / a
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if term < total * _EPS:
            return _log_prefactor(a, x) + math.log(total)
    raise ComputationError(f"incomplete gamma series did not converge (a={a}, x={x})")


def _log_q_contfrac(a, x):
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return _log_prefactor(a, x) + math.log(h)
    raise ComputationError(f"incomplete gamma fraction did not converge (a={a}, x={x})")


def _log_cdf_sf(x, nu):
    """Return ``(log P, log Q)`` for ``chi2(nu)`` at ``x > 0``."""
    a, h = 0.5 * nu, 0.5 * x
    if h < a + 1.0:
        lp = _log_p_series(a, h)
        p = math.exp(lp)
        lq = math.log1p(-p) if p < 1.0 else -math.inf
        return lp, lq
    lq = _log_q_contfrac(a, h)
    q = math.exp(lq)
    lp = math.log1p(-q) if q < 1.0 else -math.inf
    return lp, lq


def chi2_cdf(x: float, nu: int) -> float:
    """``P[chi2(nu) <= x]``."""
    nu = _check_dof(nu)
    if x < 0:
        raise ConfigError(f"chi2_cdf needs x >= 0, got {x}")
    if x == 0:
        return 0.0
    if math.isinf(x):
        return 1.0
    return math.exp(_log_cdf_sf(x, nu)[0])


def chi2_sf(x: float, nu: int) -> float:
    """``P[chi2(nu) > x]``, accurate in the far upper tail."""
    nu = _check_dof(nu)
    if x < 0:
        raise ConfigError(f"chi2_sf needs x >= 0, got {x}")
    if x == 0:
        return 1.0
    if math.isinf(x):
        return 0.0
    return math.exp(_log_cdf_sf(x, nu)[1])


def _log_pdf(x, nu):
    a = 0.5 * nu
    return (a - 1.0) * math.log(x) - 0.5 * x - a * math.log(2.0) - math.lgamma(a)


def chi2_pdf(x: float, nu: int) -> float:
    nu = _check_dof(nu)
    if x < 0:
        return 0.0
    if x == 0:
        return {1: math.inf, 2: 0.5}.get(nu, 0.0)
    return math.exp(_log_pdf(x, nu))


def _wilson_hilferty(q, nu):
    z = NormalDist().inv_cdf(q)
    c = 2.0 / (9.0 * nu)
    return nu * max(1.0 - c + z * math.sqrt(c), 1e-3) ** 3


@lru_cache(maxsize=4096)
def chi2_quantile(q: float, nu: int) -> float:
    """Inverse of :func:`chi2_cdf` in ``x`` for ``0 < q < 1``."""
    nu = _check_dof(nu)
    if not 0.0 < q < 1.0:
        raise ConfigError(f"chi2_quantile needs 0 < q < 1, got {q}")
    lower = q <= 0.5
    target = math.log(q) if lower else math.log1p(-q)

    def g(x):
        # increasing in x; root at the quantile
        lp, lq = _log_cdf_sf(x, nu)
        return lp - target if lower else target - lq

    # bracket: g(lo) < 0 < g(hi)
    x = _wilson_hilferty(q, nu)
    lo, hi = 0.0, math.inf
    if g(x) < 0:
        lo = x
        step = max(x, 1.0)
        while True:
            cand = lo + step
            if g(cand) < 0:
                lo, step = cand, 2.0 * step
            else:
                hi = cand
                break
    else:
        hi = x
        cand = x
        while True:
            cand *= 0.5
            if cand < 1e-300:
                lo = 0.0
                break
            if g(cand) < 0:
                lo = cand
                break
            hi = cand
    for _ in range(500):
        gx = g(x)
        if gx == 0.0:
            return x
        if gx < 0:
            lo = x
        else:
            hi = x
        # d/dx log P = pdf/P ; d/dx (-log Q) = pdf/Q
        lp, lq = _log_cdf_sf(x, nu)
        slope = math.exp(_log_pdf(x, nu) - (lp if lower else lq))
        new = x - gx / slope if slope > 0 and math.isfinite(slope) else math.nan
        if not (lo < new < hi):
            new = 0.5 * (lo + hi)
        if abs(new - x) <= 4e-16 * max(x, 1e-300):
            return new
        x = new
        if hi - lo <= 4e-16 * hi:
            return x
    raise ComputationError(f"chi2_quantile did not converge (q={q}, nu={nu})")


@dataclass(frozen=True)
class ChiSquare:
    """Chi-square distribution with integer ``dof``."""

    dof: int

    def __post_init__(self):
        _check_dof(self.dof)

    def cdf(self, x):
        return chi2_cdf(x, self.dof)

    def sf(self, x):
        return chi2_sf(x, self.dof)

    def pdf(self, x):
        return chi2_pdf(x, self.dof)

    def quantile(self, q):
        return chi2_quantile(q, self.dof)

    @property
    def mean(self):
        return float(self.dof)
