"""
Order selection for the number of correlated signals, with and without PCA.

Three joint detectors scan every PCA rank pair ``(r_x, r_y)`` up to ``r_max``,
run a per-pair order estimate (the "min-step") and keep the largest result:

* ``MaxMinHT`` -- Bartlett-Lawley series test at a fixed false-alarm rate.
* ``MaxMinMdlThreshold`` -- GLRT statistic against the MDL-derived threshold.
* ``MaxMinMdlIc`` -- argmin of the reduced-rank MDL criterion.

Full-dimension baselines (``TraditionalHT``, ``FullDimMdl``, ``FullDimAic``)
work on the unreduced canonical correlations and need ``M >= max(n, m)``.

All statistics take the log of ``1 - k**2``; when a correlation is exactly one
that factor is replaced by ``EPS_LOG`` so the statistics stay finite.
"""
from __future__ import annotations

import enum
import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .cca import (
    CanonicalSpectrum,
    DataMatrixPair,
    SvdCache,
    economy_svd,
    full_canonical_correlations,
    max_rank,
    spectrum_table,
)
from .errors import ConfigError, DegenerateStatisticError
from .stats import chi2_quantile

__all__ = [
    "Method",
    "DetectorConfig",
    "DetectorDecision",
    "PairDiagnostic",
    "glrt_lambda",
    "bartlett_lawley",
    "ht_threshold",
    "mdl_ic",
    "mdl_threshold",
    "min_step_ht",
    "min_step_mdl_threshold",
    "min_step_mdl_ic",
    "detect",
    "traditional_series_test",
    "full_dim_ic",
]

EPS_LOG = 1e-15


class Method(str, enum.Enum):
    MAXMIN_HT = "MaxMinHT"
    MAXMIN_MDL_THRESHOLD = "MaxMinMdlThreshold"
    MAXMIN_MDL_IC = "MaxMinMdlIc"
    TRADITIONAL_HT = "TraditionalHT"
    FULLDIM_MDL = "FullDimMdl"
    FULLDIM_AIC = "FullDimAic"

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower()
        if key == "sev" or key.startswith("sev"):
            raise ConfigError(
                "SEV rank selection is not implemented (out of scope); use a "
                "max-min detector or a full-dimension baseline instead"
            )
        for m in cls:
            if m.value.lower() == key:
                return m
        raise ConfigError(
            f"unknown method {name!r}; choose one of {[m.value for m in cls]}"
        )

    @property
    def is_maxmin(self):
        return self in (Method.MAXMIN_HT, Method.MAXMIN_MDL_THRESHOLD, Method.MAXMIN_MDL_IC)

    @property
    def uses_pfa(self):
        return self in (Method.MAXMIN_HT, Method.TRADITIONAL_HT)


@dataclass(frozen=True)
class DetectorConfig:
    """Detector choice plus its knobs.

    ``p_fa`` is only read by the hypothesis-test methods. ``r_max=None``
    means ``min(n, m, M // 2)`` for the data at hand.
    """

    method: Method = Method.MAXMIN_HT
    p_fa: float = 0.005
    r_max: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "method", Method.parse(self.method))
        if not 0.0 < self.p_fa < 1.0:
            raise ConfigError(f"p_fa must be in (0, 1), got {self.p_fa}")
        if self.r_max is not None and int(self.r_max) < 1:
            raise ConfigError(f"r_max must be positive, got {self.r_max}")

    @property
    def label(self) -> str:
        if self.method.uses_pfa:
            name = f"{self.method.value}(pfa={self.p_fa:g})"
        else:
            name = self.method.value
        if self.r_max is not None and self.method.is_maxmin:
            name += f"[rmax={self.r_max}]"
        return name

    def resolve_r_max(self, n, m, M) -> int:
        bound = max_rank(n, m, M)
        if bound < 1:
            raise ConfigError(f"no valid rank pair for n={n}, m={m}, M={M}")
        if self.r_max is None:
            return bound
        if self.r_max > bound:
            raise ConfigError(f"r_max={self.r_max} exceeds min(n, m, M//2)={bound}")
        return int(self.r_max)


@dataclass(frozen=True)
class PairDiagnostic:
    """Min-step outcome for one rank pair.

    ``statistic[s]`` is C (MaxMinHT), Lambda (MaxMinMdlThreshold) or I_MDL
    (MaxMinMdlIc and the full-dimension criteria); ``threshold[s]`` is NaN
    where the method has none. ``min_step`` is None when the pair was skipped.
    """

    r_x: int
    r_y: int
    min_step: int | None
    statistic: np.ndarray
    threshold: np.ndarray
    error: str | None = None


@dataclass(frozen=True)
class DetectorDecision:
    d_hat: int
    r_x_star: int
    r_y_star: int
    method: Method
    diagnostics: Mapping = field(default_factory=dict, repr=False)


# -- per-spectrum statistics ------------------------------------------------

def _log_terms(k):
    k = np.asarray(k, dtype=float)
    return np.log(np.maximum(1.0 - k * k, EPS_LOG))


def _check_s(s, upper):
    if not 0 <= s <= upper:
        raise ConfigError(f"s={s} outside [0, {upper}]")


def glrt_lambda(k: CanonicalSpectrum, M: int, s: int) -> float:
    """``M * sum_{i>s} ln(1 - k_i^2)``; always <= 0."""
    _check_s(s, k.r)
    return float(M * np.sum(_log_terms(k.k[s:k.r])))


def bartlett_lawley(k: CanonicalSpectrum, M: int, s: int) -> float:
    """Bartlett-Lawley corrected GLRT statistic ``C(r_x, r_y, s)``."""
    _check_s(s, k.r - 1)
    head = k.k[:s]
    if np.any(head <= 0):
        raise DegenerateStatisticError(
            f"C({k.r_x},{k.r_y},{s}) needs k_1..k_{s} > 0"
        )
    corr = M - s - (k.r_x + k.r_y + 1) / 2 + float(np.sum(head ** -2.0))
    if corr <= 0:
        raise DegenerateStatisticError(
            f"Bartlett-Lawley correction {corr:.4g} <= 0 for M={M}, "
            f"ranks ({k.r_x},{k.r_y}), s={s}"
        )
    return float(-2.0 * corr * np.sum(_log_terms(k.k[s:k.r])))


def ht_threshold(r_x: int, r_y: int, s: int, p_fa: float) -> float:
    """Upper ``p_fa`` point of chi2 with ``2 (r_x - s)(r_y - s)`` DOF."""
    if not 0 <= s < min(r_x, r_y):
        raise ConfigError(f"s={s} must be < min(r_x, r_y)={min(r_x, r_y)}")
    if not 0.0 < p_fa < 1.0:
        raise ConfigError(f"p_fa must be in (0, 1), got {p_fa}")
    return chi2_quantile(1.0 - p_fa, 2 * (r_x - s) * (r_y - s))


def mdl_ic(k: CanonicalSpectrum, M: int, s: int) -> float:
    """Reduced-rank MDL criterion; ``s`` may run up to ``r`` inclusive."""
    _check_s(s, k.r)
    fit = M * float(np.sum(_log_terms(k.k[:s])))
    return fit + math.log(M) * s * (k.r_x + k.r_y - s)


def mdl_threshold(r_x: int, r_y: int, s: int, M: int) -> float:
    """GLRT threshold implied by MDL: ``-ln(M) (r_x - s)(r_y - s)``."""
    if not 0 <= s < min(r_x, r_y):
        raise ConfigError(f"s={s} must be < min(r_x, r_y)={min(r_x, r_y)}")
    if M < 2:
        raise ConfigError(f"M must be >= 2, got {M}")
    return -math.log(M) * (r_x - s) * (r_y - s)


def min_step_ht(k: CanonicalSpectrum, M: int, p_fa: float) -> int:
    """Smallest ``s`` with ``C(s) < T(s)``, else ``r``."""
    for s in range(k.r):
        if bartlett_lawley(k, M, s) < ht_threshold(k.r_x, k.r_y, s, p_fa):
            return s
    return k.r


def min_step_mdl_threshold(k: CanonicalSpectrum, M: int) -> int:
    """Smallest ``s`` with ``Lambda(s) > T_MDL(s)``, else ``r``."""
    for s in range(k.r):
        if glrt_lambda(k, M, s) > mdl_threshold(k.r_x, k.r_y, s, M):
            return s
    return k.r


def min_step_mdl_ic(k: CanonicalSpectrum, M: int) -> int:
    """argmin of ``I_MDL(s)`` over ``s = 0..r``, ties to the smaller ``s``.

    Including ``s = r`` keeps this step never below
    :func:`min_step_mdl_threshold` on the same spectrum.
    """
    crit = [mdl_ic(k, M, s) for s in range(k.r + 1)]
    return int(np.argmin(crit))


# -- joint detectors ---------------------------------------------------------

@lru_cache(maxsize=64)
def _ht_threshold_grid(R, p_fa):
    T = np.full((R, R, R + 1), np.nan)
    for rx in range(1, R + 1):
        for ry in range(1, R + 1):
            for s in range(min(rx, ry)):
                T[rx - 1, ry - 1, s] = ht_threshold(rx, ry, s, p_fa)
    T.setflags(write=False)
    return T


def _stack(table, R):
    K = np.zeros((R, R, R))
    for rx in range(1, R + 1):
        for ry in range(1, R + 1):
            k = table[rx, ry].k
            K[rx - 1, ry - 1, : len(k)] = k
    return K


class _ScanDiagnostics(Mapping):
    """Lazy ``(r_x, r_y) -> PairDiagnostic`` view over the scan arrays."""

    def __init__(self, steps, stat, thr, errors):
        self._steps, self._stat, self._thr, self._errors = steps, stat, thr, errors
        self._R = steps.shape[0]

    def __getitem__(self, key):
        rx, ry = key
        if not (1 <= rx <= self._R and 1 <= ry <= self._R):
            raise KeyError(key)
        step = int(self._steps[rx - 1, ry - 1])
        upto = min(rx, ry) + 1
        return PairDiagnostic(
            rx, ry,
            None if step < 0 else step,
            self._stat[rx - 1, ry - 1, :upto].copy(),
            self._thr[rx - 1, ry - 1, :upto].copy(),
            self._errors.get((rx, ry)),
        )

    def __iter__(self):
        R = self._R
        return ((rx, ry) for rx in range(1, R + 1) for ry in range(1, R + 1))

    def __len__(self):
        return self._R * self._R

    @property
    def min_steps(self):
        """``(r_max, r_max)`` array of min-step results, -1 where skipped."""
        return self._steps.copy()


def _first_true(mask, default):
    hit = mask.any(axis=-1)
    return np.where(hit, mask.argmax(axis=-1), default)


def _scan(K, M, method, p_fa):
    """Min-step for every rank pair at once.

    ``K[rx-1, ry-1, :r]`` holds the spectrum of pair (rx, ry), zero padded.
    Returns ``(steps, stat, thr, errors)``.
    """
    R = K.shape[0]
    idx = np.arange(1, R + 1)
    RX = idx[:, None, None]
    RY = idx[None, :, None]
    r = np.minimum(RX, RY)[..., 0]
    S = np.arange(R + 1)[None, None, :]

    L = _log_terms(K)
    zero = np.zeros((R, R, 1))
    # tail[s] = sum_{i > s} ln(1 - k_i^2), head[s] = sum_{i <= s} ln(1 - k_i^2)
    tail = np.concatenate([np.cumsum(L[..., ::-1], axis=-1)[..., ::-1], zero], axis=-1)
    head = np.concatenate([zero, np.cumsum(L, axis=-1)], axis=-1)

    errors = {}
    thr = np.full((R, R, R + 1), np.nan)
    below_r = S < r[..., None]

    if method is Method.MAXMIN_MDL_IC:
        stat = M * head + math.log(M) * S * (RX + RY - S)
        stat = np.where(S <= r[..., None], stat, np.nan)
        steps = np.nanargmin(stat, axis=-1)
        return steps, stat, thr, errors

    if method is Method.MAXMIN_MDL_THRESHOLD:
        stat = np.where(below_r, M * tail, np.nan)
        thr = np.where(below_r, -math.log(M) * (RX - S) * (RY - S), np.nan)
        with np.errstate(invalid="ignore"):
            passed = below_r & (stat > thr)
        return _first_true(passed, r), stat, thr, errors

    # MaxMinHT
    with np.errstate(divide="ignore"):
        inv = np.where(K > 0, 1.0 / (K * K), np.inf)
    inv_head = np.concatenate([zero, np.cumsum(inv, axis=-1)], axis=-1)
    corr = M - S - (RX + RY + 1) / 2 + inv_head
    degenerate = below_r & ~(np.isfinite(corr) & (corr > 0))
    with np.errstate(invalid="ignore"):
        stat = np.where(below_r & ~degenerate, -2.0 * corr * tail, np.nan)
    thr = np.array(_ht_threshold_grid(R, p_fa))
    with np.errstate(invalid="ignore"):
        passed = below_r & ~degenerate & (stat < thr)
    steps = _first_true(passed | degenerate, r)
    hit_degenerate = np.take_along_axis(
        degenerate, np.minimum(steps, R)[..., None], axis=-1
    )[..., 0]
    for rx, ry in zip(*np.nonzero(hit_degenerate)):
        s = int(steps[rx, ry])
        errors[rx + 1, ry + 1] = f"degenerate Bartlett-Lawley statistic at s={s}"
    steps = np.where(hit_degenerate, -1, steps)
    return steps, stat, thr, errors


def _select(steps):
    """Outer max, ties to smallest ``r_x + r_y`` then smallest ``r_x``."""
    d_hat = int(steps.max())
    if d_hat < 0:
        raise DegenerateStatisticError("every rank pair produced a degenerate statistic")
    rx, ry = np.nonzero(steps == d_hat)
    order = np.lexsort((rx, rx + ry))
    return d_hat, int(rx[order[0]]) + 1, int(ry[order[0]]) + 1


def _full_dim_decision(pair, cfg):
    k = full_canonical_correlations(pair)
    M = pair.M
    if cfg.method is Method.TRADITIONAL_HT:
        d = min_step_ht(k, M, cfg.p_fa)
        stat = np.array([bartlett_lawley(k, M, s) for s in range(min(d + 1, k.r))])
        thr = np.array([ht_threshold(k.r_x, k.r_y, s, cfg.p_fa) for s in range(len(stat))])
    else:
        penalty = "MDL" if cfg.method is Method.FULLDIM_MDL else "AIC"
        stat = _full_dim_criterion(k, M, penalty)
        d = int(np.argmin(stat))
        thr = np.full(len(stat), np.nan)
    diag = {(k.r_x, k.r_y): PairDiagnostic(k.r_x, k.r_y, d, stat, thr)}
    return DetectorDecision(d, k.r_x, k.r_y, cfg.method, diag)


def detect(
    pair: DataMatrixPair,
    cfg: DetectorConfig,
    cache: SvdCache | None = None,
    table: Mapping | None = None,
) -> DetectorDecision:
    """Estimate the number of correlated signals and, for max-min methods, the
    PCA ranks.

    ``cache`` and ``table`` may be passed in to share one SVD and one
    :func:`spectrum_table` across several detectors on the same data; the
    table must cover at least the configured ``r_max``.

    Full-dimension methods return ``(n, m)`` as their ranks.
    """
    if not cfg.method.is_maxmin:
        return _full_dim_decision(pair, cfg)
    R = cfg.resolve_r_max(pair.n, pair.m, pair.M)
    if table is None:
        table = spectrum_table(cache or economy_svd(pair), R)
    elif (R, R) not in table:
        raise ConfigError(f"spectrum table does not reach r_max={R}")
    steps, stat, thr, errors = _scan(_stack(table, R), pair.M, cfg.method, cfg.p_fa)
    d_hat, rx, ry = _select(steps)
    return DetectorDecision(
        d_hat, rx, ry, cfg.method, _ScanDiagnostics(steps, stat, thr, errors)
    )


# -- full-dimension baselines --------------------------------------------------

def traditional_series_test(pair: DataMatrixPair, p_fa: float) -> int:
    """Bartlett-Lawley series test on the unreduced data; returns ``d`` in 0..p.

    Only meaningful when ``M`` is well above ``n + m``; below ``n + m`` the
    forced unit correlations make it return ``p``.
    """
    return min_step_ht(full_canonical_correlations(pair), pair.M, p_fa)


def _full_dim_criterion(k, M, penalty):
    p, n, m = k.r, k.r_x, k.r_y
    s = np.arange(p)
    fit = M * np.concatenate([[0.0], np.cumsum(_log_terms(k.k))])[:p]
    weight = math.log(M) if penalty == "MDL" else 2.0
    return fit + weight * s * (m + n - s)


def full_dim_ic(pair: DataMatrixPair, penalty: str) -> int:
    """Information-criterion order estimate without PCA, ``s`` in 0..p-1.

    ``penalty="MDL"`` uses ``ln(M) s (m + n - s)``. ``penalty="AIC"`` uses the
    conventional stand-in ``2 s (m + n - s)``.
    """
    penalty = str(penalty).upper()
    if penalty not in ("MDL", "AIC"):
        raise ConfigError(f"penalty must be MDL or AIC, got {penalty!r}")
    k = full_canonical_correlations(pair)
    return int(np.argmin(_full_dim_criterion(k, pair.M, penalty)))

