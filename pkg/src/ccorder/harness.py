"""
Monte Carlo engine: detection probabilities over a scenario sweep, and
statistic histograms for a single rank pair.

Every trial is a pure function of ``(spec, sweep index, trial index)``: its
random stream is ``trial_rng(seed, sweep_index, trial_index)``. Reports are
therefore identical for any number of worker processes.
"""
from __future__ import annotations

import csv
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .cca import economy_svd, reduced_canonical_correlations, spectrum_table
from .datagen import ScenarioConfig, UlaSteering, generate, trial_rng
from .detectors import DetectorConfig, bartlett_lawley, detect, ht_threshold
from .errors import CcorderError, ConfigError

__all__ = [
    "SWEEP_PARAMS",
    "Sweep",
    "ExperimentSpec",
    "PointResult",
    "MonteCarloReport",
    "HistogramResult",
    "apply_sweep",
    "run_trial",
    "run_experiment",
    "run_statistic_histogram",
    "emit_csv",
    "read_csv",
    "emit_histogram_csv",
    "read_histogram_csv",
    "REPORT_COLUMNS",
    "HISTOGRAM_COLUMNS",
]

REPORT_COLUMNS = (
    "sweep_value", "detector", "p_d", "trials", "err_trials",
    "d_hat_mode", "rx_mode", "ry_mode",
)
HISTOGRAM_COLUMNS = ("trial", "statistic")

SWEEP_PARAMS = ("M", "dim", "indep_var", "rho_mean", "delta_deg")


@dataclass(frozen=True)
class Sweep:
    """One scenario field varied over strictly increasing values.

    ``param`` is one of ``M``, ``dim`` (sets ``n = m``), ``indep_var``
    (variance of every independent signal), ``rho_mean`` (all coefficients)
    or ``delta_deg`` (ULA source spacing).
    """

    param: str
    values: tuple[float, ...]

    def __post_init__(self):
        if self.param not in SWEEP_PARAMS:
            raise ConfigError(f"unknown sweep parameter {self.param!r}; use one of {SWEEP_PARAMS}")
        values = tuple(float(v) for v in self.values)
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ConfigError("sweep values must be strictly increasing")
        object.__setattr__(self, "values", values)


def apply_sweep(cfg: ScenarioConfig, param: str, value: float) -> ScenarioConfig:
    if param == "M":
        return cfg.replace(M=_as_int(value, param))
    if param == "dim":
        v = _as_int(value, param)
        return cfg.replace(n=v, m=v)
    if param == "indep_var":
        sd = math.sqrt(value)
        return cfg.replace(
            sigma_x=cfg.sigma_x[: cfg.d] + (sd,) * cfg.f_x,
            sigma_y=cfg.sigma_y[: cfg.d] + (sd,) * cfg.f_y,
        )
    if param == "rho_mean":
        return cfg.replace(rho=(value,) * cfg.d)
    if param == "delta_deg":
        if not isinstance(cfg.mixing, UlaSteering):
            raise ConfigError("delta_deg sweep needs ULA steering mixing")
        return cfg.replace(mixing=cfg.mixing.with_spacing(value))
    raise ConfigError(f"unknown sweep parameter {param!r}")


def _as_int(value, param):
    if float(value) != int(value):
        raise ConfigError(f"sweep {param} needs integer values, got {value}")
    return int(value)


@dataclass(frozen=True)
class ExperimentSpec:
    scenario: ScenarioConfig
    detectors: tuple[DetectorConfig, ...]
    trials: int = 1000
    seed: int = 0
    sweep: Sweep | None = None

    def __post_init__(self):
        object.__setattr__(self, "detectors", tuple(self.detectors))
        if not self.detectors:
            raise ConfigError("at least one detector is required")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ConfigError(f"trials must be a positive integer, got {self.trials}")
        labels = [d.label for d in self.detectors]
        if len(set(labels)) != len(labels):
            raise ConfigError(f"duplicate detector configurations: {labels}")

    def points(self):
        """``[(sweep_value or None, scenario), ...]`` in sweep order."""
        if self.sweep is None:
            return [(None, self.scenario)]
        return [(v, apply_sweep(self.scenario, self.sweep.param, v)) for v in self.sweep.values]


@dataclass(frozen=True)
class PointResult:
    """Outcome counts for one (sweep value, detector) cell.

    ``sum(d_hat_counts.values()) + err_trials == trials``.
    """

    sweep_value: float | None
    detector: str
    d_true: int
    trials: int
    err_trials: int
    d_hat_counts: dict = field(default_factory=dict)
    rank_counts: dict = field(default_factory=dict)
    error_counts: dict = field(default_factory=dict)

    @property
    def p_d(self) -> float:
        return self.d_hat_counts.get(self.d_true, 0) / self.trials

    @property
    def d_hat_mode(self) -> int | None:
        return _mode(self.d_hat_counts)

    @property
    def rank_mode(self) -> tuple[int, int] | None:
        return _mode(self.rank_counts)

    def csv_row(self) -> dict:
        rank = self.rank_mode
        return {
            "sweep_value": "" if self.sweep_value is None else _fmt(self.sweep_value),
            "detector": self.detector,
            "p_d": _fmt(self.p_d),
            "trials": str(self.trials),
            "err_trials": str(self.err_trials),
            "d_hat_mode": "" if self.d_hat_mode is None else str(self.d_hat_mode),
            "rx_mode": "" if rank is None else str(rank[0]),
            "ry_mode": "" if rank is None else str(rank[1]),
        }


def _mode(counts):
    if not counts:
        return None
    # most frequent, ties to the smallest key
    return min(counts, key=lambda k: (-counts[k], k))


def _fmt(x):
    x = float(x)
    return str(int(x)) if x.is_integer() else repr(x)


@dataclass(frozen=True)
class MonteCarloReport:
    rows: tuple[PointResult, ...]
    sweep_param: str | None = None

    def get(self, detector, sweep_value=None) -> PointResult:
        for row in self.rows:
            if row.detector == detector and row.sweep_value == sweep_value:
                return row
        raise KeyError((detector, sweep_value))

    def curve(self, detector):
        """``(sweep values, P_D)`` arrays for one detector label."""
        rows = [r for r in self.rows if r.detector == detector]
        return (np.array([r.sweep_value for r in rows], dtype=float),
                np.array([r.p_d for r in rows]))


# -- trials ----------------------------------------------------------------------

def run_trial(scenario: ScenarioConfig, detectors, seed: int, point: int, trial: int):
    """Run every detector on one fresh dataset.

    Returns one entry per detector: ``(d_hat, r_x, r_y)`` or the name of the
    error class that stopped it.
    """
    data = generate(scenario, trial_rng(seed, point, trial)).pair
    out = []
    cache = table = None
    try:
        maxmin = [c.resolve_r_max(data.n, data.m, data.M) for c in detectors if c.method.is_maxmin]
        if maxmin:
            cache = economy_svd(data)
            table = spectrum_table(cache, max(maxmin))
    except CcorderError as exc:
        table = exc
    for cfg in detectors:
        if cfg.method.is_maxmin and isinstance(table, CcorderError):
            out.append(type(table).__name__)
            continue
        try:
            dec = detect(data, cfg, cache, table)
        except CcorderError as exc:
            out.append(type(exc).__name__)
        else:
            out.append((dec.d_hat, dec.r_x_star, dec.r_y_star))
    return out


def _run_chunk(args):
    scenario, detectors, seed, point, trials = args
    return [run_trial(scenario, detectors, seed, point, t) for t in trials]


def _map_trials(fn, jobs, workers):
    if workers <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, jobs))


def _chunks(n, size):
    return [range(i, min(i + size, n)) for i in range(0, n, size)]


def run_experiment(spec: ExperimentSpec, workers: int = 1, chunk_size: int = 25) -> MonteCarloReport:
    """Monte Carlo detection probabilities for every sweep point and detector."""
    points = spec.points()
    jobs, owners = [], []
    for ip, (_, scenario) in enumerate(points):
        for chunk in _chunks(spec.trials, chunk_size):
            jobs.append((scenario, spec.detectors, spec.seed, ip, chunk))
            owners.append(ip)
    results = _map_trials(_run_chunk, jobs, workers)

    per_point = [[] for _ in points]
    for ip, chunk_result in zip(owners, results):
        per_point[ip].extend(chunk_result)

    rows = []
    for (value, scenario), trials in zip(points, per_point):
        for j, cfg in enumerate(spec.detectors):
            d_hats, ranks, errors = Counter(), Counter(), Counter()
            for outcome in trials:
                res = outcome[j]
                if isinstance(res, str):
                    errors[res] += 1
                else:
                    d_hats[res[0]] += 1
                    ranks[res[1], res[2]] += 1
            rows.append(PointResult(
                value, cfg.label, scenario.d, spec.trials, sum(errors.values()),
                dict(sorted(d_hats.items())), dict(sorted(ranks.items())),
                dict(sorted(errors.items())),
            ))
    return MonteCarloReport(tuple(rows), spec.sweep.param if spec.sweep else None)


# -- histograms ----------------------------------------------------------------------

@dataclass(frozen=True)
class HistogramResult:
    """Bartlett-Lawley statistics ``C(r_x, r_y, s)`` over trials.

    ``trial`` and ``statistic`` list the non-degenerate trials only; ``dof`` and
    ``threshold`` describe the reference chi-square at ``p_fa``.
    """

    r_x: int
    r_y: int
    s: int
    trial: np.ndarray
    statistic: np.ndarray
    n_degenerate: int
    dof: int
    threshold: float
    p_fa: float


def _hist_chunk(args):
    scenario, r_x, r_y, s, seed, trials = args
    out = []
    for t in trials:
        data = generate(scenario, trial_rng(seed, 0, t)).pair
        try:
            k = reduced_canonical_correlations(economy_svd(data), r_x, r_y)
            out.append(bartlett_lawley(k, data.M, s))
        except CcorderError:
            out.append(math.nan)
    return out


def run_statistic_histogram(
    scenario: ScenarioConfig,
    r_x: int,
    r_y: int,
    s: int,
    trials: int,
    seed: int = 0,
    p_fa: float = 0.01,
    workers: int = 1,
    chunk_size: int = 250,
) -> HistogramResult:
    """Sample ``C(r_x, r_y, s)`` on ``trials`` independent datasets."""
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    if not 0 <= s < min(r_x, r_y):
        raise ConfigError(f"s={s} must be < min(r_x, r_y)")
    jobs = [(scenario, r_x, r_y, s, seed, c) for c in _chunks(trials, chunk_size)]
    stats = np.array([v for chunk in _map_trials(_hist_chunk, jobs, workers) for v in chunk])
    ok = np.isfinite(stats)
    return HistogramResult(
        r_x, r_y, s,
        np.nonzero(ok)[0], stats[ok], int(np.count_nonzero(~ok)),
        2 * (r_x - s) * (r_y - s), ht_threshold(r_x, r_y, s, p_fa), p_fa,
    )


# -- CSV -----------------------------------------------------------------------------

def _open_for_write(path):
    path = Path(path)
    try:
        return path.open("w", newline="", encoding="utf-8")
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {path}: {exc.strerror}", str(path)) from exc


def emit_csv(report: MonteCarloReport, path) -> Path:
    """Write one row per (sweep value, detector) with a header row."""
    with _open_for_write(path) as fh:
        w = csv.DictWriter(fh, fieldnames=REPORT_COLUMNS, lineterminator="\n")
        w.writeheader()
        for row in report.rows:
            w.writerow(row.csv_row())
    return Path(path)


def read_csv(path) -> list[dict]:
    """Parse a report CSV back into typed row dicts."""
    def num(v, kind):
        return None if v == "" else kind(v)

    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != REPORT_COLUMNS:
            raise ConfigError(f"{path}: unexpected columns {reader.fieldnames}")
        return [
            {
                "sweep_value": num(r["sweep_value"], float),
                "detector": r["detector"],
                "p_d": float(r["p_d"]),
                "trials": int(r["trials"]),
                "err_trials": int(r["err_trials"]),
                "d_hat_mode": num(r["d_hat_mode"], int),
                "rx_mode": num(r["rx_mode"], int),
                "ry_mode": num(r["ry_mode"], int),
            }
            for r in reader
        ]


def emit_histogram_csv(hist: HistogramResult, path) -> Path:
    with _open_for_write(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HISTOGRAM_COLUMNS)
        for t, c in zip(hist.trial, hist.statistic):
            w.writerow((int(t), repr(float(c))))
    return Path(path)


def read_histogram_csv(path):
    """``(trial indices, statistics)`` from a histogram CSV."""
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if tuple(header or ()) != HISTOGRAM_COLUMNS:
            raise ConfigError(f"{path}: unexpected columns {header}")
        rows = list(reader)
    return (np.array([int(r[0]) for r in rows], dtype=int),
            np.array([float(r[1]) for r in rows]))
