"""
JSON documents for scenarios and experiments, and the built-in presets.

An experiment document looks like::

    {
      "schema": 1,
      "scenario": {
        "n": 40, "m": 40, "M": 100, "d": 2, "f_x": 3, "f_y": 4,
        "sigma_x": [2.236, 2.236, 1.225, 1.225, 1.225],
        "sigma_y": [2.236, 2.236, 1.225, 1.225, 1.225, 1.225],
        "rho": [0.8, 0.7],
        "mixing": {"type": "random_unitary"},
        "noise": {"type": "ma", "coeffs": [0.577, 0.577, 0.577], "sigma2_w": 0.333}
      },
      "sweep": {"param": "M", "values": [60, 120, 240, 400]},
      "detectors": [{"method": "MaxMinHT", "p_fa": 0.005}, {"method": "MaxMinMdlIc"}],
      "trials": 1000,
      "seed": 0
    }

``sweep`` is optional. A bare scenario document (``{"schema": 1, "n": ...}``)
is accepted wherever only a scenario is needed. Mixing types are
``random_unitary`` and ``ula`` (``angles_x_deg``, ``angles_y_deg``); noise
types are ``white`` (``sigma2``), ``ma`` (``coeffs``, ``sigma2_w``) and ``ar1``
(``a``, ``sigma2_w``).
"""
from __future__ import annotations

import json
import math
from pathlib import Path

from .datagen import (
    RandomUnitary,
    ScenarioConfig,
    SpatialAR1,
    SpatialMA,
    UlaSteering,
    White,
)
from .detectors import DetectorConfig, Method
from .errors import ConfigError
from .harness import ExperimentSpec, Sweep

__all__ = [
    "SCHEMA_VERSION",
    "PRESETS",
    "scenario",
    "scenario_to_dict",
    "scenario_from_dict",
    "experiment_to_dict",
    "experiment_from_dict",
    "load_experiment",
    "load_scenario",
    "dump_json",
    "preset",
]

SCHEMA_VERSION = 1

_SCENARIO_KEYS = {"n", "m", "M", "d", "f_x", "f_y", "sigma_x", "sigma_y", "rho",
                  "mixing", "noise", "rho_jitter"}


def scenario(n, m, M, rho, corr_var, f_x, f_y, indep_var=1.0,
             noise=None, mixing=None, rho_jitter=0.0) -> ScenarioConfig:
    """Build a :class:`ScenarioConfig` from variances instead of deviations.

    ``corr_var`` and ``indep_var`` may be scalars (shared by all signals of
    that kind) or sequences; an ``indep_var`` sequence of length ``f_x`` is
    reused for ``y`` when ``f_x == f_y``.
    """
    d = len(rho)

    def sds(var, count):
        if isinstance(var, (int, float)):
            return (math.sqrt(var),) * count
        var = tuple(var)
        if len(var) != count:
            raise ConfigError(f"expected {count} variances, got {len(var)}")
        return tuple(math.sqrt(v) for v in var)

    corr = sds(corr_var, d)
    return ScenarioConfig(
        n=n, m=m, M=M, d=d, f_x=f_x, f_y=f_y,
        sigma_x=corr + sds(indep_var, f_x),
        sigma_y=corr + sds(indep_var, f_y),
        rho=tuple(rho),
        mixing=mixing or RandomUnitary(),
        noise=noise or White(1.0),
        rho_jitter=rho_jitter,
    )


# -- (de)serialization -----------------------------------------------------------

def _mixing_to_dict(mix):
    if isinstance(mix, UlaSteering):
        return {"type": "ula", "angles_x_deg": list(mix.angles_x_deg),
                "angles_y_deg": list(mix.angles_y_deg)}
    return {"type": "random_unitary"}


def _mixing_from_dict(doc):
    kind = doc.get("type")
    if kind == "random_unitary":
        return RandomUnitary()
    if kind == "ula":
        return UlaSteering(tuple(doc["angles_x_deg"]), tuple(doc["angles_y_deg"]))
    raise ConfigError(f"unknown mixing type {kind!r}")


def _noise_to_dict(noise):
    if isinstance(noise, White):
        return {"type": "white", "sigma2": noise.sigma2}
    if isinstance(noise, SpatialMA):
        return {"type": "ma", "coeffs": list(noise.coeffs), "sigma2_w": noise.sigma2_w}
    if isinstance(noise, SpatialAR1):
        return {"type": "ar1", "a": noise.a, "sigma2_w": noise.sigma2_w}
    raise ConfigError(f"unknown noise model {noise!r}")


def _noise_from_dict(doc):
    kind = doc.get("type")
    if kind == "white":
        return White(float(doc.get("sigma2", 1.0)))
    if kind == "ma":
        return SpatialMA(tuple(doc["coeffs"]), float(doc["sigma2_w"]))
    if kind == "ar1":
        return SpatialAR1(float(doc["a"]), float(doc["sigma2_w"]))
    raise ConfigError(f"unknown noise type {kind!r}")


def scenario_to_dict(cfg: ScenarioConfig) -> dict:
    return {
        "n": cfg.n, "m": cfg.m, "M": cfg.M, "d": cfg.d, "f_x": cfg.f_x, "f_y": cfg.f_y,
        "sigma_x": list(cfg.sigma_x), "sigma_y": list(cfg.sigma_y), "rho": list(cfg.rho),
        "rho_jitter": cfg.rho_jitter,
        "mixing": _mixing_to_dict(cfg.mixing),
        "noise": _noise_to_dict(cfg.noise),
    }


def scenario_from_dict(doc: dict) -> ScenarioConfig:
    unknown = set(doc) - _SCENARIO_KEYS - {"schema"}
    if unknown:
        raise ConfigError(f"unknown scenario keys: {sorted(unknown)}")
    try:
        return ScenarioConfig(
            n=doc["n"], m=doc["m"], M=doc["M"], d=doc["d"],
            f_x=doc.get("f_x", 0), f_y=doc.get("f_y", 0),
            sigma_x=tuple(doc["sigma_x"]), sigma_y=tuple(doc["sigma_y"]),
            rho=tuple(doc.get("rho", ())),
            mixing=_mixing_from_dict(doc.get("mixing", {"type": "random_unitary"})),
            noise=_noise_from_dict(doc.get("noise", {"type": "white"})),
            rho_jitter=float(doc.get("rho_jitter", 0.0)),
        )
    except KeyError as exc:
        raise ConfigError(f"scenario is missing key {exc.args[0]!r}") from None
    except TypeError as exc:
        raise ConfigError(f"malformed scenario: {exc}") from None


def _detector_to_dict(cfg: DetectorConfig) -> dict:
    return {"method": cfg.method.value, "p_fa": cfg.p_fa, "r_max": cfg.r_max}


def _detector_from_dict(doc) -> DetectorConfig:
    if isinstance(doc, str):
        doc = {"method": doc}
    return DetectorConfig(
        Method.parse(doc.get("method")),
        float(doc.get("p_fa", 0.005)),
        doc.get("r_max"),
    )


def _check_schema(doc):
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    if doc.get("schema") != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema {doc.get('schema')!r}; expected {SCHEMA_VERSION}")


def experiment_to_dict(spec: ExperimentSpec) -> dict:
    doc = {
        "schema": SCHEMA_VERSION,
        "scenario": scenario_to_dict(spec.scenario),
        "detectors": [_detector_to_dict(d) for d in spec.detectors],
        "trials": spec.trials,
        "seed": spec.seed,
    }
    if spec.sweep is not None:
        doc["sweep"] = {"param": spec.sweep.param, "values": list(spec.sweep.values)}
    return doc


def experiment_from_dict(doc: dict) -> ExperimentSpec:
    _check_schema(doc)
    if "scenario" not in doc:
        raise ConfigError("experiment document needs a 'scenario' object")
    sweep = doc.get("sweep")
    detectors = doc.get("detectors") or [{"method": m.value} for m in Method if m.is_maxmin]
    return ExperimentSpec(
        scenario=scenario_from_dict(doc["scenario"]),
        detectors=tuple(_detector_from_dict(d) for d in detectors),
        trials=int(doc.get("trials", 1000)),
        seed=int(doc.get("seed", 0)),
        sweep=None if sweep is None else Sweep(sweep["param"], tuple(sweep["values"])),
    )


def _read_json(path):
    try:
        with Path(path).open(encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None


def load_experiment(path) -> ExperimentSpec:
    return experiment_from_dict(_read_json(path))


def load_scenario(path) -> ScenarioConfig:
    """Scenario from a scenario document or from an experiment's ``scenario``."""
    doc = _read_json(path)
    _check_schema(doc)
    return scenario_from_dict(doc["scenario"] if "scenario" in doc else doc)


def dump_json(doc: dict, path) -> None:
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


# -- presets ---------------------------------------------------------------------

MAXMIN = (
    DetectorConfig(Method.MAXMIN_HT, p_fa=0.005),
    DetectorConfig(Method.MAXMIN_MDL_THRESHOLD),
    DetectorConfig(Method.MAXMIN_MDL_IC),
)
BASELINES = (
    DetectorConfig(Method.TRADITIONAL_HT, p_fa=0.005),
    DetectorConfig(Method.FULLDIM_MDL),
    DetectorConfig(Method.FULLDIM_AIC),
)

_MA = SpatialMA((1 / math.sqrt(3),) * 3, 1 / 3)
_AR = SpatialAR1(0.65, 1 - 0.65 ** 2)
_RHO7 = (0.92, 0.9, 0.88, 0.85, 0.83, 0.8, 0.75)


def _two_signal(noise, M=100, n=40, mixing=None):
    # d = 2 strong correlated signals, weaker independent ones
    return scenario(n, n, M, (0.8, 0.7), 5.0, 3, 4, 1.5, noise=noise, mixing=mixing)


def _presets():
    return {
        # sample canonical correlations vs M without PCA
        "fig1": (scenario(20, 20, 200, (0.9, 0.7, 0.5), 10.0, 0, 0, noise=White(0.1)),
                 BASELINES + MAXMIN, Sweep("M", (50, 100, 200, 1000))),
        # rank effect: stronger independent signals, n = m = 20, M = 30
        "fig2": (scenario(20, 20, 30, (0.9, 0.8, 0.7), 1.5, 2, 2, 5.0, noise=White(0.1)),
                 MAXMIN, None),
        # statistic histograms: n = m = 100, M = 50
        "fig3": (scenario(100, 100, 50, (0.9, 0.8, 0.7), 1.5, 2, 2, 5.0, noise=White(0.1)),
                 MAXMIN, None),
        "fig4": (_two_signal(White(1.0)), MAXMIN + BASELINES,
                 Sweep("M", (30, 60, 120, 240, 400))),
        "fig5": (_two_signal(_MA), MAXMIN + BASELINES,
                 Sweep("M", (30, 60, 120, 240, 400))),
        "fig6": (_two_signal(White(1.0), M=100), MAXMIN + BASELINES,
                 Sweep("dim", (20, 40, 80, 120, 160, 200))),
        "fig7": (scenario(80, 80, 150, _RHO7, 10.0, 2, 2, 1.0, noise=_AR), MAXMIN + BASELINES,
                 Sweep("indep_var", (1, 5, 10, 15, 20))),
        "fig8": (scenario(80, 80, 150, _RHO7, 10.0, 4, 4, 1.0, noise=_AR), MAXMIN + BASELINES,
                 Sweep("indep_var", (1, 5, 10, 15, 20))),
        "fig9": (scenario(80, 80, 150, _RHO7[:5], 8.0, 7, 7, (12, 12, 3, 3, 3, 3, 3), noise=_AR),
                 MAXMIN + BASELINES, Sweep("M", (50, 100, 150, 200, 300, 400))),
        "fig10": (_two_signal(_MA, M=60, mixing=UlaSteering(
                      tuple(20.0 + i for i in range(5)), tuple(50.0 + i for i in range(6)))),
                  MAXMIN + BASELINES, Sweep("delta_deg", tuple(range(1, 11)))),
        "rho_sweep": (scenario(100, 100, 180, (0.8,) * 5, 8.0, 2, 2, 10.0, noise=_AR,
                               rho_jitter=0.05),
                      MAXMIN + BASELINES, Sweep("rho_mean", (0.5, 0.6, 0.7, 0.8, 0.9))),
    }


PRESETS = tuple(_presets())


def preset(name: str, trials: int = 1000, seed: int = 0) -> ExperimentSpec:
    """Built-in experiment ``name`` (see ``PRESETS``)."""
    table = _presets()
    if name not in table:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(table)}")
    cfg, detectors, sweep = table[name]
    return ExperimentSpec(cfg, detectors, trials=trials, seed=seed, sweep=sweep)
