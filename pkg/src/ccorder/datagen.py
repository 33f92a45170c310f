"""
Synthetic two-channel data: ``X = A_x S_x + N_x`` and ``Y = A_y S_y + N_y``.

The first ``d`` signals of each channel are pairwise correlated with
coefficients ``rho``; the remaining ``f_x`` / ``f_y`` signals are independent
across channels. Complex Gaussians are circular with ``E|z|^2`` equal to the
stated variance.

All randomness comes from the ``numpy.random.Generator`` passed in, so a
dataset is a pure function of ``(config, generator state)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Union

import numpy as np

from .cca import DataMatrixPair
from .errors import ConfigError

__all__ = [
    "RandomUnitary",
    "UlaSteering",
    "White",
    "SpatialMA",
    "SpatialAR1",
    "ScenarioConfig",
    "GeneratedDataset",
    "trial_rng",
    "random_unitary",
    "ula_steering",
    "complex_normal",
    "sample_signals",
    "sample_noise",
    "mixing_matrices",
    "generate",
]


def trial_rng(seed: int, *key: int) -> np.random.Generator:
    """Independent Philox stream for ``(seed, *key)``.

    Streams for different keys never overlap, whatever order they are used in.
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def complex_normal(rng, shape, variance=1.0):
    """Circular complex Gaussian samples with ``E|z|^2 = variance``."""
    scale = np.sqrt(np.asarray(variance, dtype=float) / 2.0)
    z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return scale * z


# -- mixing ----------------------------------------------------------------------

@dataclass(frozen=True)
class RandomUnitary:
    """Mixing columns taken from a Haar unitary, redrawn per dataset."""


@dataclass(frozen=True)
class UlaSteering:
    """Fixed half-wavelength ULA steering vectors for each channel."""

    angles_x_deg: tuple[float, ...]
    angles_y_deg: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "angles_x_deg", tuple(float(a) for a in self.angles_x_deg))
        object.__setattr__(self, "angles_y_deg", tuple(float(a) for a in self.angles_y_deg))

    def with_spacing(self, delta_deg):
        """Same first angles, consecutive sources ``delta_deg`` apart."""
        ax = self.angles_x_deg[0] + delta_deg * np.arange(len(self.angles_x_deg))
        ay = self.angles_y_deg[0] + delta_deg * np.arange(len(self.angles_y_deg))
        return UlaSteering(tuple(ax), tuple(ay))


MixingModel = Union[RandomUnitary, UlaSteering]


def random_unitary(dim: int, rng: np.random.Generator, cols: int | None = None) -> np.ndarray:
    """Haar-distributed ``dim x dim`` unitary (QR with phase correction).

    With ``cols`` only the first ``cols`` columns are drawn; they have the same
    distribution as the leading columns of a full Haar unitary.
    """
    if dim < 1:
        raise ConfigError(f"dim must be >= 1, got {dim}")
    cols = dim if cols is None else cols
    if not 0 <= cols <= dim:
        raise ConfigError(f"cols must be in [0, {dim}], got {cols}")
    Z = complex_normal(rng, (dim, cols))
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R)
    return Q * (d / np.abs(d))


def ula_steering(dim: int, angles_deg) -> np.ndarray:
    """Columns ``exp(j (pi/2) k sin(theta))`` for sensors ``k = 0..dim-1``."""
    if dim < 1:
        raise ConfigError(f"dim must be >= 1, got {dim}")
    theta = np.deg2rad(np.asarray(angles_deg, dtype=float))
    k = np.arange(dim)[:, None]
    return np.exp(1j * (np.pi / 2) * k * np.sin(theta)[None, :])


# -- noise -------------------------------------------------------------------------

@dataclass(frozen=True)
class White:
    sigma2: float = 1.0

    def __post_init__(self):
        if not self.sigma2 > 0:
            raise ConfigError(f"white noise variance must be > 0, got {self.sigma2}")


@dataclass(frozen=True)
class SpatialMA:
    """Moving average across the sensor index, wrapping around at the edge."""

    coeffs: tuple[float, ...] = (1 / np.sqrt(3),) * 3
    sigma2_w: float = 1 / 3

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if not self.coeffs:
            raise ConfigError("MA noise needs at least one coefficient")
        if not self.sigma2_w > 0:
            raise ConfigError(f"MA driver variance must be > 0, got {self.sigma2_w}")

    @property
    def variance(self):
        return self.sigma2_w * float(np.sum(np.square(self.coeffs)))


@dataclass(frozen=True)
class SpatialAR1:
    """First-order autoregression across the sensor index, stationary start."""

    a: float = 0.65
    sigma2_w: float = 1 - 0.65 ** 2

    def __post_init__(self):
        if not abs(self.a) < 1:
            raise ConfigError(f"AR(1) coefficient must satisfy |a| < 1, got {self.a}")
        if not self.sigma2_w > 0:
            raise ConfigError(f"AR(1) innovation variance must be > 0, got {self.sigma2_w}")

    @property
    def variance(self):
        return self.sigma2_w / (1 - self.a ** 2)


NoiseModel = Union[White, SpatialMA, SpatialAR1]


def sample_noise(model: NoiseModel, dim: int, M: int, rng: np.random.Generator) -> np.ndarray:
    """``dim x M`` noise matrix; columns are i.i.d., rows follow ``model``."""
    if isinstance(model, White):
        return complex_normal(rng, (dim, M), model.sigma2)
    if isinstance(model, SpatialMA):
        q = len(model.coeffs)
        if dim < q:
            raise ConfigError(f"MA({q}) noise needs dim >= {q}, got {dim}")
        w = complex_normal(rng, (dim, M), model.sigma2_w)
        out = np.zeros((dim, M), dtype=complex)
        for lag, c in enumerate(model.coeffs):
            out += c * np.roll(w, -lag, axis=0)
        return out
    if isinstance(model, SpatialAR1):
        w = complex_normal(rng, (dim, M), model.sigma2_w)
        out = np.empty((dim, M), dtype=complex)
        out[0] = w[0] / np.sqrt(1 - model.a ** 2)
        for k in range(1, dim):
            out[k] = model.a * out[k - 1] + w[k]
        return out
    raise ConfigError(f"unknown noise model {model!r}")


# -- scenario ------------------------------------------------------------------------

@dataclass(frozen=True)
class ScenarioConfig:
    """Generative description of one two-channel experiment.

    ``sigma_x`` / ``sigma_y`` are standard deviations, correlated signals
    first. ``rho_jitter > 0`` draws each dataset's coefficients uniformly from
    ``[rho_i - rho_jitter, rho_i + rho_jitter]``.
    """

    n: int
    m: int
    M: int
    d: int
    f_x: int
    f_y: int
    sigma_x: tuple[float, ...]
    sigma_y: tuple[float, ...]
    rho: tuple[float, ...]
    mixing: MixingModel = field(default_factory=RandomUnitary)
    noise: NoiseModel = field(default_factory=White)
    rho_jitter: float = 0.0

    def __post_init__(self):
        for name in ("sigma_x", "sigma_y", "rho"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))
        for name in ("n", "m", "M", "d", "f_x", "f_y"):
            v = getattr(self, name)
            if int(v) != v or v < 0:
                raise ConfigError(f"{name} must be a non-negative integer, got {v}")
            object.__setattr__(self, name, int(v))
        if self.n < 1 or self.m < 1:
            raise ConfigError("channel dimensions must be >= 1")
        if self.M < 2:
            raise ConfigError(f"M must be >= 2, got {self.M}")
        if self.d + self.f_x > self.n or self.d + self.f_y > self.m:
            raise ConfigError(
                f"d + f_x <= n and d + f_y <= m required, got d={self.d}, "
                f"f_x={self.f_x}, f_y={self.f_y}, n={self.n}, m={self.m}"
            )
        if len(self.sigma_x) != self.d + self.f_x or len(self.sigma_y) != self.d + self.f_y:
            raise ConfigError("sigma_x / sigma_y lengths must be d + f_x / d + f_y")
        if len(self.rho) != self.d:
            raise ConfigError(f"need {self.d} correlation coefficients, got {len(self.rho)}")
        if any(s <= 0 for s in self.sigma_x + self.sigma_y):
            raise ConfigError("standard deviations must be > 0")
        if any(abs(r) > 1 for r in self.rho):
            raise ConfigError("correlation coefficients must lie in [-1, 1]")
        if not 0 <= self.rho_jitter <= 1:
            raise ConfigError(f"rho_jitter must be in [0, 1], got {self.rho_jitter}")
        if isinstance(self.mixing, UlaSteering):
            if (len(self.mixing.angles_x_deg) != self.d + self.f_x
                    or len(self.mixing.angles_y_deg) != self.d + self.f_y):
                raise ConfigError("ULA angle counts must equal d + f_x and d + f_y")

    def replace(self, **changes) -> ScenarioConfig:
        return replace(self, **changes)


@dataclass(frozen=True)
class GeneratedDataset:
    pair: DataMatrixPair
    d: int
    f_x: int
    f_y: int
    rho: tuple[float, ...]


def _draw_rho(cfg, rng):
    rho = np.asarray(cfg.rho, dtype=float)
    if cfg.rho_jitter > 0 and cfg.d:
        rho = rho + rng.uniform(-cfg.rho_jitter, cfg.rho_jitter, size=cfg.d)
        rho = np.clip(rho, -1.0, 1.0)
    return rho


def sample_signals(cfg: ScenarioConfig, rng: np.random.Generator, rho=None):
    """Latent signals ``S_x`` (``(d+f_x) x M``) and ``S_y`` (``(d+f_y) x M``).

    Correlated pair ``i`` is ``s_x = sx*z1``, ``s_y = sy*(rho*z1 + sqrt(1-rho^2)*z2)``
    with independent unit ``z1, z2``.
    """
    d, M = cfg.d, cfg.M
    rho = np.asarray(cfg.rho if rho is None else rho, dtype=float)
    sx = np.asarray(cfg.sigma_x)[:, None]
    sy = np.asarray(cfg.sigma_y)[:, None]
    Zx = complex_normal(rng, (d + cfg.f_x, M))
    Zy = complex_normal(rng, (d + cfg.f_y, M))
    Zy[:d] = rho[:, None] * Zx[:d] + np.sqrt(1.0 - rho[:, None] ** 2) * Zy[:d]
    return sx * Zx, sy * Zy


def mixing_matrices(cfg: ScenarioConfig, rng: np.random.Generator):
    if isinstance(cfg.mixing, UlaSteering):
        return (ula_steering(cfg.n, cfg.mixing.angles_x_deg),
                ula_steering(cfg.m, cfg.mixing.angles_y_deg))
    if isinstance(cfg.mixing, RandomUnitary):
        A_x = random_unitary(cfg.n, rng, cfg.d + cfg.f_x)
        A_y = random_unitary(cfg.m, rng, cfg.d + cfg.f_y)
        return A_x, A_y
    raise ConfigError(f"unknown mixing model {cfg.mixing!r}")


def generate(cfg: ScenarioConfig, rng: np.random.Generator) -> GeneratedDataset:
    """Draw one dataset. Draw order: mixing, rho jitter, signals, noise X, noise Y."""
    A_x, A_y = mixing_matrices(cfg, rng)
    rho = _draw_rho(cfg, rng)
    S_x, S_y = sample_signals(cfg, rng, rho)
    X = A_x @ S_x + sample_noise(cfg.noise, cfg.n, cfg.M, rng)
    Y = A_y @ S_y + sample_noise(cfg.noise, cfg.m, cfg.M, rng)
    return GeneratedDataset(DataMatrixPair(X, Y), cfg.d, cfg.f_x, cfg.f_y, tuple(rho))
