"""
Sample canonical correlations, at full dimension and after PCA rank reduction.

Data matrices are stored channel-by-sample: ``X`` is ``n x M`` and ``Y`` is
``m x M``. Everything is complex; real input is promoted.

After PCA to ranks ``(r_x, r_y)`` the sample canonical correlations are the
singular values of ``V_x[:, :r_x]^H V_y[:, :r_y]``, where ``V_x`` and ``V_y``
hold the right singular vectors of ``X`` and ``Y``. One SVD per channel
therefore serves every rank pair.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ComputationError, ConfigError, SingularCovarianceError

__all__ = [
    "DataMatrixPair",
    "SvdCache",
    "CanonicalSpectrum",
    "economy_svd",
    "full_canonical_correlations",
    "pca_reduce",
    "reduced_canonical_correlations",
    "spectrum_table",
    "max_rank",
]

#: slack allowed above 1 before a correlation is treated as a numerical failure
K_REJECT_TOL = 1e-9
#: covariance condition number beyond which whitening is refused
COND_LIMIT = 1e12


def _frozen(a):
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class DataMatrixPair:
    """Two observed sample matrices with a shared sample count ``M``."""

    X: np.ndarray
    Y: np.ndarray

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.X)).astype(complex)
        Y = np.atleast_2d(np.asarray(self.Y)).astype(complex)
        if X.ndim != 2 or Y.ndim != 2:
            raise ConfigError("X and Y must be 2-D (channels x samples)")
        if X.shape[1] != Y.shape[1]:
            raise ConfigError(
                f"X and Y must have the same number of samples, "
                f"got {X.shape[1]} and {Y.shape[1]}"
            )
        if X.shape[1] < 2:
            raise ConfigError("need at least 2 samples")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Y))):
            raise ConfigError("data matrices contain non-finite entries")
        object.__setattr__(self, "X", _frozen(X))
        object.__setattr__(self, "Y", _frozen(Y))

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def m(self) -> int:
        return self.Y.shape[0]

    @property
    def M(self) -> int:
        return self.X.shape[1]

    @property
    def p(self) -> int:
        return min(self.n, self.m)


@dataclass(frozen=True)
class SvdCache:
    """Economy SVDs ``X = U_x diag(s_x) V_x^H`` and ``Y = U_y diag(s_y) V_y^H``.

    ``U_x`` is ``n x k_x`` and ``V_x`` is ``M x k_x`` with ``k_x = min(n, M)``;
    singular values are descending. ``G = V_x^H V_y`` is stored alongside.
    """

    U_x: np.ndarray
    s_x: np.ndarray
    V_x: np.ndarray
    U_y: np.ndarray
    s_y: np.ndarray
    V_y: np.ndarray
    G: np.ndarray

    @property
    def n(self) -> int:
        return self.U_x.shape[0]

    @property
    def m(self) -> int:
        return self.U_y.shape[0]

    @property
    def M(self) -> int:
        return self.V_x.shape[0]


@dataclass(frozen=True)
class CanonicalSpectrum:
    """Canonical correlations for the rank pair ``(r_x, r_y)``, descending."""

    r_x: int
    r_y: int
    k: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "k", _frozen(_clamp(self.k)))

    @property
    def r(self) -> int:
        return min(self.r_x, self.r_y)

    def __len__(self):
        return len(self.k)


def _clamp(k):
    k = np.asarray(k, dtype=float)
    if k.size and (np.any(k > 1 + K_REJECT_TOL) or np.any(~np.isfinite(k))):
        raise ComputationError(
            f"canonical correlation out of range: max {np.max(k):.17g}"
        )
    return np.sort(np.clip(k, 0.0, 1.0))[::-1]


def _svd(A, which):
    try:
        U, s, Vh = np.linalg.svd(A, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise ComputationError(
            f"SVD of {which} ({A.shape[0]}x{A.shape[1]}) did not converge"
        ) from exc
    return U, s, Vh.conj().T


def economy_svd(pair: DataMatrixPair) -> SvdCache:
    """Thin SVDs of both data matrices."""
    U_x, s_x, V_x = _svd(pair.X, "X")
    U_y, s_y, V_y = _svd(pair.Y, "Y")
    return SvdCache(
        _frozen(U_x), _frozen(s_x), _frozen(V_x),
        _frozen(U_y), _frozen(s_y), _frozen(V_y),
        _frozen(V_x.conj().T @ V_y),
    )


def _inv_sqrt(R, channel):
    lam, E = np.linalg.eigh(R)
    lam_max = lam[-1]
    cond = np.inf if lam[0] <= 0 else lam_max / lam[0]
    if not lam_max > 0 or cond > COND_LIMIT:
        raise SingularCovarianceError(channel, cond)
    lam = np.maximum(lam, 1e-12 * lam_max)
    return (E / np.sqrt(lam)) @ E.conj().T


def full_canonical_correlations(pair: DataMatrixPair) -> CanonicalSpectrum:
    """Canonical correlations of the unreduced data, ``p = min(n, m)`` values.

    Computed as singular values of ``Rxx^{-1/2} Rxy Ryy^{-1/2}`` with the
    sample covariances ``XX^H/M``, ``YY^H/M`` and ``XY^H/M``.

    Raises
    ------
    SingularCovarianceError
        If either sample covariance has condition number above 1e12, which
        always happens when a channel has more dimensions than samples.
    """
    X, Y, M = pair.X, pair.Y, pair.M
    Wx = _inv_sqrt(X @ X.conj().T / M, "X")
    Wy = _inv_sqrt(Y @ Y.conj().T / M, "Y")
    coh = Wx @ (X @ Y.conj().T / M) @ Wy
    try:
        k = np.linalg.svd(coh, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise ComputationError(
            f"SVD of coherence matrix ({coh.shape[0]}x{coh.shape[1]}) "
            "did not converge"
        ) from exc
    return CanonicalSpectrum(pair.n, pair.m, k[: pair.p])


def pca_reduce(pair: DataMatrixPair, cache: SvdCache, r_x: int, r_y: int) -> DataMatrixPair:
    """Project each channel onto its ``r`` dominant principal directions."""
    if not 1 <= r_x <= min(pair.n, pair.M):
        raise ConfigError(f"r_x={r_x} outside [1, {min(pair.n, pair.M)}]")
    if not 1 <= r_y <= min(pair.m, pair.M):
        raise ConfigError(f"r_y={r_y} outside [1, {min(pair.m, pair.M)}]")
    Xr = cache.U_x[:, :r_x].conj().T @ pair.X
    Yr = cache.U_y[:, :r_y].conj().T @ pair.Y
    return DataMatrixPair(Xr, Yr)


def max_rank(n: int, m: int, M: int) -> int:
    """Largest common rank ``r`` such that every pair up to ``(r, r)`` is valid."""
    return min(n, m, M // 2)


def _check_ranks(r_x, r_y, n, m, M):
    p = min(n, m)
    if r_x < 1 or r_y < 1:
        raise ConfigError(f"ranks must be positive, got ({r_x}, {r_y})")
    if r_x + r_y > M or max(r_x, r_y) > p:
        raise ConfigError(
            f"ranks ({r_x}, {r_y}) violate r_x + r_y <= M={M} "
            f"and max(r_x, r_y) <= min(n, m)={p}"
        )


def _singular_values(G, r_x, r_y):
    try:
        return np.linalg.svd(G[:r_x, :r_y], compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise ComputationError(
            f"SVD of {r_x}x{r_y} Gram block did not converge"
        ) from exc


def reduced_canonical_correlations(cache: SvdCache, r_x: int, r_y: int) -> CanonicalSpectrum:
    """Canonical correlations after PCA to ranks ``(r_x, r_y)``.

    Ranks must satisfy ``r_x + r_y <= M`` and ``max(r_x, r_y) <= min(n, m)``;
    beyond that, unit correlations appear regardless of the data.
    """
    _check_ranks(r_x, r_y, cache.n, cache.m, cache.M)
    return CanonicalSpectrum(r_x, r_y, _singular_values(cache.G, r_x, r_y))


def spectrum_table(cache: SvdCache, r_max: int) -> dict[tuple[int, int], CanonicalSpectrum]:
    """All spectra for ``1 <= r_x, r_y <= r_max``, keyed by ``(r_x, r_y)``."""
    bound = max_rank(cache.n, cache.m, cache.M)
    if not 1 <= r_max <= bound:
        raise ConfigError(f"r_max={r_max} outside [1, {bound}]")
    return {
        (rx, ry): CanonicalSpectrum(rx, ry, _singular_values(cache.G, rx, ry))
        for rx in range(1, r_max + 1)
        for ry in range(1, r_max + 1)
    }
