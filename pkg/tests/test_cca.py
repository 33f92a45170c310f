import numpy as np
import pytest

from ccorder.cca import (
    CanonicalSpectrum,
    DataMatrixPair,
    economy_svd,
    full_canonical_correlations,
    max_rank,
    pca_reduce,
    reduced_canonical_correlations,
    spectrum_table,
)
from ccorder.errors import ComputationError, ConfigError, SingularCovarianceError

from conftest import qr_canonical_correlations, random_pair


# -- data types ------------------------------------------------------------------

def test_pair_promotes_to_complex_and_freezes():
    pair = DataMatrixPair(np.ones((2, 4)), np.arange(12.0).reshape(3, 4))
    assert pair.X.dtype == complex
    assert (pair.n, pair.m, pair.M, pair.p) == (2, 3, 4, 2)
    with pytest.raises(ValueError):
        pair.X[0, 0] = 5


@pytest.mark.parametrize("X, Y", [
    (np.ones((2, 4)), np.ones((2, 5))),
    (np.ones((2, 1)), np.ones((2, 1))),
    (np.full((2, 4), np.nan), np.ones((2, 4))),
])
def test_pair_rejects_bad_shapes(X, Y):
    with pytest.raises(ConfigError):
        DataMatrixPair(X, Y)


def test_spectrum_sorted_and_clamped():
    k = CanonicalSpectrum(3, 3, [0.2, 1.0 + 1e-12, 0.5])
    np.testing.assert_array_equal(k.k, [1.0, 0.5, 0.2])
    assert k.r == 3 and len(k) == 3


def test_spectrum_rejects_values_above_one():
    with pytest.raises(ComputationError):
        CanonicalSpectrum(2, 2, [1.01, 0.3])


# -- full dimension ------------------------------------------------------------

def test_identical_channels_give_unit_correlations(rng):
    pair = random_pair(rng, 4, 4, 50)
    same = DataMatrixPair(pair.X, pair.X)
    np.testing.assert_allclose(full_canonical_correlations(same).k, 1.0, atol=1e-10)


def test_full_matches_qr_oracle(rng):
    for _ in range(20):
        n, m = rng.integers(2, 8, size=2)
        pair = random_pair(rng, n, m, 40, shared=1)
        k = full_canonical_correlations(pair)
        ref = qr_canonical_correlations(pair.X, pair.Y)[: min(n, m)]
        np.testing.assert_allclose(k.k, ref, atol=1e-10)


def test_full_invariant_to_invertible_transforms(rng):
    pair = random_pair(rng, 5, 4, 60, shared=2)
    A = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    B = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    moved = DataMatrixPair(A @ pair.X, B @ pair.Y)
    np.testing.assert_allclose(
        full_canonical_correlations(moved).k, full_canonical_correlations(pair).k, atol=1e-8
    )


def test_full_refuses_rank_deficient_covariance(rng):
    pair = random_pair(rng, 20, 20, 15)
    with pytest.raises(SingularCovarianceError) as err:
        full_canonical_correlations(pair)
    assert err.value.channel == "X"


# -- SVD identity ---------------------------------------------------------------

def test_svd_cache_reconstructs_data(rng):
    pair = random_pair(rng, 6, 9, 7)
    c = economy_svd(pair)
    np.testing.assert_allclose((c.U_x * c.s_x) @ c.V_x.conj().T, pair.X, atol=1e-12)
    np.testing.assert_allclose((c.U_y * c.s_y) @ c.V_y.conj().T, pair.Y, atol=1e-12)
    assert c.V_x.shape == (7, 6) and c.V_y.shape == (7, 7)
    np.testing.assert_allclose(c.G, c.V_x.conj().T @ c.V_y)


def test_reduced_matches_pca_then_cca(rng):
    for _ in range(30):
        n, m = rng.integers(3, 15, size=2)
        M = int(rng.integers(6, 40))
        pair = random_pair(rng, n, m, M, shared=2)
        cache = economy_svd(pair)
        R = max_rank(n, m, M)
        rx, ry = rng.integers(1, R + 1, size=2)
        k = reduced_canonical_correlations(cache, rx, ry)
        red = pca_reduce(pair, cache, rx, ry)
        ref = qr_canonical_correlations(red.X, red.Y)
        np.testing.assert_allclose(k.k, ref[: min(rx, ry)], atol=1e-9)


def test_table_entries_equal_direct_calls(rng):
    pair = random_pair(rng, 8, 8, 20, shared=2)
    cache = economy_svd(pair)
    table = spectrum_table(cache, 5)
    assert len(table) == 25
    for (rx, ry), spec in table.items():
        np.testing.assert_array_equal(spec.k, reduced_canonical_correlations(cache, rx, ry).k)


def test_lemma1_monotone_in_both_ranks(rng):
    pair = random_pair(rng, 12, 10, 24, shared=3)
    table = spectrum_table(economy_svd(pair), max_rank(12, 10, 24))
    R = 10
    for rx in range(1, R + 1):
        for ry in range(1, R + 1):
            k = table[rx, ry].k
            if rx < R:
                nxt = table[rx + 1, ry].k
                assert np.all(nxt[: len(k)] >= k - 1e-10)
            if ry < R:
                nxt = table[rx, ry + 1].k
                assert np.all(nxt[: len(k)] >= k - 1e-10)


def test_reduced_invariant_to_unitary_rotation(rng):
    pair = random_pair(rng, 6, 6, 30, shared=2)
    Qx, _ = np.linalg.qr(rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6)))
    Qy, _ = np.linalg.qr(rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6)))
    a = reduced_canonical_correlations(economy_svd(pair), 3, 4).k
    b = reduced_canonical_correlations(economy_svd(DataMatrixPair(Qx @ pair.X, Qy @ pair.Y)), 3, 4).k
    np.testing.assert_allclose(a, b, atol=1e-10)


def test_defective_unit_correlations(rng):
    # n + m - M = 10 forced unit correlations at full rank
    pair = random_pair(rng, 20, 20, 30)
    full = np.linalg.svd(economy_svd(pair).G, compute_uv=False)
    assert np.sum(np.abs(1 - full) < 1e-8) >= 10
    # within r_x + r_y <= M the reduced spectrum is not forced to one
    k = reduced_canonical_correlations(economy_svd(pair), 5, 5).k
    assert np.all(k < 1 - 1e-6)


def test_rank_one_value():
    # one sample direction in common
    X = np.array([[1.0, 0.0, 0.0, 0.0]])
    Y = np.array([[1.0, 1.0, 0.0, 0.0]])
    k = reduced_canonical_correlations(economy_svd(DataMatrixPair(X, Y)), 1, 1).k
    np.testing.assert_allclose(k, [1 / np.sqrt(2)])


@pytest.mark.parametrize("rx, ry", [(0, 1), (1, 0), (11, 1), (6, 6)])
def test_rank_bounds(rng, rx, ry):
    cache = economy_svd(random_pair(rng, 10, 10, 11))
    with pytest.raises(ConfigError):
        reduced_canonical_correlations(cache, rx, ry)


def test_table_rmax_bound(rng):
    cache = economy_svd(random_pair(rng, 10, 10, 11))
    assert max_rank(10, 10, 11) == 5
    with pytest.raises(ConfigError):
        spectrum_table(cache, 6)


def test_pca_reduce_rank_bounds(rng):
    pair = random_pair(rng, 4, 4, 10)
    with pytest.raises(ConfigError):
        pca_reduce(pair, economy_svd(pair), 5, 1)
