"""Tests for wdd_retrieval.angsync."""

import numpy as np
import pytest

from wdd_retrieval.angsync import (
    hermitianize,
    leading_eigenvector,
    magnitudes_from_diagonal,
    sign_normalize,
    synchronize,
)
from wdd_retrieval.dsp import BandedMatrix, dft, lag_product, phase_distance
from wdd_retrieval.errors import NoConvergenceError, PreconditionError
from wdd_retrieval.wdd import BandSet

# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------


@pytest.fixture()
def rng():
    return np.random.default_rng(99)


def _randn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _true_bands(z, kappa):
    bands = np.stack([lag_product(z, alpha) for alpha in range(1 - kappa, kappa)])
    return BandSet("fourier", kappa, bands, np.fft.fft(bands, axis=1))


@pytest.fixture()
def spectrum(rng):
    return dft(_randn(rng, 60))


# ---------------------------------------------------------------------------
# hermitianize / sign_normalize
# ---------------------------------------------------------------------------


class TestHermitianize:
    def test_hermitian_input_unchanged(self, rng):
        A = _randn(rng, 6, 6)
        H = A + A.conj().T
        assert np.allclose(hermitianize(H), H)

    def test_output_is_hermitian(self, rng):
        H = hermitianize(_randn(rng, 7, 7))
        assert np.allclose(H, H.conj().T)

    def test_does_not_grow_frobenius_norm(self, rng):
        M = _randn(rng, 9, 9)
        assert np.linalg.norm(hermitianize(M)) <= np.linalg.norm(M) + 1e-12

    def test_banded_matches_dense(self, rng):
        M = BandedMatrix(_randn(rng, 5, 12))
        banded = hermitianize(M)
        assert isinstance(banded, BandedMatrix)
        assert np.allclose(banded.to_dense(), hermitianize(M.to_dense()))

    def test_rejects_non_square(self):
        with pytest.raises(PreconditionError):
            hermitianize(np.ones((2, 3)))


class TestSignNormalize:
    def test_unit_magnitude_and_zero_rule(self):
        out = sign_normalize(np.array([[0, 3 - 4j], [2j, -5]]))
        assert np.allclose(out, [[1, (3 - 4j) / 5], [1j, -1]])

    def test_banded_keeps_structure(self, rng):
        M = BandedMatrix(_randn(rng, 3, 8))
        out = sign_normalize(M)
        assert isinstance(out, BandedMatrix)
        assert np.allclose(np.abs(out.bands), 1.0)
        assert np.count_nonzero(out.to_dense()) == 24


class TestMagnitudes:
    def test_negative_diagonal_clamped(self):
        assert np.allclose(magnitudes_from_diagonal(np.diag([4.0, -1.0, 9.0])), [2, 0, 3])

    def test_zero_matrix(self):
        assert np.array_equal(magnitudes_from_diagonal(np.zeros((3, 3))), np.zeros(3))

    def test_banded_diagonal(self, spectrum):
        bands = _true_bands(spectrum, 4).to_banded()
        assert np.allclose(magnitudes_from_diagonal(bands), np.abs(spectrum))


# ---------------------------------------------------------------------------
# leading_eigenvector
# ---------------------------------------------------------------------------


class TestLeadingEigenvector:
    def test_diagonal(self):
        result = leading_eigenvector(np.diag([2.0, 1.0]))
        assert result.converged
        assert result.value == pytest.approx(2.0)
        assert np.allclose(result.vector, [1.0, 0.0], atol=1e-10)

    def test_rank_one(self, rng):
        v = _randn(rng, 6)
        v /= np.linalg.norm(v)
        result = leading_eigenvector(np.outer(v, v.conj()))
        assert result.value == pytest.approx(1.0)
        assert phase_distance(v, result.vector) <= 1e-10

    def test_matches_dense_eigensolver(self, rng):
        Q, _ = np.linalg.qr(_randn(rng, 8, 8))
        M = Q @ np.diag([5.0, 2.0, 1.0, 0.0, -1.0, -2.0, -3.0, -4.0]) @ Q.conj().T
        result = leading_eigenvector(M)
        values, vectors = np.linalg.eigh(M)
        assert result.value == pytest.approx(values[-1], abs=1e-8)
        assert phase_distance(vectors[:, -1], result.vector) <= 1e-8

    def test_gauge_makes_largest_entry_real(self, rng):
        Q, _ = np.linalg.qr(_randn(rng, 5, 5))
        M = Q @ np.diag([3.0, 1.0, 0.5, 0.0, -1.0]) @ Q.conj().T
        vec = leading_eigenvector(M).vector
        top = vec[np.argmax(np.abs(vec))]
        assert top.real > 0
        assert abs(top.imag) <= 1e-12

    def test_negative_dominant_eigenvalue_is_not_chosen(self):
        result = leading_eigenvector(np.diag([-5.0, 1.0]))
        assert result.value == pytest.approx(1.0)

    def test_strict_cap_raises(self):
        with pytest.raises(NoConvergenceError):
            leading_eigenvector(np.diag([2.0, 1.0]), max_iter=1, strict=True)

    def test_cap_returns_best_iterate(self):
        result = leading_eigenvector(np.diag([2.0, 1.0]), max_iter=1)
        assert not result.converged
        assert result.iterations == 1

    def test_tolerance_must_be_positive(self):
        with pytest.raises(PreconditionError):
            leading_eigenvector(np.eye(2), tol=0.0)

    def test_banded_operator(self, spectrum):
        normalized = sign_normalize(hermitianize(_true_bands(spectrum, 8).to_banded()))
        result = leading_eigenvector(normalized)
        assert result.value == pytest.approx(15.0)
        assert phase_distance(np.exp(1j * np.angle(spectrum)), np.sqrt(60) * result.vector) <= 1e-8


# ---------------------------------------------------------------------------
# synchronize
# ---------------------------------------------------------------------------


class TestSynchronize:
    def test_noiseless_recovers_spectrum(self, spectrum):
        sync = synchronize(_true_bands(spectrum, 8))
        assert sync.converged
        assert sync.eigenvalue == pytest.approx(15.0)
        assert phase_distance(spectrum, sync.estimate) <= 1e-8 * np.linalg.norm(spectrum)

    def test_global_phase_of_input_is_invisible(self, spectrum):
        base = synchronize(_true_bands(spectrum, 5))
        rotated = synchronize(_true_bands(np.exp(0.4j) * spectrum, 5))
        assert np.allclose(base.magnitudes, rotated.magnitudes)
        assert phase_distance(base.estimate, rotated.estimate) <= 1e-8 * np.linalg.norm(spectrum)

    def test_scaling_bands(self, spectrum):
        bands = _true_bands(spectrum, 5)
        scaled = BandSet("fourier", 5, 4.0 * bands.bands, bands.spectra)
        base, big = synchronize(bands), synchronize(scaled)
        assert np.allclose(big.magnitudes, 2.0 * base.magnitudes)
        assert phase_distance(base.phases, big.phases) <= 1e-8 * np.sqrt(60)

    def test_single_band_gives_flat_phases(self, spectrum):
        sync = synchronize(_true_bands(spectrum, 1))
        assert np.allclose(sync.phases, 1.0)
        assert np.allclose(sync.magnitudes, np.abs(spectrum))

    def test_perturbation_degrades_gracefully(self, rng, spectrum):
        bands = _true_bands(spectrum, 6)
        noise = _randn(rng, *bands.bands.shape)
        errors = []
        for scale in (1e-6, 1e-3, 1e-1):
            noisy = BandSet("fourier", 6, bands.bands + scale * noise, bands.spectra)
            errors.append(phase_distance(spectrum, synchronize(noisy).estimate))
        assert errors[0] < errors[2]
        assert errors[0] <= 1e-3 * np.linalg.norm(spectrum)
