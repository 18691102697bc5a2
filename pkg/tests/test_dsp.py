"""Tests for wdd_retrieval.dsp."""

import numpy as np
import pytest

from wdd_retrieval.dsp import (
    BandedMatrix,
    abs_sq,
    align_phase,
    as_vector,
    at,
    banded_embed,
    circular_convolve,
    circular_shift,
    dft,
    dft_matrix,
    hadamard,
    idft,
    lag_product,
    modulate,
    phase_distance,
    quotient,
    reverse,
    sgn,
    subsample,
)
from wdd_retrieval.errors import NearZeroDenominatorError, NonDivisorError, PreconditionError

# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


def _randn(rng, d):
    return rng.standard_normal(d) + 1j * rng.standard_normal(d)


# ---------------------------------------------------------------------------
# Transforms
# ---------------------------------------------------------------------------


class TestTransforms:
    def test_idft_inverts_dft(self, rng):
        x = _randn(rng, 16)
        assert np.max(np.abs(idft(dft(x)) - x)) <= 1e-12

    def test_dft_matches_dense_matrix(self, rng):
        x = _randn(rng, 12)
        assert np.allclose(dft(x), dft_matrix(12) @ x, atol=1e-10)

    def test_dft_of_delta_is_flat(self):
        e0 = np.zeros(8)
        e0[0] = 1.0
        assert np.allclose(dft(e0), np.ones(8))

    def test_rejects_empty_and_matrices(self):
        with pytest.raises(PreconditionError):
            as_vector([])
        with pytest.raises(PreconditionError):
            as_vector(np.ones((2, 2)))

    def test_at_wraps_index(self):
        assert at([1, 2, 3], -1) == 3
        assert at([1, 2, 3], 4) == 2


# ---------------------------------------------------------------------------
# Shifts, modulations, reversal
# ---------------------------------------------------------------------------


class TestShifts:
    def test_circular_shift_moves_left(self):
        assert np.array_equal(circular_shift([0, 1, 2, 3], 1).real, [1, 2, 3, 0])

    def test_negative_shift(self):
        assert np.array_equal(circular_shift([0, 1, 2, 3], -1).real, [3, 0, 1, 2])

    def test_reverse_keeps_origin(self):
        assert np.array_equal(reverse([0, 1, 2, 3]).real, [0, 3, 2, 1])

    def test_modulate_shifts_spectrum(self, rng):
        x = _randn(rng, 10)
        assert np.allclose(dft(modulate(x, 3)), np.roll(dft(x), 3), atol=1e-10)

    def test_shift_becomes_modulation_in_frequency(self, rng):
        x = _randn(rng, 12)
        expected = modulate(dft(x), 5)
        assert np.allclose(dft(circular_shift(x, 5)), expected, atol=1e-10)

    def test_dft_of_reversal(self, rng):
        x = _randn(rng, 9)
        assert np.allclose(dft(reverse(x)), reverse(dft(x)), atol=1e-10)

    def test_lag_product_zero_shift_is_power(self, rng):
        x = _randn(rng, 8)
        assert np.allclose(lag_product(x, 0), np.abs(x) ** 2)

    def test_lag_product_entries(self, rng):
        x = _randn(rng, 8)
        out = lag_product(x, 3)
        assert out[6] == pytest.approx(x[6] * np.conj(x[1]))


# ---------------------------------------------------------------------------
# Pointwise operations and convolution
# ---------------------------------------------------------------------------


class TestConvolution:
    def test_fft_path_matches_direct_sum(self, rng):
        x, y = _randn(rng, 16), _randn(rng, 16)
        fast = circular_convolve(x, y)
        slow = circular_convolve(x, y, method="direct")
        assert np.allclose(fast, slow, atol=1e-10)

    def test_convolution_theorem(self, rng):
        x, y = _randn(rng, 16), _randn(rng, 16)
        assert np.allclose(idft(dft(x) * dft(y)), circular_convolve(x, y, "direct"), atol=1e-10)

    def test_delta_is_identity(self, rng):
        x = _randn(rng, 7)
        e0 = np.zeros(7)
        e0[0] = 1.0
        assert np.allclose(circular_convolve(x, e0), x)

    def test_unknown_method(self, rng):
        x = _randn(rng, 4)
        with pytest.raises(PreconditionError):
            circular_convolve(x, x, method="matrix")  # type: ignore[arg-type]

    def test_length_mismatch(self):
        with pytest.raises(PreconditionError, match="length mismatch"):
            hadamard([1, 2, 3], [1, 2])


class TestQuotient:
    def test_abs_sq_is_squared_modulus(self):
        assert np.allclose(abs_sq([3 + 4j, -1j, 0]), [25, 1, 0])
        assert abs_sq([1j]).dtype == np.complex128

    def test_divides_componentwise(self):
        assert np.allclose(quotient([2, 6], [1, 3]), [2, 2])

    def test_near_zero_denominator_reports_index(self):
        with pytest.raises(NearZeroDenominatorError) as info:
            quotient([1, 1, 1], [1.0, 1e-20, 2.0])
        assert info.value.index == 1

    def test_explicit_threshold(self):
        with pytest.raises(NearZeroDenominatorError):
            quotient([1, 1], [1.0, 0.5], threshold=0.6)


class TestSubsample:
    def test_takes_every_sth_entry(self):
        assert np.array_equal(subsample(np.arange(8), 2).real, [0, 2, 4, 6])

    def test_non_divisor(self):
        with pytest.raises(NonDivisorError, match="s must divide d"):
            subsample(np.arange(8), 3)

    def test_aliasing_of_subsampled_spectrum(self, rng):
        d, s = 8, 2
        x = _randn(rng, d)
        x_hat = dft(x)
        folded = [
            sum(x_hat[(w + r * d // s) % d] for r in range(s)) / s for w in range(d // s)
        ]
        assert np.allclose(dft(subsample(x, s)), folded, atol=1e-10)


# ---------------------------------------------------------------------------
# Phase helpers
# ---------------------------------------------------------------------------


class TestPhase:
    def test_sgn_of_zero_is_one(self):
        assert complex(sgn(0)) == 1

    def test_sgn_normalizes(self):
        assert complex(sgn(3 - 4j)) == pytest.approx((3 - 4j) / 5)

    def test_sgn_unit_magnitude(self, rng):
        z = _randn(rng, 20)
        z[3] = 0
        assert np.allclose(np.abs(sgn(z)), 1.0)

    def test_phase_distance_ignores_global_phase(self, rng):
        x = _randn(rng, 16)
        assert phase_distance(x, np.exp(0.7j) * x) <= 1e-12

    def test_phase_distance_of_orthogonal_vectors(self):
        assert phase_distance([1, 0], [0, 1]) == pytest.approx(np.sqrt(2))

    def test_align_phase(self, rng):
        x = _randn(rng, 16)
        aligned = align_phase(np.exp(-2.1j) * x, x)
        assert np.allclose(aligned, x, atol=1e-12)


# ---------------------------------------------------------------------------
# Banded matrices
# ---------------------------------------------------------------------------


class TestBandedMatrix:
    def test_matvec_matches_dense(self, rng):
        bands = rng.standard_normal((5, 9)) + 1j * rng.standard_normal((5, 9))
        M = BandedMatrix(bands)
        v = _randn(rng, 9)
        assert np.allclose(M @ v, M.to_dense() @ v, atol=1e-12)

    def test_entries_outside_band_are_zero(self, rng):
        M = BandedMatrix(np.ones((5, 10), dtype=complex))
        dense = M.to_dense()
        for j in range(10):
            for k in range(10):
                gap = min((j - k) % 10, (k - j) % 10)
                assert (dense[j, k] != 0) == (gap < M.kappa)

    def test_band_layout(self):
        bands = np.arange(15, dtype=complex).reshape(3, 5)
        M = BandedMatrix(bands)
        dense = M.to_dense()
        assert M.kappa == 2
        assert dense[4, 0] == bands[2][4]
        assert dense[0, 4] == bands[0][0]
        assert np.array_equal(M.diagonal(), bands[1])

    def test_even_band_count_rejected(self):
        with pytest.raises(PreconditionError):
            BandedMatrix(np.ones((4, 8)))

    def test_halfwidth_too_large(self):
        with pytest.raises(PreconditionError, match="too large"):
            BandedMatrix(np.ones((7, 5)))

    def test_banded_embed_from_columns(self, rng):
        cols = rng.standard_normal((8, 3)) + 0j
        M = banded_embed(cols)
        assert M.d == 8
        assert np.array_equal(M.band(-1), cols[:, 0])
        assert np.array_equal(M.band(1), cols[:, 2])

    def test_map_bands_only_touches_stored_entries(self):
        M = BandedMatrix(np.zeros((3, 6), dtype=complex))
        dense = M.map_bands(sgn).to_dense()
        assert np.count_nonzero(dense) == 18
