"""Tests for wdd_retrieval.bounds."""

import math

import numpy as np
import pytest

from wdd_retrieval.bounds import algorithm1_bound, algorithm2_bound, noise_norm
from wdd_retrieval.dsp import idft, phase_distance
from wdd_retrieval.masks import exp_bandlimited_mask, random_compact_mask
from wdd_retrieval.measure import add_noise, spectrogram_subsampled
from wdd_retrieval.pipelines import algorithm1
from wdd_retrieval.tiksolve import build_vandermonde


@pytest.fixture()
def rng():
    return np.random.default_rng(3)


def _randn(rng, d):
    return rng.standard_normal(d) + 1j * rng.standard_normal(d)


@pytest.fixture()
def alg1_case(rng):
    x = _randn(rng, 60)
    mask = exp_bandlimited_mask(60, 8)
    return x, mask, spectrogram_subsampled(x, mask, 60, 15)


class TestNoiseNorm:
    def test_noiseless_is_zero(self, alg1_case):
        _, _, meas = alg1_case
        assert noise_norm(meas) == 0.0

    def test_matches_recorded_noise(self, alg1_case):
        _, _, meas = alg1_case
        noisy = add_noise(meas, 30.0, seed=4)
        assert noise_norm(noisy) == pytest.approx(np.linalg.norm(noisy.noise.matrix))


class TestAlgorithm1Bound:
    def test_noiseless_bound_is_zero(self, alg1_case):
        x, mask, meas = alg1_case
        assert algorithm1_bound(x, meas, mask, 8) == 0.0

    def test_noisy_bound_holds(self, alg1_case):
        x, mask, meas = alg1_case
        noisy = add_noise(meas, 40.0, seed=9)
        bound = algorithm1_bound(x, noisy, mask, 8)
        result = algorithm1(noisy, mask)
        err = phase_distance(x, result.x_e)
        assert math.isfinite(bound)
        assert err <= bound

    def test_vanishing_spectrum_is_unbounded(self, alg1_case):
        _, mask, meas = alg1_case
        spectrum = np.ones(60, dtype=complex)
        spectrum[7] = 0.0
        assert math.isinf(algorithm1_bound(idft(spectrum), meas, mask, 8))

    def test_grows_with_noise(self, alg1_case):
        x, mask, meas = alg1_case
        loud = algorithm1_bound(x, add_noise(meas, 20.0, seed=1), mask, 8)
        quiet = algorithm1_bound(x, add_noise(meas, 60.0, seed=1), mask, 8)
        assert quiet < loud


class TestAlgorithm2Bound:
    @pytest.fixture()
    def case(self, rng):
        spectrum = np.zeros(190, dtype=complex)
        spectrum[:10] = _randn(rng, 10)
        x = idft(spectrum)
        mask = random_compact_mask(190, 48, seed=0)
        return x, mask, spectrogram_subsampled(x, mask, 95, 19), build_vandermonde(190, 48, 10)

    def test_noiseless_bound_is_zero(self, case):
        x, mask, meas, system = case
        assert algorithm2_bound(x, meas, mask, 10, system) == 0.0

    def test_noisy_bound_is_positive(self, case):
        x, mask, meas, system = case
        bound = algorithm2_bound(x, add_noise(meas, 30.0, seed=2), mask, 10, system)
        assert 0.0 < bound < math.inf

    def test_zero_signal_is_unbounded(self, case):
        _, mask, meas, system = case
        assert math.isinf(algorithm2_bound(np.zeros(190), meas, mask, 10, system))
