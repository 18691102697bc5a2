"""Tests for wdd_retrieval.store."""

import json
import math

import numpy as np
import pytest

from wdd_retrieval.errors import PreconditionError
from wdd_retrieval.masks import exp_compact_mask, random_bandlimited_mask
from wdd_retrieval.measure import add_noise, spectrogram_subsampled
from wdd_retrieval.store import DEFAULT_OUTPUT_DIR, ResultStore

# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------


@pytest.fixture()
def store(tmp_path):
    return ResultStore(tmp_path)


@pytest.fixture()
def meas():
    rng = np.random.default_rng(8)
    x = rng.standard_normal(24) + 1j * rng.standard_normal(24)
    return spectrogram_subsampled(x, exp_compact_mask(24, 4), 6, 24)


# ---------------------------------------------------------------------------
# Paths
# ---------------------------------------------------------------------------


class TestPaths:
    def test_default_root(self):
        assert ResultStore().root == DEFAULT_OUTPUT_DIR

    def test_relative_and_absolute(self, store, tmp_path):
        assert store.path("a.csv") == tmp_path / "a.csv"
        assert store.path(tmp_path / "b.csv") == tmp_path / "b.csv"

    def test_creates_parent_directories(self, store, tmp_path):
        store.write_vector("nested/dir/x.csv", np.ones(3))
        assert (tmp_path / "nested" / "dir" / "x.csv").exists()


# ---------------------------------------------------------------------------
# Vectors and masks
# ---------------------------------------------------------------------------


class TestVectors:
    def test_round_trip_is_exact(self, store):
        values = np.array([1 / 3 + 2j, -1e-300 + 0j, np.pi - np.e * 1j])
        assert store.write_vector("x.csv", values) == 3
        assert np.array_equal(store.read_vector("x.csv"), values)

    def test_column_names(self, store, tmp_path):
        store.write_vector("x.csv", np.array([1 + 2j]))
        assert (tmp_path / "x.csv").read_text().splitlines()[0] == "index,re,im"

    def test_rows_in_any_order(self, store, tmp_path):
        (tmp_path / "x.csv").write_text("index,re,im\n1,2.0,0.0\n0,1.0,-1.0\n")
        assert np.array_equal(store.read_vector("x.csv"), [1 - 1j, 2 + 0j])

    def test_wrong_columns(self, store, tmp_path):
        (tmp_path / "x.csv").write_text("i,real,imag\n0,1,0\n")
        with pytest.raises(PreconditionError, match="expected columns"):
            store.read_vector("x.csv")


class TestMasks:
    def test_round_trip_keeps_metadata(self, store):
        mask = random_bandlimited_mask(60, 8, seed=5)
        store.write_mask("mask.csv", mask)
        back = store.read_mask("mask.csv")
        assert (back.kind, back.domain, back.support, back.offset, back.seed) == (
            "random_bandlimited",
            "fourier",
            8,
            0,
            5,
        )
        assert np.array_equal(back.values, mask.values)

    def test_header_line(self, store, tmp_path):
        store.write_mask("mask.csv", exp_compact_mask(24, 4))
        first = (tmp_path / "mask.csv").read_text().splitlines()[0]
        assert first == "# kind=exp_compact domain=space support=4 offset=0 seed=none"

    def test_missing_header(self, store, tmp_path):
        (tmp_path / "mask.csv").write_text("index,re,im\n0,1,0\n")
        with pytest.raises(PreconditionError, match="header"):
            store.read_mask("mask.csv")

    def test_malformed_header(self, store, tmp_path):
        (tmp_path / "mask.csv").write_text("# kind exp_compact\nindex,re,im\n0,1,0\n")
        with pytest.raises(PreconditionError, match="malformed"):
            store.read_mask("mask.csv")


# ---------------------------------------------------------------------------
# Measurements
# ---------------------------------------------------------------------------


class TestMeasurements:
    def test_noiseless_round_trip(self, store, tmp_path, meas):
        assert store.write_measurements("Y.csv", meas) == 144
        assert (tmp_path / "Y.csv").read_text().startswith(
            "# d=24 K=6 L=24 snr_db=inf seed=none\nk,l,value\n"
        )
        back = store.read_measurements("Y.csv")
        assert (back.d, back.K, back.L) == (24, 6, 24)
        assert np.array_equal(back.Y, meas.Y)
        assert back.noise is None
        assert back.mask is None

    def test_trial_seed_in_header(self, store, tmp_path, meas):
        store.write_measurements("Y.csv", meas, trial_seed=9)
        first = (tmp_path / "Y.csv").read_text().splitlines()[0]
        assert first == "# d=24 K=6 L=24 snr_db=inf seed=none trial_seed=9"
        assert store.read_measurements("Y.csv").d == 24

    def test_noise_metadata_restored(self, store, meas):
        store.write_measurements("Y.csv", add_noise(meas, 25.0, seed=12))
        back = store.read_measurements("Y.csv", mask=meas.mask)
        assert back.snr_db == 25.0
        assert back.seed == 12
        assert math.isnan(back.noise.sigma2)
        assert back.mask is meas.mask

    def test_missing_entries(self, store, tmp_path):
        (tmp_path / "Y.csv").write_text("# d=4 K=2 L=2\nk,l,value\n0,0,1\n0,1,1\n1,0,1\n")
        with pytest.raises(PreconditionError, match="missing entries"):
            store.read_measurements("Y.csv")

    def test_wrong_columns(self, store, tmp_path):
        (tmp_path / "Y.csv").write_text("# d=4 K=2 L=2\nrow,col,y\n")
        with pytest.raises(PreconditionError, match="expected columns"):
            store.read_measurements("Y.csv")

    def test_missing_header(self, store, tmp_path):
        (tmp_path / "Y.csv").write_text("k,l,value\n0,0,1\n")
        with pytest.raises(PreconditionError, match="header"):
            store.read_measurements("Y.csv")


# ---------------------------------------------------------------------------
# Experiment tables
# ---------------------------------------------------------------------------


class TestTables:
    def test_sweep_round_trip(self, store):
        rows = [
            {
                "snr_db": 20.0,
                "algorithm": "alg1",
                "mean_error_db": -21.23456,
                "median_error_db": -22.0,
                "trials": 100,
                "bound_ok": 100,
            },
            {
                "snr_db": math.inf,
                "algorithm": "alg1",
                "mean_error_db": -300.0,
                "median_error_db": -301.5,
                "trials": 100,
            },
        ]
        assert store.write_sweep("sweep.csv", rows) == 2
        back = store.read_sweep("sweep.csv")
        assert back[0] == {
            "snr_db": 20.0,
            "algorithm": "alg1",
            "mean_error_db": -21.2346,
            "median_error_db": -22.0,
            "trials": 100,
        }
        assert math.isinf(back[1]["snr_db"])

    def test_bench_round_trip(self, store, tmp_path):
        rows = [{"d": 66, "requested_d": 64, "algorithm": "alg1", "mean_runtime_s": 0.0125}]
        assert store.write_bench("bench.csv", rows) == 1
        assert (tmp_path / "bench.csv").read_text().splitlines()[0] == "d,algorithm,mean_runtime_s"
        assert store.read_bench("bench.csv") == [
            {"d": 66, "algorithm": "alg1", "mean_runtime_s": 0.0125}
        ]

    def test_export_json(self, store, tmp_path):
        payload = [{"name": "transforms", "passed": True}, {"name": "swap", "passed": False}]
        assert store.export_json("checks.json", payload) == 2
        assert json.loads((tmp_path / "checks.json").read_text()) == payload
        assert store.export_json("one.json", 3.5) == 1
