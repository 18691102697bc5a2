"""
CSV and JSON storage for vectors, masks, measurements and experiment tables.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Any, Iterable, Optional, TextIO, Union

import numpy as np

from wdd_retrieval.dsp import ComplexVector
from wdd_retrieval.errors import PreconditionError
from wdd_retrieval.masks import Mask
from wdd_retrieval.measure import MeasurementSet, NoiseRecord

PathLike = Union[str, Path]

DEFAULT_OUTPUT_DIR = Path("wdd_output")

VECTOR_FIELDS = ["index", "re", "im"]
MEASUREMENT_FIELDS = ["k", "l", "value"]
SWEEP_FIELDS = ["snr_db", "algorithm", "mean_error_db", "median_error_db", "trials"]
BENCH_FIELDS = ["d", "algorithm", "mean_runtime_s"]


def _num(value: float) -> str:
    return repr(float(value)) if math.isfinite(value) else str(float(value))


def _header(**pairs: Any) -> str:
    return "# " + " ".join(f"{k}={'none' if v is None else v}" for k, v in pairs.items()) + "\n"


def _parse_header(line: str) -> dict[str, str]:
    if not line.startswith("#"):
        raise PreconditionError(f"missing '# key=value' header line, got {line.strip()!r}")
    pairs: dict[str, str] = {}
    for token in line[1:].split():
        key, sep, value = token.partition("=")
        if not sep:
            raise PreconditionError(f"malformed header token {token!r}")
        pairs[key] = value
    return pairs


def _optional_int(value: str) -> Optional[int]:
    return None if value in ("none", "") else int(value)


class ResultStore:
    """Reads and writes the package's file formats under one output directory."""

    def __init__(self, root: Optional[PathLike] = None) -> None:
        self.root = Path(root) if root else DEFAULT_OUTPUT_DIR

    def path(self, name: PathLike) -> Path:
        p = Path(name)
        return p if p.is_absolute() else self.root / p

    def _open_write(self, name: PathLike) -> TextIO:
        target = self.path(name)
        target.parent.mkdir(parents=True, exist_ok=True)
        return target.open("w", newline="", encoding="utf-8")

    # ------------------------------------------------------------------
    # Vectors and masks
    # ------------------------------------------------------------------

    def _write_vector_rows(self, fh: Any, values: np.ndarray) -> int:
        writer = csv.writer(fh)
        writer.writerow(VECTOR_FIELDS)
        for i, v in enumerate(np.asarray(values, dtype=np.complex128)):
            writer.writerow([i, _num(v.real), _num(v.imag)])
        return int(values.size)

    @staticmethod
    def _read_vector_rows(lines: Iterable[str]) -> ComplexVector:
        reader = csv.DictReader(lines)
        if reader.fieldnames != VECTOR_FIELDS:
            raise PreconditionError(f"expected columns {VECTOR_FIELDS}, got {reader.fieldnames}")
        rows = sorted(reader, key=lambda r: int(r["index"]))
        return np.array([complex(float(r["re"]), float(r["im"])) for r in rows])

    def write_vector(self, name: PathLike, values: np.ndarray) -> int:
        with self._open_write(name) as fh:
            return self._write_vector_rows(fh, values)

    def read_vector(self, name: PathLike) -> ComplexVector:
        with self.path(name).open(encoding="utf-8") as fh:
            return self._read_vector_rows(fh)

    def write_mask(self, name: PathLike, mask: Mask) -> int:
        with self._open_write(name) as fh:
            fh.write(
                _header(
                    kind=mask.kind,
                    domain=mask.domain,
                    support=mask.support,
                    offset=mask.offset,
                    seed=mask.seed,
                )
            )
            return self._write_vector_rows(fh, mask.values)

    def read_mask(self, name: PathLike) -> Mask:
        with self.path(name).open(encoding="utf-8") as fh:
            meta = _parse_header(fh.readline())
            values = self._read_vector_rows(fh)
        return Mask(
            values,
            meta.get("kind", "user"),  # type: ignore[arg-type]
            meta["domain"],  # type: ignore[arg-type]
            int(meta["support"]),
            int(meta.get("offset", "0")),
            _optional_int(meta.get("seed", "none")),
        )

    # ------------------------------------------------------------------
    # Measurements
    # ------------------------------------------------------------------

    def write_measurements(
        self, name: PathLike, meas: MeasurementSet, trial_seed: Optional[int] = None
    ) -> int:
        """``seed`` is the noise seed; ``trial_seed`` (when given) generated the signal."""
        meta: dict[str, Any] = {
            "d": meas.d,
            "K": meas.K,
            "L": meas.L,
            "snr_db": meas.snr_db,
            "seed": meas.seed,
        }
        if trial_seed is not None:
            meta["trial_seed"] = trial_seed
        with self._open_write(name) as fh:
            fh.write(_header(**meta))
            writer = csv.writer(fh)
            writer.writerow(MEASUREMENT_FIELDS)
            for k in range(meas.K):
                for l in range(meas.L):
                    writer.writerow([k, l, _num(meas.Y[k, l])])
        return meas.K * meas.L

    def read_measurements(self, name: PathLike, mask: Optional[Mask] = None) -> MeasurementSet:
        with self.path(name).open(encoding="utf-8") as fh:
            meta = _parse_header(fh.readline())
            d, K, L = int(meta["d"]), int(meta["K"]), int(meta["L"])
            Y = np.full((K, L), np.nan)
            reader = csv.DictReader(fh)
            if reader.fieldnames != MEASUREMENT_FIELDS:
                raise PreconditionError(
                    f"expected columns {MEASUREMENT_FIELDS}, got {reader.fieldnames}"
                )
            for row in reader:
                Y[int(row["k"]), int(row["l"])] = float(row["value"])
        if np.isnan(Y).any():
            raise PreconditionError(f"{name}: measurement grid has missing entries")
        snr = float(meta.get("snr_db", "inf"))
        seed = _optional_int(meta.get("seed", "none"))
        noise = None
        if math.isfinite(snr) and seed is not None:
            noise = NoiseRecord(sigma2=float("nan"), seed=seed, snr_db=snr)
        return MeasurementSet(Y, d, K, L, mask=mask, noise=noise)

    # ------------------------------------------------------------------
    # Experiment tables
    # ------------------------------------------------------------------

    def _write_table(self, name: PathLike, fields: list[str], rows: list[dict[str, Any]]) -> int:
        with self._open_write(name) as fh:
            writer = csv.DictWriter(fh, fieldnames=fields, extrasaction="ignore")
            writer.writeheader()
            for row in rows:
                writer.writerow(row)
        return len(rows)

    def _read_table(self, name: PathLike) -> list[dict[str, str]]:
        with self.path(name).open(newline="", encoding="utf-8") as fh:
            return list(csv.DictReader(fh))

    def write_sweep(self, name: PathLike, rows: list[dict[str, Any]]) -> int:
        return self._write_table(name, SWEEP_FIELDS, [_fmt_db(r) for r in rows])

    def read_sweep(self, name: PathLike) -> list[dict[str, Any]]:
        return [
            {
                "snr_db": float(r["snr_db"]),
                "algorithm": r["algorithm"],
                "mean_error_db": float(r["mean_error_db"]),
                "median_error_db": float(r["median_error_db"]),
                "trials": int(r["trials"]),
            }
            for r in self._read_table(name)
        ]

    def write_bench(self, name: PathLike, rows: list[dict[str, Any]]) -> int:
        return self._write_table(name, BENCH_FIELDS, rows)

    def read_bench(self, name: PathLike) -> list[dict[str, Any]]:
        return [
            {
                "d": int(r["d"]),
                "algorithm": r["algorithm"],
                "mean_runtime_s": float(r["mean_runtime_s"]),
            }
            for r in self._read_table(name)
        ]

    def export_json(self, name: PathLike, payload: Any) -> int:
        """Write ``payload`` as indented JSON; returns the number of top-level records."""
        with self._open_write(name) as fh:
            json.dump(payload, fh, indent=2)
        return len(payload) if isinstance(payload, (list, dict)) else 1


def _fmt_db(row: dict[str, Any]) -> dict[str, Any]:
    out = dict(row)
    for key in ("mean_error_db", "median_error_db"):
        if key in out:
            out[key] = f"{float(out[key]):.4f}"
    if "snr_db" in out:
        out["snr_db"] = f"{float(out['snr_db']):.4f}"
    return out
