"""
Experiment configuration: the validated parameter set behind simulate and sweep,
plus the ``key=value`` config-file loader and thread-count resolution.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Iterable, Optional, Union

import numpy as np

from wdd_retrieval.errors import PreconditionError
from wdd_retrieval.masks import MASK_BUILDERS, Domain
from wdd_retrieval.measure import check_divides
from wdd_retrieval.presets import DEFAULT_MASK, get_preset

logger = logging.getLogger(__name__)

ALGORITHMS = ("alg1", "alg2", "lemma11", "hioer")
SOLVERS = ("pinv", "tikhonov")
DEFAULT_SNRS = (10.0, 20.0, 30.0, 40.0, 50.0, 60.0)
THREADS_ENV = "WDD_THREADS"


def mask_domain(kind: str) -> Domain:
    return "fourier" if kind.endswith("_bandlimited") else "space"


def new_seed() -> int:
    """A fresh seed from system entropy, small enough to print and retype."""
    return int(np.random.SeedSequence().entropy % 2**31)


@dataclass(frozen=True)
class ExperimentConfig:
    algorithm: str = "alg1"
    d: int = 60
    support: int = 8
    K: Optional[int] = None
    L: Optional[int] = None
    gamma: Optional[int] = None
    mask: Optional[str] = None
    mask_seed: Optional[int] = None
    snr: tuple[float, ...] = DEFAULT_SNRS
    trials: int = 100
    seed: int = 0
    output: Optional[Path] = None
    solver: str = "pinv"
    tikhonov_q: float = 0.8
    tikhonov_N: int = 20
    alpha0: Optional[float] = None
    extra: dict[str, Any] = field(default_factory=dict, compare=False, repr=False)

    @classmethod
    def from_preset(cls, name: str, **overrides: Any) -> ExperimentConfig:
        """Preset values, with any non-None override taking precedence."""
        values: dict[str, Any] = get_preset(name)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls.from_mapping(values)

    @classmethod
    def from_mapping(cls, values: dict[str, Any]) -> ExperimentConfig:
        known = {f.name for f in fields(cls)} - {"extra"}
        kwargs = {k: v for k, v in values.items() if k in known and v is not None}
        extra = {k: v for k, v in values.items() if k not in known}
        if "snr" in kwargs:
            kwargs["snr"] = tuple(float(s) for s in kwargs["snr"])
        if "output" in kwargs:
            kwargs["output"] = Path(kwargs["output"])
        return cls(**kwargs, extra=extra)

    # ------------------------------------------------------------------
    # Derived values
    # ------------------------------------------------------------------

    @property
    def mask_kind(self) -> str:
        return self.mask or DEFAULT_MASK.get(self.algorithm, "exp_bandlimited")

    @property
    def kappa(self) -> Optional[int]:
        if self.algorithm in ("alg1", "hioer") and self.L is not None:
            return self.L - self.support + 1
        if self.algorithm == "lemma11" and self.K is not None:
            return self.K - self.support + 1
        return None

    def resolved(self) -> ExperimentConfig:
        """Fill K, L and gamma from the algorithm's measurement layout where they are implied."""
        K, L, gamma = self.K, self.L, self.gamma
        if self.algorithm in ("alg1", "hioer") and K is None:
            K = self.d
        elif self.algorithm == "lemma11" and L is None:
            L = self.d
        elif self.algorithm == "alg2":
            if K is None:
                K = 2 * self.support - 1
            if gamma is None and L is not None and L % 2 == 1:
                gamma = (L + 1) // 2
            if L is None and gamma is not None:
                L = 2 * gamma - 1
        return replace(self, K=K, L=L, gamma=gamma, mask=self.mask_kind)

    # ------------------------------------------------------------------
    # Validation
    # ------------------------------------------------------------------

    def validate(self) -> ExperimentConfig:
        """Check ranges and divisibility; returns the resolved config."""
        cfg = self.resolved()
        if cfg.algorithm not in ALGORITHMS:
            raise PreconditionError(
                f"unknown algorithm {cfg.algorithm!r}; choose from {ALGORITHMS}"
            )
        if cfg.mask_kind not in MASK_BUILDERS:
            raise PreconditionError(
                f"unknown mask kind {cfg.mask_kind!r}; choose from {sorted(MASK_BUILDERS)}"
            )
        if cfg.trials < 1:
            raise PreconditionError(f"trials must be >= 1, got {cfg.trials}")
        if cfg.d < 4:
            raise PreconditionError(f"d must be >= 4, got {cfg.d}")
        if cfg.K is None or cfg.L is None:
            raise PreconditionError(f"{cfg.algorithm} needs both K and L")
        check_divides("K", cfg.K, cfg.d)
        check_divides("L", cfg.L, cfg.d)
        getattr(cfg, f"_validate_{cfg.algorithm}")()
        if cfg.solver not in SOLVERS:
            raise PreconditionError(f"unknown solver {cfg.solver!r}; choose from {SOLVERS}")
        if not 0 < cfg.tikhonov_q < 1:
            raise PreconditionError(f"q must lie in (0, 1), got {cfg.tikhonov_q}")
        if cfg.tikhonov_N < 0:
            raise PreconditionError(f"N must be nonnegative, got {cfg.tikhonov_N}")
        if cfg.alpha0 is not None and not cfg.alpha0 > 0:
            raise PreconditionError(f"alpha0 must be positive, got {cfg.alpha0}")
        return cfg

    def _require_domain(self, domain: Domain) -> None:
        if mask_domain(self.mask_kind) != domain:
            raise PreconditionError(
                f"{self.algorithm} needs a {domain}-supported mask, got {self.mask_kind}"
            )

    def _validate_alg1(self) -> None:
        self._require_domain("fourier")
        if self.K != self.d:
            raise PreconditionError(f"alg1 needs K = d, got K={self.K}, d={self.d}")
        rho, kappa = self.support, self.kappa
        if not 2 <= rho < self.d / 2:
            raise PreconditionError(f"need 2 <= rho < d/2, got rho={rho}, d={self.d}")
        if kappa is None or not 2 <= kappa <= rho:
            raise PreconditionError(
                f"L must satisfy rho + 1 <= L <= 2*rho - 1, got L={self.L}, rho={rho}"
            )

    def _validate_hioer(self) -> None:
        if self.support < 1 or self.support > self.d:
            raise PreconditionError(f"support must lie in [1, d], got {self.support}")

    def _validate_lemma11(self) -> None:
        self._require_domain("space")
        delta, kappa = self.support, self.kappa
        if self.L != self.d:
            raise PreconditionError(f"lemma11 needs L = d, got L={self.L}, d={self.d}")
        if not 2 <= delta < self.d:
            raise PreconditionError(f"need 2 <= delta < d, got delta={delta}")
        if kappa is None or not 2 <= kappa <= delta:
            raise PreconditionError(
                f"K must satisfy delta + 1 <= K <= 2*delta - 1, got K={self.K}, delta={delta}"
            )

    def _validate_alg2(self) -> None:
        self._require_domain("space")
        delta, gamma = self.support, self.gamma
        if gamma is None:
            raise PreconditionError(f"alg2 needs gamma or an odd L, got L={self.L}")
        if self.K != 2 * delta - 1:
            raise PreconditionError(f"alg2 needs K = 2*delta - 1, got K={self.K}, delta={delta}")
        if self.L != 2 * gamma - 1:
            raise PreconditionError(f"alg2 needs L = 2*gamma - 1, got L={self.L}, gamma={gamma}")
        if not 1 <= gamma <= 2 * delta - 1 < self.d:
            raise PreconditionError(
                f"need gamma <= 2*delta - 1 < d, got gamma={gamma}, delta={delta}, d={self.d}"
            )


# ------------------------------------------------------------------
# Config files and threads
# ------------------------------------------------------------------


def load_config_file(
    path: Union[str, Path], multiple: Iterable[str] = ("snr", "d")
) -> dict[str, Any]:
    """Parse ``key=value`` lines; ``#`` starts a comment, list keys take comma-separated values."""
    listy = set(multiple)
    values: dict[str, Any] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise PreconditionError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
        key, value = key.strip().replace("-", "_"), value.strip()
        if key in listy:
            values[key] = [v.strip() for v in value.split(",") if v.strip()]
        else:
            values[key] = value
    logger.debug("loaded %d settings from %s", len(values), path)
    return values


def resolve_threads(threads: Optional[int] = None) -> int:
    if threads is None:
        env = os.environ.get(THREADS_ENV)
        threads = int(env) if env else (os.cpu_count() or 1)
    if threads < 1:
        raise PreconditionError(f"threads must be >= 1, got {threads}")
    return threads
