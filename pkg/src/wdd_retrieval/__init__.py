"""
wdd-retrieval: phase retrieval from subsampled spectrogram magnitudes via
aliased Wigner distribution deconvolution and angular synchronization.
"""

from wdd_retrieval.errors import (
    NearZeroDenominatorError,
    NonDivisorError,
    NoConvergenceError,
    PreconditionError,
    StageError,
    WDDError,
)
from wdd_retrieval.masks import (
    Mask,
    build_mask,
    check_admissible,
    exp_bandlimited_mask,
    exp_compact_mask,
    mu1,
    mu2,
    mu_compact,
    random_bandlimited_mask,
    random_compact_mask,
)
from wdd_retrieval.measure import MeasurementSet, add_noise, spectrogram_subsampled
from wdd_retrieval.pipelines import (
    PIPELINES,
    RecoveryResult,
    algorithm1,
    algorithm2,
    error_db,
    hio_er,
    lemma11_pipeline,
)
from wdd_retrieval.store import ResultStore

__all__ = [
    "Mask",
    "MeasurementSet",
    "RecoveryResult",
    "ResultStore",
    "PIPELINES",
    "algorithm1",
    "algorithm2",
    "lemma11_pipeline",
    "hio_er",
    "error_db",
    "spectrogram_subsampled",
    "add_noise",
    "build_mask",
    "exp_bandlimited_mask",
    "random_bandlimited_mask",
    "exp_compact_mask",
    "random_compact_mask",
    "mu1",
    "mu2",
    "mu_compact",
    "check_admissible",
    "WDDError",
    "PreconditionError",
    "NonDivisorError",
    "NearZeroDenominatorError",
    "NoConvergenceError",
    "StageError",
]

__version__ = "0.1.0"
