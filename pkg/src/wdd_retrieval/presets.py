"""
Named experiment setups (dimensions, mask family, measurement grid).
"""

from __future__ import annotations

from typing import Union

from wdd_retrieval.errors import PreconditionError

PresetValue = Union[int, str]

PRESETS: dict[str, dict[str, PresetValue]] = {
    # Bandlimited masks, every frequency sampled
    "alg1-d60": {
        "algorithm": "alg1",
        "d": 60,
        "mask": "exp_bandlimited",
        "support": 8,
        "K": 60,
        "L": 15,
    },
    "alg1-d60-random": {
        "algorithm": "alg1",
        "d": 60,
        "mask": "random_bandlimited",
        "support": 8,
        "K": 60,
        "L": 15,
    },
    "alg1-d255": {
        "algorithm": "alg1",
        "d": 255,
        "mask": "exp_bandlimited",
        "support": 8,
        "K": 255,
        "L": 15,
    },
    # Compact masks, every shift sampled
    "lemma11-d247": {
        "algorithm": "lemma11",
        "d": 247,
        "mask": "exp_compact",
        "support": 10,
        "K": 19,
        "L": 247,
    },
    # Compact masks, bandlimited signals
    "alg2-d190": {
        "algorithm": "alg2",
        "d": 190,
        "mask": "random_compact",
        "support": 48,
        "gamma": 10,
        "K": 95,
        "L": 19,
        "solver": "tikhonov",
    },
}

# Mask family used when a command names an algorithm but no mask.
DEFAULT_MASK: dict[str, str] = {
    "alg1": "exp_bandlimited",
    "hioer": "exp_bandlimited",
    "lemma11": "exp_compact",
    "alg2": "exp_compact",
}


def get_preset(name: str) -> dict[str, PresetValue]:
    """Return a copy of the named preset."""
    try:
        return dict(PRESETS[name])
    except KeyError:
        known = ", ".join(sorted(PRESETS))
        raise PreconditionError(f"unknown preset {name!r}; choose from {known}") from None

