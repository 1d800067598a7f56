"""Norm clipping and the Gaussian mechanism with aggregation-aware scaling.

With at least `min_honest` honest participants contributing to every
released aggregate, each participant only needs a 1/min_honest share of the
noise variance that local differential privacy would require; the summed
noise then matches one full local-DP draw.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class DpParams:
    """(epsilon, delta) Gaussian-mechanism parameters.

    sigma is derived as clip_norm * sqrt(2 ln(1.25/delta)) / epsilon, the
    standard analytic bound; it already includes the sensitivity factor.
    """

    epsilon: float
    delta: float = 1e-5
    clip_norm: float = 4.0
    min_honest: int = 1
    sigma: float = field(init=False)

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ConfigError("epsilon must be positive")
        if not 0 < self.delta < 1:
            raise ConfigError("delta must lie in (0, 1)")
        if self.clip_norm <= 0:
            raise ConfigError("clip_norm must be positive")
        if self.min_honest < 1:
            raise ConfigError("min_honest must be at least 1")
        sigma = self.clip_norm * math.sqrt(2.0 * math.log(1.25 / self.delta)) / self.epsilon
        object.__setattr__(self, "sigma", sigma)

    @property
    def participant_noise_std(self) -> float:
        """Per-coordinate noise each participant adds: sigma / sqrt(min_honest)."""
        return self.sigma / math.sqrt(self.min_honest)


def clip_update(update, clip_norm: float) -> np.ndarray:
    """Scale `update` so its L2 norm is at most clip_norm."""
    if clip_norm <= 0:
        raise ConfigError("clip_norm must be positive")
    vec = np.asarray(update, dtype=np.float64)
    norm = float(np.linalg.norm(vec))
    if norm <= clip_norm:
        return vec.copy()
    return vec * (clip_norm / norm)


def reduced_noise_sample(dim: int, params: DpParams, rng: np.random.Generator) -> np.ndarray:
    """i.i.d. Gaussian noise carrying a 1/min_honest share of the DP variance."""
    if dim < 1:
        raise ValueError("dim must be at least 1")
    return rng.normal(0.0, params.participant_noise_std, size=dim)


def privatize(update, params: DpParams, rng: np.random.Generator) -> np.ndarray:
    """Clip the update, then add this participant's noise share."""
    clipped = clip_update(update, params.clip_norm)
    return clipped + reduced_noise_sample(clipped.size, params, rng)
