"""Multisine excitation commands for open-loop data collection."""
from dataclasses import dataclass

import numpy as np

from ..core import ValidationError

_TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class ExcitationConfig:
    n_waves: int = 50
    freq_range: tuple = (0.0, 1.5)
    phase_range: tuple = (0.0, _TWO_PI)
    amplitude_scale: float = 0.8 / np.sqrt(50)
    duration: float = 1500.0
    sample_rate: float = 30.0
    seed: int = 0

    def __post_init__(self):
        if self.n_waves < 0:
            raise ValidationError("n_waves must be non-negative")
        lo, hi = self.freq_range
        if not (0.0 <= lo <= hi < 0.5 * self.sample_rate):
            raise ValidationError(
                "freq_range must lie within [0, sample_rate/2)")
        if self.duration <= 0 or self.sample_rate <= 0:
            raise ValidationError("duration and sample_rate must be positive")


def synthesize_waves(t, freqs_sin, phases_sin, freqs_cos, phases_cos,
                     amplitude):
    """Sum of sine and cosine waves, clipped to the [-1, 1] actuator range."""
    t = np.asarray(t, dtype=float)
    arg_s = _TWO_PI * np.multiply.outer(np.asarray(freqs_sin, float), t)
    arg_c = _TWO_PI * np.multiply.outer(np.asarray(freqs_cos, float), t)
    signal = amplitude * (
        np.sin(arg_s + np.asarray(phases_sin, float)[:, None]).sum(axis=0)
        + np.cos(arg_c + np.asarray(phases_cos, float)[:, None]).sum(axis=0))
    return np.clip(signal, -1.0, 1.0)


def generate_excitation(cfg):
    """Two-channel excitation at cfg.sample_rate, deterministic per seed.

    Each channel is an independent sum of cfg.n_waves sines plus
    cfg.n_waves cosines with frequencies and phases drawn uniformly from
    the configured ranges.
    """
    rng = np.random.default_rng(cfg.seed)
    n = int(round(cfg.duration * cfg.sample_rate))
    t = np.arange(n) / cfg.sample_rate
    channels = []
    for _ in range(2):
        f_sin = rng.uniform(*cfg.freq_range, size=cfg.n_waves)
        f_cos = rng.uniform(*cfg.freq_range, size=cfg.n_waves)
        p_sin = rng.uniform(*cfg.phase_range, size=cfg.n_waves)
        p_cos = rng.uniform(*cfg.phase_range, size=cfg.n_waves)
        channels.append(synthesize_waves(t, f_sin, p_sin, f_cos, p_cos,
                                         cfg.amplitude_scale))
    return np.column_stack(channels)
