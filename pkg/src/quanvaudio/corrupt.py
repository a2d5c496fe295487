"""Test-time waveform corruptions at six severity levels.

Four generators: additive Gaussian noise scaled by the signal's own
standard deviation, random pitch shift in semitones, random temporal
shift as a proportion of length, and log-normal speed variation. All are
seed-deterministic pure functions that preserve the input length, and
the clean severity (index 0) is the exact identity for every kind.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import dsp
from .audio import Waveform

log = logging.getLogger(__name__)

N_SEVERITIES = 6


class CorruptionKind(str, Enum):
    GAUSSIAN_NOISE = "gaussian_noise"
    PITCH_SHIFT = "pitch_shift"
    TEMPORAL_SHIFT = "temporal_shift"
    SPEED_VARIATION = "speed_variation"


SEVERITY_TABLE: dict[CorruptionKind, tuple[float, ...]] = {
    CorruptionKind.GAUSSIAN_NOISE: (0.01, 0.05, 0.1, 0.15, 0.2, 0.25),
    CorruptionKind.PITCH_SHIFT: (0.05, 0.1, 0.15, 0.2, 0.25, 0.3),
    CorruptionKind.TEMPORAL_SHIFT: (0.025, 0.05, 0.075, 0.1, 0.125, 0.15),
    CorruptionKind.SPEED_VARIATION: (1.05, 1.1, 1.15, 1.2, 1.25, 1.3),
}

CLEAN_VALUE: dict[CorruptionKind, float] = {
    CorruptionKind.GAUSSIAN_NOISE: 0.0,
    CorruptionKind.PITCH_SHIFT: 0.0,
    CorruptionKind.TEMPORAL_SHIFT: 0.0,
    CorruptionKind.SPEED_VARIATION: 1.0,
}


def severity_value(kind: CorruptionKind, severity_index: int) -> float:
    if severity_index == 0:
        return CLEAN_VALUE[kind]
    return SEVERITY_TABLE[kind][severity_index - 1]


@dataclass(frozen=True)
class CorruptionSpec:
    kind: CorruptionKind
    severity_index: int
    seed: int
    severity_value: float = field(init=False)

    def __post_init__(self):
        if not 0 <= self.severity_index <= N_SEVERITIES:
            raise ValueError(
                f"severity index must be 0..{N_SEVERITIES}, got {self.severity_index}"
            )
        object.__setattr__(
            self, "severity_value", severity_value(self.kind, self.severity_index)
        )


def gaussian_noise(w: Waveform, sigma: float, seed: int) -> Waveform:
    """Add N(0, sigma) noise scaled by the signal's std, then clamp to [-1,1]."""
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    if sigma == 0:
        return w
    rng = np.random.default_rng(seed)
    z = rng.normal(0.0, sigma, size=len(w))
    noisy = np.clip(w.samples + np.std(w.samples) * z, -1.0, 1.0)
    return Waveform(noisy, w.sample_rate, w.source_id)


def sample_semitone(sigma_p: float, rng: np.random.Generator) -> float:
    delta = rng.normal(0.0, sigma_p)
    tries = 0
    while not math.isfinite(delta):
        tries += 1
        log.warning("non-finite semitone draw, resampling (attempt %d)", tries)
        delta = rng.normal(0.0, sigma_p)
    return float(delta)


def pitch_shift_by(w: Waveform, delta_semitones: float) -> Waveform:
    """Shift pitch by a semitone amount at unchanged duration."""
    if delta_semitones == 0.0:
        return w
    # Slow down by the frequency ratio, then resample back; net effect is
    # a spectral scale by 2**(delta/12) at the original length.
    rate = 2.0 ** (-delta_semitones / 12.0)
    stretched = dsp.time_stretch(w.samples, rate)
    shifted = dsp.resample_ratio(stretched, rate)
    shifted = np.clip(dsp.fix_length(shifted, len(w)), -1.0, 1.0)
    return Waveform(shifted, w.sample_rate, w.source_id)


def pitch_shift(w: Waveform, sigma_p: float, seed: int) -> Waveform:
    if sigma_p < 0:
        raise ValueError(f"sigma_p must be >= 0, got {sigma_p}")
    if sigma_p == 0:
        return w
    delta = sample_semitone(sigma_p, np.random.default_rng(seed))
    return pitch_shift_by(w, delta)


def sample_shift_proportion(sigma_t: float, rng: np.random.Generator) -> float:
    return float(rng.normal(0.0, sigma_t))


def shift_samples(w: Waveform, s: int) -> Waveform:
    """Shift by s samples: positive delays (leading zeros, tail dropped)."""
    length = len(w)
    if abs(s) >= length:
        log.warning("shift %d clamped; signal has only %d samples", s, length)
        s = (length - 1) if s > 0 else -(length - 1)
    if s == 0:
        return w
    if s > 0:
        shifted = np.concatenate([np.zeros(s), w.samples[: length - s]])
    else:
        shifted = np.concatenate([w.samples[-s:], np.zeros(-s)])
    return Waveform(shifted, w.sample_rate, w.source_id)


def temporal_shift(w: Waveform, sigma_t: float, seed: int) -> Waveform:
    if sigma_t < 0:
        raise ValueError(f"sigma_t must be >= 0, got {sigma_t}")
    if sigma_t == 0:
        return w
    p = sample_shift_proportion(sigma_t, np.random.default_rng(seed))
    return shift_samples(w, int(round(p * len(w))))


def sample_log_rate(sigma_s: float, rng: np.random.Generator) -> float:
    return float(rng.normal(0.0, math.log(sigma_s)))


def speed_by(w: Waveform, rate: float) -> Waveform:
    """Time-stretch by ``rate``; truncate or zero-pad back to length."""
    if rate == 1.0:
        return w
    if not 0.25 <= rate <= 4.0:
        clamped = min(max(rate, 0.25), 4.0)
        log.warning("speed ratio %.4f clamped to %.4f", rate, clamped)
        rate = clamped
    stretched = dsp.time_stretch(w.samples, rate)
    out = np.clip(dsp.fix_length(stretched, len(w)), -1.0, 1.0)
    return Waveform(out, w.sample_rate, w.source_id)


def speed_variation(w: Waveform, sigma_s: float, seed: int) -> Waveform:
    if sigma_s < 1:
        raise ValueError(f"sigma_s must be >= 1, got {sigma_s}")
    if sigma_s == 1:
        return w
    u = sample_log_rate(sigma_s, np.random.default_rng(seed))
    return speed_by(w, math.exp(u))


def drawn_parameter(spec: CorruptionSpec, w: Waveform) -> float:
    """The random parameter the corruption would draw for this seed."""
    rng = np.random.default_rng(spec.seed)
    if spec.severity_index == 0:
        return CLEAN_VALUE[spec.kind]
    if spec.kind == CorruptionKind.GAUSSIAN_NOISE:
        return spec.severity_value  # sigma itself; the draw is per-sample
    if spec.kind == CorruptionKind.PITCH_SHIFT:
        return sample_semitone(spec.severity_value, rng)
    if spec.kind == CorruptionKind.TEMPORAL_SHIFT:
        return sample_shift_proportion(spec.severity_value, rng)
    return math.exp(sample_log_rate(spec.severity_value, rng))


def apply(spec: CorruptionSpec, w: Waveform) -> Waveform:
    if spec.severity_index == 0:
        return w
    if spec.kind == CorruptionKind.GAUSSIAN_NOISE:
        return gaussian_noise(w, spec.severity_value, spec.seed)
    if spec.kind == CorruptionKind.PITCH_SHIFT:
        return pitch_shift(w, spec.severity_value, spec.seed)
    if spec.kind == CorruptionKind.TEMPORAL_SHIFT:
        return temporal_shift(w, spec.severity_value, spec.seed)
    return speed_variation(w, spec.severity_value, spec.seed)
