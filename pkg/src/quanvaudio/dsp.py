"""Time-stretch and resampling primitives shared by the corruptions.

The phase vocoder uses 75%-overlap Hann analysis/synthesis with phase
accumulation. A rate of exactly 1.0 takes a fast path that returns the
input untouched, so the clean severity level stays bit-exact.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.signal import resample_poly

_VOCODER_NFFT = 1024


def _frame_stft(x: np.ndarray, n_fft: int, hop: int, window: np.ndarray) -> np.ndarray:
    pad = n_fft // 2
    mode = "reflect" if x.shape[0] > pad else "constant"
    x = np.pad(x, pad, mode=mode)
    if x.shape[0] < n_fft:
        x = np.pad(x, (0, n_fft - x.shape[0]))
    frames = sliding_window_view(x, n_fft)[::hop]
    return np.fft.rfft(frames * window, axis=1).T  # (bins, T)


def _overlap_add(spec: np.ndarray, n_fft: int, hop: int, window: np.ndarray) -> np.ndarray:
    frames = np.fft.irfft(spec.T, n=n_fft, axis=1) * window
    total = n_fft + hop * (frames.shape[0] - 1)
    out = np.zeros(total)
    norm = np.zeros(total)
    wsq = window**2
    for i, frame in enumerate(frames):
        out[i * hop : i * hop + n_fft] += frame
        norm[i * hop : i * hop + n_fft] += wsq
    out = out / np.maximum(norm, 1e-12)
    return out[n_fft // 2 : total - n_fft // 2]


def time_stretch(x: np.ndarray, rate: float, n_fft: int = _VOCODER_NFFT) -> np.ndarray:
    """Stretch a waveform in time by ``rate`` at constant pitch.

    rate > 1 speeds the signal up (output is shorter), rate < 1 slows it
    down; output length is approximately len(x)/rate.
    """
    if rate <= 0 or not np.isfinite(rate):
        raise ValueError(f"stretch rate must be positive and finite, got {rate}")
    if rate == 1.0:
        return x
    x = np.asarray(x, dtype=np.float64)
    hop = n_fft // 4
    window = 0.5 * (1.0 - np.cos(2.0 * np.pi * np.arange(n_fft) / n_fft))
    spec = _frame_stft(x, n_fft, hop, window)
    n_bins, n_frames = spec.shape

    steps = np.arange(0.0, n_frames, rate)
    spec = np.concatenate([spec, np.zeros((n_bins, 1), dtype=spec.dtype)], axis=1)
    omega = 2.0 * np.pi * hop * np.arange(n_bins) / n_fft

    out = np.empty((n_bins, steps.shape[0]), dtype=np.complex128)
    phase = np.angle(spec[:, 0])
    for k, t in enumerate(steps):
        i = int(t)
        frac = t - i
        mag = (1.0 - frac) * np.abs(spec[:, i]) + frac * np.abs(spec[:, i + 1])
        out[:, k] = mag * np.exp(1j * phase)
        dphi = np.angle(spec[:, i + 1]) - np.angle(spec[:, i]) - omega
        dphi -= 2.0 * np.pi * np.round(dphi / (2.0 * np.pi))
        phase += omega + dphi

    y = _overlap_add(out, n_fft, hop, window)
    target = int(round(x.shape[0] / rate))
    return fix_length(y, target)


def resample_ratio(x: np.ndarray, ratio: float) -> np.ndarray:
    """Windowed-sinc resampling; output length ~ len(x) * ratio."""
    if ratio <= 0 or not np.isfinite(ratio):
        raise ValueError(f"resample ratio must be positive and finite, got {ratio}")
    if ratio == 1.0:
        return x
    frac = Fraction(ratio).limit_denominator(1000)
    return resample_poly(np.asarray(x, dtype=np.float64), frac.numerator, frac.denominator)


def fix_length(x: np.ndarray, length: int) -> np.ndarray:
    """Truncate or zero-pad to an exact sample count."""
    if x.shape[0] >= length:
        return x[:length]
    return np.pad(x, (0, length - x.shape[0]))
