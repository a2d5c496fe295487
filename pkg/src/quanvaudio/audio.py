"""WAV ingestion and the log-Mel spectrogram front-end.

The front-end mirrors the common reference-library defaults: Hann window,
centered frames with reflect padding, Slaney mel scale with area
normalization. Output grams are per-sample min-max normalized to [0,1]
and resized along time to a fixed 40x128, the model input shape.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.io import wavfile

from .tensorio import load_tensor, save_tensor

N_FFT = 512
HOP = 128
WIN_SECONDS = 0.025
N_MELS = 40
TARGET_FRAMES = 128
LOG_EPS = 1e-10

_INT16_SCALE = 32768.0


class AudioFormatError(ValueError):
    """Unsupported or malformed audio file."""


@dataclass(frozen=True)
class Waveform:
    samples: np.ndarray = field(repr=False)
    sample_rate: int = 16000
    source_id: str = ""

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.float64)
        if s.ndim != 1 or s.shape[0] < 1:
            raise ValueError(f"waveform must be 1-D and nonempty, got {s.shape}")
        if not np.all(np.isfinite(s)):
            raise ValueError("waveform contains non-finite samples")
        if np.max(np.abs(s)) > 1.0 + 1e-12:
            raise ValueError("waveform samples must lie in [-1, 1]")
        object.__setattr__(self, "samples", s)

    def __len__(self) -> int:
        return self.samples.shape[0]


@dataclass(frozen=True)
class LogMelGram:
    values: np.ndarray = field(repr=False)
    norm_info: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != (N_MELS, TARGET_FRAMES):
            raise ValueError(f"expected {N_MELS}x{TARGET_FRAMES}, got {v.shape}")
        object.__setattr__(self, "values", v)

    def save(self, path: str | Path) -> None:
        save_tensor(path, self.values, layout="HW")

    @staticmethod
    def load(path: str | Path) -> "LogMelGram":
        vals = load_tensor(path, expect_layout="HW")
        return LogMelGram(vals, (float(vals.min()), float(vals.max())))


@dataclass(frozen=True)
class MelBank:
    weights: np.ndarray = field(repr=False)  # (n_mels, 1 + n_fft//2)
    sample_rate: int = 16000
    f_min: float = 0.0
    f_max: float = 8000.0
    center_freqs: np.ndarray = field(default=None, repr=False)


def load_wav(path: str | Path) -> Waveform:
    """Read a PCM WAV (int16 or float32), downmixing stereo by mean."""
    try:
        rate, data = wavfile.read(path)
    except ValueError as exc:
        raise AudioFormatError(f"{path}: {exc}") from exc
    if data.dtype == np.int16:
        samples = data.astype(np.float64) / _INT16_SCALE
    elif data.dtype in (np.float32, np.float64):
        samples = np.clip(data.astype(np.float64), -1.0, 1.0)
    else:
        raise AudioFormatError(
            f"{path}: unsupported sample format {data.dtype}; "
            "expected 16-bit PCM or 32-bit float"
        )
    if samples.ndim == 2:
        samples = samples.mean(axis=1)
    if samples.size == 0:
        raise AudioFormatError(f"{path}: empty audio stream")
    return Waveform(samples, int(rate), source_id=str(path))


def write_wav(path: str | Path, w: Waveform) -> None:
    """Write as 16-bit PCM."""
    scaled = np.clip(np.round(w.samples * _INT16_SCALE), -32768, 32767)
    wavfile.write(path, w.sample_rate, scaled.astype(np.int16))


def hann_window(length: int) -> np.ndarray:
    # Periodic Hann, the STFT-analysis convention.
    return 0.5 * (1.0 - np.cos(2.0 * np.pi * np.arange(length) / length))


def stft_power(
    w: Waveform,
    n_fft: int = N_FFT,
    hop: int = HOP,
    win_seconds: float = WIN_SECONDS,
) -> np.ndarray:
    """Power spectrogram |STFT|^2 of shape (1 + n_fft//2, frames)."""
    win_length = int(round(win_seconds * w.sample_rate))
    if win_length > n_fft:
        raise ValueError(
            f"window of {win_length} samples exceeds n_fft={n_fft}; "
            "resample the input or enlarge the FFT"
        )
    window = np.zeros(n_fft)
    offset = (n_fft - win_length) // 2
    window[offset : offset + win_length] = hann_window(win_length)

    x = w.samples
    pad = n_fft // 2
    mode = "reflect" if x.shape[0] > pad else "constant"
    x = np.pad(x, pad, mode=mode)
    if x.shape[0] < n_fft:
        x = np.pad(x, (0, n_fft - x.shape[0]))
    frames = sliding_window_view(x, n_fft)[::hop]
    spec = np.fft.rfft(frames * window, axis=1)
    return (np.abs(spec) ** 2).T


def _hz_to_mel(f):
    # Slaney scale: linear below 1 kHz, logarithmic above.
    f = np.asarray(f, dtype=np.float64)
    min_log_hz = 1000.0
    lin = f / (200.0 / 3.0)
    logstep = np.log(6.4) / 27.0
    with np.errstate(divide="ignore", invalid="ignore"):
        log_part = 15.0 + np.log(np.maximum(f, min_log_hz) / min_log_hz) / logstep
    return np.where(f < min_log_hz, lin, log_part)


def _mel_to_hz(m):
    m = np.asarray(m, dtype=np.float64)
    min_log_mel = 15.0
    logstep = np.log(6.4) / 27.0
    lin = m * (200.0 / 3.0)
    log_part = 1000.0 * np.exp(logstep * (np.maximum(m, min_log_mel) - min_log_mel))
    return np.where(m < min_log_mel, lin, log_part)


def mel_bank(sample_rate: int, n_mels: int = N_MELS, n_fft: int = N_FFT) -> MelBank:
    """Slaney-style triangular filters, area-normalized."""
    if sample_rate <= 0:
        raise ValueError(f"sample_rate must be positive, got {sample_rate}")
    if n_mels > n_fft // 2:
        raise ValueError(f"n_mels={n_mels} too large for n_fft={n_fft}")
    f_min, f_max = 0.0, sample_rate / 2.0
    mel_pts = np.linspace(_hz_to_mel(f_min), _hz_to_mel(f_max), n_mels + 2)
    hz_pts = _mel_to_hz(mel_pts)
    bin_freqs = np.linspace(0.0, sample_rate / 2.0, 1 + n_fft // 2)

    lower = hz_pts[:-2, None]
    center = hz_pts[1:-1, None]
    upper = hz_pts[2:, None]
    up = (bin_freqs[None, :] - lower) / (center - lower)
    down = (upper - bin_freqs[None, :]) / (upper - center)
    weights = np.maximum(0.0, np.minimum(up, down))
    weights *= (2.0 / (hz_pts[2:] - hz_pts[:-2]))[:, None]
    return MelBank(weights, sample_rate, f_min, f_max, hz_pts[1:-1].copy())


def _resize_time(mat: np.ndarray, target: int) -> np.ndarray:
    t = mat.shape[1]
    if t == target:
        return mat
    if t == 1:
        return np.repeat(mat, target, axis=1)
    xq = np.linspace(0.0, t - 1.0, target)
    xp = np.arange(t, dtype=np.float64)
    return np.stack([np.interp(xq, xp, row) for row in mat])


def log_mel(w: Waveform, bank: MelBank | None = None) -> LogMelGram:
    """Normalized 40x128 log-Mel gram of a waveform."""
    if bank is None:
        bank = mel_bank(w.sample_rate)
    power = stft_power(w)
    mel_power = bank.weights @ power
    logged = np.log(mel_power + LOG_EPS)
    logged = _resize_time(logged, TARGET_FRAMES)
    lo, hi = float(logged.min()), float(logged.max())
    if hi == lo:
        warnings.warn(
            f"degenerate (constant) spectrogram for {w.source_id!r}; emitting zeros",
            stacklevel=2,
        )
        return LogMelGram(np.zeros_like(logged), (lo, hi))
    return LogMelGram((logged - lo) / (hi - lo), (lo, hi))
