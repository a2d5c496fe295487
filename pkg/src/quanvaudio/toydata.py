"""Synthetic two-class audio fixture for desk-scale end-to-end runs.

Both classes are amplitude-modulated harmonic tones in noise; class
'low' sits in a lower fundamental band with a slow envelope, class
'high' in an upper band with a fast envelope. A fraction of samples is
drawn from an overlapping fundamental range where only the envelope
rate separates the classes, and signal-to-noise ratios vary per sample,
so a trained classifier is accurate on clean audio, keeps a nonzero
error rate under every corruption kind (defined CE denominators), and
measurably degrades under the pitch, shift, and speed corruptions
(defined RCE denominators there; additive noise may leave accuracy
flat, which the reports surface as explicit undefined cells).
Generation is deterministic per seed.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .audio import Waveform, write_wav

SAMPLE_RATE = 8000
DURATION_S = 1.0
HARMONIC_AMPS = (1.0, 0.5, 0.25)
AMBIGUOUS_FRACTION = 0.18  # samples separable only by envelope rate


def _sample_params(label: str, rng: np.random.Generator) -> tuple[float, float, float, float]:
    """(fundamental Hz, envelope Hz, envelope depth, SNR dB) for one clip."""
    ambiguous = rng.random() < AMBIGUOUS_FRACTION
    if label == "low":
        f0 = rng.uniform(400.0, 560.0) if ambiguous else rng.uniform(300.0, 437.0)
        am = rng.uniform(2.0, 4.5)
    else:
        f0 = rng.uniform(400.0, 560.0) if ambiguous else rng.uniform(443.0, 700.0)
        am = rng.uniform(7.5, 10.0)
    depth = rng.uniform(0.5, 0.7) if ambiguous else 0.45
    snr_db = rng.uniform(4.0, 9.0) if ambiguous else rng.uniform(6.0, 18.0)
    return f0, am, depth, snr_db


def clip_waveform(label: str, rng: np.random.Generator) -> np.ndarray:
    n = int(SAMPLE_RATE * DURATION_S)
    t = np.arange(n) / SAMPLE_RATE
    f0, am, depth, snr_db = _sample_params(label, rng)
    x = np.zeros(n)
    for k, amp in enumerate(HARMONIC_AMPS, start=1):
        x += amp * np.sin(2 * np.pi * k * f0 * t + rng.uniform(0, 2 * np.pi))
    x *= (1.0 - depth) + depth * np.sin(2 * np.pi * am * t + rng.uniform(0, 2 * np.pi))
    noise = rng.normal(0.0, 1.0, n)
    noise *= np.std(x) / np.std(noise) / (10 ** (snr_db / 20))
    x = x + noise
    return 0.5 * x / np.max(np.abs(x))


def make_toy_dataset(root: str | Path, n_per_class: int = 100, seed: int = 0) -> Path:
    """Write n_per_class WAVs for each of the classes 'low' and 'high'."""
    root = Path(root)
    rng = np.random.default_rng(seed)
    for label in ("low", "high"):
        (root / label).mkdir(parents=True, exist_ok=True)
    # interleave class draws so the RNG stream matches per-pair sampling
    for i in range(n_per_class):
        for label in ("low", "high"):
            w = Waveform(clip_waveform(label, rng), SAMPLE_RATE, f"{label}_{i:03d}")
            write_wav(root / label / f"{label}_{i:03d}.wav", w)
    return root
