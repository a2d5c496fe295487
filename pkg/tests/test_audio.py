"""Audio front-end: WAV ingestion golden values, STFT/Parseval oracle,
an independently coded mel-bank reference, and log-Mel properties."""

import numpy as np
import pytest
from scipy.io import wavfile

from quanvaudio.audio import (
    HOP,
    LOG_EPS,
    N_FFT,
    N_MELS,
    TARGET_FRAMES,
    AudioFormatError,
    LogMelGram,
    Waveform,
    _resize_time,
    hann_window,
    load_wav,
    log_mel,
    mel_bank,
    stft_power,
    write_wav,
)

SR = 16000


def _sine(freq, sr=SR, seconds=0.5, amp=0.5):
    t = np.arange(int(sr * seconds)) / sr
    return Waveform(amp * np.sin(2 * np.pi * freq * t), sr)


# ---------------------------------------------------------------------------
# WAV ingestion


def test_int16_scaling(tmp_path):
    path = tmp_path / "a.wav"
    wavfile.write(path, SR, np.array([32767, -32768, 0], dtype=np.int16))
    w = load_wav(path)
    np.testing.assert_allclose(w.samples, [32767 / 32768, -1.0, 0.0], atol=1e-12)
    assert w.sample_rate == SR


def test_stereo_downmix(tmp_path):
    path = tmp_path / "st.wav"
    wavfile.write(path, SR, np.array([[0.5, -0.5], [0.25, 0.25]], dtype=np.float32))
    np.testing.assert_allclose(load_wav(path).samples, [0.0, 0.25], atol=1e-7)


def test_float32_clipped(tmp_path):
    path = tmp_path / "f.wav"
    wavfile.write(path, SR, np.array([1.5, -2.0, 0.5], dtype=np.float32))
    np.testing.assert_allclose(load_wav(path).samples, [1.0, -1.0, 0.5], atol=1e-7)


def test_unsupported_dtype(tmp_path):
    path = tmp_path / "i32.wav"
    wavfile.write(path, SR, np.array([1, 2, 3], dtype=np.int32))
    with pytest.raises(AudioFormatError):
        load_wav(path)


def test_not_a_wav(tmp_path):
    path = tmp_path / "bad.wav"
    path.write_bytes(b"not RIFF data at all")
    with pytest.raises(AudioFormatError):
        load_wav(path)


def test_write_read_round_trip(tmp_path):
    w = _sine(440)
    path = tmp_path / "rt.wav"
    write_wav(path, w)
    back = load_wav(path)
    np.testing.assert_allclose(back.samples, w.samples, atol=1.0 / 32768)


def test_waveform_validation():
    with pytest.raises(ValueError):
        Waveform(np.array([0.1, np.nan]), SR)
    with pytest.raises(ValueError):
        Waveform(np.array([1.5]), SR)
    with pytest.raises(ValueError):
        Waveform(np.zeros((2, 2)), SR)


# ---------------------------------------------------------------------------
# STFT


def test_hann_window_periodic():
    win = hann_window(8)
    assert win[0] == 0.0
    expected = 0.5 * (1 - np.cos(2 * np.pi * np.arange(8) / 8))
    np.testing.assert_allclose(win, expected, atol=1e-15)


def test_stft_zero_signal():
    power = stft_power(Waveform(np.zeros(4000), SR))
    assert power.shape[0] == 1 + N_FFT // 2
    np.testing.assert_array_equal(power, 0.0)


def test_sine_energy_concentrates_in_its_bin():
    freq_bin = 40
    freq = freq_bin * SR / N_FFT
    power = stft_power(_sine(freq))
    mid = power[:, power.shape[1] // 2]
    # the 400-sample Hann main lobe inside a 512-point FFT spans ~2 bins
    assert mid[freq_bin - 2 : freq_bin + 3].sum() / mid.sum() > 0.9
    assert np.argmax(mid) == freq_bin


def test_parseval_on_random_signals():
    rng = np.random.default_rng(0)
    win_length = int(round(0.025 * SR))
    window = np.zeros(N_FFT)
    offset = (N_FFT - win_length) // 2
    window[offset : offset + win_length] = hann_window(win_length)
    for _ in range(10):
        x = rng.uniform(-0.9, 0.9, rng.integers(2000, 6000))
        power = stft_power(Waveform(x, SR))
        # independent framing: loop over hops of the reflect-padded signal
        padded = np.pad(x, N_FFT // 2, mode="reflect")
        expected = 0.0
        for t in range(power.shape[1]):
            frame = padded[t * HOP : t * HOP + N_FFT] * window
            expected += N_FFT * np.sum(frame**2)
        # full-spectrum power from the one-sided output (DC and Nyquist once)
        total = np.sum(power[0] + power[-1] + 2 * power[1:-1].sum(axis=0))
        assert abs(total - expected) / expected < 1e-6


def test_oversized_window_rejected():
    with pytest.raises(ValueError):
        stft_power(Waveform(np.zeros(1000), 48000))  # 25 ms of 48 kHz > 512


# ---------------------------------------------------------------------------
# Mel bank, with an independently coded scalar reference


def _reference_mel_weights(sr, n_mels, n_fft):
    def hz_to_mel(f):
        if f < 1000.0:
            return f * 3.0 / 200.0
        return 15.0 + 27.0 * np.log(f / 1000.0) / np.log(6.4)

    def mel_to_hz(m):
        if m < 15.0:
            return m * 200.0 / 3.0
        return 1000.0 * 6.4 ** ((m - 15.0) / 27.0)

    top = hz_to_mel(sr / 2.0)
    points = [mel_to_hz(top * i / (n_mels + 1)) for i in range(n_mels + 2)]
    n_bins = 1 + n_fft // 2
    weights = np.zeros((n_mels, n_bins))
    for i in range(n_mels):
        lo, mid, hi = points[i], points[i + 1], points[i + 2]
        for k in range(n_bins):
            f = k * (sr / 2.0) / (n_bins - 1)
            if lo < f < hi:
                tri = (f - lo) / (mid - lo) if f <= mid else (hi - f) / (hi - mid)
                weights[i, k] = tri * 2.0 / (hi - lo)
    return weights


@pytest.mark.parametrize("sr", [8000, 16000, 22050])
def test_mel_bank_matches_reference(sr):
    bank = mel_bank(sr)
    ref = _reference_mel_weights(sr, N_MELS, N_FFT)
    assert np.max(np.abs(bank.weights - ref)) < 1e-6


def test_mel_bank_structure():
    bank = mel_bank(SR)
    assert bank.weights.shape == (N_MELS, 1 + N_FFT // 2)
    assert np.all(bank.weights >= 0)
    assert np.all(np.diff(bank.center_freqs) > 0)
    with pytest.raises(ValueError):
        mel_bank(0)
    with pytest.raises(ValueError):
        mel_bank(SR, n_mels=300)


# ---------------------------------------------------------------------------
# log-Mel gram


def test_log_mel_shape_and_range():
    gram = log_mel(_sine(500))
    assert gram.values.shape == (N_MELS, TARGET_FRAMES)
    assert gram.values.min() == 0.0 and gram.values.max() == 1.0


def test_silence_floor_and_degenerate_rule():
    with pytest.warns(UserWarning, match="degenerate"):
        gram = log_mel(Waveform(np.zeros(4000), SR))
    assert gram.norm_info == (np.log(LOG_EPS), np.log(LOG_EPS))
    assert abs(gram.norm_info[0] - (-23.025850929940457)) < 1e-12
    np.testing.assert_array_equal(gram.values, 0.0)


def test_shape_fixed_across_durations():
    for seconds in (0.1, 0.7, 2.0):
        gram = log_mel(_sine(300, seconds=seconds))
        assert gram.values.shape == (N_MELS, TARGET_FRAMES)


def test_scaling_never_decreases_pre_normalization_values():
    rng = np.random.default_rng(1)
    x = 0.2 * rng.uniform(-1, 1, 5000)
    bank = mel_bank(SR)

    def pre_norm(w):
        g = log_mel(w, bank)
        lo, hi = g.norm_info
        return g.values * (hi - lo) + lo

    a = pre_norm(Waveform(x, SR))
    b = pre_norm(Waveform(2.0 * x, SR))
    assert np.all(b >= a - 1e-9)


def test_hop_shift_moves_columns_by_one():
    rng = np.random.default_rng(2)
    x = rng.uniform(-0.5, 0.5, 8000)
    shifted = np.concatenate([np.zeros(HOP), x[:-HOP]])
    a = stft_power(Waveform(x, SR))
    b = stft_power(Waveform(shifted, SR))
    # interior frames see identical samples, displaced one column
    np.testing.assert_allclose(a[:, 10:40], b[:, 11:41], atol=1e-9)


def test_resize_time():
    mat = np.array([[0.0, 1.0, 2.0]])
    np.testing.assert_array_equal(_resize_time(mat, 3), mat)
    np.testing.assert_allclose(_resize_time(mat, 5)[0], [0.0, 0.5, 1.0, 1.5, 2.0])
    np.testing.assert_array_equal(_resize_time(np.array([[3.0]]), 4)[0], [3.0] * 4)


def test_gram_round_trip(tmp_path):
    gram = log_mel(_sine(700))
    path = tmp_path / "g.gram"
    gram.save(path)
    np.testing.assert_array_equal(LogMelGram.load(path).values, gram.values)


def test_gram_shape_enforced():
    with pytest.raises(ValueError):
        LogMelGram(np.zeros((40, 100)))
