"""Quanvolutional vs convolutional robustness benchmarking for speech."""

__all__ = [
    "audio",
    "corrupt",
    "dsp",
    "harness",
    "metrics",
    "nn",
    "qsim",
    "quanv",
]

__version__ = "0.1.0"
