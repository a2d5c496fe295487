"""Flat binary tensor files: one JSON header line, then raw f64 bytes."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np


def save_tensor(path: str | Path, array: np.ndarray, layout: str) -> None:
    arr = np.ascontiguousarray(array, dtype=np.float64)
    header = {"dims": list(arr.shape), "dtype": "f64", "layout": layout}
    with open(path, "wb") as fh:
        fh.write(json.dumps(header).encode("utf-8") + b"\n")
        fh.write(arr.tobytes())


def load_tensor(path: str | Path, expect_layout: str | None = None) -> np.ndarray:
    with open(path, "rb") as fh:
        header = json.loads(fh.readline().decode("utf-8"))
        if header.get("dtype") != "f64":
            raise ValueError(f"unsupported tensor header {header}")
        if expect_layout is not None and header.get("layout") != expect_layout:
            raise ValueError(
                f"expected layout {expect_layout}, found {header.get('layout')}"
            )
        raw = fh.read()
    dims = tuple(header["dims"])
    count = int(np.prod(dims))
    if len(raw) < 8 * count:
        raise IOError(f"truncated tensor file {path}")
    return np.frombuffer(raw[: 8 * count], dtype=np.float64).reshape(dims).copy()
