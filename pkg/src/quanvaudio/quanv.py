"""Quanvolutional layer: 2x2 patches -> angle encoding -> circuit -> Pauli-Z.

Patches are taken row-major with stride 2 (non-overlapping); odd spatial
dimensions are zero-padded. Each patch value x in [0,1] becomes Ry(pi*x)
on its qubit, the 4-qubit state is pushed through the circuit, and the
four per-qubit Z expectations become the four output channels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .qsim import CircuitSpec, StateVec, expectation_z_batch, run_circuit_batch
from .tensorio import load_tensor, save_tensor

PATCH_QUBITS = 4
CLAMP_EPS = 1e-9


class PatchRangeError(ValueError):
    """Patch values stray outside [0,1] beyond clamping tolerance."""


@dataclass(frozen=True)
class FeatureMap:
    """Channel-first (C, H, W) feature tensor."""

    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 3:
            raise ValueError(f"expected (C, H, W), got shape {vals.shape}")
        object.__setattr__(self, "values", vals)

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.values.shape

    def save(self, path: str | Path) -> None:
        save_tensor(path, self.values, layout="CHW")

    @staticmethod
    def load(path: str | Path) -> "FeatureMap":
        return FeatureMap(load_tensor(path, expect_layout="CHW"))


def patch_iterate(height: int, width: int) -> list[tuple[int, int]]:
    """Row-major top-left coordinates of the non-overlapping 2x2 blocks.

    Odd trailing rows/columns are covered by a zero-padded edge patch.
    """
    if height < 1 or width < 1:
        raise ValueError(f"need positive dims, got {height}x{width}")
    rows = (height + 1) // 2
    cols = (width + 1) // 2
    return [(2 * r, 2 * c) for r in range(rows) for c in range(cols)]


def _clamp_unit(values: np.ndarray) -> np.ndarray:
    lo, hi = values.min(initial=0.0), values.max(initial=0.0)
    if lo < -CLAMP_EPS or hi > 1.0 + CLAMP_EPS:
        raise PatchRangeError(
            f"patch values outside [0,1]: min={lo}, max={hi}; "
            "inputs must be normalized upstream"
        )
    return np.clip(values, 0.0, 1.0)


def _product_states(patches: np.ndarray) -> np.ndarray:
    """Batched angle encoding: (P, 4) patch values -> (P, 16) statevectors."""
    x = _clamp_unit(patches)
    half = 0.5 * np.pi * x
    c, s = np.cos(half), np.sin(half)
    states = np.ones((x.shape[0], 1), dtype=np.complex128)
    for q in reversed(range(PATCH_QUBITS)):  # most significant qubit first
        vq = np.stack([c[:, q], s[:, q]], axis=1).astype(np.complex128)
        states = np.einsum("pi,pj->pij", states, vq).reshape(x.shape[0], -1)
    return states


def encode_patch(patch) -> StateVec:
    """Encode four values in [0,1] as qubit rotations Ry(pi*x_i)."""
    x = np.asarray(patch, dtype=np.float64).reshape(-1)
    if x.shape[0] != PATCH_QUBITS:
        raise ValueError(f"expected 4 patch values, got {x.shape[0]}")
    return StateVec(_product_states(x[None, :])[0])


def _extract_patches(gram: np.ndarray) -> tuple[np.ndarray, int, int]:
    h, w = gram.shape
    hp, wp = h + h % 2, w + w % 2
    padded = np.zeros((hp, wp))
    padded[:h, :w] = gram
    blocks = (
        padded.reshape(hp // 2, 2, wp // 2, 2)
        .transpose(0, 2, 1, 3)
        .reshape(-1, 4)
    )
    return blocks, hp // 2, wp // 2


def quanv_forward(gram: np.ndarray, spec: CircuitSpec) -> FeatureMap:
    """Slide the quantum filter over a [0,1] matrix.

    Returns a 4-channel map of shape (4, ceil(H/2), ceil(W/2)); an input
    of 40x128 yields 4x20x64.
    """
    if spec.n_qubits != PATCH_QUBITS:
        raise ValueError(f"quanvolution needs a 4-qubit circuit, got {spec.n_qubits}")
    gram = np.asarray(gram, dtype=np.float64)
    if gram.ndim != 2:
        raise ValueError(f"expected a 2-D gram, got shape {gram.shape}")
    patches, out_h, out_w = _extract_patches(gram)
    states = _product_states(patches)
    states = run_circuit_batch(spec, states)
    z = expectation_z_batch(states)  # (P, 4)
    fmap = z.reshape(out_h, out_w, PATCH_QUBITS).transpose(2, 0, 1)
    return FeatureMap(fmap)
