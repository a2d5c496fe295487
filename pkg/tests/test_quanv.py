"""Quanvolution layer: encoding golden values, kron-product oracle,
patch geometry, anchors, and locality/range/determinism properties."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quanvaudio.qsim import CircuitSpec, Gate, GateKind, Template, build_beqc
from quanvaudio.quanv import (
    FeatureMap,
    PatchRangeError,
    encode_patch,
    patch_iterate,
    quanv_forward,
)

IDENTITY_CIRCUIT = CircuitSpec(4, 1, (), Template.BEQC, 0)


def _kron_oracle(x):
    """Independent product-state construction: kron of per-qubit kets,
    most significant qubit first (little-endian amplitude index)."""
    state = np.array([1.0 + 0j])
    for q in reversed(range(4)):
        half = np.pi * x[q] / 2.0
        state = np.kron(state, np.array([np.cos(half), np.sin(half)]))
    return state


def test_encode_all_zeros():
    np.testing.assert_allclose(
        encode_patch([0, 0, 0, 0]).amplitudes, np.eye(16)[0], atol=1e-12
    )


def test_encode_all_ones():
    np.testing.assert_allclose(
        encode_patch([1, 1, 1, 1]).amplitudes, np.eye(16)[15], atol=1e-12
    )


def test_encode_half_has_zero_expectation():
    from quanvaudio.qsim import expectation_z

    z = expectation_z(encode_patch([0.5] * 4))
    np.testing.assert_allclose(z, 0.0, atol=1e-12)


def test_encode_matches_kron_oracle():
    rng = np.random.default_rng(0)
    for _ in range(20):
        x = rng.uniform(0, 1, 4)
        np.testing.assert_allclose(
            encode_patch(x).amplitudes, _kron_oracle(x), atol=1e-12
        )


def test_encode_validation():
    with pytest.raises(ValueError):
        encode_patch([0.1, 0.2, 0.3])
    with pytest.raises(PatchRangeError):
        encode_patch([0.1, 0.2, 0.3, 1.5])
    with pytest.raises(PatchRangeError):
        encode_patch([-0.2, 0.2, 0.3, 0.5])
    # tiny numerical overshoot is clamped, not rejected
    encode_patch([0.0, 1.0 + 1e-12, 0.5, 0.5])


def test_patch_iterate_counts():
    assert len(patch_iterate(40, 128)) == 20 * 64
    assert patch_iterate(2, 2) == [(0, 0)]
    assert patch_iterate(3, 3) == [(0, 0), (0, 2), (2, 0), (2, 2)]
    assert patch_iterate(4, 6)[:3] == [(0, 0), (0, 2), (0, 4)]  # row-major
    with pytest.raises(ValueError):
        patch_iterate(0, 4)


def test_zero_gram_through_zero_angle_circuit_is_all_ones():
    spec = build_beqc(4, 1, seed=0)
    zeroed = CircuitSpec(
        4, 1,
        tuple(
            Gate(g.kind, g.wires, 0.0 if g.angle is not None else None)
            for g in spec.gates
        ),
        Template.BEQC, 0,
    )
    out = quanv_forward(np.zeros((40, 128)), zeroed)
    assert out.shape == (4, 20, 64)
    np.testing.assert_allclose(out.values, 1.0, atol=1e-12)


def test_identity_circuit_is_cosine_per_channel():
    rng = np.random.default_rng(3)
    gram = rng.uniform(0, 1, (8, 10))
    out = quanv_forward(gram, IDENTITY_CIRCUIT).values
    patches = gram.reshape(4, 2, 5, 2).transpose(0, 2, 1, 3).reshape(4, 5, 4)
    for q in range(4):
        np.testing.assert_allclose(out[q], np.cos(np.pi * patches[..., q]), atol=1e-12)


def test_shape_law_40x128():
    out = quanv_forward(np.zeros((40, 128)), IDENTITY_CIRCUIT)
    assert out.shape == (4, 20, 64)


@given(st.integers(1, 25), st.integers(1, 25))
@settings(max_examples=25, deadline=None)
def test_shape_law_and_range_property(h, w):
    rng = np.random.default_rng(h * 100 + w)
    gram = rng.uniform(0, 1, (h, w))
    out = quanv_forward(gram, build_beqc(4, 2, seed=1)).values
    assert out.shape == (4, (h + 1) // 2, (w + 1) // 2)
    assert np.all(np.abs(out) <= 1 + 1e-12)


def test_odd_dims_are_zero_padded():
    gram = np.ones((3, 3))
    padded = np.zeros((4, 4))
    padded[:3, :3] = gram
    spec = build_beqc(4, 1, seed=4)
    np.testing.assert_array_equal(
        quanv_forward(gram, spec).values, quanv_forward(padded, spec).values
    )


def test_locality_of_patches():
    rng = np.random.default_rng(5)
    gram = rng.uniform(0, 1, (10, 12))
    spec = build_beqc(4, 2, seed=2)
    base = quanv_forward(gram, spec).values
    bumped = gram.copy()
    bumped[4:6, 6:8] = rng.uniform(0, 1, (2, 2))  # patch (row 2, col 3)
    out = quanv_forward(bumped, spec).values
    changed = np.any(base != out, axis=0)
    expected = np.zeros_like(changed)
    expected[2, 3] = True
    np.testing.assert_array_equal(changed, expected)


def test_determinism_bit_for_bit():
    rng = np.random.default_rng(6)
    gram = rng.uniform(0, 1, (12, 14))
    spec = build_beqc(4, 3, seed=8)
    a = quanv_forward(gram, spec).values
    b = quanv_forward(gram, spec).values
    np.testing.assert_array_equal(a, b)


def test_quanv_forward_validation():
    with pytest.raises(ValueError):
        quanv_forward(np.zeros((4, 4)), build_beqc(3, 1, seed=0))
    with pytest.raises(ValueError):
        quanv_forward(np.zeros(16), IDENTITY_CIRCUIT)
    with pytest.raises(PatchRangeError):
        quanv_forward(np.full((4, 4), 2.0), IDENTITY_CIRCUIT)


def test_feature_map_round_trip(tmp_path):
    values = np.random.default_rng(9).uniform(-1, 1, (4, 5, 6))
    path = tmp_path / "map.fmap"
    FeatureMap(values).save(path)
    np.testing.assert_array_equal(FeatureMap.load(path).values, values)


def test_feature_map_requires_3d():
    with pytest.raises(ValueError):
        FeatureMap(np.zeros((4, 4)))
