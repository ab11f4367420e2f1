"""Linear model arithmetic and snapshot integrity."""

from __future__ import annotations

import numpy as np
import pytest

from bidimatch.bandit.model import PolicyModel, load_snapshot, predict, save_snapshot, sgd_step
from bidimatch.errors import CorruptSnapshot

DIM = 1 << 10


def fresh(epsilon=0.2, lr=0.05) -> PolicyModel:
    return PolicyModel.zeros(DIM, epsilon, lr)


def test_zero_weights_predict_zero():
    assert predict(fresh(), np.array([1, 2, 3])) == 0.0


def test_prediction_clamped_to_one():
    model = fresh()
    model.weights[5] = 1.7
    assert predict(model, np.array([5])) == 1.0


def test_hand_dot_product():
    model = fresh()
    model.weights[[10, 20, 30]] = [0.25, 0.5, 0.1]
    assert predict(model, np.array([10, 20, 30])) == pytest.approx(0.85)


def test_sgd_step_hand_computed():
    model = fresh(lr=0.05)
    indices = np.array([3, 7, 9])
    sgd_step(model, indices, reward=1.0)
    assert model.weights[3] == pytest.approx(0.05)
    assert model.weights[7] == pytest.approx(0.05)
    assert model.weights[9] == pytest.approx(0.05)
    assert model.updates_applied == 1


def test_sgd_step_counts_duplicate_indices_twice():
    model = fresh(lr=0.1)
    sgd_step(model, np.array([4, 4]), reward=1.0)
    # error 1.0, each occurrence applies lr * error
    assert model.weights[4] == pytest.approx(0.2)


@pytest.mark.filterwarnings("ignore:invalid value encountered")
def test_weights_stay_finite_guard():
    model = fresh(lr=0.05)
    model.weights[1] = np.inf
    with pytest.raises(ArithmeticError):
        sgd_step(model, np.array([1]), reward=0.5)


def test_snapshot_round_trip_bit_identical(tmp_path):
    model = fresh()
    rng = np.random.default_rng(3)
    model.weights[:] = rng.normal(size=DIM)
    model.updates_applied = 123
    path = tmp_path / "model.snap"
    save_snapshot(model, path)
    restored = load_snapshot(path)
    assert np.array_equal(restored.weights, model.weights)
    assert restored.weights.tobytes() == model.weights.tobytes()
    assert restored.epsilon == model.epsilon
    assert restored.learning_rate == model.learning_rate
    assert restored.updates_applied == 123
    assert restored.version == model.version


def test_version_increments_per_snapshot(tmp_path):
    model = fresh()
    assert save_snapshot(model, tmp_path / "a.snap") == 1
    assert save_snapshot(model, tmp_path / "b.snap") == 2
    assert model.version == 2


def test_truncated_snapshot_rejected(tmp_path):
    model = fresh()
    path = tmp_path / "model.snap"
    save_snapshot(model, path)
    blob = path.read_bytes()
    path.write_bytes(blob[: len(blob) // 2])
    with pytest.raises(CorruptSnapshot):
        load_snapshot(path)


def test_flipped_byte_rejected(tmp_path):
    model = fresh()
    path = tmp_path / "model.snap"
    save_snapshot(model, path)
    blob = bytearray(path.read_bytes())
    blob[-1] ^= 0xFF
    path.write_bytes(bytes(blob))
    with pytest.raises(CorruptSnapshot):
        load_snapshot(path)


def test_bad_magic_rejected(tmp_path):
    path = tmp_path / "model.snap"
    path.write_bytes(b"NOTASNAP" + b"\x00" * 100)
    with pytest.raises(CorruptSnapshot):
        load_snapshot(path)
