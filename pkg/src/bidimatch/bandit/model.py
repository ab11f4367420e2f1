"""Linear reward model over hashed features, with binary snapshots.

The reward estimate for an action is the clamped dot product of the
weight vector with the action's (implicitly 1-valued) hashed indices.
Training is one squared-loss SGD step per settled event:
``w <- w + lr * (r - w.x) * x``.

Snapshot layout: 8-byte magic, fixed header (format version, model
version, dimension, epsilon, learning rate, update counter), a sha256
digest of the weight payload, then the little-endian float64 weights.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from bidimatch.errors import CorruptSnapshot

SNAPSHOT_MAGIC = b"BMSNAP01"
_HEADER = struct.Struct("<IIQQddQ")  # format, reserved, version, dimension, epsilon, lr, updates
_FORMAT_VERSION = 1


@dataclass
class PolicyModel:
    """Dense weights plus the learning settings that produced them."""

    weights: np.ndarray
    epsilon: float
    learning_rate: float
    updates_applied: int = 0
    version: int = 0

    @classmethod
    def zeros(cls, dimension: int, epsilon: float, learning_rate: float) -> "PolicyModel":
        return cls(np.zeros(dimension, dtype=np.float64), epsilon, learning_rate)

    @property
    def dimension(self) -> int:
        return int(self.weights.shape[0])


def raw_score(model: PolicyModel, indices: np.ndarray) -> float:
    return float(model.weights[indices].sum())


def predict(model: PolicyModel, indices: np.ndarray) -> float:
    """Reward estimate clamped to [0, 1]."""
    return min(1.0, max(0.0, raw_score(model, indices)))


def sgd_step(model: PolicyModel, indices: np.ndarray, reward: float) -> float:
    """Apply one squared-loss step; returns the pre-update error."""
    error = reward - raw_score(model, indices)
    np.add.at(model.weights, indices, model.learning_rate * error)
    model.updates_applied += 1
    if not np.isfinite(model.weights[indices]).all():
        raise ArithmeticError("non-finite weights after SGD step")
    return error


def save_snapshot(model: PolicyModel, path: str | Path) -> int:
    """Write a versioned snapshot; bumps and returns the model version."""
    model.version += 1
    payload = np.ascontiguousarray(model.weights, dtype="<f8").tobytes()
    header = _HEADER.pack(
        _FORMAT_VERSION,
        0,
        model.version,
        model.dimension,
        model.epsilon,
        model.learning_rate,
        model.updates_applied,
    )
    digest = hashlib.sha256(payload).digest()
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    tmp = target.with_suffix(target.suffix + ".tmp")
    tmp.write_bytes(SNAPSHOT_MAGIC + header + digest + payload)
    tmp.replace(target)
    return model.version


def load_snapshot(path: str | Path) -> PolicyModel:
    """Restore a snapshot exactly; integrity failures raise CorruptSnapshot."""
    try:
        blob = Path(path).read_bytes()
    except OSError as exc:
        raise CorruptSnapshot(f"cannot read snapshot {path}: {exc}") from exc
    prefix_len = len(SNAPSHOT_MAGIC) + _HEADER.size + 32
    if len(blob) < prefix_len or blob[: len(SNAPSHOT_MAGIC)] != SNAPSHOT_MAGIC:
        raise CorruptSnapshot(f"bad magic or truncated header in {path}")
    offset = len(SNAPSHOT_MAGIC)
    fmt, _, version, dimension, epsilon, learning_rate, updates = _HEADER.unpack_from(blob, offset)
    if fmt != _FORMAT_VERSION:
        raise CorruptSnapshot(f"unsupported snapshot format {fmt}")
    digest = blob[offset + _HEADER.size : prefix_len]
    payload = blob[prefix_len:]
    if len(payload) != dimension * 8:
        raise CorruptSnapshot(f"weight payload truncated in {path}")
    if hashlib.sha256(payload).digest() != digest:
        raise CorruptSnapshot(f"checksum mismatch in {path}")
    weights = np.frombuffer(payload, dtype="<f8").astype(np.float64)
    return PolicyModel(
        weights=weights,
        epsilon=epsilon,
        learning_rate=learning_rate,
        updates_applied=updates,
        version=version,
    )
