"""Hashed sparse feature vectors for (context, action) pairs.

Every non-excluded key/value pair becomes a hashed index: ``c:`` tokens
for context, ``a:`` tokens for actions, ``x:`` tokens for every
context-by-action cross, plus one constant bias index. All feature
values are 1.0, so a vector is just its multiset of indices.

Numeric values are bucketed into 8 ordinal bins on a fixed log scale
(a deterministic stand-in for quantile bins: per-stream quantiles would
shift between calls and break replay determinism). Hashing uses
blake2b, which is stable across processes and interpreter runs.
"""

from __future__ import annotations

import math
from hashlib import blake2b
from typing import Iterable, Mapping

import numpy as np

BIAS_TOKEN = "bias"
NUMERIC_BINS = 8
# Crossed features are capped to bound vector size on oversized requests.
MAX_CROSS_KEYS = 64
_DEFAULT_MEMO_SIZE = 200_000


def hash_token(token: str, dimension: int) -> int:
    digest = blake2b(token.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little") % dimension


def bucket_numeric(value: float) -> str:
    """Map a number to one of 8 log-scale magnitude bins (sign kept)."""
    magnitude = abs(float(value))
    bin_index = min(NUMERIC_BINS - 1, int(2.0 * math.log10(magnitude + 1.0)))
    return f"n{bin_index}" if value < 0 else f"b{bin_index}"


def encode_value(value: object) -> str:
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, (int, float)):
        return bucket_numeric(value)
    return str(value)


def _pairs(features: Mapping[str, object], exclusions: frozenset[str] | set[str]) -> list[tuple[str, str]]:
    return [(k, encode_value(v)) for k, v in sorted(features.items()) if k not in exclusions]


CONTEXT_NAMESPACE = "context"
ACTION_NAMESPACE = "action"

Owner = tuple[str, str]  # (namespace, feature name)


def attributed_tokens(
    context: Mapping[str, object],
    action: Mapping[str, object],
    exclusions: Iterable[str] = (),
) -> list[tuple[str, tuple[Owner, ...]]]:
    """Tokens plus the features that own them (crosses belong to both)."""
    excluded = exclusions if isinstance(exclusions, (set, frozenset)) else frozenset(exclusions)
    ctx_pairs = _pairs(context, excluded)
    act_pairs = _pairs(action, excluded)
    out: list[tuple[str, tuple[Owner, ...]]] = []
    for k, v in ctx_pairs:
        out.append((f"c:{k}={v}", ((CONTEXT_NAMESPACE, k),)))
    for k, v in act_pairs:
        out.append((f"a:{k}={v}", ((ACTION_NAMESPACE, k),)))
    for ck, cv in ctx_pairs[:MAX_CROSS_KEYS]:
        for ak, av in act_pairs[:MAX_CROSS_KEYS]:
            out.append((f"x:{ck}={cv}|{ak}={av}", ((CONTEXT_NAMESPACE, ck), (ACTION_NAMESPACE, ak))))
    out.append((BIAS_TOKEN, ()))
    return out


def tokens_for(
    context: Mapping[str, object],
    action: Mapping[str, object],
    exclusions: Iterable[str] = (),
) -> list[str]:
    """Emit the token strings for one (context, action) pair."""
    return [token for token, _ in attributed_tokens(context, action, exclusions)]


def feature_vector(
    context: Mapping[str, object],
    action: Mapping[str, object],
    exclusions: Iterable[str],
    dimension: int,
) -> np.ndarray:
    """Hashed index array (values implicitly 1.0) for one pair."""
    toks = tokens_for(context, action, exclusions)
    return np.fromiter((hash_token(t, dimension) for t in toks), dtype=np.int64, count=len(toks))


class FeatureHasher:
    """Memoizing wrapper around :func:`feature_vector`.

    Serving traffic revisits the same (context, action) pairs constantly;
    the memo turns repeat featurization into a dict lookup. Pure function
    of its inputs, so the memo never changes results.
    """

    def __init__(self, dimension: int, memo_size: int = _DEFAULT_MEMO_SIZE):
        self.dimension = dimension
        self._memo: dict[tuple, np.ndarray] = {}
        self._memo_size = memo_size

    def indices(
        self,
        context: Mapping[str, object],
        action: Mapping[str, object],
        exclusions: frozenset[str] | Iterable[str] = frozenset(),
    ) -> np.ndarray:
        excluded = exclusions if isinstance(exclusions, frozenset) else frozenset(exclusions)
        key = (
            tuple(sorted(context.items())),
            tuple(sorted(action.items())),
            excluded,
        )
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        vector = feature_vector(context, action, excluded, self.dimension)
        if len(self._memo) >= self._memo_size:
            self._memo.pop(next(iter(self._memo)))
        self._memo[key] = vector
        return vector
