"""Contextual-bandit core: rank/reward loop, online training, event log.

Two independent instances serve the two directions (travelers-for-jobs
and jobs-for-travelers); they share no mutable state.
"""

from bidimatch.bandit.engine import ContextualBandit
from bidimatch.bandit.events import (
    ActionCandidate,
    EventLog,
    ModelName,
    RankEvent,
    RankRequest,
    RankResponse,
    RankedAction,
    RewardAck,
    RewardSource,
    RewardStatus,
)
from bidimatch.bandit.features import FeatureHasher, feature_vector
from bidimatch.bandit.model import PolicyModel, load_snapshot, predict, save_snapshot, sgd_step

__all__ = [
    "ActionCandidate",
    "ContextualBandit",
    "EventLog",
    "FeatureHasher",
    "ModelName",
    "PolicyModel",
    "RankEvent",
    "RankRequest",
    "RankResponse",
    "RankedAction",
    "RewardAck",
    "RewardSource",
    "RewardStatus",
    "feature_vector",
    "load_snapshot",
    "predict",
    "save_snapshot",
    "sgd_step",
]
