"""Bi-directional staffing personalization engine.

Two epsilon-greedy contextual bandits (travelers-for-jobs and
jobs-for-travelers) learn online from human reward feedback on top of a
deterministic twelve-component smart-match score. Counterfactual offline
evaluation audits the live policy, and a job-feed NLP pipeline supplies
normalized entity data.
"""

__version__ = "0.1.0"

from bidimatch.config import EngineConfig, MatchConfig, load_config, load_match_config
from bidimatch.domain import Facility, Job, Traveler
from bidimatch.ids import new_event_id

__all__ = [
    "EngineConfig",
    "Facility",
    "Job",
    "MatchConfig",
    "Traveler",
    "load_config",
    "load_match_config",
    "new_event_id",
    "__version__",
]
