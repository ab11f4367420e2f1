"""HTTP service layer: recommendation engine, endpoints, batch training."""

from bidimatch.service.batch import BatchSummary, CronSchedule, parse_cron
from bidimatch.service.engine import RecommendationPage, RecommendationRow, RecommendationService

__all__ = [
    "BatchSummary",
    "CronSchedule",
    "RecommendationPage",
    "RecommendationRow",
    "RecommendationService",
    "parse_cron",
]
