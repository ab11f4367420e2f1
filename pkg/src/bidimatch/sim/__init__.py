"""Deterministic synthetic worlds and the simulated-recruiter driver."""

from bidimatch.sim.driver import (
    ConvergenceBucket,
    ConvergenceReport,
    FeedbackMode,
    SimulationResult,
    convergence_report,
    count_reports,
    simulate,
)
from bidimatch.sim.world import World, WorldSpec, generate_world

__all__ = [
    "ConvergenceBucket",
    "ConvergenceReport",
    "FeedbackMode",
    "SimulationResult",
    "World",
    "WorldSpec",
    "convergence_report",
    "count_reports",
    "generate_world",
    "simulate",
]
