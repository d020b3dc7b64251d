"""Coverage path planning in unknown gridworlds: a bumper-only Roomba
baseline and an online deep Q-learning agent."""

from .grid import Action, Heading, Observation, StepOutcome, World, new_world
from .envgen import GenConfig, Layout, furniture_catalog, generate, is_connected

__version__ = "0.1.0"

__all__ = [
    "Action",
    "GenConfig",
    "Heading",
    "Layout",
    "Observation",
    "StepOutcome",
    "World",
    "furniture_catalog",
    "generate",
    "is_connected",
    "new_world",
]
