"""Simulation of ad hoc mobile router networks: deployment algorithms,
force-based baselines, static coverage patterns and experiment tooling."""

from .engine import ConfigError, SimConfig, run
from .geometry import Point2, Rect, WorldMap
from .scenario import ScenarioSpec, TriangularStrategy, load_scenario

__version__ = "0.1.0"

__all__ = ["ConfigError", "SimConfig", "run", "Point2", "Rect", "WorldMap", "ScenarioSpec",
           "TriangularStrategy", "load_scenario", "__version__"]
