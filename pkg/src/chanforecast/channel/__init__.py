"""Geometry-based stochastic time-varying channel generation and datasets."""

from .config import LOS, NLOS, ScenarioConfig, preset
from .dataset import Dataset, WindowBatch, build_dataset, read_dataset, window_count, write_dataset
from .geometry import (
    PathGeometry,
    PathSet,
    antenna_positions,
    eval_channel,
    path_geometry,
    sample_paths,
    snapshot,
)
from .trajectory import Trajectory, generate_trajectory

__all__ = [
    "LOS",
    "NLOS",
    "ScenarioConfig",
    "preset",
    "Dataset",
    "WindowBatch",
    "build_dataset",
    "read_dataset",
    "write_dataset",
    "window_count",
    "PathGeometry",
    "PathSet",
    "antenna_positions",
    "eval_channel",
    "path_geometry",
    "sample_paths",
    "snapshot",
    "Trajectory",
    "generate_trajectory",
]
