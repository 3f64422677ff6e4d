"""Pytest configuration and shared fixtures."""

from tests.fixtures import (
    cartesian_config,
    cartesian_fixture,
    ex1_fixture,
    grid_config,
    grid_fixture,
    lab,
    rich_fixture,
    small_grid,
)

__all__ = [
    "small_grid",
    "grid_fixture",
    "rich_fixture",
    "cartesian_fixture",
    "ex1_fixture",
    "grid_config",
    "cartesian_config",
    "lab",
]
