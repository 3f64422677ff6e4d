"""SVG pictures of partitions and drawings.

Display coordinates are floats; nothing drawn here feeds back into a count.
"""

from __future__ import annotations

import logging
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import sympy  # noqa: E402

from incidence_lab.algebra.polynomial import gens  # noqa: E402
from incidence_lab.cad.cells import Box, enclosing_box  # noqa: E402
from incidence_lab.drawing.crossing import (  # noqa: E402
    Arc,
    Drawing,
    PlaneCircle,
    Segment,
    planar_circle_drawing,
)
from incidence_lab.errors import LabError  # noqa: E402
from incidence_lab.experiments.generators import Fixture, generate  # noqa: E402
from incidence_lab.experiments.pipeline import first_level_degree, supports_pipeline  # noqa: E402
from incidence_lab.geometry.kernel import PlaneLine, PlanePoint  # noqa: E402
from incidence_lab.models.schemas import ExperimentConfig  # noqa: E402
from incidence_lab.partition.ham_sandwich import Partition, build_partition  # noqa: E402

logger = logging.getLogger(__name__)

# fixed ids keep reruns byte-identical
matplotlib.rcParams["svg.hashsalt"] = "incidence-lab"

_GRID = 400


def _save(fig: plt.Figure, path: str | Path) -> str:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(target, format="svg", metadata={"Date": None}, bbox_inches="tight")
    plt.close(fig)
    logger.info(f"Wrote {target}")
    return str(target)


def _axes(box: Box) -> tuple[plt.Figure, plt.Axes]:
    fig, ax = plt.subplots(figsize=(6, 6))
    ax.set_xlim(float(box.xmin), float(box.xmax))
    ax.set_ylim(float(box.ymin), float(box.ymax))
    ax.set_aspect("equal")
    return fig, ax


def _xy(points: list[tuple]) -> tuple[np.ndarray, np.ndarray]:
    coords = np.array([[float(p[0]), float(p[1])] for p in points]).reshape(-1, 2)
    return coords[:, 0], coords[:, 1]


def plot_partition(fixture: Fixture, partition: Partition, path: str | Path) -> str:
    """Zero set of P (plane only) with the points coloured by cell; d = 4 shows (x1, x2)."""
    coords = fixture.coordinates()
    box = enclosing_box(coords)
    fig, ax = _axes(box)
    if partition.dimension == 2:
        x, y = gens(2)
        f = sympy.lambdify((x, y), partition.polynomial.to_sympy().as_expr(), "numpy")
        xs = np.linspace(float(box.xmin), float(box.xmax), _GRID)
        ys = np.linspace(float(box.ymin), float(box.ymax), _GRID)
        gx, gy = np.meshgrid(xs, ys)
        values = np.broadcast_to(np.asarray(f(gx, gy), dtype=float), gx.shape)
        ax.contour(gx, gy, values, levels=[0.0], colors="black", linewidths=0.8)
    cmap = plt.get_cmap("tab20")
    for index, cell in enumerate(partition.cells):
        px, py = _xy([coords[i] for i in cell.roster])
        ax.scatter(px, py, s=10, color=cmap(index % 20))
    if partition.boundary:
        bx, by = _xy([coords[i] for i in partition.boundary])
        ax.scatter(bx, by, s=14, marker="x", color="black")
    ax.set_title(f"{fixture.name}: {len(partition.cells)} cells, "
                 f"{len(partition.boundary)} on Z, deg {partition.polynomial.degree}")
    return _save(fig, path)


def _arc_xy(arc: Arc) -> tuple[np.ndarray, np.ndarray]:
    cx, cy, r = float(arc.circle.center.x), float(arc.circle.center.y), float(arc.circle.radius)
    start = math.atan2(float(arc.start.y) - cy, float(arc.start.x) - cx)
    end = math.atan2(float(arc.end.y) - cy, float(arc.end.x) - cx)
    if end <= start:
        end += 2 * math.pi
    theta = np.linspace(start, end, 64)
    return cx + r * np.cos(theta), cy + r * np.sin(theta)


def _circle_xy(circle: PlaneCircle) -> tuple[np.ndarray, np.ndarray]:
    theta = np.linspace(0, 2 * math.pi, 128)
    r = float(circle.radius)
    return float(circle.center.x) + r * np.cos(theta), float(circle.center.y) + r * np.sin(theta)


def plot_drawing(drawing: Drawing, path: str | Path, title: str = "") -> str:
    box = enclosing_box(drawing.vertices)
    fig, ax = _axes(box)
    for edge in drawing.edges:
        for piece in edge.pieces:
            if isinstance(piece, Segment):
                ax.plot([float(piece.start.x), float(piece.end.x)],
                        [float(piece.start.y), float(piece.end.y)], color="tab:blue", lw=0.6)
            elif isinstance(piece, Arc):
                ax.plot(*_arc_xy(piece), color="tab:blue", lw=0.6)
            else:
                ax.plot(*_circle_xy(piece), color="tab:blue", lw=0.6)
    vx, vy = _xy(list(drawing.vertices))
    ax.scatter(vx, vy, s=10, color="black", zorder=3)
    ax.set_title(title or f"{len(drawing.vertices)} vertices, {len(drawing.edges)} edges")
    return _save(fig, path)


def _line_xy(line: PlaneLine, box: Box) -> tuple[list[float], list[float]]:
    if line.b:
        xs = [float(box.xmin), float(box.xmax)]
        return xs, [float(-(line.a * x + line.c) / line.b) for x in (box.xmin, box.xmax)]
    x = float(-line.c / line.a)
    return [x, x], [float(box.ymin), float(box.ymax)]


def plot_fixture(fixture: Fixture, path: str | Path) -> str:
    """Points with their plane lines or circles; other fixtures show (x1, x2) only."""
    box = enclosing_box(fixture.coordinates())
    fig, ax = _axes(box)
    for surface in fixture.surfaces:
        if isinstance(surface, PlaneLine):
            ax.plot(*_line_xy(surface, box), color="tab:gray", lw=0.4)
        elif isinstance(surface, PlaneCircle):
            ax.plot(*_circle_xy(surface), color="tab:gray", lw=0.4)
    px, py = _xy(fixture.coordinates())
    ax.scatter(px, py, s=10, color="black", zorder=3)
    ax.set_title(f"{fixture.name}: m={len(fixture.points)}, n={len(fixture.surfaces)}")
    return _save(fig, path)


def plot_config(config: ExperimentConfig, path: str | Path) -> str:
    """The partition when one can be built, else the drawing or the bare fixture."""
    fixture = generate(config)
    if supports_pipeline(fixture):
        degree = config.degree or first_level_degree(
            len(fixture.points), len(fixture.surfaces), fixture.k).value
        try:
            partition = build_partition(fixture.coordinates(), fixture.dimension, degree,
                                        config.seed)
        except LabError as exc:
            logger.warning(f"No partition to plot for {fixture.name}: {exc}")
            return plot_fixture(fixture, path)
        return plot_partition(fixture, partition, path)
    if fixture.dimension == 2 and all(isinstance(s, PlaneCircle) for s in fixture.surfaces):
        points = [PlanePoint(*p) for p in fixture.points]  # type: ignore[arg-type]
        drawing = planar_circle_drawing(points, fixture.surfaces)  # type: ignore[arg-type]
        return plot_drawing(drawing, path, title=fixture.name)
    return plot_fixture(fixture, path)
