"""Named fixture generators: point sets with their surface (or curve) families."""

from __future__ import annotations

import inspect
import itertools
import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from incidence_lab.drawing.crossing import PlaneCircle
from incidence_lab.errors import LabError
from incidence_lab.geometry.kernel import (
    ComplexLine,
    ComplexUnitCircle,
    Flat2,
    PlaneLine,
    PlanePoint,
    PointC2,
    PointR4,
    circle_point,
    identify,
    point_c2,
)
from incidence_lab.incidence.engine import AnyPoint, AnySurface
from incidence_lab.models.schemas import ExperimentConfig, FixtureSummary

logger = logging.getLogger(__name__)


class ExperimentError(LabError):
    """Base exception for experiment plumbing."""


class UnknownGenerator(ExperimentError):
    """Raised for a generator name that is not registered."""


class UnsupportedFixture(ExperimentError):
    """Raised when a fixture cannot go through the requested stage."""


@dataclass
class Fixture:
    name: str
    dimension: int
    points: list[AnyPoint]
    surfaces: list[AnySurface]
    k: int = 2
    c0: int = 2
    params: dict[str, Any] = field(default_factory=dict)

    def coordinates(self) -> list[tuple[Fraction, ...]]:
        """Points as real coordinate tuples (C^2 points through the identification with R^4)."""
        return [tuple(identify(p)) if isinstance(p, PointC2) else tuple(p) for p in self.points]

    def summary(self) -> FixtureSummary:
        return FixtureSummary(name=self.name, dimension=self.dimension, m=len(self.points),
                              n=len(self.surfaces), k=self.k, c0=self.c0)

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "dimension": self.dimension,
            "points": [[str(v) for v in p] for p in self.points],
            "surfaces": [surface_dict(s) for s in self.surfaces],
            "k": self.k,
            "c0": self.c0,
        }


def surface_dict(s: AnySurface) -> dict[str, Any]:
    if isinstance(s, PlaneCircle):
        return {"kind": "PlaneCircle", "center": [str(s.center.x), str(s.center.y)],
                "radius": str(s.radius)}
    if isinstance(s, Flat2):
        return {"kind": s.kind, "forms": [[str(v) for v in f] for f in s.forms]}
    data = {name: str(value) if isinstance(value, Fraction) else value
            for name, value in vars(s).items()}
    return {"kind": s.kind, **data}


def _unique(items: Sequence[Any]) -> list[Any]:
    return list(dict.fromkeys(items))


# Plane fixtures


def plane_grid(k: int, s: int, t: int) -> Fixture:
    """[k] x [k] with the lines y = a*x + b, 0 <= a < s, 0 <= b < t."""
    points = [PlanePoint(Fraction(x), Fraction(y))
              for x in range(1, k + 1) for y in range(1, k + 1)]
    lines = _unique([PlaneLine.slope_intercept(a, b) for a in range(s) for b in range(t)])
    return Fixture("plane_grid", 2, points, lines, params={"k": k, "s": s, "t": t})


def elekes_grid(k: int) -> Fixture:
    """[k] x [2k^2] with y = a*x + b, a in [k], b in [k^2]; every line holds k points."""
    points = [PlanePoint(Fraction(x), Fraction(y))
              for x in range(1, k + 1) for y in range(1, 2 * k * k + 1)]
    lines = [PlaneLine.slope_intercept(a, b)
             for a in range(1, k + 1) for b in range(1, k * k + 1)]
    return Fixture("elekes_grid", 2, points, lines, params={"k": k})


def grid_rich_lines(k: int) -> Fixture:
    """[k] x [k] with every line through at least two of its points."""
    points = [PlanePoint(Fraction(x), Fraction(y))
              for x in range(1, k + 1) for y in range(1, k + 1)]
    lines = _unique([PlaneLine.through(p, q) for p, q in itertools.combinations(points, 2)])
    return Fixture("grid_rich_lines", 2, points, lines, params={"k": k})


def random_uniform(m: int, n: int, box: int = 10, seed: int = 0) -> Fixture:
    """m integer points in [-box, box]^2 and n distinct lines through random point pairs."""
    rng = np.random.default_rng(seed)
    side = 2 * box + 1
    if m > side * side:
        raise UnsupportedFixture(f"Only {side * side} lattice points fit in the box")
    cells = rng.choice(side * side, size=m, replace=False)
    points = [PlanePoint(Fraction(int(c) // side - box), Fraction(int(c) % side - box))
              for c in cells]
    pairs = list(itertools.combinations(range(m), 2))
    lines: dict[PlaneLine, None] = {}
    for index in rng.permutation(len(pairs)):
        if len(lines) >= n:
            break
        i, j = pairs[int(index)]
        lines.setdefault(PlaneLine.through(points[i], points[j]))
    return Fixture("random_uniform", 2, points, list(lines),
                   params={"m": m, "n": n, "box": box, "seed": seed})


def _unit_vector(t: Fraction) -> PlanePoint:
    d = 1 + t * t
    return PlanePoint((1 - t * t) / d, 2 * t / d)


def plane_unit_circles(count: int) -> Fixture:
    """Sums u_i + u_j of rational unit vectors, with the unit circles centred at the u_i."""
    vectors = [_unit_vector(Fraction(j, count + 1)) for j in range(1, count + 1)]
    vectors += [PlanePoint(-v.x, -v.y) for v in vectors]
    points = _unique([PlanePoint(u.x + v.x, u.y + v.y)
                      for u, v in itertools.combinations(vectors, 2) if u.x != -v.x or u.y != -v.y])
    circles = [PlaneCircle(v, Fraction(1)) for v in vectors]
    return Fixture("plane_unit_circles", 2, points, circles, k=3, c0=2, params={"count": count})


# C^2 / R^4 fixtures


def _gaussian_integers(count: int) -> list[tuple[int, int]]:
    side = math.isqrt(max(count - 1, 0)) + 1
    return [(x, y) for x in range(side) for y in range(side)][:count]


def complex_cartesian(size: int = 4, a: Sequence[Any] | None = None,
                      b: Sequence[Any] | None = None,
                      lines: Sequence[Sequence[Any]] | None = None,
                      slopes: int | None = None) -> Fixture:
    """A x B in C^2 and complex lines z2 = s*z1 + t given as (s, t) pairs.

    Without explicit sets, A = B are ``size`` Gaussian integers and the lines take
    the first ``slopes`` nonzero Gaussian integers as slopes (default ceil(sqrt(size)))
    and intercepts from B.
    """
    first = [tuple(v) if isinstance(v, (list, tuple)) else (v, 0)
             for v in (a if a is not None else _gaussian_integers(size))]
    second = [tuple(v) if isinstance(v, (list, tuple)) else (v, 0)
              for v in (b if b is not None else first)]
    if lines is None:
        count = math.isqrt(max(size - 1, 0)) + 1 if slopes is None else slopes
        chosen = [z for z in _gaussian_integers(count + 1) if z != (0, 0)][:count]
        lines = [(s, t) for s in chosen for t in second]
    points = _unique([point_c2(z, w) for z in first for w in second])
    surfaces = _unique([ComplexLine.of(_pair(s), _pair(t)) for s, t in lines])
    return Fixture("complex_cartesian", 4, points, surfaces, k=2, c0=1,
                   params={"size": size, "slopes": slopes})


def _pair(z: Any) -> tuple[Any, Any]:
    return tuple(z) if isinstance(z, (list, tuple)) else (z, 0)  # type: ignore[return-value]


def example_ex1() -> Fixture:
    """The 72 points (+-j, +-j, +-j, +-j) and (0, +-j, +-j, +-j), j = 1, 2, 3, with four 2-flats."""
    points: list[AnyPoint] = []
    for j in (1, 2, 3):
        for signs in itertools.product((1, -1), repeat=4):
            points.append(PointR4(*(Fraction(j * s) for s in signs)))
    for j in (1, 2, 3):
        for signs in itertools.product((1, -1), repeat=3):
            points.append(PointR4(Fraction(0), *(Fraction(j * s) for s in signs)))
    flats = [
        Flat2.from_forms([(1, -1, 0, 0, 0), (0, 0, 1, -1, 0)]),
        Flat2.from_forms([(1, 0, -1, 0, 0), (0, 1, 0, -1, 0)]),
        Flat2.from_forms([(1, 0, 0, -1, 0), (0, 1, -1, 0, 0)]),
        Flat2.from_forms([(1, 1, 0, 0, 0), (0, 0, 1, 1, 0)]),
    ]
    return Fixture("example_ex1", 4, points, flats, k=2, c0=1)


def example_ex2(count: int = 24, seed: int = 0) -> Fixture:
    """Points (0, 0, a, b) in general position, i.e. z1 = 0, and two complex lines per point."""
    rng = np.random.default_rng(seed)
    values: list[tuple[int, int]] = []
    while len(values) < count:
        a, b = (int(v) for v in rng.integers(-1000, 1001, size=2))
        if (a, b) not in values:
            values.append((a, b))
    points = [point_c2(0, (a, b)) for a, b in values]
    lines = _unique([ComplexLine.of(slope, (a, b)) for a, b in values for slope in (1, (0, 1))])
    return Fixture("example_ex2", 4, points, lines, k=2, c0=1,
                   params={"count": count, "seed": seed})


def unit_circles(count: int = 8, per_circle: int = 3, seed: int = 0) -> Fixture:
    """Complex unit circles with Gaussian-integer centres and rational points placed on them."""
    rng = np.random.default_rng(seed)
    circles: list[ComplexUnitCircle] = []
    while len(circles) < count:
        a_re, a_im, b_re, b_im = (int(v) for v in rng.integers(-3, 4, size=4))
        circle = ComplexUnitCircle.of((a_re, a_im), (b_re, b_im))
        if circle not in circles:
            circles.append(circle)
    points: list[AnyPoint] = []
    for circle in circles:
        for _ in range(per_circle):
            tau = (Fraction(int(rng.integers(-4, 5)), int(rng.integers(1, 5))),
                   Fraction(int(rng.integers(-4, 5)), int(rng.integers(1, 5))))
            if tau in ((0, 1), (0, -1)):
                continue
            points.append(circle_point(circle, tau))
    return Fixture("unit_circles", 4, _unique(points), circles, k=3, c0=2,
                   params={"count": count, "per_circle": per_circle, "seed": seed})


GENERATORS: dict[str, Callable[..., Fixture]] = {
    "plane_grid": plane_grid,
    "elekes_grid": elekes_grid,
    "grid_rich_lines": grid_rich_lines,
    "complex_cartesian": complex_cartesian,
    "example_ex1": example_ex1,
    "example_ex2": example_ex2,
    "unit_circles": unit_circles,
    "plane_unit_circles": plane_unit_circles,
    "random_uniform": random_uniform,
}


def generate(config: ExperimentConfig) -> Fixture:
    """Run the configured generator; the config seed goes to generators that take one."""
    try:
        generator = GENERATORS[config.generator]
    except KeyError:
        raise UnknownGenerator(f"Unknown generator: {config.generator}") from None
    params = dict(config.params)
    if "seed" in inspect.signature(generator).parameters:
        params.setdefault("seed", config.seed)
    try:
        fixture = generator(**params)
    except TypeError as exc:
        raise UnsupportedFixture(f"Bad parameters for {config.generator}: {exc}") from exc
    logger.info(f"Generated {fixture.name}: m={len(fixture.points)}, n={len(fixture.surfaces)}")
    return fixture
