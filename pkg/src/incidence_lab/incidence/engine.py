"""Brute-force incidence oracles, admissibility filtering and the elementary bounds."""

from __future__ import annotations

import csv
import functools
import io
import itertools
import logging
from collections import Counter, defaultdict
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from multiprocessing import Pool
from typing import NamedTuple, Union

import numpy as np

from incidence_lab import ratios
from incidence_lab.config import settings
from incidence_lab.drawing.crossing import PlaneCircle
from incidence_lab.errors import LabError
from incidence_lab.geometry.kernel import (
    ComplexUnitCircle,
    PlaneLine,
    PlanePoint,
    PointC2,
    PointR4,
    SingularPoint,
    Surface,
    good_family_violations,
    incident,
    tangent_flat,
    transversal_at,
)

logger = logging.getLogger(__name__)

AnyPoint = Union[PlanePoint, PointR4, PointC2]
AnySurface = Union[Surface, PlaneCircle]

_FAST_LIMIT = 2**30


class IncidenceError(LabError):
    """Base exception for incidence counting."""


class ForbiddenSubgraphPresent(IncidenceError):
    """Raised when the incidence graph contains the excluded complete bipartite graph."""


class Incidence(NamedTuple):
    point: int
    surface: int
    smooth: bool = True
    transversal: bool = False


@dataclass
class IncidenceSet:
    points: Sequence[AnyPoint]
    surfaces: Sequence[AnySurface]
    pairs: list[Incidence]
    k: int = 2
    c0: int = 2
    admissible: bool = False
    violations: list[tuple[int, ...]] = field(default_factory=list)
    dropped: list[Incidence] = field(default_factory=list)

    @property
    def m(self) -> int:
        return len(self.points)

    @property
    def n(self) -> int:
        return len(self.surfaces)

    @property
    def size(self) -> int:
        return len(self.pairs)

    def by_point(self) -> dict[int, list[int]]:
        table: dict[int, list[int]] = defaultdict(list)
        for pair in self.pairs:
            table[pair.point].append(pair.surface)
        return table

    def by_surface(self) -> dict[int, list[int]]:
        table: dict[int, list[int]] = defaultdict(list)
        for pair in self.pairs:
            table[pair.surface].append(pair.point)
        return table


def export_csv(inc: IncidenceSet) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["point", "surface", "smooth", "transversal"])
    for pair in inc.pairs:
        writer.writerow([pair.point, pair.surface, int(pair.smooth), int(pair.transversal)])
    return buffer.getvalue()


# Counting


def _integral_lines(points: Sequence[AnyPoint], surfaces: Sequence[AnySurface]) -> bool:
    if not surfaces or not all(isinstance(s, PlaneLine) for s in surfaces):
        return False
    values = [v for p in points for v in p] + [v for s in surfaces for v in (s.a, s.b, s.c)]
    return all(len(p) == 2 for p in points) and all(
        Fraction(v).denominator == 1 and abs(v) < _FAST_LIMIT for v in values)


def _line_sweep(points: Sequence[AnyPoint], lines: Sequence[PlaneLine]) -> list[Incidence]:
    coords = np.array([[int(p[0]), int(p[1]), 1] for p in points], dtype=np.int64)
    forms = np.array([[int(s.a), int(s.b), int(s.c)] for s in lines], dtype=np.int64)
    hits = np.argwhere(coords @ forms.T == 0)
    return [Incidence(int(i), int(j)) for i, j in hits]


def _sweep(points: Sequence[AnyPoint], surfaces: Sequence[AnySurface],
           indices: Sequence[int]) -> list[Incidence]:
    return [Incidence(i, j) for i in indices for j, s in enumerate(surfaces)
            if _incident(points[i], s)]


def _incident(point: AnyPoint, surface: AnySurface) -> bool:
    if isinstance(surface, PlaneCircle):
        return surface.contains(point)  # type: ignore[arg-type]
    return incident(point, surface)


def count_bruteforce(points: Sequence[AnyPoint], surfaces: Sequence[AnySurface],
                     k: int = 2, c0: int = 2) -> IncidenceSet:
    """Every (point, surface) pair tested exactly, listed in point-major order."""
    points, surfaces = list(points), list(surfaces)
    if not points or not surfaces:
        return IncidenceSet(points, surfaces, [], k, c0)
    if _integral_lines(points, surfaces):
        pairs = _line_sweep(points, surfaces)  # type: ignore[arg-type]
    elif settings.workers > 1 and len(points) * len(surfaces) > 20_000:
        size = -(-len(points) // settings.workers)
        chunks = [range(i, min(i + size, len(points))) for i in range(0, len(points), size)]
        with Pool(settings.workers) as pool:
            parts = pool.map(functools.partial(_sweep, points, surfaces), chunks)
        pairs = [pair for part in parts for pair in part]
    else:
        pairs = _sweep(points, surfaces, range(len(points)))
    logger.debug(f"Brute force: m={len(points)}, n={len(surfaces)}, I={len(pairs)}")
    return IncidenceSet(points, surfaces, pairs, k, c0)


# Admissibility


def _smooth(point: AnyPoint, surface: AnySurface) -> bool:
    if isinstance(surface, (PlaneLine, PlaneCircle)):
        return True
    try:
        tangent_flat(surface, point)
    except SingularPoint:
        return False
    return True


def _transversal(a: AnySurface, b: AnySurface, point: AnyPoint) -> bool:
    if isinstance(a, PlaneCircle) and isinstance(b, PlaneCircle):
        # tangent iff the radii to the point are parallel
        p = PlanePoint(*point[:2])
        return ((p.x - a.center.x) * (p.y - b.center.y)
                - (p.y - a.center.y) * (p.x - b.center.x)) != 0
    return transversal_at(a, b, point)  # type: ignore[arg-type]


def _shared_tuples(by_surface: dict[int, list[int]], k: int) -> Counter[tuple[int, ...]]:
    common: Counter[tuple[int, ...]] = Counter()
    for on in by_surface.values():
        common.update(itertools.combinations(sorted(on), k))
    return common


def filter_admissible(inc: IncidenceSet, k: int | None = None) -> IncidenceSet:
    """Drop pairs at singular points or non-transversal meetings; report k-tuples on > C0 surfaces."""
    k = inc.k if k is None else k
    smooth: list[Incidence] = []
    dropped: list[Incidence] = []
    for pair in inc.pairs:
        if _smooth(inc.points[pair.point], inc.surfaces[pair.surface]):
            smooth.append(pair)
        else:
            dropped.append(pair._replace(smooth=False))

    at_point: dict[int, list[Incidence]] = defaultdict(list)
    for pair in smooth:
        at_point[pair.point].append(pair)
    kept: list[Incidence] = []
    for point, pairs in sorted(at_point.items()):
        bad: set[int] = set()
        for first, second in itertools.combinations(pairs, 2):
            if not _transversal(inc.surfaces[first.surface], inc.surfaces[second.surface],
                                inc.points[point]):
                bad.update((first.surface, second.surface))
        for pair in pairs:
            if pair.surface in bad:
                dropped.append(pair)
            else:
                kept.append(pair._replace(smooth=True, transversal=True))

    by_surface: dict[int, list[int]] = defaultdict(list)
    for pair in kept:
        by_surface[pair.surface].append(pair.point)
    violations = sorted(t for t, count in _shared_tuples(by_surface, k).items() if count > inc.c0)
    if violations:
        logger.warning(f"{len(violations)} {k}-tuples lie on more than C0={inc.c0} surfaces")
    if dropped:
        logger.info(f"Admissibility filter dropped {len(dropped)} pairs")
    return IncidenceSet(inc.points, inc.surfaces, kept, k, inc.c0, not violations,
                        violations, inc.dropped + dropped)


# Bounds


@dataclass
class KstReport:
    edges: int
    a: int
    b: int
    s: int
    t: int
    bound_points: str
    bound_surfaces: str
    ratio_points: float
    ratio_surfaces: float
    passed: bool


def kst_bound_audit(inc: IncidenceSet, s: int, t: int) -> KstReport:
    """Edges against b a^(1-1/s) + a and a b^(1-1/t) + b for a K_{s,t}-free incidence graph.

    ``s`` counts points and ``t`` surfaces: no s points may share t common surfaces.
    """
    worst = _shared_tuples(inc.by_surface(), s).most_common(1)
    if worst and worst[0][1] >= t:
        raise ForbiddenSubgraphPresent(
            f"Points {worst[0][0]} lie on {worst[0][1]} common surfaces (K_{{{s},{t}}})")
    a, b, edges = inc.m, inc.n, inc.size
    with ratios.precision():
        first = b * ratios.power(a, 1 - Fraction(1, s)) + a
        second = a * ratios.power(b, 1 - Fraction(1, t)) + b
        r1, r2 = ratios.quotient(edges, first), ratios.quotient(edges, second)
        report = KstReport(edges, a, b, s, t, ratios.display(first), ratios.display(second),
                           float(r1), float(r2),
                           max(float(r1), float(r2)) <= settings.kst_ratio_ceiling)
    return report


@dataclass
class StRatio:
    incidences: int
    m: int
    n: int
    ratio: float
    ratio_text: str
    rounding: str
    passed: bool


def st_ratio(inc: IncidenceSet) -> StRatio:
    """I / (m^(2/3) n^(2/3) + m + n) in high precision; 0 when m = n = 0."""
    return _st_ratio(inc.size, inc.m, inc.n)


def _st_ratio(incidences: int, m: int, n: int) -> StRatio:
    with ratios.precision():
        bound = ratios.power(m * n, Fraction(2, 3)) + m + n
        value = ratios.quotient(incidences, bound)
        return StRatio(incidences, m, n, float(value), ratios.display(value),
                       f"round-half-even at {settings.ratio_digits} digits",
                       float(value) <= settings.st_ratio_ceiling)


@dataclass
class UnitDistanceReport:
    points: int
    distances: int
    incidences: int
    triple_violations: int
    ratio: StRatio


def unit_distance_audit(points: Sequence[PointC2]) -> UnitDistanceReport:
    """Pairs with (z1 - w1)^2 + (z2 - w2)^2 = 1, as incidences with the unit circles at the points."""
    pts = list(dict.fromkeys(points))
    circles = [ComplexUnitCircle.centred_at(p) for p in pts]
    inc = count_bruteforce(pts, circles, k=3, c0=settings.c0_circles)
    violations = sum(1 for count in _shared_tuples(inc.by_surface(), 3).values()
                     if count > settings.c0_circles)
    return UnitDistanceReport(len(pts), inc.size // 2, inc.size, violations,
                              _st_ratio(inc.size, len(pts), len(pts)))


@dataclass
class GoodFamilyReport:
    surfaces: int
    c0: int
    violations: list[tuple[int, int]]
    passed: bool


def good_family_audit(surfaces: Sequence[Surface], c0: int) -> GoodFamilyReport:
    violations = good_family_violations(surfaces, c0)
    return GoodFamilyReport(len(surfaces), c0, violations, not violations)
