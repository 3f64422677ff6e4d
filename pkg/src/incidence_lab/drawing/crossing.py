"""Exact planar drawings built from incidence configurations, and the audits on them.

Carriers are plane lines, rational polylines (:class:`Chain`) and circles with
rational centre and radius. Edges are straight segments, sub-chains or
counterclockwise circular arcs between consecutive incident points. Two edges
meet in rational points (segment against segment) or in roots of a rational
quadratic along a line; the latter are kept as real algebraic numbers and every
membership test on them is an exact sign evaluation.
"""

from __future__ import annotations

import functools
import itertools
import logging
from collections import Counter, defaultdict
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from multiprocessing import Pool
from typing import Any, Literal, Union

import mpmath
import numpy as np

from incidence_lab import ratios
from incidence_lab.algebra.number_field import RealAlgebraic, real_roots, upoly
from incidence_lab.algebra.polynomial import sign
from incidence_lab.cad.cells import Box, LineCrossing
from incidence_lab.config import settings
from incidence_lab.errors import LabError
from incidence_lab.geometry.kernel import PlaneLine, PlanePoint

logger = logging.getLogger(__name__)


class DrawingError(LabError):
    """Base exception for drawing construction and audits."""


class MalformedDrawing(DrawingError):
    """Raised when a vertex lies in the relative interior of an edge."""


class NonSimpleCurve(DrawingError):
    """Raised when a curve meets itself."""


class DegreesOfFreedomViolated(DrawingError):
    """Raised when some k points lie on more than C0 common curves."""


def orientation(p: PlanePoint, q: PlanePoint, r: PlanePoint) -> int:
    """Sign of (q - p) x (r - p)."""
    return sign((q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x))


def _cross(u: tuple[Fraction, Fraction], v: tuple[Fraction, Fraction]) -> Fraction:
    return u[0] * v[1] - u[1] * v[0]


def _minus(p: PlanePoint, q: PlanePoint) -> tuple[Fraction, Fraction]:
    return (p.x - q.x, p.y - q.y)


# Carriers and pieces


@dataclass(frozen=True)
class PlaneCircle:
    center: PlanePoint
    radius: Fraction

    @classmethod
    def of(cls, cx: Fraction | int, cy: Fraction | int, radius: Fraction | int) -> PlaneCircle:
        if Fraction(radius) <= 0:
            raise DrawingError("A circle needs a positive radius")
        return cls(PlanePoint(Fraction(cx), Fraction(cy)), Fraction(radius))

    def contains(self, p: PlanePoint) -> bool:
        dx, dy = _minus(p, self.center)
        return dx * dx + dy * dy == self.radius * self.radius


@dataclass(frozen=True)
class Segment:
    start: PlanePoint
    end: PlanePoint

    def contains(self, p: PlanePoint) -> bool:
        if orientation(self.start, self.end, p):
            return False
        return (min(self.start.x, self.end.x) <= p.x <= max(self.start.x, self.end.x)
                and min(self.start.y, self.end.y) <= p.y <= max(self.start.y, self.end.y))

    def parameter(self, p: PlanePoint) -> Fraction:
        dx, dy = _minus(self.end, self.start)
        if abs(dx) >= abs(dy):
            return (p.x - self.start.x) / dx
        return (p.y - self.start.y) / dy


@dataclass(frozen=True)
class Arc:
    """Counterclockwise arc of ``circle`` from ``start`` to ``end``."""

    circle: PlaneCircle
    start: PlanePoint
    end: PlanePoint

    def contains(self, p: PlanePoint) -> bool:
        if not self.circle.contains(p):
            return False
        if p in (self.start, self.end):
            return True
        if self.start == self.end:
            return True
        # the ccw arc is the part of the circle right of the chord start -> end
        return orientation(self.start, self.end, p) < 0


Piece = Union[Segment, Arc, PlaneCircle]


@dataclass(frozen=True)
class Chain:
    """Rational polyline; ``closed`` joins the last point back to the first."""

    points: tuple[PlanePoint, ...]
    closed: bool = False

    def __post_init__(self) -> None:
        needed = 3 if self.closed else 2
        if len(self.points) < needed:
            raise NonSimpleCurve(f"A chain needs at least {needed} points")
        if any(p == q for p, q in zip(self.points, self.points[1:])):
            raise NonSimpleCurve("Consecutive chain points coincide")

    def segments(self) -> list[Segment]:
        pts = self.points
        pieces = [Segment(p, q) for p, q in zip(pts, pts[1:])]
        if self.closed:
            pieces.append(Segment(pts[-1], pts[0]))
        return pieces

    def endpoints(self) -> tuple[PlanePoint, ...]:
        return () if self.closed else (self.points[0], self.points[-1])

    def contains(self, p: PlanePoint) -> bool:
        return any(s.contains(p) for s in self.segments())


Carrier = Union[PlaneLine, PlaneCircle, Chain]
Curve = Union[Chain, PlaneCircle]


def _bbox(piece: Piece) -> tuple[float, float, float, float]:
    if isinstance(piece, Segment):
        xs = (float(piece.start.x), float(piece.end.x))
        ys = (float(piece.start.y), float(piece.end.y))
        return min(xs), max(xs), min(ys), max(ys)
    circle = piece.circle if isinstance(piece, Arc) else piece
    cx, cy, r = float(circle.center.x), float(circle.center.y), float(circle.radius)
    return cx - r, cx + r, cy - r, cy + r


# Intersections


@dataclass
class _Hit:
    """The point base + alpha * direction for an irrational real algebraic alpha."""

    base: PlanePoint
    direction: tuple[Fraction, Fraction]
    alpha: RealAlgebraic

    def rational(self) -> PlanePoint | None:
        if not self.alpha.is_rational:
            return None
        t = self.alpha.value
        return PlanePoint(self.base.x + t * self.direction[0], self.base.y + t * self.direction[1])

    def orientation(self, p: PlanePoint, q: PlanePoint) -> int:
        ex, ey = _minus(q, p)
        dx, dy = self.direction
        return self.alpha.sign_of([ex * dy - ey * dx,
                                   ex * (self.base.y - p.y) - ey * (self.base.x - p.x)])


Hit = Union[PlanePoint, _Hit]


def _circle_of(piece: Piece) -> PlaneCircle | None:
    if isinstance(piece, Arc):
        return piece.circle
    if isinstance(piece, PlaneCircle):
        return piece
    return None


def _on_piece(piece: Piece, hit: Hit) -> bool:
    """Membership of a point already known to lie on the piece's circle."""
    if isinstance(piece, PlaneCircle):
        return True
    if isinstance(hit, PlanePoint):
        return piece.contains(hit)
    return hit.orientation(piece.start, piece.end) < 0


def _line_circle(base: PlanePoint, direction: tuple[Fraction, Fraction], circle: PlaneCircle,
                 bounded: bool) -> list[Hit]:
    dx, dy = direction
    wx, wy = _minus(base, circle.center)
    quadratic = upoly([dx * dx + dy * dy, 2 * (dx * wx + dy * wy),
                       wx * wx + wy * wy - circle.radius * circle.radius])
    hits: list[Hit] = []
    for root in real_roots(quadratic):
        if bounded and (root.compare(Fraction(0)) < 0 or root.compare(Fraction(1)) > 0):
            continue
        hit = _Hit(base, direction, root)
        hits.append(hit.rational() or hit)
    return hits


def _circle_circle(a: PlaneCircle, b: PlaneCircle) -> list[Hit]:
    if a.center == b.center:
        return []
    nx_, ny_ = 2 * (b.center.x - a.center.x), 2 * (b.center.y - a.center.y)
    k = (a.radius ** 2 - b.radius ** 2 + b.center.x ** 2 + b.center.y ** 2
         - a.center.x ** 2 - a.center.y ** 2)
    norm = nx_ * nx_ + ny_ * ny_
    base = PlanePoint(nx_ * k / norm, ny_ * k / norm)
    return _line_circle(base, (-ny_, nx_), a, bounded=False)


def _segment_segment(s: Segment, t: Segment) -> list[Hit]:
    d = _minus(s.end, s.start)
    e = _minus(t.end, t.start)
    w = _minus(t.start, s.start)
    denom = _cross(d, e)
    if denom == 0:
        if _cross(w, d):
            return []
        touching = {p for p in (s.start, s.end) if t.contains(p)}
        touching |= {p for p in (t.start, t.end) if s.contains(p)}
        # a shared stretch is an overlap, not a crossing
        return list(touching) if len(touching) == 1 else []
    u = _cross(w, e) / denom
    v = _cross(w, d) / denom
    if 0 <= u <= 1 and 0 <= v <= 1:
        return [PlanePoint(s.start.x + u * d[0], s.start.y + u * d[1])]
    return []


def piece_intersections(a: Piece, b: Piece) -> list[Hit]:
    """Common points of two closed pieces; overlapping pieces give no points."""
    ca, cb = _circle_of(a), _circle_of(b)
    if ca is None and cb is None:
        return _segment_segment(a, b)  # type: ignore[arg-type]
    if ca is None:
        assert isinstance(a, Segment) and cb is not None
        return [h for h in _line_circle(a.start, _minus(a.end, a.start), cb, bounded=True)
                if _on_piece(b, h)]
    if cb is None:
        return piece_intersections(b, a)
    if ca == cb:
        return []
    return [h for h in _circle_circle(ca, cb) if _on_piece(a, h) and _on_piece(b, h)]


def _common_points(first: Sequence[Piece], second: Sequence[Piece]) -> Iterator[Hit]:
    seen: set[PlanePoint] = set()
    for a in first:
        for b in second:
            for hit in piece_intersections(a, b):
                if isinstance(hit, PlanePoint):
                    if hit in seen:
                        continue
                    seen.add(hit)
                yield hit


# Drawings


@dataclass(frozen=True)
class Edge:
    a: int
    b: int
    carrier: int
    pieces: tuple[Piece, ...]

    @property
    def ends(self) -> frozenset[PlanePoint]:
        first, last = self.pieces[0], self.pieces[-1]
        return frozenset((first.start, last.end))  # type: ignore[union-attr]

    def bbox(self) -> tuple[float, float, float, float]:
        boxes = [_bbox(p) for p in self.pieces]
        return (min(b[0] for b in boxes), max(b[1] for b in boxes),
                min(b[2] for b in boxes), max(b[3] for b in boxes))


def _piece_dict(piece: Piece) -> dict[str, Any]:
    if isinstance(piece, Segment):
        return {"kind": "segment", "start": _point_text(piece.start), "end": _point_text(piece.end)}
    circle = piece.circle if isinstance(piece, Arc) else piece
    data: dict[str, Any] = {"kind": "arc" if isinstance(piece, Arc) else "circle",
                            "center": _point_text(circle.center), "radius": str(circle.radius)}
    if isinstance(piece, Arc):
        data.update(start=_point_text(piece.start), end=_point_text(piece.end))
    return data


def _point_text(p: PlanePoint) -> list[str]:
    return [str(p.x), str(p.y)]


@dataclass(frozen=True)
class Drawing:
    vertices: tuple[PlanePoint, ...]
    edges: tuple[Edge, ...]
    multiplicity: int

    def parallel_multiplicity(self) -> int:
        counts = Counter(frozenset((e.a, e.b)) for e in self.edges)
        return max(counts.values(), default=0)

    def validate(self) -> None:
        """Check that no vertex sits inside an edge and that M bounds the parallel edges."""
        if self.parallel_multiplicity() > self.multiplicity:
            raise MalformedDrawing(
                f"Parallel multiplicity {self.parallel_multiplicity()} exceeds M={self.multiplicity}"
            )
        if not self.vertices or not self.edges:
            return
        xs = np.array([float(v.x) for v in self.vertices])
        ys = np.array([float(v.y) for v in self.vertices])
        for edge in self.edges:
            x0, x1, y0, y1 = _padded(edge.bbox())
            near = np.nonzero((xs >= x0) & (xs <= x1) & (ys >= y0) & (ys <= y1))[0]
            for i in near:
                v = self.vertices[int(i)]
                if v in edge.ends:
                    continue
                if any(piece.contains(v) for piece in edge.pieces):
                    raise MalformedDrawing(f"Vertex {int(i)} lies inside edge ({edge.a}, {edge.b})")

    def to_dict(self) -> dict[str, Any]:
        return {
            "vertices": [_point_text(v) for v in self.vertices],
            "edges": [{"a": e.a, "b": e.b, "carrier": e.carrier,
                       "pieces": [_piece_dict(p) for p in e.pieces]} for e in self.edges],
            "multiplicity": self.multiplicity,
        }


def _padded(box: tuple[float, float, float, float]) -> tuple[float, float, float, float]:
    x0, x1, y0, y1 = box
    eps = 1e-9 * max(1.0, abs(x0), abs(x1), abs(y0), abs(y1))
    return x0 - eps, x1 + eps, y0 - eps, y1 + eps


# Carrier geometry for the Szekely construction


def _angular_order(center: PlanePoint, p: PlanePoint, q: PlanePoint) -> int:
    u, v = _minus(p, center), _minus(q, center)
    hu = 0 if u[1] > 0 or (u[1] == 0 and u[0] > 0) else 1
    hv = 0 if v[1] > 0 or (v[1] == 0 and v[0] > 0) else 1
    if hu != hv:
        return hu - hv
    return -sign(_cross(u, v))


def _chain_position(chain: Chain, p: PlanePoint) -> tuple[int, Fraction]:
    for i, segment in enumerate(chain.segments()):
        if segment.contains(p):
            return i, segment.parameter(p)
    raise DrawingError(f"{p} is not on the chain")


def _incident_sorted(carrier: Carrier, points: Sequence[PlanePoint],
                     candidates: Sequence[int]) -> list[int]:
    if isinstance(carrier, PlaneLine):
        on = [i for i in candidates
              if carrier.a * points[i].x + carrier.b * points[i].y + carrier.c == 0]
        dx, dy = carrier.direction()
        return sorted(on, key=lambda i: points[i].x * dx + points[i].y * dy)
    if isinstance(carrier, PlaneCircle):
        on = [i for i in candidates if carrier.contains(points[i])]
        order = functools.cmp_to_key(
            lambda i, j: _angular_order(carrier.center, points[i], points[j]))
        return sorted(on, key=order)
    on = [i for i in candidates if carrier.contains(points[i])]
    return sorted(on, key=lambda i: _chain_position(carrier, points[i]))


def _is_closed(carrier: Carrier) -> bool:
    return isinstance(carrier, PlaneCircle) or (isinstance(carrier, Chain) and carrier.closed)


def _sub_chain(chain: Chain, p: PlanePoint, q: PlanePoint, wrap: bool) -> tuple[Segment, ...]:
    i, _ = _chain_position(chain, p)
    j, _ = _chain_position(chain, q)
    n = len(chain.points)
    walk = [p]
    k = i
    if wrap:
        # q .. end of chain .. start .. p, always at least one step round
        walk = [q]
        k = j
        while True:
            k = (k + 1) % n
            walk.append(chain.points[k])
            if k == i:
                break
        walk.append(p)
    else:
        while k != j:
            k += 1
            walk.append(chain.points[k])
        walk.append(q)
    vertices = [walk[0]]
    for v in walk[1:]:
        if v != vertices[-1]:
            vertices.append(v)
    return tuple(Segment(a, b) for a, b in zip(vertices, vertices[1:]))


def _edge_pieces(carrier: Carrier, p: PlanePoint, q: PlanePoint,
                 wrap: bool = False) -> tuple[Piece, ...]:
    if isinstance(carrier, PlaneLine):
        return (Segment(p, q),)
    if isinstance(carrier, PlaneCircle):
        return (Arc(carrier, p, q),)
    return _sub_chain(carrier, p, q, wrap)


def _carrier_edges(carrier: Carrier, index: int, points: Sequence[PlanePoint],
                   on: Sequence[int]) -> list[Edge]:
    edges = [Edge(a, b, index, _edge_pieces(carrier, points[a], points[b]))
             for a, b in zip(on, on[1:])]
    if _is_closed(carrier) and len(on) >= 3:
        last, first = on[-1], on[0]
        edges.append(Edge(last, first, index,
                          _edge_pieces(carrier, points[last], points[first], wrap=True)))
    return edges


def szekely_drawing(points: Sequence[PlanePoint], carriers: Sequence[Carrier],
                    multiplicity: int | None = None) -> Drawing:
    """Vertices at the points; edges join consecutive incident points on each carrier."""
    pts = tuple(points)
    candidates = range(len(pts))
    edges: list[Edge] = []
    for index, carrier in enumerate(carriers):
        on = _incident_sorted(carrier, pts, candidates)
        edges.extend(_carrier_edges(carrier, index, pts, on))
    observed = max(Counter(frozenset((e.a, e.b)) for e in edges).values(), default=1)
    drawing = Drawing(pts, tuple(edges), max(observed, multiplicity or 1))
    drawing.validate()
    return drawing


def build_szekely_drawing(points: Sequence[PlanePoint], lines: Sequence[PlaneLine]) -> Drawing:
    return szekely_drawing(points, lines, multiplicity=1)


def planar_circle_drawing(points: Sequence[PlanePoint],
                          circles: Sequence[PlaneCircle]) -> Drawing:
    return szekely_drawing(points, circles)


# Crossing counts


def _pair_crossings(first: Edge, second: Edge) -> int:
    count = 0
    ends_a, ends_b = first.ends, second.ends
    for hit in _common_points(first.pieces, second.pieces):
        if isinstance(hit, _Hit):
            count += 1
            continue
        at_a, at_b = hit in ends_a, hit in ends_b
        if at_a and at_b:
            continue
        if at_a or at_b:
            raise MalformedDrawing(f"Vertex {hit} lies inside an edge")
        count += 1
    return count


def _candidate_pairs(edges: Sequence[Edge]) -> list[tuple[int, int]]:
    if len(edges) < 2:
        return []
    boxes = np.array([_padded(e.bbox()) for e in edges])
    carriers = np.array([e.carrier for e in edges])
    pairs = []
    for i in range(len(edges) - 1):
        rest = boxes[i + 1:]
        mask = ((boxes[i, 0] <= rest[:, 1]) & (rest[:, 0] <= boxes[i, 1])
                & (boxes[i, 2] <= rest[:, 3]) & (rest[:, 2] <= boxes[i, 3])
                & (carriers[i + 1:] != carriers[i]))
        pairs.extend((i, i + 1 + int(j)) for j in np.nonzero(mask)[0])
    return pairs


def _count_chunk(edges: Sequence[Edge], chunk: Sequence[tuple[int, int]]) -> int:
    return sum(_pair_crossings(edges[i], edges[j]) for i, j in chunk)


def count_crossings(drawing: Drawing) -> int:
    """Interior intersection points summed over edge pairs with distinct carriers."""
    pairs = _candidate_pairs(drawing.edges)
    workers = settings.workers
    if workers > 1 and len(pairs) > 1000:
        size = -(-len(pairs) // workers)
        chunks = [pairs[i:i + size] for i in range(0, len(pairs), size)]
        with Pool(workers) as pool:
            total = sum(pool.map(functools.partial(_count_chunk, drawing.edges), chunks))
    else:
        total = _count_chunk(drawing.edges, pairs)
    logger.debug(f"{len(pairs)} candidate edge pairs, {total} crossings")
    return total


@dataclass
class CrossingReport:
    edges: int
    vertices: int
    multiplicity: int
    crossings: int
    branch: Literal["sparse", "inequality"]
    bound: Fraction
    passed: bool


def crossing_inequality_audit(drawing: Drawing) -> CrossingReport:
    """Either E < 5V, or C >= E^3 / (100 M V^2)."""
    e, v, m = len(drawing.edges), len(drawing.vertices), drawing.multiplicity
    crossings = count_crossings(drawing)
    if v == 0 or e < 5 * v:
        return CrossingReport(e, v, m, crossings, "sparse", Fraction(0), True)
    bound = Fraction(e ** 3, 100 * m * v * v)
    return CrossingReport(e, v, m, crossings, "inequality", bound, crossings >= bound)


# Curves on a domain


def check_simple(curve: Curve) -> None:
    if isinstance(curve, PlaneCircle):
        return
    segments = curve.segments()
    n = len(segments)
    for i, j in itertools.combinations(range(n), 2):
        adjacent = j == i + 1 or (curve.closed and i == 0 and j == n - 1)
        hits = piece_intersections(segments[i], segments[j])
        if not adjacent and hits:
            raise NonSimpleCurve(f"Chain segments {i} and {j} meet")
        if adjacent and len(hits) != 1:
            raise NonSimpleCurve(f"Chain segments {i} and {j} overlap")


def _curve_pieces(curve: Curve) -> list[Piece]:
    return [curve] if isinstance(curve, PlaneCircle) else list(curve.segments())


def _curve_ends(curve: Curve) -> tuple[PlanePoint, ...]:
    return () if isinstance(curve, PlaneCircle) else curve.endpoints()


def curve_crossings(curves: Sequence[Curve]) -> int:
    """Common points of relative interiors, summed over unordered curve pairs."""
    pieces = [_curve_pieces(c) for c in curves]
    ends = [set(_curve_ends(c)) for c in curves]
    total = 0
    for i, j in itertools.combinations(range(len(curves)), 2):
        for hit in _common_points(pieces[i], pieces[j]):
            if isinstance(hit, PlanePoint) and (hit in ends[i] or hit in ends[j]):
                continue
            total += 1
    return total


def clip_line(line: PlaneLine, box: Box,
              lower: Fraction | None = None, upper: Fraction | None = None) -> Chain | None:
    """The part of the line inside the box (optionally within a parameter range) as a chain."""
    base = line.base_point()
    dx, dy = line.direction()
    lo, hi = lower, upper
    for start, step, low, high in ((base.x, dx, box.xmin, box.xmax),
                                   (base.y, dy, box.ymin, box.ymax)):
        if step == 0:
            if not low <= start <= high:
                return None
            continue
        t0, t1 = sorted(((low - start) / step, (high - start) / step))
        lo = t0 if lo is None else max(lo, t0)
        hi = t1 if hi is None else min(hi, t1)
    if lo is None or hi is None or lo >= hi:
        return None
    return Chain((PlanePoint(base.x + lo * dx, base.y + lo * dy),
                  PlanePoint(base.x + hi * dx, base.y + hi * dy)))


def chains_in_component(line: PlaneLine, crossing: LineCrossing, component: int,
                        box: Box) -> list[Chain]:
    """Pieces of a line lying in one complement component, shrunk to rational chains."""
    chains = []
    for segment in crossing.segments:
        if segment.component != component:
            continue
        chain = clip_line(line, box, segment.lower, segment.upper)
        if chain is not None:
            chains.append(chain)
    return chains


def _incidence_bound(points: int, crossings: int, curves: int, k: int,
                     log_term: bool) -> mpmath.mpf:
    a = Fraction(k, 2 * k - 1)
    b = Fraction(k - 1, 2 * k - 1)
    bound = ratios.power(points, a) * ratios.power(crossings, b) + points
    if log_term:
        bound += curves * (mpmath.log(points) if points > 1 else 0)
    else:
        bound += curves
    return bound


@dataclass
class DomainReport:
    curves: int
    points: int
    incidences: int
    boundary_incidences: int
    pruned_curves: int
    pruned_incidences: int
    edges: int
    drawing_crossings: int
    crossings: int
    ratio: float
    ratio_text: str
    passed: bool


def st_on_domain_audit(curves: Sequence[Curve], points: Sequence[PlanePoint],
                       k: int = 2) -> DomainReport:
    """Closure incidences against |B|^(k/(2k-1)) C(U)^((k-1)/(2k-1)) + |B| + |A|.

    Endpoint incidences and curves with fewer than two interior points are left
    out of the drawing and counted on the side.
    """
    for curve in curves:
        check_simple(curve)
    pts = list(dict.fromkeys(points))
    incidences = boundary = pruned_curves = pruned = 0
    kept: list[Curve] = []
    for curve in curves:
        ends = set(_curve_ends(curve))
        on = [p for p in pts if curve.contains(p)]
        interior = [p for p in on if p not in ends]
        incidences += len(on)
        boundary += len(on) - len(interior)
        if len(interior) < 2:
            pruned_curves += 1
            pruned += len(interior)
        else:
            kept.append(curve)
    edges: list[Edge] = []
    for index, curve in enumerate(kept):
        ends = set(_curve_ends(curve))
        on = [i for i in _incident_sorted(curve, pts, range(len(pts))) if pts[i] not in ends]
        edges.extend(_carrier_edges(curve, index, pts, on))
    observed = max(Counter(frozenset((e.a, e.b)) for e in edges).values(), default=1)
    drawing = Drawing(tuple(pts), tuple(edges), observed)
    drawing_crossings = count_crossings(drawing)
    crossings = curve_crossings(curves)
    with ratios.precision():
        bound = _incidence_bound(len(pts), crossings, len(curves), k, log_term=False)
        value = ratios.quotient(incidences, bound)
        report = DomainReport(len(curves), len(pts), incidences, boundary, pruned_curves, pruned,
                              len(drawing.edges), drawing_crossings, crossings, float(value),
                              ratios.display(value), float(value) <= settings.st_ratio_ceiling)
    logger.info(f"Domain audit: I={incidences}, C(U)={crossings}, ratio={report.ratio:.4f}")
    return report


# Dyadic degree classes


@dataclass
class DyadicClass:
    level: int
    size: int
    incidences: int
    degree: Fraction
    size_bound_holds: bool
    split: Literal["J1", "J2", "J3"]
    edges: int = 0
    edge_window_holds: bool | None = None
    retained: dict[int, int] = field(default_factory=dict)
    simple_edges: int = 0
    simple_vertices: int = 0
    multiplicity: int = 0
    multiplicity_bound: float = 0.0
    crossings: int = 0


@dataclass
class DyadicReport:
    curves: int
    points: int
    k: int
    incidences: int
    low_degree_points: int
    low_degree_incidences: int
    classes: list[DyadicClass]
    partition_holds: bool
    crossings: int
    trivial_split: bool
    ratio: float
    ratio_text: str
    passed: bool


def _check_degrees_of_freedom(curves: Sequence[Curve], points: Sequence[PlanePoint],
                              incident: Sequence[Sequence[int]], k: int, c0: int) -> None:
    """Any k points interior to a curve lie on at most c0 curves; chain ends do not count."""
    common: Counter[tuple[int, ...]] = Counter()
    for curve, on in zip(curves, incident):
        ends = set(_curve_ends(curve))
        interior = sorted(i for i in on if points[i] not in ends)
        common.update(itertools.combinations(interior, k))
    worst = max(common.values(), default=0)
    if worst > c0:
        raise DegreesOfFreedomViolated(f"{worst} curves share {k} common points (C0={c0})")


def _level(degree: int, mean: Fraction) -> int | None:
    """None for B*, else the l >= 0 with 2^(l-1) mean < degree <= 2^l mean."""
    if degree <= mean / 2:
        return None
    level = 0
    while degree > mean * 2 ** level:
        level += 1
    return level


def _exceeds(multiplicity: int, constant: int, degree: Fraction, k: int) -> bool:
    """multiplicity > constant * degree^(1 - 1/(k-1)), exactly."""
    if k == 2:
        return multiplicity > constant
    return multiplicity ** (k - 1) > constant ** (k - 1) * degree ** (k - 2)


def _dense(edges: int, vertices: int, constant: int, degree: Fraction, k: int) -> bool:
    """edges >= 5 * vertices * constant * degree^(1 - 1/(k-1)), exactly."""
    if vertices == 0:
        return False
    if k == 2:
        return edges >= 5 * vertices * constant
    return Fraction(edges, 5 * vertices * constant) ** (k - 1) >= degree ** (k - 2)


def _class_graphs(entry: DyadicClass, members: set[int], order: Sequence[list[int]],
                  curves: Sequence[Curve], pts: Sequence[PlanePoint], k: int) -> None:
    windows: list[tuple[int, int, int, int, int]] = []
    for c, on in enumerate(order):
        local = [i for i in on if i in members]
        for x, y in itertools.combinations(range(len(local)), 2):
            if y - x <= k - 1:
                windows.append((c, x, y, local[x], local[y]))
    entry.edges = len(windows)
    entry.edge_window_holds = entry.incidences - 4 * k <= entry.edges <= (k - 1) * entry.incidences
    pair_count = Counter(frozenset((a, b)) for _, _, _, a, b in windows)
    for constant in settings.crossing_constants:
        entry.retained[constant] = sum(
            1 for *_, a, b in windows
            if not _exceeds(pair_count[frozenset((a, b))], constant, entry.degree, k))
    constant = settings.crossing_constants[0]
    simple = [(c, a, b) for c, x, y, a, b in windows
              if y == x + 1 and not _exceeds(pair_count[frozenset((a, b))], constant,
                                             entry.degree, k)]
    vertices = sorted(members)
    index = {v: n for n, v in enumerate(vertices)}
    edges = tuple(Edge(index[a], index[b], c, _edge_pieces(curves[c], pts[a], pts[b]))
                  for c, a, b in simple)
    observed = max(Counter(frozenset((e.a, e.b)) for e in edges).values(), default=1)
    drawing = Drawing(tuple(pts[v] for v in vertices), edges, observed)
    entry.simple_edges = len(edges)
    entry.simple_vertices = len(vertices)
    entry.multiplicity = observed
    with ratios.precision():
        entry.multiplicity_bound = float(
            constant * ratios.power(entry.degree, Fraction(k - 2, k - 1)))
    entry.crossings = count_crossings(drawing)
    if _dense(entry.simple_edges, entry.simple_vertices, constant, entry.degree, k):
        entry.split = "J3"


def pach_sharir_audit(curves: Sequence[Curve], points: Sequence[PlanePoint], k: int,
                      c0: int | None = None) -> DyadicReport:
    """Dyadic degree classes of the points and the incidence bound with a log|B| term."""
    if k < 2:
        raise DrawingError("k must be at least 2")
    c0 = settings.c0_circles if c0 is None else c0
    for curve in curves:
        check_simple(curve)
    pts = list(dict.fromkeys(points))
    candidates = range(len(pts))
    order = [_incident_sorted(curve, pts, candidates) for curve in curves]
    _check_degrees_of_freedom(curves, pts, order, k, c0)
    degree = Counter(i for on in order for i in on)
    incidences = sum(degree.values())
    n = len(pts)
    mean = Fraction(incidences, n) if n else Fraction(0)

    levels: dict[int, set[int]] = defaultdict(set)
    low: list[int] = []
    for i in range(n):
        level = _level(degree[i], mean) if incidences else None
        if level is None:
            low.append(i)
        else:
            levels[level].add(i)
    classes = []
    for level in sorted(levels):
        members = levels[level]
        size = len(members)
        entry = DyadicClass(
            level=level, size=size, incidences=sum(degree[i] for i in members),
            degree=mean * Fraction(2) ** (level - 1),
            size_bound_holds=size < Fraction(2) ** (1 - level) * n,
            split="J1" if size ** k * 2 ** level < len(curves) else "J2",
        )
        if entry.split == "J2":
            _class_graphs(entry, members, order, curves, pts, k)
        classes.append(entry)
        logger.debug(f"Class {level}: |B|={size}, I={entry.incidences}, split={entry.split}")

    low_incidences = sum(degree[i] for i in low)
    partition_holds = (len(low) + sum(c.size for c in classes) == n
                       and low_incidences + sum(c.incidences for c in classes) == incidences)
    crossings = curve_crossings(curves)
    with ratios.precision():
        bound = _incidence_bound(n, crossings, len(curves), k, log_term=True)
        value = ratios.quotient(incidences, bound)
        passed = (float(value) <= settings.pach_sharir_ceiling and partition_holds
                  and all(c.size_bound_holds for c in classes))
        report = DyadicReport(len(curves), n, k, incidences, len(low), low_incidences, classes,
                              partition_holds, crossings, not classes, float(value),
                              ratios.display(value), passed)
    logger.info(f"Dyadic audit: I={incidences}, classes={len(classes)}, ratio={report.ratio:.4f}")
    return report
