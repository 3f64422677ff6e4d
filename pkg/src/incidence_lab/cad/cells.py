"""Exact cylindrical decomposition of the plane for a bivariate polynomial.

The curve is first sheared, (x, y) -> (u, y) with x = u + lambda*y, so that its
leading coefficient in y is a nonzero constant. Critical values of u are the
real roots of the discriminants and pairwise resultants of the irreducible
factors. Over each open slab the branches are counted at a rational sample;
at each critical value alpha the fibre polynomial is examined in Q(alpha)[y],
which tells exactly which branches meet and which vertical gaps they leave
open. Adjacency and components follow from that bookkeeping, with no floating
point anywhere.

The sides of the working box join the arrangement as extra lines, except that
vertical sides become plain critical values when there is no shear. Regions
outside the box stay in the stacks but take no part in adjacency, components
or the curve count.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Final

import networkx as nx
import numpy as np
from sympy import Poly

from incidence_lab.algebra.number_field import (
    KPoly,
    NumberField,
    RealAlgebraic,
    horner,
    real_roots,
    upoly,
)
from incidence_lab.algebra.polynomial import (
    SignVector,
    SparsePoly,
    divides,
    evaluate,
    is_strict,
    resultant,
    sign,
    sign_vector,
    tracked_product,
)
from incidence_lab.config import settings
from incidence_lab.errors import LabError
from incidence_lab.geometry.kernel import PlaneLine, PlanePoint

logger = logging.getLogger(__name__)

ON_BOUNDARY: Final = "ON_BOUNDARY"

IsolatingInterval = RealAlgebraic


class CadError(LabError):
    """Base exception for cell decomposition errors."""


class DegenerateDirection(CadError):
    """Raised when no tried shear puts the curve in generic position."""


class OutOfBox(CadError):
    """Raised when a located point lies outside the working box."""


class DividesZ(CadError):
    """Raised when a sign-condition polynomial vanishes on the whole curve."""


class SharedComponent(CadError):
    """Raised when two polynomials share a curve component."""


@dataclass(frozen=True)
class Box:
    xmin: Fraction
    xmax: Fraction
    ymin: Fraction
    ymax: Fraction

    def contains(self, p: Sequence[Fraction]) -> bool:
        return self.xmin <= p[0] <= self.xmax and self.ymin <= p[1] <= self.ymax

    @classmethod
    def square(cls, radius: Fraction | int) -> Box:
        r = Fraction(radius)
        return cls(-r, r, -r, r)


def enclosing_box(points: Sequence[Sequence[Fraction]]) -> Box:
    """Box around ``points`` with a 2x margin (at least [-1, 1]^2)."""
    if not points:
        return Box.square(1)
    xs = [Fraction(p[0]) for p in points]
    ys = [Fraction(p[1]) for p in points]
    cx, cy = (min(xs) + max(xs)) / 2, (min(ys) + max(ys)) / 2
    half = max(max(xs) - min(xs), max(ys) - min(ys), Fraction(1))
    return Box(cx - half, cx + half, cy - half, cy + half)


def isolate_real_roots(p: SparsePoly) -> list[IsolatingInterval]:
    """Disjoint isolating intervals of the distinct real roots of a univariate polynomial."""
    if p.is_zero:
        raise CadError("Cannot isolate the roots of the zero polynomial")
    used = p.used_variables()
    if len(used) > 1:
        raise CadError(f"{p.text()} is not univariate")
    if not used:
        return []
    return real_roots(upoly(p.univariate(used[0])))


# Decomposition


@dataclass
class Region:
    id: int
    slab: int
    index: int
    sample: PlanePoint
    sign: int
    inside: bool = True


@dataclass
class Section:
    """Fibre over one critical value."""

    alpha: RealAlgebraic
    roots: int
    left_map: list[int]
    right_map: list[int]


@dataclass
class CellComplex:
    polynomial: SparsePoly
    box: Box
    shear: Fraction
    factors: list[SparsePoly]
    critical: list[RealAlgebraic]
    slab_samples: list[Fraction]
    branch_counts: list[int]
    sections: list[Section]
    regions: list[Region]
    adjacency: list[tuple[int, int]]
    component: dict[int, int] = field(default_factory=dict)
    curve_components: int = 0
    rows: list[list[Fraction]] = field(default_factory=list)

    @property
    def component_count(self) -> int:
        return len(set(self.component.values()))

    def region_id(self, slab: int, index: int) -> int:
        return self._offsets[slab] + index

    def __post_init__(self) -> None:
        self._offsets: list[int] = []
        total = 0
        for count in self.branch_counts:
            self._offsets.append(total)
            total += count + 1

    def component_of(self, p: Sequence[Fraction]) -> int:
        region = locate(self, p)
        if region == ON_BOUNDARY:
            raise CadError(f"{tuple(p)} lies on the curve")
        if int(region) not in self.component:
            raise OutOfBox(f"{tuple(p)} has no region inside the working box")
        return self.component[int(region)]


def shear(poly: SparsePoly, lam: Fraction) -> SparsePoly:
    """P(u + lam*y, y)."""
    u = SparsePoly.variable(0, 2)
    y = SparsePoly.variable(1, 2)
    return poly.compose([u + y * lam, y])


def _factors(poly: SparsePoly) -> list[SparsePoly]:
    """Distinct irreducible nonconstant factors over Q."""
    found: list[SparsePoly] = []
    for tracked in poly.expanded_factors():
        if tracked.is_constant:
            continue
        _, pieces = tracked.to_sympy().factor_list()
        for piece, _multiplicity in pieces:
            candidate = SparsePoly.from_sympy(piece, 2).normalized()
            if not candidate.is_constant and candidate not in found:
                found.append(candidate)
    return found


def _y_rows(poly: SparsePoly) -> list[list[Fraction]]:
    """Coefficients in y, highest power first, each as u-coefficients highest first."""
    degree = poly.degree_in(1)
    rows: list[dict[int, Fraction]] = [{} for _ in range(degree + 1)]
    for (eu, ey), c in poly.terms.items():
        rows[degree - ey][eu] = c
    result = []
    for row in rows:
        top = max(row, default=0)
        result.append([row.get(top - k, Fraction(0)) for k in range(top + 1)])
    return result


def _fibre(rows: Sequence[Sequence[Fraction]], u: Fraction) -> Poly:
    return upoly([horner(r, u) for r in rows])


def _stack_samples(roots: Sequence[RealAlgebraic]) -> list[Fraction]:
    """One rational strictly inside each gap of the sorted roots."""
    if not roots:
        return [Fraction(0)]
    samples = [roots[0].lower - 1]
    for below, above in zip(roots, roots[1:]):
        samples.append((below.upper + above.lower) / 2)
    samples.append(roots[-1].upper + 1)
    return samples


def _critical_values(
    factors: Sequence[SparsePoly], walls: Sequence[Fraction] = ()
) -> list[RealAlgebraic]:
    polys = []
    for i, f in enumerate(factors):
        if f.degree_in(1) > 1:
            polys.append(resultant(f, f.derivative(1), 1))
        for g in factors[i + 1:]:
            polys.append(resultant(f, g, 1))
    univariate = [upoly(p.univariate(0)) for p in polys if not p.is_constant]
    univariate += [upoly([1, -c]) for c in walls]
    return real_roots(*univariate)


def _branch_map(branches: int, below: int, block: int) -> list[int]:
    """Section root approached by each branch; ``block`` branches meet root ``below``."""
    mapping = []
    for i in range(branches):
        if i < below:
            mapping.append(i)
        elif i < below + block:
            mapping.append(below)
        else:
            mapping.append(i - block + 1)
    return mapping


def _section(
    alpha: RealAlgebraic, rows: Sequence[Sequence[Fraction]], left: int, right: int
) -> Section:
    field_ = NumberField(alpha)
    fibre = field_.from_rational_rows([upoly(r) for r in rows])
    common = field_.gcd(fibre, field_.derivative(fibre))
    if field_.degree(common) <= 0:
        if left != right:
            raise DegenerateDirection("Branch count changes across a regular fibre")
        identity = list(range(left))
        return Section(alpha, left, identity, identity)

    j = field_.degree(common)
    beta = field_.mul(common[1], field_.element(Fraction(-1, j)))
    power: KPoly = [field_.one]
    for _ in range(j):
        power = _times_linear(field_, power, beta)
    if any(not field_.element(a - b).is_zero for a, b in zip(power, common)):
        raise DegenerateDirection("More than one critical point in a fibre")

    reduced = field_.quo(fibre, common)
    sequence = field_.sturm(reduced)
    at_minus = field_.variations_at_infinity(sequence, positive=False)
    roots = at_minus - field_.variations_at_infinity(sequence, positive=True)
    below = at_minus - field_.variations_at(sequence, beta) - 1
    left_block = left - (roots - 1)
    right_block = right - (roots - 1)
    if left_block < 0 or right_block < 0:
        raise DegenerateDirection("Inconsistent branch counts at a critical fibre")
    return Section(alpha, roots, _branch_map(left, below, left_block),
                   _branch_map(right, below, right_block))


def _times_linear(field_: NumberField, f: KPoly, beta: Poly) -> KPoly:
    """f * (y - beta)."""
    shifted = list(f) + [field_.zero]
    for i, c in enumerate(f):
        shifted[i + 1] = (shifted[i + 1] - field_.mul(c, beta)).rem(field_.modulus)
    return shifted


def _gaps(mapping: Sequence[int], roots: int, index: int) -> range:
    """Section gaps touched by region ``index``: (rho(index - 1), rho(index)]."""
    low = mapping[index - 1] if index > 0 else -1
    high = mapping[index] if index < len(mapping) else roots
    return range(low + 1, high + 1)


def cad_decompose(poly: SparsePoly, box: Box, seed: int | None = None) -> CellComplex:
    """Regions, adjacency and components of the complement of Z(poly) within ``box``."""
    if poly.nvars != 2:
        raise CadError("Cell decomposition is planar")
    if poly.is_zero:
        raise CadError("The zero polynomial has no complement")
    if poly.degree > settings.degree_cap:
        raise CadError(f"Degree {poly.degree} exceeds {settings.degree_cap}")
    factors = _factors(poly)
    rng = np.random.default_rng(settings.seed if seed is None else seed)
    shears = [Fraction(0)] + [
        Fraction(int(rng.integers(1, 16)) * int(rng.choice([-1, 1])), int(rng.integers(2, 17)))
        for _ in range(settings.shear_attempts - 1)
    ]
    last: DegenerateDirection | None = None
    for lam in shears:
        try:
            complex_ = _decompose(poly, factors, box, lam)
        except DegenerateDirection as error:
            logger.debug(f"Shear {lam} rejected: {error}")
            last = error
            continue
        logger.debug(
            f"Decomposed {poly.degree}-degree curve with shear {lam}: "
            f"{len(complex_.regions)} regions, {complex_.component_count} components"
        )
        return complex_
    raise DegenerateDirection(f"No generic shear among {len(shears)} attempts: {last}")


def _box_edges(box: Box, lam: Fraction) -> list[SparsePoly]:
    """Box sides in sheared coordinates; vertical sides are left out when lam = 0."""
    x = SparsePoly.variable(0, 2)
    y = SparsePoly.variable(1, 2)
    sides = [y - SparsePoly.constant(box.ymin, 2), y - SparsePoly.constant(box.ymax, 2)]
    if lam != 0:
        sides += [shear(x - SparsePoly.constant(c, 2), lam) for c in (box.xmin, box.xmax)]
    return sides


def _within(box: Box, lam: Fraction, u: Fraction, y: RealAlgebraic) -> bool:
    """Whether the point (u + lam*y, y) lies in the closed box."""
    if y.compare(box.ymin) < 0 or y.compare(box.ymax) > 0:
        return False
    if lam == 0:
        return box.xmin <= u <= box.xmax
    s = sign(lam)
    return (s * y.compare((box.xmin - u) / lam) >= 0
            and s * y.compare((box.xmax - u) / lam) <= 0)


def _decompose(
    poly: SparsePoly, factors: list[SparsePoly], box: Box, lam: Fraction
) -> CellComplex:
    sheared_factors = [shear(f, lam) for f in factors]
    squarefree = (tracked_product(sheared_factors, 2) if sheared_factors
                  else SparsePoly.constant(1, 2))
    p_rows = _y_rows(squarefree)
    if len(p_rows[0]) != 1:
        raise DegenerateDirection("Leading coefficient in y is not constant")
    known = {f.normalized() for f in sheared_factors}
    edges = [e for e in _box_edges(box, lam) if e.normalized() not in known]
    arrangement = squarefree
    for edge in edges:
        arrangement = arrangement * edge
    rows = _y_rows(arrangement)
    walls = [box.xmin, box.xmax] if lam == 0 else []
    critical = _critical_values([*sheared_factors, *edges], walls)

    slab_samples = _stack_samples(critical) if critical else [Fraction(0)]
    stacks = [real_roots(_fibre(rows, s)) for s in slab_samples]
    branch_counts = [len(stack) for stack in stacks]

    regions: list[Region] = []
    for slab, (u, stack) in enumerate(zip(slab_samples, stacks)):
        for index, y in enumerate(_stack_samples(stack)):
            point = PlanePoint(u + lam * y, y)
            value = sign(evaluate(poly, point))
            if value == 0:
                raise CadError(f"Sample {point} fell on the curve")
            regions.append(Region(len(regions), slab, index, point, value, box.contains(point)))

    sections = [
        _section(alpha, rows, branch_counts[j], branch_counts[j + 1])
        for j, alpha in enumerate(critical)
    ]
    complex_ = CellComplex(poly, box, lam, factors, critical, slab_samples, branch_counts,
                           sections, regions, [], rows=rows)

    graph = nx.Graph()
    graph.add_nodes_from(r.id for r in regions if r.inside)
    for j, sec in enumerate(sections):
        for a in range(branch_counts[j] + 1):
            gaps = set(_gaps(sec.left_map, sec.roots, a))
            for b in range(branch_counts[j + 1] + 1):
                edge = (complex_.region_id(j, a), complex_.region_id(j + 1, b))
                if not (regions[edge[0]].inside and regions[edge[1]].inside):
                    continue
                if gaps & set(_gaps(sec.right_map, sec.roots, b)):
                    complex_.adjacency.append(edge)
                    graph.add_edge(*edge)
    for label, members in enumerate(sorted(nx.connected_components(graph), key=min)):
        for member in members:
            complex_.component[member] = label

    complex_.curve_components = _curve_components(complex_, stacks, p_rows)
    return complex_


def _curve_components(
    complex_: CellComplex, stacks: Sequence[Sequence[RealAlgebraic]],
    p_rows: Sequence[Sequence[Fraction]],
) -> int:
    """Components of Z(P) inside the box: its branches there plus the section points they reach."""
    box, lam = complex_.box, complex_.shear
    curve = nx.Graph()
    kept: set[tuple[int, int]] = set()
    for slab, (u, stack) in enumerate(zip(complex_.slab_samples, stacks)):
        on_curve = _fibre(p_rows, u)
        for i, root in enumerate(stack):
            if root.sign_of(on_curve) == 0 and _within(box, lam, u, root):
                kept.add((slab, i))
                curve.add_node(("branch", slab, i))
    for j, sec in enumerate(complex_.sections):
        touched = set()
        for slab, mapping in ((j, sec.left_map), (j + 1, sec.right_map)):
            for i, g in enumerate(mapping):
                touched.add(g)
                if (slab, i) in kept:
                    curve.add_edge(("branch", slab, i), ("point", j, g))
        # a section root met by no branch at all is an isolated point of Z(P)
        for g in set(range(sec.roots)) - touched:
            around = [complex_.region_id(slab, index)
                      for slab, mapping in ((j, sec.left_map), (j + 1, sec.right_map))
                      for index in range(complex_.branch_counts[slab] + 1)
                      if {g, g + 1} & set(_gaps(mapping, sec.roots, index))]
            if any(complex_.regions[r].inside for r in around):
                curve.add_node(("point", j, g))
    return nx.number_connected_components(curve)


def locate(complex_: CellComplex, p: Sequence[Fraction], clip: bool = True) -> int | str:
    """Region id holding ``p``, or ON_BOUNDARY when the polynomial vanishes there.

    Points on a side of the box go to the region just inside it.
    """
    point = PlanePoint(Fraction(p[0]), Fraction(p[1]))
    if clip and not complex_.box.contains(point):
        raise OutOfBox(f"{point} lies outside the working box")
    if evaluate(complex_.polynomial, point) == 0:
        return ON_BOUNDARY
    u = point.x - complex_.shear * point.y
    roots = real_roots(_fibre(complex_.rows, u))
    below = sum(1 for root in roots if root.compare(point.y) < 0)
    gaps = {below}
    if any(root.compare(point.y) == 0 for root in roots):
        gaps.add(below + 1)

    candidates: list[int] = []
    slab = 0
    for j, alpha in enumerate(complex_.critical):
        position = alpha.compare(u)
        if position == 0:
            sec = complex_.sections[j]
            for side, mapping in ((j, sec.left_map), (j + 1, sec.right_map)):
                for index in range(complex_.branch_counts[side] + 1):
                    if gaps & set(_gaps(mapping, sec.roots, index)):
                        candidates.append(complex_.region_id(side, index))
            if not candidates:
                raise CadError(f"No region borders gaps {sorted(gaps)} of section {j}")
            break
        if position < 0:
            slab = j + 1
    else:
        candidates = [complex_.region_id(slab, g) for g in sorted(gaps)]
    inside = [r for r in candidates if complex_.regions[r].inside]
    return (inside or candidates)[0]


# Line traversal


@dataclass
class Segment:
    """Parameter range of one open piece of a line minus Z inside the box.

    ``lower``/``upper`` are rational and lie inside the piece: on a side of the
    box, or strictly past the isolating interval of a bounding root.
    """

    lower: Fraction
    upper: Fraction
    sample: PlanePoint
    component: int


@dataclass
class LineCrossing:
    count: int
    segments: list[Segment]
    roots: list[RealAlgebraic] = field(default_factory=list)


def restrict_to_line(poly: SparsePoly, line: PlaneLine) -> SparsePoly:
    """poly(base + t*direction) as a univariate polynomial in t."""
    base = line.base_point()
    dx, dy = line.direction()
    t = SparsePoly.variable(0, 1)
    return poly.compose([SparsePoly.constant(base.x, 1) + t * dx,
                         SparsePoly.constant(base.y, 1) + t * dy])


def _line_point(line: PlaneLine, t: Fraction) -> PlanePoint:
    base = line.base_point()
    dx, dy = line.direction()
    return PlanePoint(base.x + t * dx, base.y + t * dy)


def _box_range(line: PlaneLine, box: Box) -> tuple[Fraction, Fraction] | None:
    """Parameter interval of the line inside the closed box."""
    base = line.base_point()
    dx, dy = line.direction()
    lo: Fraction | None = None
    hi: Fraction | None = None
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
    return lo, hi


def line_component_crossings(line: PlaneLine, complex_: CellComplex) -> LineCrossing:
    """Distinct complement components entered by the line inside the working box."""
    span = _box_range(line, complex_.box)
    restricted = restrict_to_line(complex_.polynomial, line)
    if span is None or restricted.is_zero:
        return LineCrossing(0, [])
    start, end = span
    roots = []
    for root in isolate_real_roots(restricted):
        if root.compare(start) > 0 and root.compare(end) < 0:
            if root.is_rational:
                root.refine()
            roots.append(root)
    bounds = [(start, start), *((r.lower, r.upper) for r in roots), (end, end)]
    segments = []
    for k, ((_, left), (right, _)) in enumerate(zip(bounds, bounds[1:])):
        t = (left + right) / 2
        lower = start if k == 0 else (left + t) / 2
        upper = end if k == len(roots) else (right + t) / 2
        point = _line_point(line, t)
        segments.append(Segment(lower, upper, point, complex_.component_of(point)))
    count = len({s.component for s in segments})
    return LineCrossing(count, segments, roots)


# Curve audits


@dataclass
class HarnackReport:
    components: int
    degree: int
    bound: int
    passed: bool


def harnack_audit(poly: SparsePoly, box: Box) -> HarnackReport:
    """Connected components of the real curve inside ``box`` against deg^2 + 1."""
    if poly.degree > 12:
        raise CadError(f"Curve audits take degree <= 12, got {poly.degree}")
    complex_ = cad_decompose(poly, box)
    bound = poly.degree**2 + 1
    report = HarnackReport(complex_.curve_components, poly.degree, bound,
                           complex_.curve_components <= bound)
    logger.info(f"Curve of degree {poly.degree}: {report.components} components (bound {bound})")
    return report


@dataclass
class SignConditionReport:
    rosters: dict[SignVector, list[int]]
    excluded: list[int]
    realizations: list[SignVector]
    line_points: int
    line_met: int
    bound: int
    constant: Fraction
    passed: bool


def _check_family(zf: SparsePoly, family: Sequence[SparsePoly]) -> None:
    for q in family:
        if not q.is_constant and divides(zf, q):
            raise DividesZ(f"{q.text()} vanishes on Z({zf.text()})")


def realized_conditions(zf: SparsePoly, family: Sequence[SparsePoly]) -> list[SignVector]:
    """Strict sign vectors of ``family`` realized along the branches of Z(zf)."""
    _check_family(zf, family)
    nonconstant = [q for q in family if not q.is_constant]
    product = tracked_product([zf, *nonconstant], 2)
    complex_ = cad_decompose(product, Box.square(1))
    lam = complex_.shear
    z_rows = _y_rows(shear(zf, lam))
    q_rows = [_y_rows(shear(q, lam)) if not q.is_constant else None for q in family]
    found: set[SignVector] = set()
    for u in complex_.slab_samples:
        for root in real_roots(_fibre(z_rows, u)):
            vector = []
            for q, rows in zip(family, q_rows):
                if rows is None:
                    vector.append(sign(evaluate(q, (0, 0))))
                else:
                    vector.append(root.sign_of(_fibre(rows, u)))
            if is_strict(tuple(vector)):
                found.add(tuple(vector))
    return sorted(found)


def sign_conditions_on_curve(
    zf: SparsePoly,
    family: Sequence[SparsePoly],
    points: Sequence[Sequence[Fraction]],
    line: PlaneLine,
) -> SignConditionReport:
    """Rosters by strict sign vector plus the number of realizations the line meets on Z."""
    _check_family(zf, family)
    rosters: dict[SignVector, list[int]] = {}
    excluded = []
    for i, p in enumerate(points):
        if evaluate(zf, p) != 0:
            raise CadError(f"Point {tuple(p)} is not on Z({zf.text()})")
        vector = sign_vector(family, p)
        if is_strict(vector):
            rosters.setdefault(vector, []).append(i)
        else:
            excluded.append(i)

    restricted = restrict_to_line(zf, line)
    if restricted.is_zero:
        raise CadError("Line lies inside Z")
    restricted_family = [restrict_to_line(q, line) for q in family]
    met: set[SignVector] = set()
    crossings = isolate_real_roots(restricted) if not restricted.is_constant else []
    for root in crossings:
        vector = tuple(
            root.sign_of(upoly(q.univariate(0))) if not q.is_constant
            else sign(evaluate(q, (0,)))
            for q in restricted_family
        )
        if is_strict(vector):
            met.add(vector)
    scale = zf.degree * max(1, sum(max(q.degree, 0) for q in family))
    report = SignConditionReport(
        rosters=dict(sorted(rosters.items())),
        excluded=excluded,
        realizations=realized_conditions(zf, family),
        line_points=len(crossings),
        line_met=len(met),
        bound=scale,
        constant=Fraction(len(met), scale),
        passed=len(met) <= scale,
    )
    logger.info(
        f"Sign conditions on Z({zf.text()}): {len(report.realizations)} realized, "
        f"line meets {report.line_met} of bound {scale}"
    )
    return report


@dataclass
class BezoutReport:
    count: int
    bound: int
    passed: bool


def _common_real_zeros(p: SparsePoly, q: SparsePoly) -> int:
    """Distinct real common zeros, counted fibre by fibre over the x-resultant roots."""
    res = resultant(p, q, 1)
    if res.is_zero:
        raise SharedComponent(f"{p.text()} and {q.text()} share a component")
    if res.is_constant:
        return 0
    p_rows, q_rows = _y_rows(p), _y_rows(q)
    total = 0
    for alpha in real_roots(upoly(res.univariate(0))):
        field_ = NumberField(alpha)
        f = field_.from_rational_rows([upoly(r) for r in p_rows])
        g = field_.from_rational_rows([upoly(r) for r in q_rows])
        common = field_.gcd(f, g)
        if not common:
            raise SharedComponent("Both polynomials vanish on a vertical line")
        total += field_.count_real_roots(common)
    return total


def bezout_audit(p: SparsePoly, q: SparsePoly) -> BezoutReport:
    """Isolated real common zeros of two coprime plane curves against deg P * deg Q."""
    if p.nvars != 2 or q.nvars != 2:
        raise CadError("Bezout audits are planar")
    common = p.to_sympy().gcd(q.to_sympy())
    if common.total_degree() > 0:
        raise SharedComponent(f"{p.text()} and {q.text()} share a component")
    by_x = _common_real_zeros(p, q)
    swap = [SparsePoly.variable(1, 2), SparsePoly.variable(0, 2)]
    by_y = _common_real_zeros(p.compose(swap), q.compose(swap))
    if by_x != by_y:
        raise CadError(f"Common zero counts disagree: {by_x} by columns, {by_y} by rows")
    bound = p.degree * q.degree
    return BezoutReport(by_x, bound, by_x <= bound)
