"""Bound audits run against a fixture, its incidences and its first-level partition."""

from __future__ import annotations

import dataclasses
import logging
from collections.abc import Callable, Sequence
from fractions import Fraction
from typing import TYPE_CHECKING, Any

from incidence_lab.cad.cells import (
    bezout_audit,
    cad_decompose,
    enclosing_box,
    harnack_audit,
    line_component_crossings,
)
from incidence_lab.config import settings
from incidence_lab.drawing.crossing import (
    Chain,
    PlaneCircle,
    build_szekely_drawing,
    chains_in_component,
    clip_line,
    crossing_inequality_audit,
    pach_sharir_audit,
    planar_circle_drawing,
    st_on_domain_audit,
)
from incidence_lab.errors import LabError
from incidence_lab.experiments.generators import Fixture, UnsupportedFixture
from incidence_lab.geometry.kernel import ComplexLine, PlaneLine, PlanePoint, PointC2, dualize
from incidence_lab.incidence.engine import (
    count_bruteforce,
    filter_admissible,
    good_family_audit,
    kst_bound_audit,
    st_ratio,
    unit_distance_audit,
)
from incidence_lab.models.schemas import AuditOutcome
from incidence_lab.partition.ham_sandwich import Partition

if TYPE_CHECKING:
    from incidence_lab.experiments.pipeline import PipelineRun

logger = logging.getLogger(__name__)

Audit = Callable[["PipelineRun", Fixture], AuditOutcome]

NEEDS_PARTITION = frozenset({"partition", "domain", "harnack", "bezout"})


def jsonable(value: Any) -> Any:
    """Dataclass reports as JSON-safe values; rationals become exact strings."""
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {f.name: jsonable(getattr(value, f.name)) for f in dataclasses.fields(value)}
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    return value


def _plane_points(fixture: Fixture) -> list[PlanePoint]:
    if fixture.dimension != 2:
        raise UnsupportedFixture(f"{fixture.name} is not a plane fixture")
    return [PlanePoint(*p) for p in fixture.points]  # type: ignore[arg-type]


def _plane_lines(fixture: Fixture) -> list[PlaneLine]:
    if not all(isinstance(s, PlaneLine) for s in fixture.surfaces):
        raise UnsupportedFixture(f"{fixture.name} does not consist of plane lines")
    return list(fixture.surfaces)  # type: ignore[arg-type]


def _plane_circles(fixture: Fixture) -> list[PlaneCircle] | None:
    if fixture.surfaces and all(isinstance(s, PlaneCircle) for s in fixture.surfaces):
        return list(fixture.surfaces)  # type: ignore[arg-type]
    return None


def _partition_of(run: PipelineRun) -> Partition:
    if run.partition is None:
        raise UnsupportedFixture("The run produced no first-level partition")
    return run.partition


def _plane_partition(run: PipelineRun) -> Partition:
    partition = _partition_of(run)
    if partition.dimension != 2:
        raise UnsupportedFixture("Curve audits need a plane partition")
    return partition


# Audits


def audit_partition(run: PipelineRun, fixture: Fixture) -> AuditOutcome:
    partition = _partition_of(run)
    constant = partition.constant()
    run.report.ratios["partition"] = str(constant)
    return AuditOutcome(name="partition", passed=constant <= settings.partition_ceiling,
                        details={"constant": str(constant), "max_cell": partition.max_cell,
                                 "cells": len(partition.cells),
                                 "boundary": len(partition.boundary),
                                 "semantics": partition.semantics,
                                 "truncated": partition.truncated,
                                 "ceiling": settings.partition_ceiling})


def audit_crossing(run: PipelineRun, fixture: Fixture) -> AuditOutcome:
    points = _plane_points(fixture)
    circles = _plane_circles(fixture)
    if circles is not None:
        drawing = planar_circle_drawing(points, circles)
    else:
        drawing = build_szekely_drawing(points, _plane_lines(fixture))
    report = crossing_inequality_audit(drawing)
    return AuditOutcome(name="crossing", passed=report.passed, details=jsonable(report))


def audit_st(run: PipelineRun, fixture: Fixture) -> AuditOutcome:
    ratio = st_ratio(run.incidences)
    run.report.ratios["st"] = ratio.ratio_text
    return AuditOutcome(name="st", passed=ratio.passed, details=jsonable(ratio))


def audit_kst(run: PipelineRun, fixture: Fixture) -> AuditOutcome:
    report = kst_bound_audit(run.incidences, fixture.k, fixture.c0 + 1)
    return AuditOutcome(name="kst", passed=report.passed, details=jsonable(report))


def audit_domain(run: PipelineRun, fixture: Fixture) -> AuditOutcome:
    """Lines cut to the largest first-level cell, against the bound on that domain."""
    partition = _plane_partition(run)
    points = _plane_points(fixture)
    lines = _plane_lines(fixture)
    if not partition.cells:
        raise UnsupportedFixture("The partition has no nonempty cell")
    cell = max(partition.cells, key=lambda c: (len(c.roster), -c.id))
    box = enclosing_box(fixture.coordinates())
    # same call as the partition builder, so component labels agree with cell keys
    complex_ = cad_decompose(partition.polynomial, box)
    chains: list[Chain] = []
    for line in lines:
        chains.extend(chains_in_component(line, line_component_crossings(line, complex_),
                                          cell.key, box))
    report = st_on_domain_audit(chains, [points[i] for i in cell.roster], fixture.k)
    run.report.ratios["domain"] = report.ratio_text
    details = jsonable(report) | {"component": cell.key}
    return AuditOutcome(name="domain", passed=report.passed, details=details)


def audit_pach_sharir(run: PipelineRun, fixture: Fixture) -> AuditOutcome:
    points = _plane_points(fixture)
    circles = _plane_circles(fixture)
    if circles is not None:
        curves: Sequence[Chain | PlaneCircle] = circles
    else:
        box = enclosing_box(fixture.coordinates())
        curves = [c for c in (clip_line(line, box) for line in _plane_lines(fixture)) if c]
    report = pach_sharir_audit(curves, points, fixture.k, fixture.c0)
    run.report.ratios["pach_sharir"] = report.ratio_text
    return AuditOutcome(name="pach_sharir", passed=report.passed, details=jsonable(report))


def audit_harnack(run: PipelineRun, fixture: Fixture) -> AuditOutcome:
    partition = _plane_partition(run)
    report = harnack_audit(partition.polynomial, enclosing_box(fixture.coordinates()))
    return AuditOutcome(name="harnack", passed=report.passed, details=jsonable(report))


def audit_bezout(run: PipelineRun, fixture: Fixture) -> AuditOutcome:
    partition = _plane_partition(run)
    factors = list(partition.polynomial.expanded_factors())
    if len(factors) < 2:
        raise UnsupportedFixture("Bezout audits need two partition factors")
    report = bezout_audit(factors[0], factors[1])
    details = jsonable(report) | {"factors": [f.text() for f in factors[:2]]}
    return AuditOutcome(name="bezout", passed=report.passed, details=details)


def audit_admissible(run: PipelineRun, fixture: Fixture) -> AuditOutcome:
    filtered = filter_admissible(run.incidences)
    return AuditOutcome(name="admissible", passed=filtered.admissible,
                        details={"kept": filtered.size, "dropped": len(filtered.dropped),
                                 "violations": [list(v) for v in filtered.violations[:20]],
                                 "violation_count": len(filtered.violations)})


def audit_good_family(run: PipelineRun, fixture: Fixture) -> AuditOutcome:
    if _plane_circles(fixture) is not None:
        raise UnsupportedFixture("Plane circle families are checked by the drawing audits")
    report = good_family_audit(fixture.surfaces, fixture.c0)  # type: ignore[arg-type]
    return AuditOutcome(name="good_family", passed=report.passed, details=jsonable(report))


def audit_unit_distance(run: PipelineRun, fixture: Fixture) -> AuditOutcome:
    if not all(isinstance(p, PointC2) for p in fixture.points):
        raise UnsupportedFixture("Unit distances are counted over C^2 points")
    report = unit_distance_audit(fixture.points)  # type: ignore[arg-type]
    run.report.ratios["unit_distance"] = report.ratio.ratio_text
    passed = report.ratio.passed and report.triple_violations == 0
    return AuditOutcome(name="unit_distance", passed=passed, details=jsonable(report))


def audit_duality(run: PipelineRun, fixture: Fixture) -> AuditOutcome:
    if not all(isinstance(s, ComplexLine) for s in fixture.surfaces):
        raise UnsupportedFixture("Duality applies to complex line fixtures")
    points, lines = dualize(fixture.points, fixture.surfaces)  # type: ignore[arg-type]
    dual = count_bruteforce(points, lines, fixture.k, fixture.c0)
    return AuditOutcome(name="duality", passed=dual.size == run.incidences.size,
                        details={"incidences": run.incidences.size, "dual": dual.size})


AUDITS: dict[str, Audit] = {
    "partition": audit_partition,
    "crossing": audit_crossing,
    "st": audit_st,
    "kst": audit_kst,
    "domain": audit_domain,
    "pach_sharir": audit_pach_sharir,
    "harnack": audit_harnack,
    "bezout": audit_bezout,
    "admissible": audit_admissible,
    "good_family": audit_good_family,
    "unit_distance": audit_unit_distance,
    "duality": audit_duality,
}


def run_audits(run: PipelineRun, fixture: Fixture, names: Sequence[str]) -> None:
    """Append one outcome per requested audit; an audit that cannot run fails and is recorded."""
    for name in dict.fromkeys(names):
        try:
            outcome = AUDITS[name](run, fixture)
        except LabError as exc:
            logger.warning(f"Audit {name} on {fixture.name} could not run: {exc}")
            run.report.errors.append(f"{name}: {exc}")
            run.report.non_conclusive = True
            outcome = AuditOutcome(name=name, passed=False, details={"error": str(exc)})
        logger.info(f"Audit {name} on {fixture.name}: {'pass' if outcome.passed else 'FAIL'}")
        run.report.audits.append(outcome)
    failed = sum(not o.passed for o in run.report.audits)
    if failed:
        logger.warning(f"{failed} audit(s) failed on {fixture.name}")
