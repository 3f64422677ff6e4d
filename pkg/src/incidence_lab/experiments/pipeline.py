"""The two-level decomposition pipeline with per-stage incidence accounting.

Every brute-force incidence (p, S) lands in exactly one stage:

* ``interior``: p lies in a first-level cell;
* ``boundary``: p lies on Z and S lies inside Z;
* ``second_level``: p lies in a strict sign cell of the second-level family of
  the factor of Z it was routed to;
* ``residual``: everything else, counted by brute force (points on the
  second-level zero sets, and whole stages that failed).
"""

from __future__ import annotations

import logging
import time
from collections import defaultdict
from collections.abc import Iterator
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from incidence_lab import ratios
from incidence_lab.algebra.polynomial import SparsePoly, evaluate
from incidence_lab.config import settings
from incidence_lab.drawing.crossing import PlaneCircle
from incidence_lab.errors import LabError
from incidence_lab.experiments.audits import NEEDS_PARTITION, run_audits
from incidence_lab.experiments.generators import Fixture, UnsupportedFixture, generate
from incidence_lab.geometry.kernel import surface_in_zero_set
from incidence_lab.incidence.engine import IncidenceSet, count_bruteforce
from incidence_lab.models.schemas import (
    DegreeChoice,
    ExperimentConfig,
    Report,
    SecondLevelSummary,
    StageCounts,
)
from incidence_lab.partition.ham_sandwich import (
    Partition,
    build_partition,
    second_level_decomposition,
)

logger = logging.getLogger(__name__)


def _clamp(raw: mpmath.mpf, lower: int, formula: str) -> DegreeChoice:
    value = int(mpmath.nint(raw))
    clamped = not lower <= value <= settings.degree_cap
    if clamped:
        value = min(max(value, lower), settings.degree_cap)
        logger.warning(f"Degree formula {formula} gave {mpmath.nstr(raw, 6)}; clamped to {value}")
    return DegreeChoice(value=value, formula=formula, clamped=clamped)


def first_level_degree(m: int, n: int, k: int) -> DegreeChoice:
    """D = m^(k/(4k-2)) n^(-1/(2k-2)), rounded and clamped to [1, degree_cap]."""
    formula = f"m^({k}/{4 * k - 2}) n^(-1/{2 * k - 2})"
    if m == 0 or n == 0:
        return DegreeChoice(value=1, formula=formula, clamped=True)
    with ratios.precision():
        raw = ratios.power(m, Fraction(k, 4 * k - 2)) * ratios.power(n, Fraction(-1, 2 * k - 2))
        return _clamp(raw, 1, formula)


def second_level_degree(m_j: int, n: int, d_j: int, k: int,
                        rho: Fraction | None = None) -> DegreeChoice:
    """E_j = m_j^(k/(3k-2)) n^(-1/(3k-2)) D_j^(-k/(3k-2)), at least rho * D_j."""
    rho = settings.rho_fraction if rho is None else rho
    lower = max(1, -(-rho.numerator * d_j // rho.denominator))
    formula = f"m_j^({k}/{3 * k - 2}) n^(-1/{3 * k - 2}) D_j^(-{k}/{3 * k - 2})"
    if m_j == 0 or n == 0:
        return DegreeChoice(value=lower, formula=formula, clamped=True)
    e = Fraction(1, 3 * k - 2)
    with ratios.precision():
        raw = (ratios.power(m_j, k * e) * ratios.power(n, -e) * ratios.power(d_j, -k * e))
        return _clamp(raw, lower, formula)


class _Clock:
    def __init__(self) -> None:
        self.timings: dict[str, float] = {}

    @contextmanager
    def stage(self, name: str) -> Iterator[None]:
        start = time.perf_counter()
        try:
            yield
        finally:
            self.timings[name] = time.perf_counter() - start


def _incidences_of(points: list[int], per_point: dict[int, list[int]],
                   inside: list[bool], in_z: bool) -> int:
    """Incidences at the given points with surfaces inside Z (in_z) or not."""
    return sum(1 for p in points for s in per_point.get(p, []) if inside[s] == in_z)


@dataclass
class PipelineRun:
    """A report together with the objects the audits reuse."""

    report: Report
    incidences: IncidenceSet
    partition: Partition | None = None


def supports_pipeline(fixture: Fixture) -> bool:
    return fixture.dimension in (2, 4) and not any(
        isinstance(s, PlaneCircle) for s in fixture.surfaces)


def run_pipeline(
    fixture: Fixture,
    degree: int | None = None,
    second_degree: int | None = None,
    rho: Fraction | str | None = None,
    seed: int | None = None,
    config: ExperimentConfig | None = None,
) -> Report:
    """First-level partition, second-level decompositions on Z, residual brute force."""
    return _run(fixture, degree, second_degree, rho, seed, config).report


def run_experiment(config: ExperimentConfig, fixture: Fixture | None = None) -> Report:
    """Generate, decompose when the fixture allows it, then run the requested audits."""
    if fixture is None:
        fixture = generate(config)
    decompose = config.decompose
    if decompose is None:
        decompose = not config.audits or bool(NEEDS_PARTITION & set(config.audits))
    if decompose and supports_pipeline(fixture):
        run = _run(fixture, config.degree, config.second_degree, config.rho, config.seed, config)
    else:
        logger.info(f"No decomposition for {fixture.name}; counting by brute force only")
        inc = count_bruteforce(fixture.points, fixture.surfaces, fixture.k, fixture.c0)
        report = Report(config=config, fixture=fixture.summary(), incidences=inc.size,
                        stages=StageCounts(residual=inc.size))
        run = PipelineRun(report, inc)
    run_audits(run, fixture, config.audits)
    return run.report


def _run(
    fixture: Fixture,
    degree: int | None,
    second_degree: int | None,
    rho: Fraction | str | None,
    seed: int | None,
    config: ExperimentConfig | None,
) -> PipelineRun:
    if fixture.dimension not in (2, 4):
        raise UnsupportedFixture(f"No pipeline in dimension {fixture.dimension}")
    if not supports_pipeline(fixture):
        raise UnsupportedFixture("Plane circle fixtures go through the drawing audits only")
    rho = settings.rho_fraction if rho is None else Fraction(rho)
    seed = settings.seed if seed is None else seed
    config = config or ExperimentConfig(generator=fixture.name, params=fixture.params,  # type: ignore[arg-type]
                                        seed=seed, degree=degree, second_degree=second_degree,
                                        rho=str(rho))
    clock = _Clock()

    with clock.stage("count"):
        inc = count_bruteforce(fixture.points, fixture.surfaces, fixture.k, fixture.c0)
    per_point = inc.by_point()
    m, n = len(fixture.points), len(fixture.surfaces)
    first = (DegreeChoice(value=degree) if degree is not None
             else first_level_degree(m, n, fixture.k))
    logger.info(f"Pipeline on {fixture.name}: m={m}, n={n}, I={inc.size}, D={first.value}")

    report = Report(config=config, fixture=fixture.summary(), incidences=inc.size,
                    stages=StageCounts(), first_degree=first)
    coords = fixture.coordinates()
    try:
        with clock.stage("partition"):
            partition = build_partition(coords, fixture.dimension, first.value, seed)
    except LabError as exc:
        logger.warning(f"First level failed, all incidences counted as residual: {exc}")
        report.errors.append(f"partition: {exc}")
        report.non_conclusive = True
        report.stages.residual = inc.size
        return PipelineRun(_finish(report, inc, clock), inc)

    report.partition = partition.to_dict()
    report.cell_incidences = [sum(len(per_point.get(i, [])) for i in cell.roster)
                              for cell in partition.cells]
    report.stages.interior = sum(report.cell_incidences)

    with clock.stage("second_level"):
        _boundary_stages(report, fixture, partition, per_point, coords, second_degree, rho, seed)
    return PipelineRun(_finish(report, inc, clock), inc, partition)


def _boundary_stages(report: Report, fixture: Fixture, partition: Partition,
                     per_point: dict[int, list[int]], coords: list[tuple[Fraction, ...]],
                     second_degree: int | None, rho: Fraction, seed: int) -> None:
    factors = list(partition.polynomial.expanded_factors())
    inside = [any(surface_in_zero_set(s, f) for f in factors)  # type: ignore[arg-type]
              for s in fixture.surfaces]
    report.stages.boundary = _incidences_of(partition.boundary, per_point, inside, True)

    routed: dict[int, list[int]] = defaultdict(list)
    for i in partition.boundary:
        j = next(j for j, f in enumerate(factors) if evaluate(f, coords[i]) == 0)
        routed[j].append(i)

    for j, members in sorted(routed.items()):
        factor: SparsePoly = factors[j]
        choice = (DegreeChoice(value=second_degree) if second_degree is not None
                  else second_level_degree(len(members), len(fixture.surfaces), factor.degree,
                                           fixture.k, rho))
        summary = SecondLevelSummary(factor=factor.text(), points=len(members), degree=choice)
        outside = _incidences_of(members, per_point, inside, False)
        try:
            level = second_level_decomposition(factor, [coords[i] for i in members],
                                               choice.value, seed, rho)
        except LabError as exc:
            logger.warning(f"Second level on {factor.text()} failed: {exc}")
            summary.error = str(exc)
            report.errors.append(f"second level {factor.text()}: {exc}")
            report.non_conclusive = True
            report.stages.residual += outside
            report.second_level.append(summary)
            continue
        strict = [members[i] for roster in level.cells.values() for i in roster]
        on_family = [members[i] for i in level.boundary]
        report.stages.second_level += _incidences_of(strict, per_point, inside, False)
        report.stages.residual += _incidences_of(on_family, per_point, inside, False)
        summary.family = [q.text() for q in level.family]
        summary.family_degree = level.degree
        summary.strict_cells = len(level.cells)
        summary.boundary_points = len(level.boundary)
        summary.constant = str(level.constant(choice.value))
        report.second_level.append(summary)


def _finish(report: Report, inc: IncidenceSet, clock: _Clock) -> Report:
    if report.stages.total != inc.size:
        raise LabError(
            f"Stage counts {report.stages.total} do not add up to the brute-force total {inc.size}"
        )
    if report.non_conclusive:
        logger.warning(f"Report for {report.fixture.name} is non-conclusive")
    if settings.record_timings:
        report.timings = clock.timings
    return report
