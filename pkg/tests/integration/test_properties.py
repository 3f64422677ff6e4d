"""Seeded property checks at desk scale; run with: pytest -m slow"""

from fractions import Fraction

import numpy as np
import pytest
import sympy

from incidence_lab.algebra.polynomial import SparsePoly, evaluate, gens, sign, tracked_product
from incidence_lab.cad.cells import Box, cad_decompose, line_component_crossings
from incidence_lab.experiments.campaign import (
    campaign,
    cartesian_sweep,
    crossing_sweep,
    grid_sweep,
)
from incidence_lab.experiments.generators import complex_cartesian, example_ex2, random_uniform
from incidence_lab.experiments.pipeline import run_pipeline
from incidence_lab.geometry.kernel import PlaneLine, dualize
from incidence_lab.incidence.engine import count_bruteforce
from incidence_lab.partition.ham_sandwich import (
    build_partition,
    discrete_poly_ham_sandwich,
    lifted_dimension,
)

pytestmark = pytest.mark.slow


def _random_curve(rng: np.random.Generator) -> SparsePoly:
    """Product of random lines and circles of total degree 1..10."""
    target = int(rng.integers(1, 11))
    factors, degree = [], 0
    while degree < target:
        if target - degree >= 2 and rng.random() < 0.5:
            cx, cy = (int(v) for v in rng.integers(-4, 5, size=2))
            dx, dy = SparsePoly.linear([1, 0], -cx), SparsePoly.linear([0, 1], -cy)
            radius2 = SparsePoly.constant(int(rng.integers(1, 10)), 2)
            factors.append(dx * dx + dy * dy - radius2)
            degree += 2
        else:
            a, b = 0, 0
            while a == 0 and b == 0:
                a, b = (int(v) for v in rng.integers(-6, 7, size=2))
            factors.append(SparsePoly.linear([a, b], int(rng.integers(-8, 9))))
            degree += 1
    return tracked_product(factors, 2)


def _random_line(rng: np.random.Generator) -> PlaneLine:
    a, b = 0, 0
    while a == 0 and b == 0:
        a, b = (int(v) for v in rng.integers(-5, 6, size=2))
    return PlaneLine.of(a, b, int(rng.integers(-9, 10)))


def _roots_in_box(poly: SparsePoly, line: PlaneLine, box: Box) -> int | None:
    """Distinct real zeros of poly along the line inside the open box, by sympy substitution."""
    x1, x2 = gens(2)
    t = sympy.Symbol("t")
    base = line.base_point()
    dx, dy = line.direction()
    expr = poly.to_sympy().as_expr().subs({x1: base.x + t * dx, x2: base.y + t * dy},
                                          simultaneous=True)
    restricted = sympy.Poly(sympy.expand(expr), t)
    if restricted.is_zero:
        return None
    count = 0
    for root in restricted.sqf_part().real_roots():
        x, y = base.x + root * dx, base.y + root * dy
        if box.xmin < x < box.xmax and box.ymin < y < box.ymax:
            count += 1
    return count


class TestBisectionSoundness:
    """Every accepted bisector leaves at most half of each family on either side."""

    @pytest.mark.parametrize("d", [2, 4])
    @pytest.mark.parametrize("seed", range(100))
    def test_strict_sides_halved(self, seed, d):
        rng = np.random.default_rng(seed)
        e = 1 + seed % 6
        count = int(rng.integers(1, min(lifted_dimension(d, e), 4) + 1))
        families = [
            [tuple(Fraction(int(v)) for v in rng.integers(-20, 21, size=d))
             for _ in range(int(rng.integers(2, 8)))]
            for _ in range(count)
        ]
        bisection = discrete_poly_ham_sandwich(families, d, e, rng)
        assert 0 <= bisection.polynomial.degree <= e
        for family in families:
            signs = [sign(evaluate(bisection.polynomial, p)) for p in family]
            assert signs.count(1) <= len(family) // 2
            assert signs.count(-1) <= len(family) // 2


class TestPartitionBudget:
    """Connected-component cells of uniform points stay within 4m/D^2."""

    @pytest.mark.parametrize("degree", [4, 8, 16])
    @pytest.mark.parametrize("m", [256, 1024, 4096])
    def test_cells_within_budget(self, m, degree):
        rng = np.random.default_rng(m + degree)
        points: dict[tuple[Fraction, Fraction], None] = {}
        while len(points) < m:
            x, y = (int(v) for v in rng.integers(0, 2**20, size=2))
            points.setdefault((Fraction(x, 2**20), Fraction(y, 2**20)))
        partition = build_partition(list(points), 2, degree, seed=0)
        assert partition.semantics == "ConnectedComponent"
        assert partition.max_cell <= Fraction(4 * m, degree**2)
        assert partition.constant() <= 4


class TestLineCellCrossings:
    """A line enters at most deg P + 1 components of the complement."""

    @pytest.mark.parametrize("seed", range(200))
    def test_components_entered(self, seed):
        rng = np.random.default_rng(1000 + seed)
        poly = _random_curve(rng)
        line = _random_line(rng)
        box = Box.square(16)
        complex_ = cad_decompose(poly, box, seed=seed)
        crossing = line_component_crossings(line, complex_)
        expected_roots = _roots_in_box(poly, line, box)
        if expected_roots is None:
            assert crossing.count == 0
            return
        assert len(crossing.roots) == expected_roots
        assert len(crossing.segments) == expected_roots + 1
        assert 1 <= crossing.count <= poly.degree + 1


class TestCrossingInequality:
    """The dichotomy holds on 500 drawings of lines, grids and unit circles."""

    def test_crossing_sweep(self):
        summary = campaign(crossing_sweep(count=500))
        assert len(summary.rows) == 500
        assert all(row.passed for row in summary.rows)


class TestStRatioBounded:
    """The ST ratio does not drift as m = n grows to 4096."""

    @pytest.mark.parametrize("sweep", [grid_sweep, cartesian_sweep])
    def test_ratio_spread(self, sweep):
        summary = campaign(sweep((8, 16, 32, 64)))
        rows = [row for row in summary.rows if row.audit == "st"]
        assert [row.m for row in rows] == [64, 256, 1024, 4096]
        assert all(row.m == row.n for row in rows)
        ratios = [row.ratio for row in rows]
        assert max(ratios) <= 2.0
        assert max(ratios) < 3 * min(ratios)


class TestConservation:
    """Stage counts add up to the brute-force total on seeded runs."""

    @pytest.mark.parametrize("seed", range(50))
    def test_stages_add_up(self, seed):
        if seed % 5 == 0:
            fixture = example_ex2(count=6 + seed % 7, seed=seed)
            degree = 1
        else:
            fixture = random_uniform(24 + seed % 17, 12 + seed % 9, box=8, seed=seed)
            degree = 2 + seed % 3
        report = run_pipeline(fixture, degree=degree, seed=seed)
        expected = count_bruteforce(fixture.points, fixture.surfaces).size
        assert report.incidences == expected
        assert report.stages.total == expected


class TestDualityInvariance:
    """Incidence totals survive point-line duality."""

    @pytest.mark.parametrize("seed", range(50))
    def test_totals_match(self, seed):
        rng = np.random.default_rng(seed)
        first = [tuple(int(v) for v in rng.integers(-3, 4, size=2)) for _ in range(5)]
        second = [tuple(int(v) for v in rng.integers(-3, 4, size=2)) for _ in range(5)]
        lines = []
        for _ in range(8):
            s = tuple(int(v) for v in rng.integers(-2, 3, size=2))
            z = first[int(rng.integers(len(first)))]
            w = second[int(rng.integers(len(second)))]
            # t = w - s*z puts (z, w) on the line
            t = (w[0] - (s[0] * z[0] - s[1] * z[1]), w[1] - (s[0] * z[1] + s[1] * z[0]))
            lines.append((s, t))
        fixture = complex_cartesian(a=first, b=second, lines=lines)
        dual_points, dual_lines = dualize(fixture.points, fixture.surfaces)
        before = count_bruteforce(fixture.points, fixture.surfaces).size
        assert before > 0
        assert count_bruteforce(dual_points, dual_lines).size == before
