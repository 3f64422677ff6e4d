"""Unit tests for polynomial ham sandwich partitioning."""

from fractions import Fraction
from types import SimpleNamespace

import numpy as np
import pytest

from incidence_lab.algebra.polynomial import SparsePoly, divides, evaluate
from incidence_lab.experiments.generators import example_ex2
from incidence_lab.partition import ham_sandwich
from incidence_lab.partition.ham_sandwich import (
    DegenerateFamily,
    PartitionError,
    build_partition,
    discrete_poly_ham_sandwich,
    lifted_dimension,
    linear_ham_sandwich,
    minimal_degree,
    partition_from_factors,
    second_level_decomposition,
    veronese_lift,
)

SCATTER = [(Fraction(x), Fraction(y)) for x, y in
           [(0, 3), (1, -2), (4, 1), (-3, -1), (2, 5), (-1, 4), (5, -3), (-4, 2), (3, 3)]]
OTHER = [(Fraction(x), Fraction(y)) for x, y in
         [(7, 0), (-6, 1), (2, -7), (-2, -5), (6, 6), (0, -1), (-5, 5)]]


def _halved(counts, family):
    pos, neg, _zero = counts
    return pos <= len(family) // 2 and neg <= len(family) // 2


class TestVeronese:
    """Test the Veronese lift."""

    def test_lifted_dimensions(self):
        """Test monomial counts for plane and R^4 lifts."""
        assert lifted_dimension(2, 2) == 5
        assert lifted_dimension(4, 3) == 34

    def test_lift_values(self):
        """Test the degree-2 lift of one point in graded-lex order."""
        (lifted,) = veronese_lift([(Fraction(2), Fraction(3))], 2, 2)
        assert len(lifted) == 5
        assert sorted(lifted) == sorted([2, 3, 4, 6, 9])

    def test_lift_degree_must_be_positive(self):
        """Test that e = 0 is refused."""
        with pytest.raises(PartitionError):
            veronese_lift([(Fraction(1), Fraction(1))], 2, 0)

    def test_minimal_degree(self):
        """Test the smallest degree bisecting a number of classes."""
        assert minimal_degree(1, 2) == 1
        assert minimal_degree(2, 2) == 1
        assert minimal_degree(5, 2) == 2
        assert minimal_degree(6, 2) == 3


class TestBisection:
    """Test linear and polynomial bisection."""

    def test_linear_two_families(self):
        """Test a line halving two plane families at once."""
        plane = linear_ham_sandwich([SCATTER, OTHER], rng=np.random.default_rng(1))
        assert plane.bisects([SCATTER, OTHER])

    def test_too_many_families(self):
        """Test that d + 1 families are refused."""
        with pytest.raises(PartitionError):
            linear_ham_sandwich([SCATTER, OTHER, SCATTER])

    def test_polynomial_bisection(self):
        """Test a conic halving three families."""
        families = [SCATTER, OTHER, SCATTER[:5] + OTHER[:2]]
        bisection = discrete_poly_ham_sandwich(families, 2, 2, np.random.default_rng(3))
        assert bisection.polynomial.degree <= 2
        for family, counts in zip(bisection.families, bisection.counts):
            assert _halved(counts, family)


class TestPartition:
    """Test iterated partitions."""

    def test_grid_partition(self, grid_fixture):
        """Test a degree-4 partition of a 6 x 6 grid."""
        coords = grid_fixture.coordinates()
        partition = build_partition(coords, 2, 4, seed=0)
        assert partition.semantics == "ConnectedComponent"
        assert partition.polynomial.degree <= 4
        assert partition.size == len(coords)
        for i in partition.boundary:
            assert evaluate(partition.polynomial, coords[i]) == 0
        assert partition.constant() <= 4

    def test_partition_is_reproducible(self, grid_fixture):
        """Test identical output for the same seed."""
        coords = grid_fixture.coordinates()
        first = build_partition(coords, 2, 4, seed=7).to_dict()
        assert build_partition(coords, 2, 4, seed=7).to_dict() == first

    def test_ex1_coordinate_hyperplanes(self, ex1_fixture):
        """Test the 16 orthants of x1 x2 x3 x4 holding three points each."""
        factors = [SparsePoly.variable(i, 4) for i in range(4)]
        partition = partition_from_factors(factors, ex1_fixture.coordinates())
        assert partition.semantics == "SignVectorCell"
        assert len(partition.cells) == 16
        assert all(len(cell.roster) == 3 for cell in partition.cells)
        assert len(partition.boundary) == 24
        assert partition.singular == []

    def test_singular_boundary_points_recorded(self):
        """Test that a point where the vanishing factor has zero gradient is flagged."""
        x1, x2 = SparsePoly.variable(0, 4), SparsePoly.variable(1, 4)
        points = [(0, 0, 1, 1), (1, 0, 0, 0), (2, 1, 0, 0)]
        partition = partition_from_factors([x1 * x1 + x2 * x2], points)
        assert partition.boundary == [0]
        assert partition.singular == [0]
        assert partition.to_dict()["singular"] == [0]

    def test_points_on_common_hyperplane(self):
        """Test that points with z1 = 0 all land on the partition."""
        fixture = example_ex2(count=12)
        partition = build_partition(fixture.coordinates(), 4, 4, seed=0)
        assert partition.cells == []
        assert partition.boundary == list(range(12))
        assert partition.polynomial.degree == 1

    def test_degree_above_cap(self):
        """Test that target degrees above the cap are refused."""
        with pytest.raises(PartitionError):
            build_partition(SCATTER, 2, 1000)

    def test_unsupported_dimension(self):
        """Test that only dimensions 2 and 4 are partitioned."""
        with pytest.raises(PartitionError):
            build_partition([(Fraction(1),) * 3], 3, 2)

    def test_to_dict_lists_every_point(self, grid_fixture):
        """Test the serialized partition."""
        partition = build_partition(grid_fixture.coordinates(), 2, 2, seed=0)
        data = partition.to_dict()
        listed = [i for cell in data["cells"] for i in cell["roster"]] + data["boundary"]
        assert sorted(listed) == list(range(36))
        assert data["version"] == 1


class TestSecondLevel:
    """Test decompositions of points on a hypersurface."""

    POINTS = [(Fraction(x), Fraction(0)) for x in range(-4, 5)]

    def test_family_does_not_vanish_on_z(self):
        """Test bisectors of points on y = 0."""
        z = SparsePoly.variable(1, 2)
        second = second_level_decomposition(z, self.POINTS, 2, seed=0)
        assert second.family
        assert second.degree <= 2
        assert not any(divides(z, q) for q in second.family)
        listed = [i for roster in second.cells.values() for i in roster] + second.boundary
        assert sorted(listed) == list(range(len(self.POINTS)))
        assert all(all(key) for key in second.cells)

    def test_points_must_lie_on_z(self):
        """Test that off-surface points are refused."""
        with pytest.raises(PartitionError):
            second_level_decomposition(SparsePoly.variable(1, 2), [(Fraction(1), Fraction(1))], 2)

    def test_degree_below_rho(self):
        """Test the lower bound E >= rho * deg Z."""
        z = SparsePoly.variable(1, 2) * SparsePoly.variable(1, 2) * SparsePoly.variable(1, 2)
        with pytest.raises(PartitionError):
            second_level_decomposition(z, self.POINTS, 1, rho=Fraction(1, 2))

    def test_constant(self):
        """Test the second-level constant deg / E."""
        z = SparsePoly.variable(1, 2)
        second = second_level_decomposition(z, self.POINTS, 2, seed=0)
        assert second.constant(2) == Fraction(second.degree, 2)

    def test_rejects_bisector_vanishing_on_every_point(self, monkeypatch):
        """Test that a bisector zero on all active points is skipped for the next one."""
        coords = example_ex2(count=12).coordinates()
        x2, x3 = SparsePoly.variable(1, 4), SparsePoly.variable(2, 4)
        offered = iter([x2, x3])
        monkeypatch.setattr(
            ham_sandwich, "discrete_poly_ham_sandwich",
            lambda families, d, e, rng: SimpleNamespace(polynomial=next(offered)),
        )
        second = second_level_decomposition(SparsePoly.variable(0, 4), coords, 1, seed=0)
        assert second.family == [x3]

    def test_points_on_two_coordinate_hyperplanes(self):
        """Test points with z1 = z2 = 0 on Z = z1 get a family that separates them."""
        coords = example_ex2(count=12).coordinates()
        second = second_level_decomposition(SparsePoly.variable(0, 4), coords, 4, seed=0)
        assert second.family
        for q in second.family:
            assert any(evaluate(q, p) != 0 for p in coords)
        assert second.cells

    def test_bisector_attempts_setting(self, monkeypatch):
        """Test that retries per degree follow bisector_attempts."""
        coords = example_ex2(count=12).coordinates()
        calls = []

        def vanishing(families, d, e, rng):
            calls.append(e)
            return SimpleNamespace(polynomial=SparsePoly.variable(1, 4))

        monkeypatch.setattr(ham_sandwich, "discrete_poly_ham_sandwich", vanishing)
        monkeypatch.setattr(ham_sandwich.settings, "bisector_attempts", 3)
        with pytest.raises(DegenerateFamily):
            second_level_decomposition(SparsePoly.variable(0, 4), coords, 2, seed=0)
        assert calls == [1, 1, 1, 2, 2, 2]
