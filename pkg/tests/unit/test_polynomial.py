"""Unit tests for sparse exact polynomials."""

from fractions import Fraction

import numpy as np
import pytest
import sympy

from incidence_lab.algebra.polynomial import (
    DegreeCapExceeded,
    DimensionMismatch,
    PolynomialError,
    PolynomialParseError,
    SparsePoly,
    divides,
    evaluate,
    is_strict,
    parse,
    resultant,
    sign_vector,
    squarefree_part,
    tracked_product,
)
from tests.fixtures import poly_of


class TestSparsePoly:
    """Test construction and introspection."""

    def test_zero_has_degree_minus_one(self):
        """Test the degree convention for the zero polynomial."""
        assert SparsePoly({}, 3).degree == -1
        assert SparsePoly.constant(5, 3).degree == 0

    def test_degree_in_variable(self):
        """Test per-variable degrees."""
        p = poly_of("x1**3*x2 + x2**2 + 1", 2)
        assert p.degree == 4
        assert p.degree_in(0) == 3
        assert p.degree_in(1) == 2

    def test_text_parses_back(self):
        """Test that the canonical text form is read back unchanged."""
        p = poly_of("x1**2*x3/3 - 7*x2 + 1/2", 3)
        assert parse(p.text(), 3) == p

    def test_parse_rejects_free_text(self):
        """Test that only the canonical form is accepted."""
        with pytest.raises(PolynomialParseError):
            parse("x + y", 2)

    def test_exponent_length_checked(self):
        """Test that exponents must match the variable count."""
        with pytest.raises(DimensionMismatch):
            SparsePoly({(1, 0): 1}, 3)

    def test_normalized(self):
        """Test scaling to integer content 1."""
        p = poly_of("-x1/2 + x2/3", 2)
        assert p.normalized() == poly_of("3*x1 - 2*x2", 2)

    def test_compose(self):
        """Test substitution of polynomial images."""
        t = SparsePoly.variable(0, 1)
        p = poly_of("x1*x2 + x2", 2)
        assert p.compose([t, t * 2]) == poly_of("2*x1**2 + 2*x1", 1)


class TestOperations:
    """Test evaluation, division and elimination."""

    def test_evaluate_exact(self):
        """Test exact rational evaluation."""
        p = poly_of("x1**2 - 2*x2", 2)
        assert evaluate(p, [Fraction(1, 2), Fraction(1, 8)]) == 0

    def test_evaluate_dimension_mismatch(self):
        """Test that the point must match the variable count."""
        with pytest.raises(DimensionMismatch):
            evaluate(poly_of("x1", 2), [1, 2, 3])

    def test_divides(self):
        """Test divisibility in Q[x]."""
        q = poly_of("x1**2 - x2**2", 2)
        assert divides(poly_of("x1 + x2", 2), q)
        assert not divides(poly_of("x1 - 2", 2), q)
        assert divides(poly_of("3", 2), q)

    def test_zero_divisor_rejected(self):
        """Test that divisibility by zero is an error."""
        with pytest.raises(PolynomialError):
            divides(SparsePoly({}, 2), poly_of("x1", 2))

    def test_squarefree_part(self):
        """Test removal of repeated factors."""
        p = poly_of("(x1 - 1)**2*(x2 + 1)", 2)
        assert squarefree_part(p) == poly_of("(x1 - 1)*(x2 + 1)", 2).normalized()

    def test_resultant_eliminates_variable(self):
        """Test elimination of x2 from x2 - x1^2 and x2 - 1."""
        r = resultant(poly_of("x2 - x1**2", 2), poly_of("x2 - 1", 2), 1)
        assert r in (poly_of("x1**2 - 1", 2), poly_of("1 - x1**2", 2))

    def test_sign_vector(self):
        """Test strict and non-strict sign vectors."""
        family = [poly_of("x1", 2), poly_of("x2 - 1", 2)]
        assert sign_vector(family, [2, 3]) == (1, 1)
        assert sign_vector(family, [-2, 1]) == (-1, 0)
        assert is_strict((1, -1)) and not is_strict((1, 0))


class TestRandomizedOracles:
    """Test resultants and divisibility against independent computations."""

    @staticmethod
    def _monic_in_y(rng, y_degree):
        terms = {(0, y_degree): Fraction(1)}
        for j in range(y_degree):
            for i in range(3):
                terms[(i, j)] = Fraction(int(rng.integers(-5, 6)))
        return SparsePoly(terms, 2)

    @staticmethod
    def _sylvester(f, g):
        """Determinant of the Sylvester matrix of two coefficient lists, highest first."""
        m, n = len(f) - 1, len(g) - 1
        f = [sympy.Rational(c.numerator, c.denominator) for c in f]
        g = [sympy.Rational(c.numerator, c.denominator) for c in g]
        rows = [[0] * i + list(f) + [0] * (n - 1 - i) for i in range(n)]
        rows += [[0] * i + list(g) + [0] * (m - 1 - i) for i in range(m)]
        return Fraction(str(sympy.Matrix(rows).det()))

    @staticmethod
    def _on_line(poly, base, direction):
        images = [SparsePoly.linear([d], b) for b, d in zip(base, direction)]
        return poly.compose(images)

    def test_resultant_commutes_with_specialization(self):
        """Test Res_y(P, Q)(x0) against the Sylvester determinant of P(x0, y), Q(x0, y)."""
        rng = np.random.default_rng(5)
        checked = 0
        for _ in range(10):
            p = self._monic_in_y(rng, 2)
            q = self._monic_in_y(rng, 3)
            r = resultant(p, q, 1)
            for _ in range(10):
                x0 = Fraction(int(rng.integers(-30, 31)), int(rng.integers(1, 12)))
                line = [SparsePoly.constant(x0, 1), SparsePoly.variable(0, 1)]
                expected = self._sylvester(p.compose(line).univariate(0),
                                           q.compose(line).univariate(0))
                assert evaluate(r, (x0, 0)) == expected
                checked += 1
        assert checked == 100

    def test_divisor_divides_along_lines(self):
        """Test that p | q survives restriction to 20 random lines."""
        rng = np.random.default_rng(8)
        p = poly_of("x1**2 - x2 + 3", 2)
        q = tracked_product([p, poly_of("x1*x2 - 2*x1 + 5", 2)], 2)
        assert divides(p, q)
        for _ in range(20):
            base = [Fraction(int(v)) for v in rng.integers(-9, 10, size=2)]
            direction = [Fraction(int(v)) for v in rng.integers(1, 10, size=2)]
            on_p = self._on_line(p, base, direction).to_sympy()
            on_q = self._on_line(q, base, direction).to_sympy()
            assert on_q.rem(on_p).is_zero

    def test_non_divisor_seen_on_some_line(self):
        """Test that a failed divisibility shows up on a random line."""
        rng = np.random.default_rng(9)
        p, q = poly_of("x1 - 2", 2), poly_of("x1**2 - x2**2", 2)
        assert not divides(p, q)
        remainders = []
        for _ in range(20):
            base = [Fraction(int(v)) for v in rng.integers(-9, 10, size=2)]
            direction = [Fraction(int(v)) for v in rng.integers(1, 10, size=2)]
            on_p = self._on_line(p, base, direction).to_sympy()
            on_q = self._on_line(q, base, direction).to_sympy()
            remainders.append(on_q.rem(on_p).is_zero)
        assert not all(remainders)


class TestTrackedProducts:
    """Test factor tracking through products."""

    def test_factors_tracked(self):
        """Test that the factor list survives multiplication."""
        factors = [poly_of("x1 - 1", 2), poly_of("x2 - 2", 2), poly_of("x1 + x2", 2)]
        product = tracked_product(factors, 2)
        assert product.degree == 3
        assert list(product.factor_list) == factors

    def test_single_factor_is_atomic(self):
        """Test that a one-factor product keeps no factor list."""
        product = tracked_product([poly_of("x1 - 1", 2)], 2)
        assert product.expanded_factors() == (poly_of("x1 - 1", 2),)

    def test_degree_cap(self):
        """Test that products above the cap are refused."""
        big = poly_of("x1**20 + 1", 2)
        with pytest.raises(DegreeCapExceeded):
            tracked_product([big, big], 2)
