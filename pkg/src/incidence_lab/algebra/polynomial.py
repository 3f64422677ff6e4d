"""Exact sparse multivariate polynomials with construction-time factor tracking.

Coefficients are :class:`fractions.Fraction`; every heavy operation (products,
resultants, gcds, square-free parts) is delegated to :mod:`sympy` over ``QQ``.
A :class:`SparsePoly` built by :func:`multiply_tracked` remembers its factors, so
downstream code never has to factor over the reals.
"""

from __future__ import annotations

import logging
import math
import re
from collections.abc import Iterable, Mapping, Sequence
from fractions import Fraction
from functools import cache, cached_property
from typing import Any

import sympy
from sympy import Poly
from sympy.polys.domains import QQ

from incidence_lab.config import settings
from incidence_lab.errors import LabError

logger = logging.getLogger(__name__)

Exponent = tuple[int, ...]
SignVector = tuple[int, ...]


class PolynomialError(LabError):
    """Base exception for polynomial errors."""


class DimensionMismatch(PolynomialError):
    """Raised when a point or operand has the wrong number of variables."""


class DegreeCapExceeded(PolynomialError):
    """Raised when a constructed polynomial exceeds the configured degree cap."""


class PolynomialParseError(PolynomialError):
    """Raised when the canonical text form cannot be parsed."""


def to_fraction(value: Any) -> Fraction:
    """Convert ints, Fractions, sympy Rationals and QQ domain elements to Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if hasattr(value, "p") and hasattr(value, "q"):
        return Fraction(int(value.p), int(value.q))
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return Fraction(int(value.numerator), int(value.denominator))
    return Fraction(str(value))


def sign(value: Fraction | int) -> int:
    return (value > 0) - (value < 0)


@cache
def gens(nvars: int) -> tuple[sympy.Symbol, ...]:
    """Generators x1..xd shared by every polynomial with ``nvars`` variables."""
    return tuple(sympy.symbols(f"x1:{nvars + 1}"))


def _grlex_key(exponent: Exponent) -> tuple[int, Exponent]:
    return (sum(exponent), exponent)


class SparsePoly:
    """Polynomial in ``nvars`` variables with an optional tracked factor list."""

    def __init__(
        self,
        terms: Mapping[Exponent, Fraction | int],
        nvars: int,
        factors: Sequence[SparsePoly] = (),
    ):
        cleaned: dict[Exponent, Fraction] = {}
        for exponent, coeff in terms.items():
            if len(exponent) != nvars:
                raise DimensionMismatch(
                    f"Exponent {exponent} does not have {nvars} entries"
                )
            value = to_fraction(coeff)
            if value:
                cleaned[tuple(int(e) for e in exponent)] = value
        self.nvars = nvars
        self._terms = dict(sorted(cleaned.items(), key=lambda t: _grlex_key(t[0]), reverse=True))
        self.factors: tuple[SparsePoly, ...] = tuple(factors)

    # Construction

    @classmethod
    def constant(cls, value: Fraction | int, nvars: int) -> SparsePoly:
        return cls({(0,) * nvars: value}, nvars)

    @classmethod
    def variable(cls, index: int, nvars: int) -> SparsePoly:
        """The coordinate form x_{index+1}."""
        exponent = tuple(1 if i == index else 0 for i in range(nvars))
        return cls({exponent: 1}, nvars)

    @classmethod
    def linear(
        cls, coeffs: Sequence[Fraction | int], constant: Fraction | int = 0
    ) -> SparsePoly:
        nvars = len(coeffs)
        terms: dict[Exponent, Fraction | int] = {(0,) * nvars: constant}
        for i, c in enumerate(coeffs):
            terms[tuple(1 if j == i else 0 for j in range(nvars))] = c
        return cls(terms, nvars)

    @classmethod
    def from_sympy(cls, poly: Poly | sympy.Expr, nvars: int) -> SparsePoly:
        if not isinstance(poly, Poly):
            poly = Poly(poly, *gens(nvars), domain=QQ)
        elif tuple(poly.gens) != gens(nvars):
            poly = Poly(poly.as_expr(), *gens(nvars), domain=QQ)
        if poly.is_zero:
            return cls({}, nvars)
        return cls({monom: to_fraction(c) for monom, c in poly.terms()}, nvars)

    def to_sympy(self) -> Poly:
        rep = {e: sympy.Rational(c.numerator, c.denominator) for e, c in self._terms.items()}
        if not rep:
            return Poly(0, *gens(self.nvars), domain=QQ)
        return Poly.from_dict(rep, *gens(self.nvars), domain=QQ)

    # Introspection

    @property
    def terms(self) -> dict[Exponent, Fraction]:
        return dict(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self._terms)

    @cached_property
    def degree(self) -> int:
        """Total degree; the zero polynomial has degree -1."""
        if not self._terms:
            return -1
        return max(sum(e) for e in self._terms)

    def degree_in(self, var: int) -> int:
        if not self._terms:
            return -1
        return max(e[var] for e in self._terms)

    @property
    def factor_list(self) -> tuple[SparsePoly, ...]:
        return self.factors

    def expanded_factors(self) -> tuple[SparsePoly, ...]:
        """Tracked factors, or the polynomial itself when it is atomic."""
        return self.factors if self.factors else (self,)

    def used_variables(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.nvars) if any(e[i] for e in self._terms))

    # Arithmetic (results are atomic: factor tracking only happens in multiply_tracked)

    def __add__(self, other: SparsePoly) -> SparsePoly:
        _check_same(self, other)
        terms = dict(self._terms)
        for e, c in other._terms.items():
            terms[e] = terms.get(e, Fraction(0)) + c
        return SparsePoly(terms, self.nvars)

    def __neg__(self) -> SparsePoly:
        return SparsePoly({e: -c for e, c in self._terms.items()}, self.nvars)

    def __sub__(self, other: SparsePoly) -> SparsePoly:
        return self + (-other)

    def __mul__(self, other: SparsePoly | Fraction | int) -> SparsePoly:
        if isinstance(other, (Fraction, int)):
            return SparsePoly({e: c * other for e, c in self._terms.items()}, self.nvars)
        _check_same(self, other)
        return SparsePoly.from_sympy(self.to_sympy() * other.to_sympy(), self.nvars)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.nvars, tuple(self._terms.items())))

    def __repr__(self) -> str:
        return f"SparsePoly({self.text()!r}, nvars={self.nvars})"

    def derivative(self, var: int) -> SparsePoly:
        terms: dict[Exponent, Fraction] = {}
        for e, c in self._terms.items():
            if e[var]:
                lowered = e[:var] + (e[var] - 1,) + e[var + 1:]
                terms[lowered] = c * e[var]
        return SparsePoly(terms, self.nvars)

    def normalized(self) -> SparsePoly:
        """Scale to integer coefficients with content 1 and positive leading coefficient."""
        if not self._terms:
            return self
        coeffs = list(self._terms.values())
        scale = Fraction(math.lcm(*(c.denominator for c in coeffs)))
        scale /= math.gcd(*(c.numerator for c in coeffs))
        if coeffs[0] < 0:
            scale = -scale
        return SparsePoly({e: c * scale for e, c in self._terms.items()}, self.nvars)

    def compose(self, images: Sequence[SparsePoly]) -> SparsePoly:
        """Substitute x_i -> images[i]; images share their own variable count."""
        if len(images) != self.nvars:
            raise DimensionMismatch(f"Need {self.nvars} images, got {len(images)}")
        target = images[0].nvars if images else 0
        image_polys = [img.to_sympy() for img in images]
        total = Poly(0, *gens(target), domain=QQ)
        for e, c in self._terms.items():
            term = Poly(sympy.Rational(c.numerator, c.denominator), *gens(target), domain=QQ)
            for img, power in zip(image_polys, e):
                if power:
                    term = term * img**power
            total = total + term
        return SparsePoly.from_sympy(total, target)

    def univariate(self, var: int) -> list[Fraction]:
        """Coefficients (highest first) when only ``var`` occurs."""
        if any(e[i] for e in self._terms for i in range(self.nvars) if i != var):
            raise DimensionMismatch(f"Polynomial is not univariate in x{var + 1}")
        degree = self.degree_in(var)
        coeffs = [Fraction(0)] * (degree + 1)
        for e, c in self._terms.items():
            coeffs[degree - e[var]] = c
        return coeffs

    # Text form

    def text(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for e, c in self._terms.items():
            monomial = " ".join(f"x{i + 1}^{p}" for i, p in enumerate(e) if p)
            coeff = f"{c.numerator}/{c.denominator}"
            parts.append(f"{coeff} * {monomial}" if monomial else coeff)
        return " + ".join(parts)


_TERM = re.compile(r"^(-?\d+)/(\d+)(?: \* ((?:x\d+\^\d+)(?: x\d+\^\d+)*))?$")


def parse(text: str, nvars: int) -> SparsePoly:
    """Parse the canonical ``c * x1^e1 ... xd^ed`` form produced by ``SparsePoly.text``."""
    text = text.strip()
    if text == "0":
        return SparsePoly({}, nvars)
    terms: dict[Exponent, Fraction] = {}
    for chunk in text.split(" + "):
        match = _TERM.match(chunk.strip())
        if not match:
            raise PolynomialParseError(f"Cannot parse term {chunk!r}")
        coeff = Fraction(int(match.group(1)), int(match.group(2)))
        exponent = [0] * nvars
        for factor in (match.group(3) or "").split():
            name, power = factor.split("^")
            index = int(name[1:]) - 1
            if not 0 <= index < nvars:
                raise PolynomialParseError(f"Variable {name} outside x1..x{nvars}")
            exponent[index] += int(power)
        key = tuple(exponent)
        terms[key] = terms.get(key, Fraction(0)) + coeff
    return SparsePoly(terms, nvars)


def _check_same(a: SparsePoly, b: SparsePoly) -> None:
    if a.nvars != b.nvars:
        raise DimensionMismatch(f"Operands have {a.nvars} and {b.nvars} variables")


def _check_cap(poly: SparsePoly) -> None:
    if poly.degree > settings.degree_cap:
        raise DegreeCapExceeded(
            f"Degree {poly.degree} exceeds the cap of {settings.degree_cap}"
        )


# Operations


def evaluate(poly: SparsePoly, point: Sequence[Fraction | int]) -> Fraction:
    """Exact value of ``poly`` at ``point``."""
    if len(point) != poly.nvars:
        raise DimensionMismatch(
            f"Point has {len(point)} coordinates, polynomial has {poly.nvars} variables"
        )
    total = Fraction(0)
    for e, c in poly._terms.items():
        term = c
        for x, power in zip(point, e):
            if power:
                term *= x**power
        total += term
    return total


def multiply_tracked(a: SparsePoly, b: SparsePoly) -> SparsePoly:
    """Product that keeps the concatenated factor expansions of both operands."""
    _check_same(a, b)
    product = a * b
    factors = tuple(
        f for f in a.expanded_factors() + b.expanded_factors()
        if not (f.is_constant and f == SparsePoly.constant(1, f.nvars))
    )
    tracked = SparsePoly(product.terms, a.nvars, factors if len(factors) > 1 else ())
    _check_cap(tracked)
    return tracked


def tracked_product(factors: Iterable[SparsePoly], nvars: int) -> SparsePoly:
    result = SparsePoly.constant(1, nvars)
    for factor in factors:
        result = multiply_tracked(result, factor)
    return result


def resultant(p: SparsePoly, q: SparsePoly, var: int) -> SparsePoly:
    """Sylvester resultant of ``p`` and ``q`` with respect to ``x_{var+1}``."""
    _check_same(p, q)
    symbol = gens(p.nvars)[var]
    value = sympy.resultant(p.to_sympy().as_expr(), q.to_sympy().as_expr(), symbol)
    return SparsePoly.from_sympy(Poly(sympy.expand(value), *gens(p.nvars), domain=QQ), p.nvars)


def divides(p: SparsePoly, q: SparsePoly) -> bool:
    """True iff ``p`` divides ``q`` in Q[x1..xd]."""
    _check_same(p, q)
    if p.is_zero:
        raise PolynomialError("Divisor must be nonzero")
    if q.is_zero or p.is_constant:
        return True
    common = p.to_sympy().gcd(q.to_sympy())
    return common.total_degree() == p.degree


def squarefree_part(poly: SparsePoly) -> SparsePoly:
    """Polynomial with the same zero set and no repeated factors."""
    if poly.is_zero or poly.is_constant:
        return poly
    return SparsePoly.from_sympy(poly.to_sympy().sqf_part(), poly.nvars).normalized()


def sign_vector(family: Sequence[SparsePoly], point: Sequence[Fraction | int]) -> SignVector:
    """Exact sign of every member of ``family`` at ``point``."""
    return tuple(sign(evaluate(q, point)) for q in family)


def is_strict(vector: SignVector) -> bool:
    return all(vector)
