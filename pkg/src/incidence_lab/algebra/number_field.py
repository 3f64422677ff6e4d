"""Real algebraic numbers and arithmetic in Q(alpha)[y].

A :class:`RealAlgebraic` is an irreducible rational polynomial together with a
rational interval holding exactly one of its real roots. Signs of rational
polynomials at such a number are decided exactly: the polynomial is reduced
modulo the defining polynomial (a nonzero remainder cannot vanish at alpha) and
the interval is refined until the remainder has no root inside it.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

import sympy
from sympy import Poly
from sympy.polys.domains import QQ

from incidence_lab.algebra.polynomial import sign, to_fraction

logger = logging.getLogger(__name__)

T = sympy.Symbol("t")


def upoly(coeffs: Sequence[Fraction | int]) -> Poly:
    """Univariate sympy polynomial in ``t`` from coefficients, highest first."""
    rationals = [sympy.Rational(to_fraction(c).numerator, to_fraction(c).denominator)
                 for c in coeffs]
    return Poly(rationals or [0], T, domain=QQ)


def coefficients(poly: Poly) -> list[Fraction]:
    return [to_fraction(c) for c in poly.all_coeffs()]


def horner(coeffs: Sequence[Fraction], x: Fraction) -> Fraction:
    value = Fraction(0)
    for c in coeffs:
        value = value * x + c
    return value


def _rational(value: Fraction) -> sympy.Rational:
    return sympy.Rational(value.numerator, value.denominator)


@dataclass
class RealAlgebraic:
    """One real root of an irreducible polynomial, isolated in ``[lower, upper]``."""

    poly: Poly
    lower: Fraction
    upper: Fraction

    def __post_init__(self) -> None:
        self._coeffs = coefficients(self.poly)

    @property
    def is_rational(self) -> bool:
        return self.poly.degree() == 1

    @property
    def value(self) -> Fraction:
        """Exact value of a rational root."""
        if not self.is_rational:
            raise ValueError("Root is irrational")
        a, b = self._coeffs
        return -b / a

    def midpoint(self) -> Fraction:
        return (self.lower + self.upper) / 2

    def width(self) -> Fraction:
        return self.upper - self.lower

    def refine(self) -> None:
        """Halve the isolating interval."""
        if self.is_rational:
            self.lower = self.upper = self.value
            return
        mid = self.midpoint()
        if sign(horner(self._coeffs, self.lower)) * sign(horner(self._coeffs, mid)) <= 0:
            self.upper = mid
        else:
            self.lower = mid

    def refine_to(self, width: Fraction) -> None:
        while self.width() > width:
            self.refine()

    def approx(self) -> float:
        return float(self.midpoint())

    def compare(self, r: Fraction) -> int:
        """Sign of ``alpha - r``."""
        if self.is_rational:
            return sign(self.value - r)
        while self.lower <= r <= self.upper:
            self.refine()
        return 1 if r < self.lower else -1

    def sign_of(self, q: Poly | Sequence[Fraction]) -> int:
        """Exact sign of the rational polynomial ``q`` (in ``t``) at alpha."""
        if not isinstance(q, Poly):
            q = upoly(q)
        if self.is_rational:
            return sign(horner(coefficients(q), self.value))
        remainder = q.rem(self.poly)
        if remainder.is_zero:
            return 0
        coeffs = coefficients(remainder)
        while remainder.count_roots(_rational(self.lower), _rational(self.upper)) > 0:
            self.refine()
        return sign(horner(coeffs, self.midpoint()))


def real_roots(*polys: Poly) -> list[RealAlgebraic]:
    """Distinct real roots of univariate rational polynomials, sorted, with disjoint intervals."""
    irreducible: list[Poly] = []
    for poly in polys:
        if poly.is_zero or poly.degree() <= 0:
            continue
        _, factors = poly.sqf_part().factor_list()
        for factor, _multiplicity in factors:
            if factor.degree() <= 0:
                continue
            factor = Poly(factor.as_expr(), T, domain=QQ).monic()
            if factor not in irreducible:
                irreducible.append(factor)
    roots: list[RealAlgebraic] = []
    for factor in irreducible:
        for (a, b), _k in factor.intervals():
            roots.append(RealAlgebraic(factor, to_fraction(a), to_fraction(b)))
    _separate(roots)
    return roots


def _separate(roots: list[RealAlgebraic]) -> None:
    while True:
        roots.sort(key=lambda r: (r.lower, r.upper))
        clash = False
        for left, right in zip(roots, roots[1:]):
            if left.upper >= right.lower:
                clash = True
                left.refine()
                right.refine()
        if not clash:
            return


def count_real_roots(poly: Poly) -> int:
    if poly.is_zero or poly.degree() <= 0:
        return 0
    return len(poly.sqf_part().intervals())


def count_roots_below(poly: Poly, value: Fraction) -> int:
    """Distinct real roots strictly below ``value``."""
    return sum(1 for root in real_roots(poly) if root.compare(value) < 0)


# Q(alpha) and Q(alpha)[y]

Element = Poly
KPoly = list[Poly]


class NumberField:
    """The field Q(alpha) for a real algebraic alpha, elements as polynomials in ``t``."""

    def __init__(self, alpha: RealAlgebraic):
        self.alpha = alpha
        self.modulus = alpha.poly

    def element(self, value: Poly | Sequence[Fraction] | Fraction | int) -> Element:
        if isinstance(value, (Fraction, int)):
            value = upoly([value])
        elif not isinstance(value, Poly):
            value = upoly(value)
        return value.rem(self.modulus)

    @property
    def zero(self) -> Element:
        return upoly([0])

    @property
    def one(self) -> Element:
        return upoly([1])

    def mul(self, a: Element, b: Element) -> Element:
        return (a * b).rem(self.modulus)

    def inv(self, a: Element) -> Element:
        return a.invert(self.modulus)

    def sign(self, a: Element) -> int:
        return self.alpha.sign_of(a)

    # polynomials over K, highest coefficient first

    def strip(self, f: KPoly) -> KPoly:
        i = 0
        while i < len(f) and f[i].is_zero:
            i += 1
        return f[i:]

    def from_rational_rows(self, rows: Sequence[Poly]) -> KPoly:
        """Coefficients in y given as rational polynomials in ``t`` (highest y-degree first)."""
        return self.strip([self.element(r) for r in rows])

    def degree(self, f: KPoly) -> int:
        return len(f) - 1

    def derivative(self, f: KPoly) -> KPoly:
        n = self.degree(f)
        return self.strip([self.element(c * (n - i)) for i, c in enumerate(f[:-1])])

    def rem(self, f: KPoly, g: KPoly) -> KPoly:
        f = list(f)
        inv_lead = self.inv(g[0])
        while len(f) >= len(g) and f:
            factor = self.mul(f[0], inv_lead)
            for i, c in enumerate(g):
                f[i] = (f[i] - self.mul(factor, c)).rem(self.modulus)
            f = self.strip(f)
        return f

    def quo(self, f: KPoly, g: KPoly) -> KPoly:
        """Exact quotient ``f / g``."""
        f = list(f)
        inv_lead = self.inv(g[0])
        quotient: KPoly = []
        while len(f) >= len(g) and f:
            factor = self.mul(f[0], inv_lead)
            quotient.append(factor)
            for i, c in enumerate(g):
                f[i] = (f[i] - self.mul(factor, c)).rem(self.modulus)
            f = f[1:]
        return self.strip(quotient)

    def monic(self, f: KPoly) -> KPoly:
        inv_lead = self.inv(f[0])
        return [self.mul(c, inv_lead) for c in f]

    def gcd(self, f: KPoly, g: KPoly) -> KPoly:
        f, g = self.strip(f), self.strip(g)
        while g:
            f, g = g, self.rem(f, g)
        return self.monic(f) if f else f

    def evaluate(self, f: KPoly, x: Element) -> Element:
        value = self.zero
        for c in f:
            value = (self.mul(value, x) + c).rem(self.modulus)
        return value

    def sturm(self, f: KPoly) -> list[KPoly]:
        sequence = [f, self.derivative(f)]
        while sequence[-1] and self.degree(sequence[-1]) > 0:
            remainder = self.rem(sequence[-2], sequence[-1])
            if not remainder:
                break
            sequence.append([(-c).rem(self.modulus) for c in remainder])
        return [s for s in sequence if s]

    def _variations(self, signs: Sequence[int]) -> int:
        nonzero = [s for s in signs if s]
        return sum(1 for a, b in zip(nonzero, nonzero[1:]) if a != b)

    def variations_at_infinity(self, sequence: Sequence[KPoly], positive: bool) -> int:
        signs = []
        for f in sequence:
            s = self.sign(f[0])
            if not positive and self.degree(f) % 2:
                s = -s
            signs.append(s)
        return self._variations(signs)

    def variations_at(self, sequence: Sequence[KPoly], x: Element) -> int:
        return self._variations([self.sign(self.evaluate(f, x)) for f in sequence])

    def squarefree(self, f: KPoly) -> KPoly:
        common = self.gcd(f, self.derivative(f))
        if self.degree(common) <= 0:
            return f
        return self.quo(f, common)

    def count_real_roots(self, f: KPoly) -> int:
        f = self.strip(f)
        if self.degree(f) <= 0:
            return 0
        sequence = self.sturm(self.squarefree(f))
        return (self.variations_at_infinity(sequence, positive=False)
                - self.variations_at_infinity(sequence, positive=True))
