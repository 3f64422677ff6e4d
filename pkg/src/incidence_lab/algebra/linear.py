"""Exact rational matrices via sympy's DomainMatrix over QQ."""

from __future__ import annotations

import math
from collections.abc import Sequence
from fractions import Fraction

from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from incidence_lab.algebra.polynomial import to_fraction

Row = Sequence[Fraction]


def _matrix(rows: Sequence[Row]) -> DomainMatrix:
    ncols = len(rows[0]) if rows else 0
    entries = [[QQ(int(v.numerator), int(v.denominator)) for v in map(Fraction, row)]
               for row in rows]
    return DomainMatrix(entries, (len(rows), ncols), QQ)


def _rows(matrix: DomainMatrix) -> list[list[Fraction]]:
    return [[to_fraction(v) for v in row] for row in matrix.to_Matrix().tolist()]


def rank(rows: Sequence[Row]) -> int:
    if not rows:
        return 0
    return int(_matrix(rows).rank())


def rref(rows: Sequence[Row]) -> list[list[Fraction]]:
    """Nonzero rows of the reduced row echelon form."""
    reduced, _pivots = _matrix(rows).rref()
    return [row for row in _rows(reduced) if any(row)]


def nullspace(rows: Sequence[Row]) -> list[list[Fraction]]:
    """Basis of the right kernel, one vector per entry."""
    return [row for row in _rows(_matrix(rows).nullspace()) if any(row)]


def integer_row(row: Row) -> tuple[Fraction, ...]:
    """Scale a rational row to integers with content 1 and first nonzero entry positive."""
    nonzero = [Fraction(v) for v in row if v]
    if not nonzero:
        return tuple(Fraction(0) for _ in row)
    scale = Fraction(math.lcm(*(v.denominator for v in nonzero)))
    scale /= math.gcd(*(int(v * scale) for v in nonzero))
    if nonzero[0] < 0:
        scale = -scale
    return tuple(Fraction(v) * scale for v in row)


def dot(a: Row, b: Row) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))
