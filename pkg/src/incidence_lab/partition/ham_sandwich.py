"""Discrete polynomial ham sandwich bisection and iterated partitioning.

A degree-e bisection of point families in R^d is a hyperplane bisection of
their Veronese lifts. Hyperplanes are searched with float guidance (numpy) but
every candidate is rebuilt exactly through chosen lifted points and accepted
only after an exact recount, so downstream code never sees an unverified
polynomial.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Literal

import numpy as np

from incidence_lab.algebra.linear import dot, integer_row, nullspace
from incidence_lab.algebra.polynomial import (
    Exponent,
    SignVector,
    SparsePoly,
    divides,
    evaluate,
    sign,
    sign_vector,
    tracked_product,
)
from incidence_lab.config import settings
from incidence_lab.errors import LabError

logger = logging.getLogger(__name__)

Coordinates = Sequence[Fraction]
CellSemantics = Literal["ConnectedComponent", "SignVectorCell"]


class PartitionError(LabError):
    """Base exception for partition errors."""


class SearchExhausted(PartitionError):
    """Raised when no verified bisecting hyperplane was found within the search limits."""


class DegenerateFamily(PartitionError):
    """Raised when every bisecting candidate vanishes identically on the hypersurface."""


# Veronese lift


def monomials(d: int, e: int) -> list[Exponent]:
    """Nonconstant monomials of total degree <= e in graded-lex order."""
    exponents: list[Exponent] = []
    for degree in range(1, e + 1):
        for combo in itertools.combinations_with_replacement(range(d), degree):
            exponents.append(tuple(combo.count(i) for i in range(d)))
    return exponents


def lifted_dimension(d: int, e: int) -> int:
    return math.comb(e + d, d) - 1


def _lift(point: Coordinates, exponents: Sequence[Exponent]) -> tuple[Fraction, ...]:
    values = []
    for exponent in exponents:
        value = Fraction(1)
        for x, power in zip(point, exponent):
            if power:
                value *= Fraction(x) ** power
        values.append(value)
    return tuple(values)


def veronese_lift(points: Sequence[Coordinates], d: int, e: int) -> list[tuple[Fraction, ...]]:
    if e < 1:
        raise PartitionError("Lift degree must be at least 1")
    exponents = monomials(d, e)
    return [_lift(p, exponents) for p in points]


# Linear ham sandwich


@dataclass(frozen=True)
class Hyperplane:
    """normal . y + offset = 0."""

    normal: tuple[Fraction, ...]
    offset: Fraction

    def value(self, y: Coordinates) -> Fraction:
        return dot(self.normal, y) + self.offset

    def side_counts(self, family: Sequence[Coordinates]) -> tuple[int, int, int]:
        signs = [sign(self.value(y)) for y in family]
        return signs.count(1), signs.count(-1), signs.count(0)

    def bisects(self, families: Sequence[Sequence[Coordinates]]) -> bool:
        for family in families:
            pos, neg, _zero = self.side_counts(family)
            half = len(family) // 2
            if pos > half or neg > half:
                return False
        return True


class _Search:
    """One hyperplane search over fixed lifted families."""

    def __init__(self, families: Sequence[Sequence[tuple[Fraction, ...]]], dim: int,
                 rng: np.random.Generator):
        self.families = [list(f) for f in families]
        self.dim = dim
        self.rng = rng
        self.rows = [[list(y) + [Fraction(1)] for y in f] for f in self.families]
        floats = [np.array([[float(v) for v in y] for y in f], dtype=float).reshape(len(f), dim)
                  for f in self.families]
        stacked = np.vstack([f for f in floats if len(f)]) if any(len(f) for f in floats) else None
        scale = np.abs(stacked).max(axis=0) if stacked is not None else np.ones(dim)
        self.scale = np.where(scale > 0, scale, 1.0)
        self.floats = [np.hstack([f / self.scale, np.ones((len(f), 1))]) for f in floats]

    def _exact(
        self, chosen: Sequence[tuple[int, int]], guide: np.ndarray | None
    ) -> Hyperplane | None:
        rows = [self.rows[j][i] for j, i in chosen]
        basis = nullspace(rows) if rows else [
            [Fraction(int(k == i)) for k in range(self.dim + 1)] for i in range(self.dim + 1)
        ]
        basis = [b for b in basis if any(b[:self.dim])]
        if not basis:
            return None
        if len(basis) == 1 or guide is None:
            weights = [Fraction(1)] + [Fraction(0)] * (len(basis) - 1)
            if guide is None and len(basis) > 1:
                weights = [Fraction(int(v)) for v in self.rng.integers(-3, 4, size=len(basis))]
        else:
            scaled = np.array([[float(v) for v in b] for b in basis])
            scaled[:, :self.dim] *= self.scale
            coeffs, *_ = np.linalg.lstsq(scaled.T, guide, rcond=None)
            weights = [Fraction(float(c)).limit_denominator(1 << 20) for c in coeffs]
        combined = [sum((w * b[k] for w, b in zip(weights, basis)), Fraction(0))
                    for k in range(self.dim + 1)]
        if not any(combined[:self.dim]):
            return None
        normalized = integer_row(combined)
        return Hyperplane(tuple(normalized[:self.dim]), normalized[self.dim])

    def verified(self, candidate: Hyperplane | None) -> Hyperplane | None:
        if candidate is not None and candidate.bisects(self.families):
            return candidate
        return None

    def median_iteration(self, steps: int) -> Hyperplane | None:
        """Move the hyperplane through the current per-family medians until they stabilise."""
        w = self.rng.standard_normal(self.dim + 1)
        previous: list[tuple[int, int]] | None = None
        for step in range(steps):
            chosen = []
            for j, f in enumerate(self.floats):
                if not len(f):
                    continue
                order = np.argsort(f @ w, kind="stable")
                chosen.append((j, int(order[(len(f) - 1) // 2])))
            if chosen == previous:
                logger.debug(f"Median iteration stabilised after {step} steps")
                break
            previous = chosen
            a = np.array([self.floats[j][i] for j, i in chosen]).reshape(len(chosen), self.dim + 1)
            w = w - np.linalg.pinv(a) @ (a @ w)
            norm = np.linalg.norm(w[:self.dim])
            if norm == 0:
                return None
            w = w / norm
        if previous is None:
            return self.verified(self._exact([], w))
        return self.verified(self._exact(previous, w))

    def tuples(self) -> Iterator[tuple[tuple[int, int], ...]]:
        """One point from each nonempty family, every combination."""
        ranges = [[(j, i) for i in range(len(f))] for j, f in enumerate(self.families) if f]
        return itertools.product(*ranges)

    def random_subset(self) -> list[tuple[int, int]]:
        """``dim`` lifted points drawn across all families."""
        pool = [(j, i) for j, f in enumerate(self.families) for i in range(len(f))]
        size = min(self.dim, len(pool))
        picks = self.rng.choice(len(pool), size=size, replace=False)
        return [pool[int(k)] for k in sorted(picks)]


def linear_ham_sandwich(
    families: Sequence[Sequence[Coordinates]],
    dim: int | None = None,
    rng: np.random.Generator | None = None,
) -> Hyperplane:
    """Hyperplane whose strict sides hold at most half of every family."""
    lifted = [[tuple(Fraction(v) for v in y) for y in f] for f in families]
    if dim is None:
        dim = next((len(f[0]) for f in lifted if f), 1)
    if len(families) > dim:
        raise PartitionError(f"{len(families)} families cannot be bisected in R^{dim}")
    rng = rng if rng is not None else np.random.default_rng(settings.seed)
    search = _Search(lifted, dim, rng)

    for restart in range(settings.search_restarts):
        found = search.median_iteration(settings.search_steps)
        if found is not None:
            logger.debug(f"Bisection found by median iteration (restart {restart})")
            return found

    total = math.prod(len(f) for f in lifted if f)
    if total <= settings.exhaustive_limit:
        for chosen in search.tuples():
            found = search.verified(search._exact(list(chosen), None))
            if found is not None:
                logger.debug("Bisection found by exhaustive enumeration")
                return found
    else:
        for _ in range(settings.exhaustive_limit):
            found = search.verified(search._exact(search.random_subset(), None))
            if found is not None:
                logger.debug("Bisection found through a random point subset")
                return found

    raise SearchExhausted(
        f"No bisecting hyperplane for {len(families)} families in R^{dim}"
    )


# Polynomial bisection


@dataclass
class Bisection:
    polynomial: SparsePoly
    families: list[list[tuple[Fraction, ...]]]
    counts: list[tuple[int, int, int]]

    def __post_init__(self) -> None:
        for family, (pos, neg, _zero) in zip(self.families, self.counts):
            if pos > len(family) // 2 or neg > len(family) // 2:
                raise PartitionError(f"Counts {pos}/{neg} do not bisect {len(family)} points")


def pullback(hyperplane: Hyperplane, d: int, e: int) -> SparsePoly:
    """Polynomial offset + sum(normal_i * monomial_i) in d variables."""
    terms: dict[Exponent, Fraction] = {(0,) * d: hyperplane.offset}
    for exponent, coeff in zip(monomials(d, e), hyperplane.normal):
        terms[exponent] = coeff
    return SparsePoly(terms, d).normalized()


def discrete_poly_ham_sandwich(
    families: Sequence[Sequence[Coordinates]],
    d: int,
    e: int,
    rng: np.random.Generator | None = None,
) -> Bisection:
    """Polynomial of degree <= e with at most half of every family on each strict side."""
    if len(families) > lifted_dimension(d, e):
        raise PartitionError(
            f"{len(families)} families exceed the {lifted_dimension(d, e)} lifted dimensions"
        )
    points = [[tuple(Fraction(v) for v in p) for p in f] for f in families]
    lifted = [veronese_lift(f, d, e) for f in points]
    hyperplane = linear_ham_sandwich(lifted, lifted_dimension(d, e), rng)
    poly = pullback(hyperplane, d, e)
    counts = []
    for family in points:
        signs = [sign(evaluate(poly, p)) for p in family]
        counts.append((signs.count(1), signs.count(-1), signs.count(0)))
    return Bisection(poly, points, counts)


# Iterated partition


@dataclass
class Cell:
    id: int
    roster: list[int]
    key: Any = None


@dataclass
class RoundRecord:
    degree: int
    classes: int
    max_class: int
    boundary: int


@dataclass
class Partition:
    dimension: int
    polynomial: SparsePoly
    target_degree: int
    cells: list[Cell]
    boundary: list[int]
    semantics: CellSemantics
    rounds: list[RoundRecord] = field(default_factory=list)
    truncated: bool = False
    shear: Fraction | None = None
    # boundary points where some vanishing factor has zero gradient; diagnostic only
    singular: list[int] = field(default_factory=list)

    @property
    def size(self) -> int:
        return sum(len(c.roster) for c in self.cells) + len(self.boundary)

    @property
    def max_cell(self) -> int:
        return max((len(c.roster) for c in self.cells), default=0)

    def constant(self) -> Fraction:
        """Smallest c with every cell holding at most c*m/D^2 (plane) or c*m/2^r (sign cells)."""
        if self.size == 0:
            return Fraction(0)
        if self.semantics == "ConnectedComponent":
            return Fraction(self.max_cell * self.target_degree**2, self.size)
        return Fraction(self.max_cell * 2 ** len(self.rounds), self.size)

    def to_dict(self) -> dict[str, Any]:
        return {
            "version": 1,
            "dimension": self.dimension,
            "polynomial": self.polynomial.text(),
            "factors": [f.text() for f in self.polynomial.expanded_factors()],
            "degree": self.polynomial.degree,
            "target_degree": self.target_degree,
            "semantics": self.semantics,
            "cells": [{"id": c.id, "roster": c.roster} for c in self.cells],
            "boundary": self.boundary,
            "rounds": [vars(r) for r in self.rounds],
            "truncated": self.truncated,
            "constant": str(self.constant()),
            "shear": None if self.shear is None else str(self.shear),
            "singular": self.singular,
        }


def minimal_degree(classes: int, d: int) -> int:
    e = 1
    while lifted_dimension(d, e) < classes:
        e += 1
    return e


def build_partition(
    points: Sequence[Coordinates], d: int, target_degree: int, seed: int | None = None
) -> Partition:
    """Iterated halving: each round bisects every current point class at once."""
    if d not in (2, 4):
        raise PartitionError(f"Partitions are built in dimension 2 or 4, not {d}")
    if target_degree > settings.degree_cap:
        raise PartitionError(f"Target degree {target_degree} exceeds {settings.degree_cap}")
    rng = np.random.default_rng(settings.seed if seed is None else seed)
    coords = [tuple(Fraction(v) for v in p) for p in points]
    flat = _common_hyperplane(coords, d)
    if flat is not None:
        # every cell of a valid partition would be empty; take the hyperplane itself
        logger.info(f"All {len(coords)} points lie on {flat.text()}; using it as the partition")
        partition = partition_from_factors([flat], coords, target_degree)
        partition.rounds = [RoundRecord(1, 2, 0, len(coords))]
        return partition
    classes: list[list[int]] = [list(range(len(coords)))]
    boundary: list[int] = []
    factors: list[SparsePoly] = []
    rounds: list[RoundRecord] = []
    degree = 0
    truncated = False

    while True:
        active = [c for c in classes if c]
        if not active:
            break
        e = minimal_degree(len(active), d)
        bisection = None
        while degree + e <= target_degree:
            try:
                bisection = discrete_poly_ham_sandwich(
                    [[coords[i] for i in c] for c in active], d, e, rng
                )
                break
            except SearchExhausted:
                logger.warning(f"Bisection search exhausted at degree {e}; trying {e + 1}")
                e += 1
        if bisection is None:
            if degree + minimal_degree(len(active), d) <= target_degree:
                truncated = True
                logger.warning(f"Partition truncated after {len(rounds)} rounds")
            break

        factor = bisection.polynomial
        factors.append(factor)
        degree += factor.degree
        classes = []
        for members in active:
            positive, negative = [], []
            for i in members:
                s = sign(evaluate(factor, coords[i]))
                if s > 0:
                    positive.append(i)
                elif s < 0:
                    negative.append(i)
                else:
                    boundary.append(i)
            classes.extend([positive, negative])
        record = RoundRecord(factor.degree, len(classes),
                             max((len(c) for c in classes), default=0), len(boundary))
        rounds.append(record)
        logger.info(
            f"Round {len(rounds)}: degree {factor.degree} (total {degree}), "
            f"{record.classes} classes, largest {record.max_class}, boundary {record.boundary}"
        )

    interior = sorted(i for c in classes for i in c)
    partition = _assemble(factors, coords, interior, boundary, d, target_degree)
    partition.rounds = rounds
    partition.truncated = truncated
    return partition


def _common_hyperplane(coords: Sequence[tuple[Fraction, ...]], d: int) -> SparsePoly | None:
    """A linear polynomial vanishing on all points, when more than d of them span no more."""
    if len(coords) <= d:
        return None
    kernel = nullspace([list(p) + [Fraction(1)] for p in coords])
    if not kernel:
        return None
    row = integer_row(kernel[0])
    return SparsePoly.linear(list(row[:d]), row[d])


def partition_from_factors(
    factors: Sequence[SparsePoly], points: Sequence[Coordinates], target_degree: int | None = None
) -> Partition:
    """Cells of a given factored polynomial, without any search."""
    if not factors:
        raise PartitionError("At least one factor is needed")
    d = factors[0].nvars
    coords = [tuple(Fraction(v) for v in p) for p in points]
    interior, boundary = [], []
    for i, p in enumerate(coords):
        (boundary if any(evaluate(f, p) == 0 for f in factors) else interior).append(i)
    degree = sum(f.degree for f in factors)
    partition = _assemble(factors, coords, interior, boundary, d, target_degree or degree)
    partition.rounds = [RoundRecord(f.degree, 0, 0, 0) for f in factors]
    return partition


def _assemble(
    factors: Sequence[SparsePoly],
    coords: Sequence[tuple[Fraction, ...]],
    interior: list[int],
    boundary: list[int],
    d: int,
    target_degree: int,
) -> Partition:
    polynomial = tracked_product(factors, d) if factors else SparsePoly.constant(1, d)
    shear: Fraction | None = None
    if d == 2 and factors:
        cells, shear = _component_cells(polynomial, coords, interior)
        semantics: CellSemantics = "ConnectedComponent"
    else:
        cells = _sign_cells(factors, coords, interior)
        semantics = "ConnectedComponent" if d == 2 else "SignVectorCell"
    partition = Partition(d, polynomial, target_degree, cells, sorted(boundary), semantics,
                          shear=shear, singular=_singular_points(factors, coords, boundary))
    if partition.size != len(coords):
        raise PartitionError("Partition lost or duplicated points")
    return partition


def _singular_points(
    factors: Sequence[SparsePoly], coords: Sequence[tuple[Fraction, ...]], boundary: Sequence[int]
) -> list[int]:
    gradients = [[f.derivative(v) for v in range(f.nvars)] for f in factors]
    singular = []
    for i in boundary:
        p = coords[i]
        if any(evaluate(f, p) == 0 and all(evaluate(g, p) == 0 for g in grad)
               for f, grad in zip(factors, gradients)):
            singular.append(i)
    if singular:
        logger.debug(f"{len(singular)} boundary points are singular on their factor")
    return sorted(singular)


def _sign_cells(
    factors: Sequence[SparsePoly], coords: Sequence[tuple[Fraction, ...]], interior: Sequence[int]
) -> list[Cell]:
    groups: dict[SignVector, list[int]] = {}
    for i in interior:
        groups.setdefault(sign_vector(factors, coords[i]), []).append(i)
    return [Cell(index, roster, key) for index, (key, roster) in enumerate(sorted(groups.items()))]


def _component_cells(
    polynomial: SparsePoly, coords: Sequence[tuple[Fraction, ...]], interior: Sequence[int]
) -> tuple[list[Cell], Fraction]:
    from incidence_lab.cad.cells import cad_decompose, enclosing_box

    complex_ = cad_decompose(polynomial, enclosing_box(coords))
    groups: dict[int, list[int]] = {}
    for i in interior:
        groups.setdefault(complex_.component_of(coords[i]), []).append(i)
    cells = [Cell(component, roster, component) for component, roster in sorted(groups.items())]
    return cells, complex_.shear


# Second level


@dataclass
class SecondLevel:
    family: list[SparsePoly]
    cells: dict[SignVector, list[int]]
    boundary: list[int]
    degree: int

    def constant(self, e: int) -> Fraction:
        return Fraction(self.degree, e) if e else Fraction(0)


def second_level_decomposition(
    z_factor: SparsePoly,
    points: Sequence[Coordinates],
    e: int,
    seed: int | None = None,
    rho: Fraction | None = None,
) -> SecondLevel:
    """Bisect points on Z(z_factor) with polynomials that do not vanish on Z.

    Rounds continue while the family's total degree stays within ``e``. Points on
    the zero set of a family member leave the strict rosters.
    """
    d = z_factor.nvars
    rho = settings.rho_fraction if rho is None else rho
    coords = [tuple(Fraction(v) for v in p) for p in points]
    for p in coords:
        if evaluate(z_factor, p) != 0:
            raise PartitionError(f"Point {p} is not on the hypersurface")
    if e < rho * z_factor.degree:
        raise PartitionError(f"Degree {e} is below rho * deg(Z) = {rho * z_factor.degree}")
    rng = np.random.default_rng(settings.seed if seed is None else seed)
    family: list[SparsePoly] = []
    classes: list[list[int]] = [list(range(len(coords)))]
    boundary: list[int] = []
    total = 0

    while True:
        active = [c for c in classes if c]
        if not active:
            break
        degree = minimal_degree(len(active), d)
        if total + degree > e:
            break
        candidate = _non_vanishing_bisector(z_factor, coords, active, d, degree, e - total, rng)
        if candidate is None:
            if not family:
                raise DegenerateFamily(
                    f"Every bisector up to degree {e} vanishes on {z_factor.text()} "
                    "or on every point"
                )
            break
        family.append(candidate)
        total += candidate.degree
        classes = []
        for members in active:
            positive, negative = [], []
            for i in members:
                s = sign(evaluate(candidate, coords[i]))
                (positive if s > 0 else negative if s < 0 else boundary).append(i)
            classes.extend([positive, negative])

    cells: dict[SignVector, list[int]] = {}
    for members in classes:
        for i in members:
            cells.setdefault(sign_vector(family, coords[i]), []).append(i)
    logger.info(
        f"Second level on {z_factor.text()}: {len(family)} polynomials, total degree {total}, "
        f"{len(cells)} strict cells"
    )
    return SecondLevel(family, dict(sorted(cells.items())), sorted(boundary), total)


def _non_vanishing_bisector(
    z_factor: SparsePoly,
    coords: Sequence[tuple[Fraction, ...]],
    active: Sequence[Sequence[int]],
    d: int,
    degree: int,
    max_degree: int,
    rng: np.random.Generator,
) -> SparsePoly | None:
    while degree <= max_degree:
        for _attempt in range(settings.bisector_attempts):
            try:
                bisection = discrete_poly_ham_sandwich(
                    [[coords[i] for i in c] for c in active], d, degree, rng
                )
            except SearchExhausted:
                break
            candidate = bisection.polynomial
            if divides(z_factor, candidate):
                logger.debug(f"Rejected bisector {candidate.text()}: vanishes on Z")
            elif all(evaluate(candidate, coords[i]) == 0 for c in active for i in c):
                logger.debug(f"Rejected bisector {candidate.text()}: vanishes on every point")
            else:
                return candidate
        degree += 1
    return None
