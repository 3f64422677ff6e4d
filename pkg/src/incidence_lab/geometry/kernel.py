"""Exact points, surfaces and incidence predicates.

Four surface kinds are supported: lines in the plane, complex lines in C^2,
affine 2-flats in R^4 and complex unit circles in C^2. C^2 is identified with
R^4 by (z1, z2) = (x1 + i x2, x3 + i x4). Every predicate evaluates defining
equations over the rationals (Gaussian rationals for complex data); nothing
is ever rounded.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, ClassVar, Literal, NamedTuple, Union

import sympy
from sympy.polys.domains import QQ_I

from incidence_lab.algebra.linear import integer_row, nullspace, rank, rref
from incidence_lab.algebra.polynomial import SparsePoly, evaluate, to_fraction
from incidence_lab.errors import LabError

logger = logging.getLogger(__name__)


class GeometryError(LabError):
    """Base exception for geometry kernel errors."""


class NotOnSurface(GeometryError):
    """Raised when a tangent flat is requested at a point off the surface."""


class SingularPoint(GeometryError):
    """Raised when the real Jacobian has rank below 2 at the point."""


class VerticalLine(GeometryError):
    """Raised when point-line duality meets a vertical complex line."""


class UnsupportedSurface(GeometryError):
    """Raised when an operation is undefined for a surface kind or point type."""


# Points


class PlanePoint(NamedTuple):
    x: Fraction
    y: Fraction


class PointR4(NamedTuple):
    x1: Fraction
    x2: Fraction
    x3: Fraction
    x4: Fraction


class PointC2(NamedTuple):
    z1_re: Fraction
    z1_im: Fraction
    z2_re: Fraction
    z2_im: Fraction


Point = Union[PlanePoint, PointR4]


def plane_point(x: Fraction | int | str, y: Fraction | int | str) -> PlanePoint:
    return PlanePoint(Fraction(x), Fraction(y))


def point_r4(*coords: Fraction | int | str) -> PointR4:
    return PointR4(*(Fraction(c) for c in coords))


def point_c2(z1: complex | tuple, z2: complex | tuple) -> PointC2:
    """Build a C^2 point from ``(re, im)`` pairs (or Python ints/complex with integer parts)."""
    a = _pair(z1)
    b = _pair(z2)
    return PointC2(a[0], a[1], b[0], b[1])


def _pair(z: complex | tuple) -> tuple[Fraction, Fraction]:
    if isinstance(z, tuple):
        return Fraction(z[0]), Fraction(z[1])
    if isinstance(z, complex):
        return Fraction(z.real), Fraction(z.imag)
    return Fraction(z), Fraction(0)


def identify(p: PointC2) -> PointR4:
    """(z1, z2) = (x1 + i x2, x3 + i x4) -> (x1, x2, x3, x4)."""
    return PointR4(p.z1_re, p.z1_im, p.z2_re, p.z2_im)


def identify_inverse(p: PointR4) -> PointC2:
    return PointC2(p.x1, p.x2, p.x3, p.x4)


# Gaussian rationals


def gaussian(re: Fraction | int, im: Fraction | int = 0) -> Any:
    re, im = Fraction(re), Fraction(im)
    return QQ_I(sympy.Rational(re.numerator, re.denominator),
                sympy.Rational(im.numerator, im.denominator))


def gaussian_parts(z: Any) -> tuple[Fraction, Fraction]:
    return to_fraction(z.x), to_fraction(z.y)


# Surfaces


@dataclass(frozen=True)
class PlaneLine:
    """a*x + b*y + c = 0, normalized."""

    kind: ClassVar[str] = "PlaneLine"
    a: Fraction
    b: Fraction
    c: Fraction

    @classmethod
    def of(cls, a: Fraction | int, b: Fraction | int, c: Fraction | int) -> PlaneLine:
        if a == 0 and b == 0:
            raise GeometryError("A plane line needs (a, b) != (0, 0)")
        na, nb, nc = integer_row([Fraction(a), Fraction(b), Fraction(c)])
        return cls(na, nb, nc)

    @classmethod
    def through(cls, p: PlanePoint, q: PlanePoint) -> PlaneLine:
        if p == q:
            raise GeometryError("Two distinct points are needed")
        a = q.y - p.y
        b = p.x - q.x
        return cls.of(a, b, -(a * p.x + b * p.y))

    @classmethod
    def slope_intercept(cls, slope: Fraction | int, intercept: Fraction | int) -> PlaneLine:
        """y = slope * x + intercept."""
        return cls.of(Fraction(slope), -1, Fraction(intercept))

    def direction(self) -> tuple[Fraction, Fraction]:
        return (-self.b, self.a)

    def base_point(self) -> PlanePoint:
        if self.b:
            return PlanePoint(Fraction(0), -self.c / self.b)
        return PlanePoint(-self.c / self.a, Fraction(0))


@dataclass(frozen=True)
class ComplexLine:
    """z2 = s*z1 + t, or the vertical line z1 = t."""

    kind: ClassVar[str] = "ComplexLine"
    s_re: Fraction = Fraction(0)
    s_im: Fraction = Fraction(0)
    t_re: Fraction = Fraction(0)
    t_im: Fraction = Fraction(0)
    vertical: bool = False

    @classmethod
    def of(cls, s: complex | tuple, t: complex | tuple) -> ComplexLine:
        sr, si = _pair(s)
        tr, ti = _pair(t)
        return cls(sr, si, tr, ti)

    @classmethod
    def vertical_at(cls, t: complex | tuple) -> ComplexLine:
        tr, ti = _pair(t)
        return cls(Fraction(0), Fraction(0), tr, ti, vertical=True)


@dataclass(frozen=True)
class Flat2:
    """Common zero set of two affine forms a1*x1 + ... + a4*x4 + c, in reduced echelon form."""

    kind: ClassVar[str] = "Flat2"
    forms: tuple[tuple[Fraction, ...], tuple[Fraction, ...]]

    @classmethod
    def from_forms(cls, forms: Iterable[Sequence[Fraction | int]]) -> Flat2:
        rows = [[Fraction(v) for v in form] for form in forms]
        if len(rows) != 2 or any(len(r) != 5 for r in rows):
            raise GeometryError("A 2-flat needs two affine forms on R^4")
        if rank([r[:4] for r in rows]) != 2:
            raise GeometryError("Linear parts of a 2-flat must be independent")
        reduced = rref(rows)
        return cls((integer_row(reduced[0]), integer_row(reduced[1])))

    def linear_parts(self) -> list[list[Fraction]]:
        return [list(form[:4]) for form in self.forms]

    def base_point(self) -> PointR4:
        """A rational point of the flat (free coordinates set to zero)."""
        coords = [Fraction(0)] * 4
        for form in self.forms:
            pivot = next(i for i in range(4) if form[i])
            coords[pivot] = -form[4] / form[pivot]
        return PointR4(*coords)


@dataclass(frozen=True)
class ComplexUnitCircle:
    """(z1 - a)^2 + (z2 - b)^2 = 1 with centre (a, b) in C^2."""

    kind: ClassVar[str] = "ComplexUnitCircle"
    a_re: Fraction
    a_im: Fraction
    b_re: Fraction
    b_im: Fraction

    @classmethod
    def of(cls, a: complex | tuple, b: complex | tuple) -> ComplexUnitCircle:
        ar, ai = _pair(a)
        br, bi = _pair(b)
        return cls(ar, ai, br, bi)

    @classmethod
    def centred_at(cls, p: PointC2) -> ComplexUnitCircle:
        return cls(p.z1_re, p.z1_im, p.z2_re, p.z2_im)


Surface = Union[PlaneLine, ComplexLine, Flat2, ComplexUnitCircle]
SurfaceKind = Literal["PlaneLine", "ComplexLine", "Flat2", "ComplexUnitCircle"]


@dataclass(frozen=True)
class TangentFlat:
    base: PointR4
    directions: tuple[tuple[Fraction, ...], tuple[Fraction, ...]] = field(compare=False)

    def __post_init__(self) -> None:
        if rank([list(d) for d in self.directions]) != 2:
            raise GeometryError("Tangent directions must be independent")

    def span(self) -> list[list[Fraction]]:
        return rref([list(d) for d in self.directions])

    def same_flat(self, other: TangentFlat) -> bool:
        offset = [a - b for a, b in zip(self.base, other.base)]
        return (self.span() == other.span()
                and rank([list(d) for d in self.directions] + [offset]) == 2)


# Operations


def to_flat(line: ComplexLine) -> Flat2:
    """Image of a complex line under the identification, as a normalized 2-flat."""
    if line.vertical:
        return Flat2.from_forms([
            (1, 0, 0, 0, -line.t_re),
            (0, 1, 0, 0, -line.t_im),
        ])
    sr, si, tr, ti = line.s_re, line.s_im, line.t_re, line.t_im
    return Flat2.from_forms([
        (-sr, si, 1, 0, -tr),
        (-si, -sr, 0, 1, -ti),
    ])


def _as_r4(p: Point | PointC2) -> PointR4:
    if isinstance(p, PointC2):
        return identify(p)
    if isinstance(p, PointR4):
        return p
    if len(p) == 4:
        return PointR4(*p)
    raise UnsupportedSurface(f"Expected a point of R^4, got {p!r}")


def circle_values(circle: ComplexUnitCircle, p: PointR4) -> tuple[Fraction, Fraction]:
    """Real and imaginary parts of (z1 - a)^2 + (z2 - b)^2 - 1 at ``p``."""
    u_re, u_im = p.x1 - circle.a_re, p.x2 - circle.a_im
    v_re, v_im = p.x3 - circle.b_re, p.x4 - circle.b_im
    real = u_re * u_re - u_im * u_im + v_re * v_re - v_im * v_im - 1
    imag = 2 * (u_re * u_im + v_re * v_im)
    return real, imag


def incident(p: Point | PointC2, s: Surface) -> bool:
    """Exact membership of ``p`` in ``s``."""
    if isinstance(s, PlaneLine):
        if len(p) != 2:
            raise UnsupportedSurface("Plane lines take plane points")
        return s.a * p[0] + s.b * p[1] + s.c == 0
    q = _as_r4(p)
    if isinstance(s, ComplexLine):
        s = to_flat(s)
    if isinstance(s, Flat2):
        return all(sum(f[i] * q[i] for i in range(4)) + f[4] == 0 for f in s.forms)
    if isinstance(s, ComplexUnitCircle):
        return circle_values(s, q) == (0, 0)
    raise UnsupportedSurface(f"Unknown surface {s!r}")


def defining_polynomials(s: Surface) -> tuple[SparsePoly, ...]:
    """Real defining equations of ``s`` (2 variables for plane lines, 4 otherwise)."""
    if isinstance(s, PlaneLine):
        return (SparsePoly.linear([s.a, s.b], s.c),)
    if isinstance(s, ComplexLine):
        s = to_flat(s)
    if isinstance(s, Flat2):
        return tuple(SparsePoly.linear(f[:4], f[4]) for f in s.forms)
    x = [SparsePoly.variable(i, 4) for i in range(4)]
    shift = [SparsePoly.constant(v, 4) for v in (s.a_re, s.a_im, s.b_re, s.b_im)]
    u_re, u_im, v_re, v_im = (x[i] - shift[i] for i in range(4))
    real = u_re * u_re - u_im * u_im + v_re * v_re - v_im * v_im - SparsePoly.constant(1, 4)
    imag = (u_re * u_im + v_re * v_im) * 2
    return (real, imag)


def _jacobian(s: Surface, p: PointR4) -> list[list[Fraction]]:
    if isinstance(s, ComplexLine):
        s = to_flat(s)
    if isinstance(s, Flat2):
        return s.linear_parts()
    if isinstance(s, ComplexUnitCircle):
        u_re, u_im = 2 * (p.x1 - s.a_re), 2 * (p.x2 - s.a_im)
        v_re, v_im = 2 * (p.x3 - s.b_re), 2 * (p.x4 - s.b_im)
        return [
            [u_re, -u_im, v_re, -v_im],
            [u_im, u_re, v_im, v_re],
        ]
    raise UnsupportedSurface(f"Tangent flats are defined for surfaces in R^4, not {s.kind}")


def tangent_flat(s: Surface, p: Point | PointC2) -> TangentFlat:
    """Tangent 2-flat of ``s`` at the smooth point ``p``."""
    q = _as_r4(p)
    if isinstance(s, PlaneLine):
        raise UnsupportedSurface("Tangent flats are defined for surfaces in R^4")
    if not incident(q, s):
        raise NotOnSurface(f"{q} does not lie on {s}")
    jacobian = _jacobian(s, q)
    if rank(jacobian) < 2:
        raise SingularPoint(f"Jacobian of {s} has rank < 2 at {q}")
    kernel = nullspace(jacobian)
    return TangentFlat(q, (tuple(kernel[0]), tuple(kernel[1])))


def transversal_at(a: Surface, b: Surface, p: Point | PointC2) -> bool:
    """True iff the tangent flats of two distinct surfaces meet only at ``p``."""
    if a == b:
        raise GeometryError("Transversality is only asked of distinct surfaces")
    if isinstance(a, PlaneLine) and isinstance(b, PlaneLine):
        return a.a * b.b - a.b * b.a != 0
    first = tangent_flat(a, p)
    second = tangent_flat(b, p)
    return rank([list(d) for d in first.directions + second.directions]) == 4


def dualize(
    points: Sequence[PointC2], lines: Sequence[ComplexLine]
) -> tuple[list[PointC2], list[ComplexLine]]:
    """Point (a, b) <-> line z2 = a*z1 - b; returns (dual points, dual lines)."""
    dual_points = []
    for line in lines:
        if line.vertical:
            raise VerticalLine("Rotate coordinates before dualizing a vertical line")
        dual_points.append(PointC2(line.s_re, line.s_im, -line.t_re, -line.t_im))
    dual_lines = [ComplexLine(p.z1_re, p.z1_im, -p.z2_re, -p.z2_im) for p in points]
    return dual_points, dual_lines


def rotate(
    points: Sequence[PointC2], lines: Sequence[ComplexLine], c: Fraction, s: Fraction
) -> tuple[list[PointC2], list[ComplexLine]]:
    """Apply the real rotation (z1, z2) -> (c*z1 - s*z2, s*z1 + c*z2), c^2 + s^2 = 1."""
    if c * c + s * s != 1:
        raise GeometryError("Rotation coefficients must satisfy c^2 + s^2 = 1")
    rotated_points = [
        PointC2(c * p.z1_re - s * p.z2_re, c * p.z1_im - s * p.z2_im,
                s * p.z1_re + c * p.z2_re, s * p.z1_im + c * p.z2_im)
        for p in points
    ]
    rotated_lines = []
    for line in lines:
        # rotate two points of the line and rebuild it
        if line.vertical:
            base = [gaussian(line.t_re, line.t_im), gaussian(0)]
            other = [base[0], gaussian(1)]
        else:
            slope, intercept = gaussian(line.s_re, line.s_im), gaussian(line.t_re, line.t_im)
            base = [gaussian(0), intercept]
            other = [gaussian(1), slope + intercept]
        rotated_lines.append(_line_through(_rotate_pair(base, c, s), _rotate_pair(other, c, s)))
    return rotated_points, rotated_lines


def _rotate_pair(z: list, c: Fraction, s: Fraction) -> list:
    gc, gs = gaussian(c), gaussian(s)
    return [gc * z[0] - gs * z[1], gs * z[0] + gc * z[1]]


def _line_through(p: list, q: list) -> ComplexLine:
    dz1 = q[0] - p[0]
    if not dz1:
        return ComplexLine.vertical_at(gaussian_parts(p[0]))
    slope = (q[1] - p[1]) / dz1
    intercept = p[1] - slope * p[0]
    return ComplexLine.of(gaussian_parts(slope), gaussian_parts(intercept))


def complex_line_contains(line: ComplexLine, p: PointC2) -> bool:
    """Membership by complex arithmetic, independent of the flat representation."""
    z1, z2 = gaussian(p.z1_re, p.z1_im), gaussian(p.z2_re, p.z2_im)
    if line.vertical:
        return z1 == gaussian(line.t_re, line.t_im)
    return z2 == gaussian(line.s_re, line.s_im) * z1 + gaussian(line.t_re, line.t_im)


def intersection_size(a: Surface, b: Surface) -> int | None:
    """Number of common points of two surfaces of the same family; None if infinite."""
    if a == b:
        return None
    if isinstance(a, PlaneLine) and isinstance(b, PlaneLine):
        return 1 if a.a * b.b - a.b * b.a != 0 else 0
    if isinstance(a, (ComplexLine, Flat2)) and isinstance(b, (ComplexLine, Flat2)):
        fa = to_flat(a) if isinstance(a, ComplexLine) else a
        fb = to_flat(b) if isinstance(b, ComplexLine) else b
        rows = [list(f) for f in fa.forms + fb.forms]
        linear = rank([r[:4] for r in rows])
        if rank(rows) > linear:
            return 0
        return 1 if linear == 4 else None
    if isinstance(a, ComplexUnitCircle) and isinstance(b, ComplexUnitCircle):
        return _circle_intersection_size(a, b)
    raise UnsupportedSurface(f"Cannot intersect {a.kind} with {b.kind}")


def _circle_intersection_size(a: ComplexUnitCircle, b: ComplexUnitCircle) -> int | None:
    ca, cb = gaussian(a.a_re, a.a_im), gaussian(a.b_re, a.b_im)
    da, db = gaussian(b.a_re, b.a_im), gaussian(b.b_re, b.b_im)
    # subtracting the equations leaves the complex line alpha*z1 + beta*z2 + gamma = 0
    alpha, beta = 2 * (da - ca), 2 * (db - cb)
    gamma = ca * ca - da * da + cb * cb - db * db
    if not beta:
        if not alpha:
            return None if not gamma else 0
        # z1 fixed, (z2 - b)^2 = 1 - (z1 - a)^2
        z1 = -gamma / alpha
        rhs = gaussian(1) - (z1 - ca) * (z1 - ca)
        return 1 if not rhs else 2
    # z2 = m*z1 + k, substituted into the first circle
    m, k = -alpha / beta, -gamma / beta
    shift = k - cb
    q2 = gaussian(1) + m * m
    q1 = -2 * ca + 2 * m * shift
    q0 = ca * ca + shift * shift - gaussian(1)
    if q2:
        return 1 if not (q1 * q1 - 4 * q2 * q0) else 2
    if q1:
        return 1
    return None if not q0 else 0


def good_family_violations(surfaces: Sequence[Surface], c0: int) -> list[tuple[int, int]]:
    """Index pairs of surfaces sharing more than ``c0`` points."""
    violations = []
    for i in range(len(surfaces)):
        for j in range(i + 1, len(surfaces)):
            size = intersection_size(surfaces[i], surfaces[j])
            if size is None or size > c0:
                violations.append((i, j))
    return violations


def circle_point(circle: ComplexUnitCircle, tau: tuple[Fraction, Fraction]) -> PointC2:
    """Rational point of the circle at parameter tau (tau^2 != -1)."""
    t = gaussian(*tau)
    denominator = gaussian(1) + t * t
    if not denominator:
        raise GeometryError("Parameter tau with tau^2 = -1 has no image")
    u = (gaussian(1) - t * t) / denominator
    v = 2 * t / denominator
    z1 = gaussian(circle.a_re, circle.a_im) + u
    z2 = gaussian(circle.b_re, circle.b_im) + v
    return PointC2(*gaussian_parts(z1), *gaussian_parts(z2))


def surface_in_zero_set(s: Surface, poly: SparsePoly) -> bool:
    """True iff ``poly`` vanishes on all of ``s``."""
    if poly.is_zero:
        return True
    if isinstance(s, PlaneLine):
        base, (dx, dy) = s.base_point(), s.direction()
        t = SparsePoly.variable(0, 1)
        images = [SparsePoly.constant(base.x, 1) + t * dx, SparsePoly.constant(base.y, 1) + t * dy]
        return poly.compose(images).is_zero
    if isinstance(s, (ComplexLine, Flat2)):
        flat = to_flat(s) if isinstance(s, ComplexLine) else s
        base = flat.base_point()
        kernel = nullspace(flat.linear_parts())
        u, v = SparsePoly.variable(0, 2), SparsePoly.variable(1, 2)
        images = [SparsePoly.constant(base[i], 2) + u * kernel[0][i] + v * kernel[1][i]
                  for i in range(4)]
        return poly.compose(images).is_zero
    return _circle_in_zero_set(s, poly)


def _circle_in_zero_set(circle: ComplexUnitCircle, poly: SparsePoly) -> bool:
    t1, t2 = sympy.symbols("tau1 tau2", real=True)
    tau = t1 + sympy.I * t2
    u = (1 - tau**2) / (1 + tau**2)
    v = 2 * tau / (1 + tau**2)
    z1 = sympy.Rational(str(circle.a_re)) + sympy.I * sympy.Rational(str(circle.a_im)) + u
    z2 = sympy.Rational(str(circle.b_re)) + sympy.I * sympy.Rational(str(circle.b_im)) + v
    coords = []
    for z in (z1, z2):
        re, im = sympy.expand_complex(z).as_real_imag()
        coords.extend([re, im])
    expr = poly.to_sympy().as_expr().subs(dict(zip(poly.to_sympy().gens, coords)),
                                          simultaneous=True)
    numerator, _ = sympy.fraction(sympy.together(expr))
    return sympy.expand(numerator) == 0


def point_value(poly: SparsePoly, p: Point | PointC2) -> Fraction:
    if isinstance(p, PointC2):
        p = identify(p)
    return evaluate(poly, p)
