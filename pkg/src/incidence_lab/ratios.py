"""High-precision ratio displays.

Counts stay exact everywhere; only the final quotient against a bound with
fractional exponents is evaluated, in mpmath at ``settings.ratio_digits``.
"""

from __future__ import annotations

from fractions import Fraction

import mpmath

from incidence_lab.config import settings


def power(base: int | Fraction, exponent: Fraction) -> mpmath.mpf:
    if base == 0:
        return mpmath.mpf(0)
    return mpmath.power(mpmath.mpf(Fraction(base).numerator) / Fraction(base).denominator,
                        mpmath.mpf(exponent.numerator) / exponent.denominator)


def quotient(count: int, bound: mpmath.mpf) -> mpmath.mpf:
    """count / bound, with 0 / 0 read as 0."""
    if bound == 0:
        return mpmath.mpf(0)
    return mpmath.mpf(count) / bound


def display(value: mpmath.mpf) -> str:
    return mpmath.nstr(value, settings.ratio_digits, strip_zeros=False)


class precision:
    """Context manager setting mpmath's working precision from the settings."""

    def __enter__(self) -> None:
        self._context = mpmath.workdps(settings.ratio_digits + 10)
        self._context.__enter__()

    def __exit__(self, *exc: object) -> None:
        self._context.__exit__(*exc)
