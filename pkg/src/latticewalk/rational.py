"""Helpers for moving exact rationals across text boundaries.

Wire formats everywhere in this package carry rationals as "p/q"
strings (plain integers and decimal literals are also accepted on
input). Decimal rendering is done in integer arithmetic so output is
deterministic at any precision.
"""

from __future__ import annotations

from fractions import Fraction


def parse_rational(text: str) -> Fraction:
    """Parse a rational from a string such as "3/7", "-2" or "0.25"."""
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational: {text!r}") from exc


def format_rational(value: Fraction) -> str:
    """Render as "p/q" (or "p" when the denominator is 1)."""
    return str(Fraction(value))


def rational_to_decimal(value: Fraction, digits: int = 12) -> str:
    """Round-half-up decimal string with `digits` places after the point.

    Uses integer long division, so the result is identical on every
    platform. digits=0 renders an integer.
    """
    if digits < 0:
        raise ValueError("digits must be >= 0")
    value = Fraction(value)
    sign = "-" if value < 0 else ""
    value = abs(value)
    scaled = value * 10**digits
    whole, rem = divmod(scaled.numerator, scaled.denominator)
    if 2 * rem >= scaled.denominator:
        whole += 1
    text = str(whole).rjust(digits + 1, "0")
    if digits == 0:
        return sign + text
    return f"{sign}{text[:-digits]}.{text[-digits:]}"
