"""Exact number helpers: parsing, canonical JSON encoding, float rendering."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Union

Number = Union[int, Fraction]


def to_exact(value) -> Number:
    """Coerce ``value`` to ``int`` or ``Fraction`` without losing precision.

    Accepts ints, Fractions, finite floats (taken through their decimal
    repr, so ``0.1`` becomes ``1/10``) and strings such as ``"3/4"`` or
    ``"2.5"``.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return normalize(value)
    if isinstance(value, Rational):
        return normalize(Fraction(value.numerator, value.denominator))
    if isinstance(value, float):
        if value != value or value in (float("inf"), float("-inf")):
            raise ValueError(f"non-finite value {value!r}")
        return normalize(Fraction(repr(value)))
    if isinstance(value, str):
        return normalize(Fraction(value.strip()))
    raise TypeError(f"cannot interpret {value!r} as an exact number")


def normalize(value: Fraction) -> Number:
    """Collapse integral Fractions to ``int`` so JSON output stays canonical."""
    if isinstance(value, Fraction) and value.denominator == 1:
        return int(value.numerator)
    return value


def encode(value: Number):
    """JSON encoding: ints stay ints, proper fractions become ``"p/q"``."""
    value = to_exact(value)
    if isinstance(value, int):
        return value
    return f"{value.numerator}/{value.denominator}"


def rational_record(value: Number) -> dict:
    """Numerator/denominator strings plus a float rendering (reporting only)."""
    f = Fraction(value)
    return {"num": str(f.numerator), "den": str(f.denominator), "float": float(f)}


def parse_rational_record(record) -> Number:
    if isinstance(record, dict):
        return normalize(Fraction(int(record["num"]), int(record["den"])))
    return to_exact(record)
