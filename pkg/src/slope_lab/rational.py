"""Parsing and rendering of exact rationals.

Extended values (the slopes of a zero space) use ``math.inf``; every finite
quantity is a :class:`fractions.Fraction`.
"""

from __future__ import annotations

import math
import re
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
from typing import Union

from .errors import InputError

Extended = Union[Fraction, float]

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


def parse_rational(value) -> Fraction:
    """Parse ``"p/q"``, ``"p"`` or an int into a Fraction.

    Floats are refused: every input rational must be exact.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InputError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if not isinstance(value, str):
        raise InputError(f"rationals must be given as strings 'p/q', got {value!r}")
    m = _RATIONAL_RE.match(value)
    if m is None:
        raise InputError(f"malformed rational {value!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise InputError(f"zero denominator in {value!r}")
    return Fraction(num, den)


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions and rational strings; floats are rejected."""
    if isinstance(value, float):
        raise InputError(f"floats are not exact rationals: {value!r}")
    return parse_rational(value)


def format_rational(q: Extended) -> str:
    """Canonical ``p/q`` text, lowest terms, positive denominator (``0/1`` for zero)."""
    if isinstance(q, float):
        if math.isinf(q):
            return "inf" if q > 0 else "-inf"
        raise InputError(f"cannot format non-exact value {q!r}")
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def format_decimal(q: Extended, digits: int = 15) -> str:
    """Presentation-only decimal rendering, round-half-even to ``digits`` significant digits."""
    if isinstance(q, float):
        return "inf" if q > 0 else "-inf"
    q = Fraction(q)
    with localcontext() as ctx:
        ctx.prec = digits
        ctx.rounding = ROUND_HALF_EVEN
        d = Decimal(q.numerator) / Decimal(q.denominator)
    return format(d, f".{digits}g")


def ln_upper(k: int, precision: int = 12) -> Fraction:
    """A rational upper bound for ``ln(k)`` within ``10**-precision``.

    Uses ln k = e*ln 2 + ln r with r = k / 2**e in [1, 2) and the atanh series,
    whose tail is bounded geometrically.
    """
    if k < 1:
        raise InputError("ln_upper needs k >= 1")
    if k == 1:
        return Fraction(0)
    e = k.bit_length() - 1
    r = Fraction(k, 2**e)
    tol = Fraction(1, 10 ** (precision + 2) * (e + 1))
    bound = e * _ln_series_upper(Fraction(2), tol) + _ln_series_upper(r, tol)
    scale = 10**precision
    return Fraction(-((-bound.numerator * scale) // bound.denominator), scale)


def _ln_series_upper(x: Fraction, tol: Fraction) -> Fraction:
    # ln x = 2 * sum z^(2j+1)/(2j+1), z = (x-1)/(x+1) in [0, 1/3] for x in [1, 2]
    z = (x - 1) / (x + 1)
    if z == 0:
        return Fraction(0)
    z2 = z * z
    total = Fraction(0)
    power = z
    j = 0
    while True:
        total += power / (2 * j + 1)
        power *= z2
        j += 1
        tail = 2 * power / ((2 * j + 1) * (1 - z2))
        if tail < tol:
            return 2 * total + tail
