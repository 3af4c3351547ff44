"""Exact rational scalars and their text form.

Everything scalar in the optimizer is a :class:`fractions.Fraction`.  Floats
and decimal strings are refused so that binary rounding can never leak in.
"""
from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational as _RationalABC

from .errors import ParseError

Rational = Fraction

_RAT_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` or an integer literal.

    >>> parse_rational("-37/20000")
    Fraction(-37, 20000)
    """
    m = _RAT_RE.match(text)
    if not m:
        if re.match(r"^\s*[+-]?\d*\.\d*(e[+-]?\d+)?\s*$", text, re.I) and any(c.isdigit() for c in text):
            raise ParseError(f"decimal literal {text!r} not accepted; write it as a fraction, e.g. 1/10000")
        raise ParseError(f"malformed rational {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ParseError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def as_rational(x) -> Fraction:
    """Coerce ints, Fractions, gmpy2 ``mpq`` values and ``p/q`` strings."""
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    if isinstance(x, float):
        raise TypeError(f"float {x!r} refused; exact rationals only")
    if isinstance(x, _RationalABC) or hasattr(x, "denominator"):
        return Fraction(int(x.numerator), int(x.denominator))
    raise TypeError(f"cannot interpret {x!r} as a rational")


def format_rational(x) -> str:
    x = as_rational(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"
