"""Exact rational scalars: parsing, rendering, ordering.

Every numeric quantity in this package is a ``fractions.Fraction``.  Fractions
are arbitrary precision, always stored in lowest terms with a positive
denominator, and hash/compare consistently, so they can be used directly as
dict keys and in sorts.  This module pins down the one textual grammar used
wherever rationals cross a process boundary (command line arguments, grid
files, exported linear programs).
"""

from __future__ import annotations

import re
from fractions import Fraction

Rational = Fraction

# Accepted forms: "7", "-7", "3/7", "-3/7", "0.25", "-0.25".  No whitespace,
# no exponent notation, no leading "+", sign only on the numerator.
_RATIONAL_RE = re.compile(r"-?\d+(?:/\d+|\.\d+)?")


class RationalParseError(ValueError):
    """Raised when a string is not a rational literal."""


def parse_rational(text: str) -> Fraction:
    """Parse ``text`` as an exact rational.

    The grammar is integer, fraction ``p/q`` or terminating decimal, with an
    optional leading minus.  Unreduced fractions are accepted and reduced
    ("6/14" parses to 3/7).  Anything else, including a zero denominator,
    raises :class:`RationalParseError`.
    """
    if not isinstance(text, str) or not _RATIONAL_RE.fullmatch(text):
        raise RationalParseError(f"not a rational literal: {text!r}")
    if "/" in text:
        num, _, den = text.partition("/")
        if int(den) == 0:
            raise RationalParseError(f"zero denominator: {text!r}")
        return Fraction(int(num), int(den))
    # Fraction's own string constructor handles decimals exactly.
    return Fraction(text)


def format_rational(value: Fraction) -> str:
    """Render ``value`` canonically: "p/q" in lowest terms, "p" when q is 1.

    ``parse_rational(format_rational(x)) == x`` for every Fraction ``x``.
    """
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def compare(a: Fraction, b: Fraction) -> int:
    """Exact three-way comparison: -1 if a < b, 0 if a == b, 1 if a > b."""
    if a < b:
        return -1
    if a > b:
        return 1
    return 0
