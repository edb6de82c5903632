"""Exact rational scalars and d-dimensional rational points.

Scalars are `fractions.Fraction`, which already guarantees the canonical form
we rely on everywhere: reduced, positive denominator, structural equality.
A point is a plain tuple of Fractions; all operations are componentwise and
exact, so set deduplication downstream is mathematical equality, not an
approximation.

Textual syntax for a rational is strict: optional sign, integer, optionally
"/" followed by a positive integer (`-3/2`, `7`).  `parse_rational` and
`format_rational` round-trip bit-exactly.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import DimensionMismatchError, ParseError

Rational = Fraction
Point = tuple[Fraction, ...]

_RATIONAL_RE = re.compile(r"^[+-]?[0-9]+(?:/(?P<den>[0-9]+))?$")


def parse_rational(text: str, line: int | None = None) -> Fraction:
    """Parse the strict `[sign]int[/posint]` syntax into a reduced Fraction."""
    m = _RATIONAL_RE.match(text)
    if m is None:
        raise ParseError(f"malformed rational {text!r}", line)
    den = m.group("den")
    if den is not None and int(den) == 0:
        raise ParseError(f"zero denominator in {text!r}", line)
    return Fraction(text)


def format_rational(x: Fraction) -> str:
    """Canonical text for a rational; `parse_rational` inverts it exactly."""
    return str(x)


def parse_point(tokens: list[str] | str, line: int | None = None) -> Point:
    """Parse whitespace-separated rationals into a point."""
    if isinstance(tokens, str):
        tokens = tokens.split()
    if not tokens:
        raise ParseError("empty point", line)
    return tuple(parse_rational(t, line) for t in tokens)


def format_point(p: Point) -> str:
    return " ".join(format_rational(x) for x in p)


def require_same_dim(a: Point, b: Point) -> None:
    if len(a) != len(b):
        raise DimensionMismatchError(
            f"points of dimension {len(a)} and {len(b)} cannot be combined"
        )


def point_add(a: Point, b: Point) -> Point:
    """Componentwise exact sum of two points of equal dimension."""
    require_same_dim(a, b)
    return tuple(x + y for x, y in zip(a, b))


def point_mul(a: Point, b: Point) -> Point:
    """Componentwise exact product of two points of equal dimension."""
    require_same_dim(a, b)
    return tuple(x * y for x, y in zip(a, b))


def as_point(values, dim: int | None = None) -> Point:
    """Coerce an iterable of ints/Fractions to a point, optionally checking dim."""
    p = tuple(Fraction(v) for v in values)
    if dim is not None and len(p) != dim:
        raise DimensionMismatchError(f"expected dimension {dim}, got {len(p)}")
    return p
