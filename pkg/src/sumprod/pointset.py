"""Finite subsets of Q^d with exact sumset, product set, and Cartesian product.

A PointSet stores its points strictly increasing in lexicographic order, so
structural equality is set equality and every operation is deterministic.
The pairwise operations scale each coordinate to integers (one lcm of
denominators per coordinate, shared by both operands), run the integer
kernel, and convert back; with a positive common denominator the integer
order equals the rational order, so the kernel's sorted output is already
canonical.

Text format (bit-exact round trip)::

    # pointset v1
    dim 2
    1 2
    -3/2 0

Comment lines after the first are ignored on input, which lets generators
append provenance without breaking the format.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple

from . import kernels
from .errors import DimensionMismatchError, EmptySetError, ParseError
from .exact import Point, format_point, parse_point

POINTSET_HEADER = "# pointset v1"


@dataclass(frozen=True)
class PointSet:
    """Deduplicated finite subset of Q^dim in canonical (lexicographic) order."""

    dim: int
    points: tuple[Point, ...]

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dim}")
        prev = None
        for p in self.points:
            if len(p) != self.dim:
                raise DimensionMismatchError(
                    f"point {p} has dimension {len(p)}, expected {self.dim}"
                )
            if prev is not None and p <= prev:
                raise ValueError("points must be strictly increasing; use PointSet.of")
            prev = p

    @classmethod
    def of(cls, points: Iterable, dim: int | None = None) -> "PointSet":
        """Build from any iterable of points, coercing, deduplicating and sorting."""
        coerced = [tuple(Fraction(x) for x in p) for p in points]
        if dim is None:
            if not coerced:
                raise ValueError("dimension required for an empty PointSet")
            dim = len(coerced[0])
        return cls(dim, tuple(sorted(set(coerced))))

    @classmethod
    def empty(cls, dim: int) -> "PointSet":
        return cls(dim, ())

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[Point]:
        return iter(self.points)

    def __contains__(self, p) -> bool:
        return tuple(p) in set(self.points) if self.points else False


class GrowthCounts(NamedTuple):
    sum_size: int
    prod_size: int


class CoordinateStats(NamedTuple):
    """Per-coordinate distinct-value counts and ranges (decomposition diagnostics)."""

    distinct: tuple[int, ...]
    minima: tuple[Fraction, ...]
    maxima: tuple[Fraction, ...]


def _require_compatible(a: PointSet, b: PointSet) -> None:
    if a.dim != b.dim:
        raise DimensionMismatchError(f"dimensions differ: {a.dim} vs {b.dim}")
    if not a.points or not b.points:
        raise EmptySetError("sumset/productset require nonempty operands")


def _scaled_rows(a: PointSet, b: PointSet) -> tuple[list, list, list[int]]:
    """Scale both sets to integers with one positive denominator per coordinate."""
    denoms = []
    for j in range(a.dim):
        l = 1
        for ps in (a, b):
            for p in ps.points:
                l = l * p[j].denominator // math.gcd(l, p[j].denominator)
        denoms.append(l)

    def rows(ps: PointSet) -> list:
        return [
            tuple(p[j].numerator * (denoms[j] // p[j].denominator) for j in range(ps.dim))
            for p in ps.points
        ]

    return rows(a), rows(b), denoms


def _unscale(rows: list, denoms: list[int], squared: bool) -> tuple[Point, ...]:
    dens = [d * d if squared else d for d in denoms]
    if all(d == 1 for d in dens):
        return tuple(tuple(Fraction(v) for v in row) for row in rows)
    return tuple(
        tuple(Fraction(v, den) for v, den in zip(row, dens)) for row in rows
    )


def _pairwise(a: PointSet, b: PointSet, op: int, strategy: str, workers: int) -> PointSet:
    _require_compatible(a, b)
    rows_a, rows_b, denoms = _scaled_rows(a, b)
    out = kernels.pair_op(rows_a, rows_b, a.dim, op, strategy=strategy, workers=workers)
    return PointSet(a.dim, _unscale(out, denoms, squared=(op == kernels.OP_MUL)))


def sumset(a: PointSet, b: PointSet, *, strategy: str = "auto", workers: int = 1) -> PointSet:
    """A + B = { x + y : x in A, y in B }, exact and deduplicated."""
    return _pairwise(a, b, kernels.OP_ADD, strategy, workers)


def productset(a: PointSet, b: PointSet, *, strategy: str = "auto", workers: int = 1) -> PointSet:
    """A * B with componentwise products, exact and deduplicated."""
    return _pairwise(a, b, kernels.OP_MUL, strategy, workers)


def cartesian(a: PointSet, b: PointSet) -> PointSet:
    """All concatenations (x, y); |result| = |A|*|B|, dimension dim(A)+dim(B)."""
    if not a.points or not b.points:
        raise EmptySetError("cartesian requires nonempty operands")
    # Nested iteration in canonical order yields canonical order directly.
    pts = tuple(x + y for x in a.points for y in b.points)
    return PointSet(a.dim + b.dim, pts)


def growth(a: PointSet, *, strategy: str = "auto", workers: int = 1) -> GrowthCounts:
    """(|A+A|, |A*A|), both exact."""
    if not a.points:
        raise EmptySetError("growth requires a nonempty set")
    return GrowthCounts(
        len(sumset(a, a, strategy=strategy, workers=workers)),
        len(productset(a, a, strategy=strategy, workers=workers)),
    )


def coordinate_stats(a: PointSet) -> CoordinateStats:
    """Distinct-value count plus min/max for every coordinate."""
    if not a.points:
        raise EmptySetError("coordinate_stats requires a nonempty set")
    distinct, minima, maxima = [], [], []
    for j in range(a.dim):
        vals = {p[j] for p in a.points}
        distinct.append(len(vals))
        minima.append(min(vals))
        maxima.append(max(vals))
    return CoordinateStats(tuple(distinct), tuple(minima), tuple(maxima))


# ---------------------------------------------------------------------------
# Text format


def dumps_pointset(ps: PointSet, trailer_comments: Iterable[str] = ()) -> str:
    lines = [POINTSET_HEADER, f"dim {ps.dim}"]
    lines.extend(format_point(p) for p in ps.points)
    lines.extend(f"# {c}" for c in trailer_comments)
    return "\n".join(lines) + "\n"


def loads_pointset(text: str) -> PointSet:
    lines = text.splitlines()
    if not lines or lines[0].strip() != POINTSET_HEADER:
        raise ParseError(f"expected header {POINTSET_HEADER!r}", 1)
    dim = None
    points: list[Point] = []
    seen: dict[Point, int] = {}
    for idx, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if dim is None:
            parts = line.split()
            if len(parts) != 2 or parts[0] != "dim" or not parts[1].isdigit() or int(parts[1]) < 1:
                raise ParseError(f"expected 'dim <d>', got {line!r}", idx)
            dim = int(parts[1])
            continue
        p = parse_point(line, idx)
        if len(p) != dim:
            raise ParseError(f"point has {len(p)} coordinates, expected {dim}", idx)
        if p in seen:
            raise ParseError(f"duplicate point (first seen on line {seen[p]})", idx)
        seen[p] = idx
        points.append(p)
    if dim is None:
        raise ParseError("missing 'dim <d>' line")
    return PointSet(dim, tuple(sorted(points)))


def dump_pointset(ps: PointSet, path: str | Path, trailer_comments: Iterable[str] = ()) -> None:
    Path(path).write_text(dumps_pointset(ps, trailer_comments))


def load_pointset(path: str | Path) -> PointSet:
    return loads_pointset(Path(path).read_text())
