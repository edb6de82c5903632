"""Sets of d x d rational matrices: exact sum/product sets and condition checks.

Matrix product sets use true row-by-column multiplication, unlike the
componentwise products of point sets; the two agree exactly on diagonal
matrices, which is the bridge (`diag_embed` / `diag_project`) between the
point-set and matrix-set growth statements.

Condition numbers are exact only for diagonal matrices (their singular values
are the absolute diagonal entries).  General matrices go through a
double-precision SVD with a documented tolerance; nothing exact ever depends
on that path.

Text format::

    # matset v1
    dim 2
    1 1/2
    0 1

    1 1
    0 1

one matrix per block of d rows, blocks separated by blank lines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple

import numpy as np

from .errors import (
    DimensionMismatchError,
    EmptySetError,
    ParseError,
    SingularMatrixError,
)
from .exact import format_rational, parse_rational
from .pointset import GrowthCounts, PointSet

Mat = tuple[tuple[Fraction, ...], ...]

MATSET_HEADER = "# matset v1"

NUMERIC_RTOL = 1e-9
NUMERIC_SINGULAR_CUTOFF = 1e-12


def mat_from_rows(rows: Iterable[Iterable]) -> Mat:
    m = tuple(tuple(Fraction(x) for x in row) for row in rows)
    d = len(m)
    if d == 0 or any(len(row) != d for row in m):
        raise ValueError("matrix must be square and nonempty")
    return m


def identity_mat(d: int) -> Mat:
    return tuple(
        tuple(Fraction(1) if i == j else Fraction(0) for j in range(d)) for i in range(d)
    )


def zero_mat(d: int) -> Mat:
    return tuple((Fraction(0),) * d for _ in range(d))


def mat_add(a: Mat, b: Mat) -> Mat:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_sub(a: Mat, b: Mat) -> Mat:
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_mul(a: Mat, b: Mat) -> Mat:
    d = len(a)
    cols = tuple(zip(*b))
    return tuple(
        tuple(sum(x * y for x, y in zip(row, col)) for col in cols) for row in a
    )


def is_diagonal(a: Mat) -> bool:
    return all(a[i][j] == 0 for i in range(len(a)) for j in range(len(a)) if i != j)


def is_symmetric(a: Mat) -> bool:
    return all(a[i][j] == a[j][i] for i in range(len(a)) for j in range(len(a)))


def det(a: Mat) -> Fraction:
    """Exact determinant: cofactor expansion for d <= 4, fraction-free beyond."""
    d = len(a)
    if d <= 4:
        return _det_cofactor(a)
    # Scale to integers, then Bareiss elimination (all divisions exact).
    scale = 1
    for row in a:
        for x in row:
            scale = scale * x.denominator // math.gcd(scale, x.denominator)
    m = [[int(x * scale) for x in row] for row in a]
    return Fraction(_det_bareiss(m), scale**d)


def _det_cofactor(a: Mat) -> Fraction:
    d = len(a)
    if d == 1:
        return a[0][0]
    if d == 2:
        return a[0][0] * a[1][1] - a[0][1] * a[1][0]
    total = Fraction(0)
    for j in range(d):
        if a[0][j] == 0:
            continue
        minor = tuple(row[:j] + row[j + 1 :] for row in a[1:])
        term = a[0][j] * _det_cofactor(minor)
        total += term if j % 2 == 0 else -term
    return total


def _det_bareiss(m: list[list[int]]) -> int:
    n = len(m)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


@dataclass(frozen=True)
class MatSet:
    """Deduplicated set of d x d matrices in row-major lexicographic order."""

    d: int
    mats: tuple[Mat, ...]

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"matrix dimension must be >= 1, got {self.d}")
        prev = None
        for m in self.mats:
            if len(m) != self.d or any(len(row) != self.d for row in m):
                raise DimensionMismatchError(f"matrix is not {self.d}x{self.d}")
            if prev is not None and m <= prev:
                raise ValueError("matrices must be strictly increasing; use MatSet.of")
            prev = m

    @classmethod
    def of(cls, mats: Iterable, d: int | None = None) -> "MatSet":
        coerced = [mat_from_rows(m) for m in mats]
        if d is None:
            if not coerced:
                raise ValueError("dimension required for an empty MatSet")
            d = len(coerced[0])
        return cls(d, tuple(sorted(set(coerced))))

    @classmethod
    def empty(cls, d: int) -> "MatSet":
        return cls(d, ())

    def __len__(self) -> int:
        return len(self.mats)

    def __iter__(self) -> Iterator[Mat]:
        return iter(self.mats)


def _require_compatible(a: MatSet, b: MatSet) -> None:
    if a.d != b.d:
        raise DimensionMismatchError(f"matrix dimensions differ: {a.d} vs {b.d}")
    if not a.mats or not b.mats:
        raise EmptySetError("matrix sumset/productset require nonempty operands")


def mat_sumset(a: MatSet, b: MatSet) -> MatSet:
    _require_compatible(a, b)
    return MatSet(a.d, tuple(sorted({mat_add(x, y) for x in a.mats for y in b.mats})))


def mat_productset(a: MatSet, b: MatSet) -> MatSet:
    _require_compatible(a, b)
    return MatSet(a.d, tuple(sorted({mat_mul(x, y) for x in a.mats for y in b.mats})))


def mat_growth(a: MatSet) -> GrowthCounts:
    if not a.mats:
        raise EmptySetError("mat_growth requires a nonempty set")
    return GrowthCounts(len(mat_sumset(a, a)), len(mat_productset(a, a)))


def diag_embed(ps: PointSet) -> MatSet:
    """Point (a_1..a_d) -> diag(a_1..a_d); preserves both growth counts exactly."""
    if not ps.points:
        raise EmptySetError("diag_embed requires a nonempty set")
    mats = tuple(
        tuple(
            tuple(p[i] if i == j else Fraction(0) for j in range(ps.dim))
            for i in range(ps.dim)
        )
        for p in ps.points
    )
    # Diagonal embedding is monotone w.r.t. both orders, so mats is sorted.
    return MatSet(ps.dim, mats)


def diag_project(ms: MatSet) -> PointSet:
    """Inverse of diag_embed; rejects non-diagonal matrices naming the index."""
    if not ms.mats:
        raise EmptySetError("diag_project requires a nonempty set")
    for idx, m in enumerate(ms.mats):
        if not is_diagonal(m):
            raise ValueError(f"matrix at index {idx} is not diagonal")
    pts = tuple(tuple(m[i][i] for i in range(ms.d)) for m in ms.mats)
    return PointSet(ms.d, pts)


def gen_dn(n: int) -> MatSet:
    """The N unipotent 2x2 matrices [[1, i/N], [0, 1]], i = 1..N."""
    if n < 1:
        raise ValueError(f"N must be >= 1, got {n}")
    mats = [
        (
            (Fraction(1), Fraction(i, n)),
            (Fraction(0), Fraction(1)),
        )
        for i in range(1, n + 1)
    ]
    return MatSet(2, tuple(sorted(mats)))


class InvertibilityCheck(NamedTuple):
    ok: bool
    witness: tuple[Mat, Mat] | None  # a pair with det(a - b) == 0, if any


def pairwise_diff_invertible(a: MatSet) -> InvertibilityCheck:
    """det(x - y) != 0 for all distinct x, y; returns a failing pair otherwise."""
    if not a.mats:
        raise EmptySetError("pairwise_diff_invertible requires a nonempty set")
    mats = a.mats
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            if det(mat_sub(mats[i], mats[j])) == 0:
                return InvertibilityCheck(False, (mats[i], mats[j]))
    return InvertibilityCheck(True, None)


def condition_number(a: Mat, mode: str = "auto") -> Fraction | float:
    """sigma_max / sigma_min.

    Exact for diagonal matrices (max|a_ii| / min|a_ii|); double-precision SVD
    otherwise, raising SingularMatrixError when sigma_min < 1e-12 * sigma_max.
    """
    if mode not in ("auto", "exact", "numeric"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "auto":
        mode = "exact" if is_diagonal(a) else "numeric"
    if mode == "exact":
        if not is_diagonal(a):
            raise ValueError("exact mode requires a diagonal matrix")
        entries = [abs(a[i][i]) for i in range(len(a))]
        if any(e == 0 for e in entries):
            raise SingularMatrixError("zero diagonal entry; condition number undefined")
        return max(entries) / min(entries)
    sigma = np.linalg.svd(np.array(a, dtype=float), compute_uv=False)
    if sigma[0] == 0.0 or sigma[-1] < NUMERIC_SINGULAR_CUTOFF * sigma[0]:
        raise SingularMatrixError("matrix is numerically singular")
    return float(sigma[0] / sigma[-1])


class ConditionCheck(NamedTuple):
    ok: bool
    max_kappa: Fraction | float
    witness: Mat  # the element attaining the largest condition number


def is_well_conditioned(a: MatSet, kappa, mode: str = "auto") -> ConditionCheck:
    """kappa(x) <= kappa for every element; reports the worst element either way.

    Exact condition numbers compare exactly; the double-precision path gets
    the documented 1e-9 relative tolerance.
    """
    if not a.mats:
        raise EmptySetError("is_well_conditioned requires a nonempty set")
    if kappa < 1:
        raise ValueError("kappa must be >= 1")
    worst = None
    worst_mat = None
    for m in a.mats:
        k = condition_number(m, mode)
        if worst is None or k > worst:
            worst, worst_mat = k, m
    if isinstance(worst, Fraction):
        ok = worst <= kappa
    else:
        ok = worst <= float(kappa) * (1.0 + NUMERIC_RTOL)
    return ConditionCheck(ok, worst, worst_mat)


# ---------------------------------------------------------------------------
# Text format


def dumps_matset(ms: MatSet, trailer_comments: Iterable[str] = ()) -> str:
    lines = [MATSET_HEADER, f"dim {ms.d}"]
    for k, m in enumerate(ms.mats):
        if k:
            lines.append("")
        lines.extend(" ".join(format_rational(x) for x in row) for row in m)
    lines.extend(f"# {c}" for c in trailer_comments)
    return "\n".join(lines) + "\n"


def loads_matset(text: str) -> MatSet:
    lines = text.splitlines()
    if not lines or lines[0].strip() != MATSET_HEADER:
        raise ParseError(f"expected header {MATSET_HEADER!r}", 1)
    d = None
    rows: list[tuple[Fraction, ...]] = []
    mats: list[Mat] = []
    seen: dict[Mat, int] = {}

    def close_block(line_no: int):
        if not rows:
            return
        if len(rows) != d:
            raise ParseError(f"matrix block has {len(rows)} rows, expected {d}", line_no)
        m = tuple(rows)
        if m in seen:
            raise ParseError(f"duplicate matrix (first seen near line {seen[m]})", line_no)
        seen[m] = line_no
        mats.append(m)
        rows.clear()

    for idx, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if line.startswith("#"):
            continue
        if not line:
            close_block(idx)
            continue
        if d is None:
            parts = line.split()
            if len(parts) != 2 or parts[0] != "dim" or not parts[1].isdigit() or int(parts[1]) < 1:
                raise ParseError(f"expected 'dim <d>', got {line!r}", idx)
            d = int(parts[1])
            continue
        vals = tuple(parse_rational(t, idx) for t in line.split())
        if len(vals) != d:
            raise ParseError(f"row has {len(vals)} entries, expected {d}", idx)
        rows.append(vals)
    if d is None:
        raise ParseError("missing 'dim <d>' line")
    close_block(len(lines) + 1)
    return MatSet(d, tuple(sorted(mats)))


def dump_matset(ms: MatSet, path: str | Path, trailer_comments: Iterable[str] = ()) -> None:
    Path(path).write_text(dumps_matset(ms, trailer_comments))


def load_matset(path: str | Path) -> MatSet:
    return loads_matset(Path(path).read_text())
