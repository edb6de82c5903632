"""Pure-Python pairwise-operation kernels.

A kernel takes two lists of equal-length integer tuples ("rows": pre-scaled
rational coordinates) and returns the deduplicated, lexicographically sorted
list of all pairwise componentwise sums or products.  Rows are arbitrary
Python ints, so nothing here can overflow.

Two strategies exist and must be observationally identical:

* ``hash``  - insert result rows into a set while streaming over pairs.
* ``merge`` - fill fixed-size chunks of result rows, sort+dedup each chunk,
  then merge the sorted runs.  Peak memory is one chunk plus the (already
  deduplicated) runs, never the full |A|*|B| pair list.

The compiled backend in ``_kernels_c`` mirrors the merge strategy for rows
that fit machine integers; this module is the reference and the fallback.
"""

from __future__ import annotations

import heapq
from collections.abc import Sequence

Row = tuple[int, ...]

OP_ADD = 0
OP_MUL = 1

DEFAULT_CHUNK = 1 << 18


def pair_op_hash(a_rows: Sequence[Row], b_rows: Sequence[Row], op: int) -> list[Row]:
    """Set-based kernel: dedup happens as pairs are generated."""
    seen: set[Row] = set()
    add = seen.add
    if op == OP_ADD:
        for a in a_rows:
            for b in b_rows:
                add(tuple(x + y for x, y in zip(a, b)))
    elif op == OP_MUL:
        for a in a_rows:
            for b in b_rows:
                add(tuple(x * y for x, y in zip(a, b)))
    else:
        raise ValueError(f"unknown op code {op}")
    return sorted(seen)


def _dedup_sorted(rows: list[Row]) -> list[Row]:
    """Drop consecutive duplicates from a sorted list."""
    out: list[Row] = []
    prev = None
    for r in rows:
        if r != prev:
            out.append(r)
            prev = r
    return out


def _merge_runs(runs: list[list[Row]]) -> list[Row]:
    if len(runs) == 1:
        return runs[0]
    merged: list[Row] = []
    prev = None
    for r in heapq.merge(*runs):
        if r != prev:
            merged.append(r)
            prev = r
    return merged


def pair_op_merge(
    a_rows: Sequence[Row],
    b_rows: Sequence[Row],
    op: int,
    chunk: int = DEFAULT_CHUNK,
) -> list[Row]:
    """Sort-merge kernel: chunked pair generation, per-chunk sort+dedup, k-way merge."""
    if op not in (OP_ADD, OP_MUL):
        raise ValueError(f"unknown op code {op}")
    runs: list[list[Row]] = []
    buf: list[Row] = []

    def flush():
        if buf:
            buf.sort()
            runs.append(_dedup_sorted(buf))
            buf.clear()
        # Collapse runs now and then so memory stays near the deduplicated size.
        if len(runs) > 8:
            runs[:] = [_merge_runs(runs)]

    if op == OP_ADD:
        for a in a_rows:
            for b in b_rows:
                buf.append(tuple(x + y for x, y in zip(a, b)))
                if len(buf) >= chunk:
                    flush()
    else:
        for a in a_rows:
            for b in b_rows:
                buf.append(tuple(x * y for x, y in zip(a, b)))
                if len(buf) >= chunk:
                    flush()
    flush()
    if not runs:
        return []
    return _merge_runs(runs)


def pair_op(
    a_rows: Sequence[Row],
    b_rows: Sequence[Row],
    op: int,
    strategy: str = "hash",
    chunk: int = DEFAULT_CHUNK,
) -> list[Row]:
    if strategy == "hash":
        return pair_op_hash(a_rows, b_rows, op)
    if strategy == "merge":
        return pair_op_merge(a_rows, b_rows, op, chunk)
    raise ValueError(f"unknown strategy {strategy!r}")
