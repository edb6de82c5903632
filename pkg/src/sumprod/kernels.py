"""Kernel dispatch: compiled fast path when possible, pure Python otherwise.

The public entry point is :func:`pair_op`.  It selects a backend per call:

* the compiled merge kernel (``sumprod._kernels_c``) when it imported, the
  rows have at most 4 coordinates, and every input and result value provably
  fits in int64 (checked exactly with Python ints up front);
* the pure-Python backend (``sumprod._kernels_py``) otherwise, or always when
  the ``SUMPROD_PURE_PY`` environment variable is set.

``strategy`` is a tuning flag only; every routing produces the identical
sorted, deduplicated row list.  ``workers`` > 1 partitions the second operand
across threads and merges the sorted partial results, which is bit-identical
to the sequential run by construction.
"""

from __future__ import annotations

import heapq
import os
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor

from . import _kernels_py
from ._kernels_py import OP_ADD, OP_MUL

try:  # pragma: no cover - exercised only when the extension is built
    from . import _kernels_c
except ImportError:  # pragma: no cover
    _kernels_c = None

Row = tuple[int, ...]

_INT64_SAFE = 1 << 62
_FAST_MAX_DIM = 4


def compiled_available() -> bool:
    return _kernels_c is not None and not _force_pure()


def _force_pure() -> bool:
    return bool(os.environ.get("SUMPROD_PURE_PY"))


def backend_info() -> dict:
    """Describe the active configuration (for provenance and the benchmark)."""
    return {
        "compiled": _kernels_c is not None,
        "forced_pure": _force_pure(),
    }


def _max_abs(rows) -> int:
    m = 0
    for row in rows:
        for v in row:
            if v > m:
                m = v
            elif -v > m:
                m = -v
    return m


def _int64_safe(a_rows, b_rows, dim: int, op: int) -> bool:
    if dim > _FAST_MAX_DIM:
        return False
    ma = _max_abs(a_rows)
    mb = _max_abs(b_rows)
    if op == OP_ADD:
        return ma + mb < _INT64_SAFE
    return ma * mb < _INT64_SAFE


def _pair_op_single(a_rows, b_rows, dim, op, strategy, chunk) -> list[Row]:
    if strategy not in ("auto", "hash", "merge"):
        raise ValueError(f"unknown strategy {strategy!r}")
    use_compiled = (
        compiled_available()
        and strategy in ("auto", "merge")
        and _int64_safe(a_rows, b_rows, dim, op)
    )
    if use_compiled:
        return _kernels_c.pair_op_int64(list(a_rows), list(b_rows), dim, op, chunk)
    if strategy == "merge":
        return _kernels_py.pair_op_merge(a_rows, b_rows, op, chunk)
    return _kernels_py.pair_op_hash(a_rows, b_rows, op)


def _merge_sorted_unique(parts: list[list[Row]]) -> list[Row]:
    if len(parts) == 1:
        return parts[0]
    out: list[Row] = []
    prev = None
    for r in heapq.merge(*parts):
        if r != prev:
            out.append(r)
            prev = r
    return out


def pair_op(
    a_rows: Sequence[Row],
    b_rows: Sequence[Row],
    dim: int,
    op: int,
    *,
    strategy: str = "auto",
    workers: int = 1,
    chunk: int = 1 << 20,
) -> list[Row]:
    """Sorted, deduplicated pairwise componentwise sums (OP_ADD) or products (OP_MUL)."""
    if not a_rows or not b_rows:
        return []
    workers = max(1, int(workers))
    # Below ~2^16 pairs the thread fan-out costs more than it saves.
    if workers == 1 or len(a_rows) * len(b_rows) < (1 << 16) or len(b_rows) < workers:
        return _pair_op_single(a_rows, b_rows, dim, op, strategy, chunk)
    step = (len(b_rows) + workers - 1) // workers
    slices = [b_rows[i : i + step] for i in range(0, len(b_rows), step)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(
            pool.map(
                lambda s: _pair_op_single(a_rows, s, dim, op, strategy, chunk), slices
            )
        )
    return _merge_sorted_unique(parts)
