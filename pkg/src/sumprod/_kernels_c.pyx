# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled pairwise-operation kernel (merge strategy, int64 fast path).

Works on rows of at most 4 coordinates whose values - and whose pairwise
sums/products - fit in int64; the dispatcher in ``sumprod.kernels`` checks
those bounds exactly before routing here.  Rows are padded to fixed-width
``std::array<int64_t, 4>`` so std::sort/std::unique give the lexicographic
order directly.  The O(|A|*|B|) generation loop runs without the GIL, so
thread fan-out in the dispatcher scales.
"""

from libc.stdint cimport int64_t
from libcpp.vector cimport vector
from libcpp.algorithm cimport sort as cpp_sort

cdef extern from "<array>" namespace "std" nogil:
    cdef cppclass Row4 "std::array<int64_t, 4>":
        int64_t& operator[](size_t)
        bint operator<(const Row4&) const
        bint operator==(const Row4&) const

cdef extern from "<algorithm>" namespace "std" nogil:
    # std::unique over the Row4 vector; declared locally because libcpp.algorithm's
    # generic signature does not cover this iterator type cleanly.
    vector[Row4].iterator cpp_unique "std::unique" (
        vector[Row4].iterator, vector[Row4].iterator)

DEF MAX_DIM = 4

OP_ADD = 0
OP_MUL = 1


cdef void _load_rows(list rows, int dim, vector[int64_t]& out) except *:
    cdef Py_ssize_t i, t
    cdef tuple row
    out.resize(len(rows) * MAX_DIM)
    for i in range(len(rows)):
        row = <tuple> rows[i]
        for t in range(dim):
            out[i * MAX_DIM + t] = <int64_t> row[t]
        for t in range(dim, MAX_DIM):
            out[i * MAX_DIM + t] = 0


cdef void _sort_unique(vector[Row4]& v) noexcept nogil:
    cpp_sort(v.begin(), v.end())
    v.erase(cpp_unique(v.begin(), v.end()), v.end())


cdef void _generate(vector[int64_t]& va, vector[int64_t]& vb, int op,
                    Py_ssize_t chunk, vector[Row4]& out) noexcept nogil:
    cdef Py_ssize_t na = va.size() // MAX_DIM
    cdef Py_ssize_t nb = vb.size() // MAX_DIM
    cdef Py_ssize_t i, j, t, compacted
    cdef Row4 r
    cdef vector[Row4] buf
    buf.reserve(min(chunk, na * nb))
    compacted = 0
    for i in range(na):
        for j in range(nb):
            if op == 0:
                for t in range(MAX_DIM):
                    r[t] = va[i * MAX_DIM + t] + vb[j * MAX_DIM + t]
            else:
                for t in range(MAX_DIM):
                    r[t] = va[i * MAX_DIM + t] * vb[j * MAX_DIM + t]
            buf.push_back(r)
            if <Py_ssize_t> buf.size() >= chunk:
                _sort_unique(buf)
                out.insert(out.end(), buf.begin(), buf.end())
                buf.clear()
                # Compact the accumulator once it holds several chunks of
                # cross-chunk duplicates, keeping memory near the dedup size.
                if <Py_ssize_t> out.size() > 4 * chunk + 2 * compacted:
                    _sort_unique(out)
                    compacted = out.size()
    if buf.size() > 0:
        _sort_unique(buf)
        out.insert(out.end(), buf.begin(), buf.end())
    _sort_unique(out)


def pair_op_int64(list a_rows, list b_rows, int dim, int op, Py_ssize_t chunk=1 << 20):
    """Deduplicated sorted pairwise sums/products of int64-safe rows."""
    if dim < 1 or dim > MAX_DIM:
        raise ValueError(f"dim must be in 1..{MAX_DIM}, got {dim}")
    if op != 0 and op != 1:
        raise ValueError(f"unknown op code {op}")
    if chunk < 1024:
        chunk = 1024
    cdef vector[int64_t] va, vb
    _load_rows(a_rows, dim, va)
    _load_rows(b_rows, dim, vb)
    cdef vector[Row4] out
    with nogil:
        _generate(va, vb, op, chunk, out)
    cdef Py_ssize_t i, t
    result = []
    for i in range(<Py_ssize_t> out.size()):
        result.append(tuple([out[i][t] for t in range(dim)]))
    return result
