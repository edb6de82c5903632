"""Constructors for the named extremal families and seeded random test families.

Every random family is a pure function of its FamilySpec: the PRNG is Python's
Mersenne Twister (``random.Random``) keyed by the 64-bit seed in the spec, and
that spec travels in output headers, so any experiment replays bit-exactly.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import asdict, dataclass
from fractions import Fraction

from .errors import EmptySetError
from .matrices import MatSet, gen_dn
from .pointset import PointSet, cartesian

PRNG_NAME = "mt19937"

POINT_KINDS = ("interval", "geometric", "cn_product", "random_box", "random_product", "custom")
MATRIX_KINDS = ("dn",)
KINDS = POINT_KINDS + MATRIX_KINDS


@dataclass(frozen=True)
class FamilySpec:
    """Replayable description of a generated family."""

    kind: str
    n: int | None = None  # N for interval / geometric / cn_product / dn
    dim: int | None = None  # ambient dimension (random kinds)
    size: int | None = None  # points per set (random_box) or per factor (random_product)
    low: int | None = None  # integer box bounds, inclusive
    high: int | None = None
    seed: int | None = None
    points: tuple[str, ...] | None = None  # custom: explicit "a b c" rows

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown family kind {self.kind!r}; expected one of {KINDS}")
        if self.kind in ("interval", "geometric", "cn_product", "dn"):
            if self.n is None or self.n < 1:
                raise ValueError(f"family {self.kind!r} requires n >= 1")
        elif self.kind in ("random_box", "random_product"):
            for field in ("dim", "size", "low", "high", "seed"):
                if getattr(self, field) is None:
                    raise ValueError(f"family {self.kind!r} requires {field}")
            if self.dim < 1 or self.size < 1:
                raise ValueError("dim and size must be >= 1")
            if self.low > self.high:
                raise ValueError(f"empty range [{self.low}, {self.high}]")
        elif self.kind == "custom":
            if not self.points:
                raise ValueError("custom family requires points")

    def to_json(self) -> dict:
        d = asdict(self)
        out = {k: v for k, v in d.items() if v is not None}
        if "points" in out:
            out["points"] = list(out["points"])
        if self.kind in ("random_box", "random_product"):
            out["prng"] = PRNG_NAME
        return out

    @classmethod
    def from_json(cls, obj: dict | str) -> "FamilySpec":
        if isinstance(obj, str):
            obj = json.loads(obj)
        obj = dict(obj)
        obj.pop("prng", None)
        if "points" in obj and obj["points"] is not None:
            obj["points"] = tuple(obj["points"])
        spec = cls(**obj)
        spec.validate()
        return spec


def gen_interval(n: int) -> PointSet:
    """A_N = {1, 2, ..., N} in Q^1."""
    if n < 1:
        raise ValueError(f"N must be >= 1, got {n}")
    return PointSet(1, tuple((Fraction(i),) for i in range(1, n + 1)))


def gen_geometric(n: int) -> PointSet:
    """B_N = {2, 4, ..., 2^N} in Q^1 (exact arbitrary-precision powers)."""
    if n < 1:
        raise ValueError(f"N must be >= 1, got {n}")
    return PointSet(1, tuple((Fraction(2**i),) for i in range(1, n + 1)))


def gen_cn(n: int) -> PointSet:
    """C_N = A_N x B_N in Q^2, |C_N| = N^2."""
    return cartesian(gen_interval(n), gen_geometric(n))


def _sample_box(rng: random.Random, dim: int, size: int, low: int, high: int) -> PointSet:
    span = high - low + 1
    cardinality = span**dim
    if size > cardinality:
        raise ValueError(
            f"requested {size} points but the box holds only {cardinality}"
        )
    if cardinality <= 1 << 20:
        population = list(itertools.product(range(low, high + 1), repeat=dim))
        chosen = rng.sample(population, size)
    else:
        seen: set[tuple[int, ...]] = set()
        while len(seen) < size:
            seen.add(tuple(rng.randint(low, high) for _ in range(dim)))
        chosen = sorted(seen)
    return PointSet.of([tuple(Fraction(c) for c in p) for p in chosen])


def gen_random_box(dim: int, size: int, low: int, high: int, seed: int) -> PointSet:
    """`size` distinct points of the integer box [low, high]^dim, seeded."""
    return _sample_box(random.Random(seed), dim, size, low, high)


def gen_random_product(dim: int, size: int, low: int, high: int, seed: int) -> PointSet:
    """Cartesian product of `dim` seeded 1-D random sets of `size` points each."""
    rng = random.Random(seed)
    subseeds = [rng.getrandbits(64) for _ in range(dim)]
    factors = [gen_random_box(1, size, low, high, s) for s in subseeds]
    out = factors[0]
    for f in factors[1:]:
        out = cartesian(out, f)
    return out


def generate(spec: FamilySpec) -> PointSet | MatSet:
    """Materialize a FamilySpec; PointSet for point kinds, MatSet for `dn`."""
    spec.validate()
    if spec.kind == "interval":
        return gen_interval(spec.n)
    if spec.kind == "geometric":
        return gen_geometric(spec.n)
    if spec.kind == "cn_product":
        return gen_cn(spec.n)
    if spec.kind == "random_box":
        return gen_random_box(spec.dim, spec.size, spec.low, spec.high, spec.seed)
    if spec.kind == "random_product":
        return gen_random_product(spec.dim, spec.size, spec.low, spec.high, spec.seed)
    if spec.kind == "dn":
        return gen_dn(spec.n)
    if spec.kind == "custom":
        from .exact import parse_point

        pts = [parse_point(row) for row in spec.points]
        if not pts:
            raise EmptySetError("custom family has no points")
        return PointSet.of(pts)
    raise AssertionError(f"unreachable kind {spec.kind!r}")
