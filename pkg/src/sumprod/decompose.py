"""Certified decomposition of a finite rational point set.

``decompose`` runs the inductive sum-product argument on a concrete set and
returns a certificate in which every claimed inequality carries both exact
sides and a verified flag:

1. keep the largest sign-compatibility class (at least a 3^-d fraction);
2. test whether the class mass on rich axis-aligned subspaces reaches the
   structure threshold |A1| / 10^d;
3. structure branch: pick the heaviest direction class (>= |A1| / 20^d),
   dyadically select fibers of comparable size, verify that fiber self-sumsets
   and self-product-sets are pairwise disjoint, and certify two lower bounds -
   the sum of per-fiber growths and 2^I times the base-set growth - recursing
   on one projected fiber and on the base set;
4. unstructured branch: drop all rich-subspace points and read off a line of
   distinct first coordinates of size >= |A'| / M, whose 1-D growth is the
   certified bound.

Every recorded inequality is an exact integer/rational comparison; the final
bound L always satisfies L <= |A+A| + |A*A| and that inequality is itself
recorded and checked.  A certificate with any failed check is marked invalid
with the failing step named - never a silent wrong answer.

Certificates are pure functions of (points, M, constants, exhaustive): all
tie-breaks are lexicographic, so serialized output is byte-stable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .errors import EmptySetError
from .exact import Point, format_point, format_rational, parse_point
from .pointset import GrowthCounts, PointSet, growth, productset, sumset

SIGN_ZERO, SIGN_NEG, SIGN_POS = 0, 1, 2
_SIGN_CHARS = "0-+"

SignPattern = tuple[int, ...]

CERTIFICATE_FORMAT = "sumprod-certificate"
CERTIFICATE_VERSION = 1

DELTA1_DEFAULT = Fraction(1, 3) + Fraction(5, 5277)  # = 588/1759

QUAD_CHECK_BUDGET = 12


@dataclass(frozen=True)
class Constants:
    """Exact constants of the decomposition; defaults follow the source bounds."""

    delta1: Fraction = DELTA1_DEFAULT
    structure_base: int = 10
    pigeonhole_base: int = 20
    sign_class_base: int = 3

    def __post_init__(self):
        if not (0 < self.delta1 < 1):
            raise ValueError(f"delta1 must lie in (0, 1), got {self.delta1}")

    def to_json(self) -> dict:
        return {
            "delta1": format_rational(self.delta1),
            "structure_base": self.structure_base,
            "pigeonhole_base": self.pigeonhole_base,
            "sign_class_base": self.sign_class_base,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Constants":
        return cls(
            delta1=Fraction(obj["delta1"]),
            structure_base=int(obj["structure_base"]),
            pigeonhole_base=int(obj["pigeonhole_base"]),
            sign_class_base=int(obj["sign_class_base"]),
        )


# ---------------------------------------------------------------------------
# Sign refinement


def sign_of(x: Fraction) -> int:
    if x == 0:
        return SIGN_ZERO
    return SIGN_NEG if x < 0 else SIGN_POS


def sign_pattern(p: Point) -> SignPattern:
    return tuple(sign_of(x) for x in p)


def pattern_to_str(pattern: SignPattern) -> str:
    return "".join(_SIGN_CHARS[t] for t in pattern)


def sign_refine(a: PointSet) -> tuple[PointSet, SignPattern]:
    """Largest sign-pattern class (ties: lexicographically smallest pattern).

    Any two members x, y of the result satisfy, coordinatewise, either
    x_i * y_i > 0 or x_i = y_i = 0, so product-set fibers cannot collide
    across distinct fixed values.
    """
    if not a.points:
        raise EmptySetError("sign_refine requires a nonempty set")
    classes: dict[SignPattern, list[Point]] = {}
    for p in a.points:
        classes.setdefault(sign_pattern(p), []).append(p)
    best = min(classes.items(), key=lambda kv: (-len(kv[1]), kv[0]))
    return PointSet(a.dim, tuple(best[1])), best[0]


# ---------------------------------------------------------------------------
# Axis-aligned subspaces and rich families


@dataclass(frozen=True)
class AxisSubspace:
    """X_1 x ... x X_d where each factor is a fixed rational or all of Q."""

    ambient_dim: int
    fixed_coords: tuple[int, ...]  # sorted coordinate indices that are fixed
    fixed_values: tuple[Fraction, ...]

    @property
    def dim(self) -> int:
        return self.ambient_dim - len(self.fixed_coords)

    @property
    def mask(self) -> tuple[bool, ...]:
        fixed = set(self.fixed_coords)
        return tuple(j in fixed for j in range(self.ambient_dim))

    def contains(self, p: Point) -> bool:
        return all(p[c] == v for c, v in zip(self.fixed_coords, self.fixed_values))


@dataclass(frozen=True)
class RichFamily:
    """All rich fibers of one direction class (a common set of fixed coordinates)."""

    ambient_dim: int
    fixed_coords: tuple[int, ...]
    threshold: int  # the M used to call a fiber rich
    members: tuple[tuple[tuple[Fraction, ...], PointSet], ...]  # (fixed values, fiber)

    @property
    def mass(self) -> int:
        return sum(len(f) for _, f in self.members)

    @property
    def free_dim(self) -> int:
        return self.ambient_dim - len(self.fixed_coords)

    def subspaces(self) -> list[AxisSubspace]:
        return [
            AxisSubspace(self.ambient_dim, self.fixed_coords, values)
            for values, _ in self.members
        ]


def _proper_masks(d: int) -> list[tuple[int, ...]]:
    """All fixed-coordinate index sets with 1 <= #fixed <= d-1, in lexicographic order."""
    masks = []
    for code in range(1, 1 << d):
        fixed = tuple(j for j in range(d) if code & (1 << j))
        if 1 <= len(fixed) <= d - 1:
            masks.append(fixed)
    masks.sort()
    return masks


def enumerate_rich(a: PointSet, m: int) -> list[RichFamily]:
    """Group points by fixed-value tuple per direction class; keep fibers of size >= m.

    Only classes owning at least one rich fiber are returned; the list is
    ordered by fixed-coordinate tuple, members by fixed values.
    """
    if not a.points:
        raise EmptySetError("enumerate_rich requires a nonempty set")
    if a.dim < 2:
        raise ValueError("dimension 1 has no proper axis-aligned subspaces")
    if m < 1:
        raise ValueError(f"threshold must be >= 1, got {m}")
    out = []
    for fixed in _proper_masks(a.dim):
        groups: dict[tuple[Fraction, ...], list[Point]] = {}
        for p in a.points:
            groups.setdefault(tuple(p[c] for c in fixed), []).append(p)
        members = tuple(
            (values, PointSet(a.dim, tuple(pts)))
            for values, pts in sorted(groups.items())
            if len(pts) >= m
        )
        if members:
            out.append(RichFamily(a.dim, fixed, m, members))
    return out


def rich_mass(families: Iterable[RichFamily]) -> int:
    """Multiplicity-counted mass: a point contributes once per rich subspace covering it."""
    return sum(f.mass for f in families)


def structure_case(a: PointSet, m: int, structure_base: int = 10) -> bool:
    """True iff the rich mass reaches |A| / structure_base^d (exact comparison)."""
    mass = rich_mass(enumerate_rich(a, m))
    return mass >= Fraction(len(a), structure_base**a.dim)


def select_direction(families: list[RichFamily]) -> RichFamily:
    """Heaviest direction class; ties go to the smallest fixed-coordinate tuple."""
    if not families:
        raise ValueError("select_direction requires at least one rich family")
    return min(families, key=lambda f: (-f.mass, f.fixed_coords))


def ceil_log2(n: int) -> int:
    if n < 1:
        raise ValueError("ceil_log2 requires n >= 1")
    return (n - 1).bit_length()


def dyadic_select(f2: RichFamily, a_size: int) -> tuple[RichFamily, int]:
    """Keep the dyadic size bucket 2^I <= |fiber| < 2^(I+1) of maximal mass.

    Ties prefer the smaller level.  The selection guarantees
    |F3| * 2^I >= mass(F2) / (2 * (ceil(log2 a_size) + 1)).
    """
    if not f2.members:
        raise ValueError("dyadic_select requires a nonempty family")
    buckets: dict[int, list] = {}
    for values, fiber in f2.members:
        buckets.setdefault(len(fiber).bit_length() - 1, []).append((values, fiber))
    level, chosen = min(
        buckets.items(), key=lambda kv: (-sum(len(f) for _, f in kv[1]), kv[0])
    )
    f3 = RichFamily(f2.ambient_dim, f2.fixed_coords, f2.threshold, tuple(chosen))
    return f3, level


def project_fiber(fiber: PointSet, fixed_coords: tuple[int, ...]) -> PointSet:
    """Drop the fixed coordinates; cardinality is preserved.

    The fiber must be constant on every fixed coordinate (corrupt input
    otherwise).
    """
    if not fiber.points:
        raise EmptySetError("project_fiber requires a nonempty fiber")
    for c in fixed_coords:
        if any(p[c] != fiber.points[0][c] for p in fiber.points):
            raise ValueError(f"fiber is not constant on fixed coordinate {c}")
    fixed = set(fixed_coords)
    free = [j for j in range(fiber.dim) if j not in fixed]
    if not free:
        raise ValueError("projection would have dimension 0")
    pts = tuple(sorted(tuple(p[j] for j in free) for p in fiber.points))
    out = PointSet(len(free), pts)
    assert len(out) == len(fiber)
    return out


def base_points(f3: RichFamily) -> PointSet:
    """The fixed-value tuples of F3, one per fiber (|result| = |F3|)."""
    if not f3.members:
        raise ValueError("base_points requires a nonempty family")
    pts = tuple(sorted(values for values, _ in f3.members))
    return PointSet(len(f3.fixed_coords), pts)


# ---------------------------------------------------------------------------
# Disjointness checks


def _self_op_sets(fibers: list[PointSet], mode: str) -> list[PointSet]:
    op = sumset if mode == "sums" else productset
    return [op(f, f) for f in fibers]


def _pairwise_overlap(op_sets: list[PointSet]) -> int:
    """Number of points shared between any two of the given sets."""
    overlap = 0
    seen: dict = {}
    for idx, s in enumerate(op_sets):
        for p in s.points:
            if p in seen and seen[p] != idx:
                overlap += 1
            else:
                seen[p] = idx
    return overlap


def _cross_pair_overlap(
    f3: RichFamily, mode: str, quad_budget: int
) -> int:
    """Sampled quadruple check: when the fixed parts of B_i + B_j and B_k + B_l
    differ, the two mixed sets must be disjoint.  Quadruples are visited in
    lexicographic order up to the budget, so the sample is deterministic."""
    fibers = [fiber for _, fiber in f3.members]
    values = [v for v, _ in f3.members]
    op = sumset if mode == "sums" else productset
    combine = (
        (lambda u, v: tuple(x + y for x, y in zip(u, v)))
        if mode == "sums"
        else (lambda u, v: tuple(x * y for x, y in zip(u, v)))
    )
    m = len(fibers)
    pairs = [(i, j) for i in range(m) for j in range(i, m)]
    overlap = 0
    checked = 0
    for a in range(len(pairs)):
        if checked >= quad_budget:
            break
        for b in range(a + 1, len(pairs)):
            if checked >= quad_budget:
                break
            (i, j), (k, l) = pairs[a], pairs[b]
            if combine(values[i], values[j]) == combine(values[k], values[l]):
                continue
            left = set(op(fibers[i], fibers[j]).points)
            right = set(op(fibers[k], fibers[l]).points)
            overlap += len(left & right)
            checked += 1
    return overlap


def verify_disjointness(
    f3: RichFamily, mode: str, quad_budget: int = QUAD_CHECK_BUDGET
) -> tuple[bool, int]:
    """Exact pairwise disjointness of fiber self-sumsets (or product sets).

    Returns (ok, overlap) where overlap counts points shared between any two
    fiber op-sets, plus overlaps found by the sampled cross-pair check.  For
    products the family is expected to come from a sign-refined set; without
    that refinement the check can and should fail.
    """
    if mode not in ("sums", "products"):
        raise ValueError(f"unknown mode {mode!r}")
    fibers = [fiber for _, fiber in f3.members]
    overlap = _pairwise_overlap(_self_op_sets(fibers, mode))
    overlap += _cross_pair_overlap(f3, mode, quad_budget)
    return overlap == 0, overlap


# ---------------------------------------------------------------------------
# Unstructured branch


def unstructured_extract(
    a: PointSet, m: int, line_coord: int = 0
) -> tuple[PointSet, PointSet]:
    """Remove all rich-subspace points, then read off one coordinate line.

    Returns (A', line) with |line| >= |A'| / m guaranteed: every hyperplane
    {x_c = v} holds fewer than m points of A', else it would have been rich
    and removed.  Raises EmptySetError when A' is empty (cannot happen when
    the structure case failed, but checked).
    """
    families = enumerate_rich(a, m)
    covered = {p for fam in families for _, fiber in fam.members for p in fiber}
    residual = [p for p in a.points if p not in covered]
    if not residual:
        raise EmptySetError("all points covered by rich subspaces (degenerate)")
    a_prime = PointSet(a.dim, tuple(residual))
    line_vals = sorted({p[line_coord] for p in residual})
    line = PointSet(1, tuple((v,) for v in line_vals))
    return a_prime, line


# ---------------------------------------------------------------------------
# Optimization identity


def optimize_bound(
    delta_r: Fraction | float, delta_dr: Fraction | float, n: int
) -> tuple[float, float]:
    """Minimize f(x) = x^dr + n^ddr * x^-ddr over [1, 2n] via the stationary point.

    Checks (to 1e-9 relative) that the minimum dominates
    n^(1 / (1/dr + 1/ddr)), the exponent produced by balancing both terms.
    """
    a, b = float(delta_r), float(delta_dr)
    if not (0 < a < 1 and 0 < b < 1):
        raise ValueError("exponents must lie in (0, 1)")
    if n < 2:
        raise ValueError("n must be >= 2")
    big_k = float(n) ** b
    x_star = (b * big_k / a) ** (1.0 / (a + b))
    x_star = min(max(x_star, 1.0), 2.0 * n)
    min_value = x_star**a + big_k * x_star ** (-b)
    bound = float(n) ** (1.0 / (1.0 / a + 1.0 / b))
    if min_value < bound * (1.0 - 1e-9):
        raise ArithmeticError(
            f"optimization identity violated: {min_value} < {bound}"
        )
    return x_star, min_value


# ---------------------------------------------------------------------------
# Certificates


@dataclass(frozen=True)
class Inequality:
    name: str
    lhs: str  # exact value, canonical rational text
    rhs: str
    relation: str  # one of <=, >=, <, >, ==
    verified: bool

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "relation": self.relation,
            "verified": self.verified,
        }


_RELATIONS = {
    "<=": lambda l, r: l <= r,
    ">=": lambda l, r: l >= r,
    "<": lambda l, r: l < r,
    ">": lambda l, r: l > r,
    "==": lambda l, r: l == r,
}


def _ineq(name: str, lhs, rhs, relation: str) -> Inequality:
    lhs_f, rhs_f = Fraction(lhs), Fraction(rhs)
    return Inequality(
        name,
        format_rational(lhs_f),
        format_rational(rhs_f),
        relation,
        _RELATIONS[relation](lhs_f, rhs_f),
    )


@dataclass
class StructureData:
    fixed_coords: tuple[int, ...]
    mask: tuple[bool, ...]
    free_dim: int
    mass_f1: int
    mass_f2: int
    level: int
    fiber_values: list[str]
    fiber_sizes: list[int]
    fiber_growths: list[tuple[int, int]]
    base_rows: list[str]
    base_growth: tuple[int, int]
    bound_fiber_sum: int
    bound_base: int
    children: dict[str, "Certificate"] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "fixed_coords": list(self.fixed_coords),
            "mask": list(self.mask),
            "free_dim": self.free_dim,
            "mass_f1": self.mass_f1,
            "mass_f2": self.mass_f2,
            "level": self.level,
            "fiber_values": self.fiber_values,
            "fiber_sizes": self.fiber_sizes,
            "fiber_growths": [list(g) for g in self.fiber_growths],
            "base_rows": self.base_rows,
            "base_growth": list(self.base_growth),
            "bound_fiber_sum": self.bound_fiber_sum,
            "bound_base": self.bound_base,
            "children": {k: v.to_json() for k, v in self.children.items()},
        }


@dataclass
class UnstructuredData:
    residual_size: int
    line_coordinate: int
    line_rows: list[str]
    line_growth: tuple[int, int]

    def to_json(self) -> dict:
        return {
            "residual_size": self.residual_size,
            "line_coordinate": self.line_coordinate,
            "line_rows": self.line_rows,
            "line_growth": list(self.line_growth),
        }


@dataclass
class Certificate:
    dim: int
    size: int
    m: int
    branch: str  # base | structure | unstructured
    points: list[str]
    growth_sum: int
    growth_prod: int
    lower_bound: int
    valid: bool
    inequalities: list[Inequality]
    achieved_exponent: float | None
    pattern: str | None = None
    refined_size: int | None = None
    structure: StructureData | None = None
    unstructured: UnstructuredData | None = None
    failure: str | None = None

    @property
    def growth_total(self) -> int:
        return self.growth_sum + self.growth_prod

    def to_json(self) -> dict:
        out = {
            "input": {"dim": self.dim, "size": self.size, "points": self.points},
            "m": self.m,
            "branch": self.branch,
            "growth": {
                "sum": self.growth_sum,
                "prod": self.growth_prod,
                "total": self.growth_total,
            },
            "lower_bound": self.lower_bound,
            "valid": self.valid,
            "achieved_exponent": self.achieved_exponent,
            "inequalities": [iq.to_json() for iq in self.inequalities],
        }
        if self.pattern is not None:
            out["pattern"] = self.pattern
        if self.refined_size is not None:
            out["refined_size"] = self.refined_size
        if self.structure is not None:
            out["structure"] = self.structure.to_json()
        if self.unstructured is not None:
            out["unstructured"] = self.unstructured.to_json()
        if self.failure is not None:
            out["failure"] = self.failure
        return out


@dataclass
class CertificateDocument:
    constants: Constants
    m: int
    exhaustive: bool
    certificate: Certificate

    @property
    def valid(self) -> bool:
        return self.certificate.valid

    @property
    def lower_bound(self) -> int:
        return self.certificate.lower_bound

    def to_json(self) -> dict:
        return {
            "format": CERTIFICATE_FORMAT,
            "version": CERTIFICATE_VERSION,
            "config": {
                "m": self.m,
                "exhaustive": self.exhaustive,
                "constants": self.constants.to_json(),
            },
            "certificate": self.certificate.to_json(),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n"


def _certificate_invalid(cert: Certificate, step: str) -> Certificate:
    cert.valid = False
    cert.failure = step
    return cert


def _decompose_node(
    a: PointSet, m: int, constants: Constants, exhaustive: bool
) -> Certificate:
    g = growth(a)
    gtot = g.sum_size + g.prod_size
    rows = [format_point(p) for p in a.points]

    def finish(cert: Certificate) -> Certificate:
        cert.inequalities.append(
            _ineq("lower_bound_le_growth", cert.lower_bound, gtot, "<=")
        )
        failing = [iq.name for iq in cert.inequalities if not iq.verified]
        children = (
            list(cert.structure.children.values()) if cert.structure is not None else []
        )
        if failing:
            return _certificate_invalid(cert, failing[0])
        bad_child = next((c for c in children if not c.valid), None)
        if bad_child is not None:
            return _certificate_invalid(cert, f"child:{bad_child.failure}")
        cert.valid = True
        return cert

    def exponent_of(bound: int) -> float | None:
        if len(a) < 2 or bound < 1:
            return None
        return math.log(bound) / math.log(len(a))

    if a.dim == 1:
        cert = Certificate(
            dim=1,
            size=len(a),
            m=m,
            branch="base",
            points=rows,
            growth_sum=g.sum_size,
            growth_prod=g.prod_size,
            lower_bound=gtot,
            valid=True,
            inequalities=[],
            achieved_exponent=exponent_of(gtot),
        )
        return finish(cert)

    a1, pattern = sign_refine(a)
    g1 = g if len(a1) == len(a) else growth(a1)
    g1tot = g1.sum_size + g1.prod_size
    ineqs = [
        _ineq(
            "sign_class_bound",
            len(a1),
            Fraction(len(a), constants.sign_class_base**a.dim),
            ">=",
        ),
        _ineq("refined_growth_le_growth", g1tot, gtot, "<="),
    ]

    families = enumerate_rich(a1, m)
    mass1 = rich_mass(families)
    threshold = Fraction(len(a1), constants.structure_base**a.dim)

    if mass1 >= threshold:
        ineqs.append(_ineq("structure_mass", mass1, threshold, ">="))
        f2 = select_direction(families)
        ineqs.append(
            _ineq(
                "direction_mass",
                f2.mass,
                Fraction(len(a1), constants.pigeonhole_base**a.dim),
                ">=",
            )
        )
        f3, level = dyadic_select(f2, len(a1))
        ineqs.append(
            _ineq(
                "dyadic_mass",
                len(f3.members) * 2**level,
                Fraction(f2.mass, 2 * (ceil_log2(len(a1)) + 1)),
                ">=",
            )
        )
        fibers = [fiber for _, fiber in f3.members]
        fiber_sums = _self_op_sets(fibers, "sums")
        fiber_prods = _self_op_sets(fibers, "products")
        sums_overlap = _pairwise_overlap(fiber_sums) + _cross_pair_overlap(
            f3, "sums", QUAD_CHECK_BUDGET
        )
        ineqs.append(_ineq("fiber_sumsets_disjoint", sums_overlap, 0, "=="))
        prods_overlap = _pairwise_overlap(fiber_prods) + _cross_pair_overlap(
            f3, "products", QUAD_CHECK_BUDGET
        )
        ineqs.append(_ineq("fiber_productsets_disjoint", prods_overlap, 0, "=="))

        # Fixed coordinates are constant on a fiber, so the self-op sets have
        # exactly the per-fiber growth counts.
        fiber_growths = [
            GrowthCounts(len(s), len(p)) for s, p in zip(fiber_sums, fiber_prods)
        ]
        bound_a = sum(fg.sum_size + fg.prod_size for fg in fiber_growths)
        ineqs.append(_ineq("fiber_sum_bound", bound_a, g1tot, "<="))

        bprime = base_points(f3)
        gb = growth(bprime)
        bound_b = 2**level * (gb.sum_size + gb.prod_size)
        ineqs.append(_ineq("base_scaled_bound", bound_b, g1tot, "<="))

        # Recurse on the base set and on projected fibers (largest fiber by
        # default, every fiber in exhaustive mode).
        children: dict[str, Certificate] = {}
        children["base"] = _decompose_node(bprime, m, constants, exhaustive)
        if exhaustive:
            for i, (_, fiber) in enumerate(f3.members):
                children[f"fiber_{i}"] = _decompose_node(
                    project_fiber(fiber, f3.fixed_coords), m, constants, exhaustive
                )
        else:
            rep_idx = min(
                range(len(fibers)), key=lambda i: (-len(fibers[i]), f3.members[i][0])
            )
            children["fiber"] = _decompose_node(
                project_fiber(fibers[rep_idx], f3.fixed_coords),
                m,
                constants,
                exhaustive,
            )

        data = StructureData(
            fixed_coords=f3.fixed_coords,
            mask=AxisSubspace(a.dim, f3.fixed_coords, f3.members[0][0]).mask,
            free_dim=f3.free_dim,
            mass_f1=mass1,
            mass_f2=f2.mass,
            level=level,
            fiber_values=[format_point(v) for v, _ in f3.members],
            fiber_sizes=[len(f) for f in fibers],
            fiber_growths=[(fg.sum_size, fg.prod_size) for fg in fiber_growths],
            base_rows=[format_point(p) for p in bprime.points],
            base_growth=(gb.sum_size, gb.prod_size),
            bound_fiber_sum=bound_a,
            bound_base=bound_b,
            children=children,
        )
        lower = max(bound_a, bound_b)
        cert = Certificate(
            dim=a.dim,
            size=len(a),
            m=m,
            branch="structure",
            points=rows,
            growth_sum=g.sum_size,
            growth_prod=g.prod_size,
            lower_bound=lower,
            valid=False,
            inequalities=ineqs,
            achieved_exponent=exponent_of(lower),
            pattern=pattern_to_str(pattern),
            refined_size=len(a1),
            structure=data,
        )
        return finish(cert)

    ineqs.append(_ineq("unstructured_mass", mass1, threshold, "<"))
    try:
        coords = range(a.dim) if exhaustive else (0,)
        best = None
        for c in coords:
            a_prime, line = unstructured_extract(a1, m, line_coord=c)
            gl = growth(line)
            cand = (gl.sum_size + gl.prod_size, -c, a_prime, line, gl, c)
            if best is None or cand[:2] > best[:2]:
                best = cand
        _, _, a_prime, line, gl, line_coord = best
    except EmptySetError:
        cert = Certificate(
            dim=a.dim,
            size=len(a),
            m=m,
            branch="unstructured",
            points=rows,
            growth_sum=g.sum_size,
            growth_prod=g.prod_size,
            lower_bound=0,
            valid=False,
            inequalities=ineqs,
            achieved_exponent=None,
            pattern=pattern_to_str(pattern),
            refined_size=len(a1),
        )
        return _certificate_invalid(cert, "unstructured_residual_empty")

    max_line_count = max(
        len([p for p in a_prime.points if p[line_coord] == v[0]]) for v in line.points
    )
    ineqs.append(_ineq("line_fiber_cap", max_line_count, m, "<"))
    ineqs.append(_ineq("line_pigeonhole", len(line) * m, len(a_prime), ">="))
    lower = gl.sum_size + gl.prod_size
    data = UnstructuredData(
        residual_size=len(a_prime),
        line_coordinate=line_coord,
        line_rows=[format_rational(v[0]) for v in line.points],
        line_growth=(gl.sum_size, gl.prod_size),
    )
    cert = Certificate(
        dim=a.dim,
        size=len(a),
        m=m,
        branch="unstructured",
        points=rows,
        growth_sum=g.sum_size,
        growth_prod=g.prod_size,
        lower_bound=lower,
        valid=False,
        inequalities=ineqs,
        achieved_exponent=exponent_of(lower),
        pattern=pattern_to_str(pattern),
        refined_size=len(a1),
        unstructured=data,
    )
    return finish(cert)


def decompose(
    a: PointSet,
    m: int | None = None,
    constants: Constants | None = None,
    exhaustive: bool = False,
) -> CertificateDocument:
    """Run the full decomposition and return the certified trace.

    ``m`` is the richness threshold (default 2*dim + 2); pushing it past
    roughly sqrt(|A|) only weakens the unstructured branch, so sweeps should
    stay below that.
    """
    if not a.points:
        raise EmptySetError("decompose requires a nonempty set")
    if m is None:
        m = 2 * a.dim + 2
    if m < 2:
        raise ValueError(f"M must be >= 2, got {m}")
    constants = constants or Constants()
    cert = _decompose_node(a, m, constants, exhaustive)
    return CertificateDocument(constants, m, exhaustive, cert)


# ---------------------------------------------------------------------------
# Re-checking


def _check_inequalities(node: dict, path: str) -> list[str]:
    problems = []
    for iq in node.get("inequalities", []):
        lhs, rhs = Fraction(iq["lhs"]), Fraction(iq["rhs"])
        holds = _RELATIONS[iq["relation"]](lhs, rhs)
        if holds != iq["verified"]:
            problems.append(f"{path}: inequality {iq['name']} mis-flagged")
        if not holds:
            problems.append(f"{path}: inequality {iq['name']} does not hold")
    for key, child in (node.get("structure") or {}).get("children", {}).items():
        problems.extend(_check_inequalities(child, f"{path}/{key}"))
    return problems


def verify_certificate(doc: dict | str) -> tuple[bool, str]:
    """Re-verify a serialized certificate.

    Every recorded inequality is re-evaluated from its exact sides, and the
    whole deterministic pipeline is re-run from the recorded input and
    compared byte-for-byte, so any tampering with recorded sizes or bounds is
    caught.
    """
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            return False, f"not valid JSON: {exc}"
    doc = dict(doc)
    doc.pop("run_config", None)  # CLI provenance rides outside the certified payload
    if doc.get("format") != CERTIFICATE_FORMAT:
        return False, f"unknown format {doc.get('format')!r}"
    if doc.get("version") != CERTIFICATE_VERSION:
        return False, f"unsupported version {doc.get('version')!r}"
    try:
        cert = doc["certificate"]
        config = doc["config"]
        constants = Constants.from_json(config["constants"])
        points = PointSet.of(parse_point(row) for row in cert["input"]["points"])
    except (KeyError, ValueError) as exc:
        return False, f"malformed certificate: {exc}"
    if not cert.get("valid", False):
        return False, f"certificate marked invalid (failure: {cert.get('failure')})"
    problems = _check_inequalities(cert, "certificate")
    if problems:
        return False, "; ".join(problems)
    rerun = decompose(
        points, m=config["m"], constants=constants, exhaustive=config["exhaustive"]
    )
    if json.dumps(rerun.to_json(), sort_keys=True) != json.dumps(doc, sort_keys=True):
        return False, "certificate does not match deterministic re-run"
    return True, "certificate valid"
