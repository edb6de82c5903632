"""Growth-exponent reports, family sweeps, and the exhaustive extremal search.

The instance exponent delta-hat = log(max(|A+A|, |A*A|)) / log|A| - 1 is a
presentation-level surrogate (the asymptotic statements have no per-instance
exponent); all underlying set sizes are exact integers, and certificates never
consume these floats.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from math import comb

from .decompose import DELTA1_DEFAULT
from .errors import BudgetExceededError, EmptySetError
from .families import FamilySpec, generate
from .matrices import MatSet, mat_growth
from .pointset import PointSet, growth

REPORT_FORMAT = "sumprod-growth-report"
REPORT_VERSION = 1

SEARCH_BUDGET = 10_000_000


def exponent_from_sizes(size: int, sum_size: int, prod_size: int) -> float:
    if size < 2:
        raise ValueError("exponent is defined only for |A| >= 2")
    return math.log(max(sum_size, prod_size)) / math.log(size) - 1.0


def exponent(a: PointSet) -> float:
    """delta-hat of a point set: log(max growth)/log|A| - 1."""
    if len(a) < 2:
        raise ValueError("exponent is defined only for |A| >= 2")
    g = growth(a)
    return exponent_from_sizes(len(a), g.sum_size, g.prod_size)


@dataclass(frozen=True)
class GrowthRow:
    n: int
    size: int
    sum_size: int
    prod_size: int
    max_size: int
    exponent: float | None  # max convention
    exponent_sum: float | None  # |A+A| + |A*A| convention
    sum_ceiling_ok: bool | None  # cn_product only: sum_size <= (9/8) n^3
    prod_ceiling_ok: bool | None  # cn_product only: prod_size <= 2 n^3
    above_theorem_line: bool | None  # delta-hat >= delta1 / d

    def to_json(self) -> dict:
        return {k: v for k, v in self.__dict__.items()}


@dataclass
class GrowthReport:
    family: FamilySpec
    dim: int
    rows: list[GrowthRow]
    references: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "format": REPORT_FORMAT,
            "version": REPORT_VERSION,
            "family": self.family.to_json(),
            "dim": self.dim,
            "references": self.references,
            "rows": [r.to_json() for r in self.rows],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        header = "n,size,sum_size,prod_size,max_size,exponent,exponent_sum"
        lines = [header]
        for r in self.rows:
            exp = "" if r.exponent is None else f"{r.exponent:.6f}"
            exp_s = "" if r.exponent_sum is None else f"{r.exponent_sum:.6f}"
            lines.append(
                f"{r.n},{r.size},{r.sum_size},{r.prod_size},{r.max_size},{exp},{exp_s}"
            )
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        head = f"{'N':>5} {'|A|':>8} {'|A+A|':>10} {'|A.A|':>10} {'max':>10} {'d-hat':>8}"
        lines = [head, "-" * len(head)]
        for r in self.rows:
            exp = "   --" if r.exponent is None else f"{r.exponent:8.4f}"
            lines.append(
                f"{r.n:>5} {r.size:>8} {r.sum_size:>10} {r.prod_size:>10} "
                f"{r.max_size:>10} {exp}"
            )
        refs = self.references
        lines.append(
            f"reference exponents: theorem line 1+delta1/d = {refs['theorem_exponent']:.6f}"
            + (", d=2 ceiling 3/2" if self.dim == 2 else "")
        )
        lines.append("delta-hat is an instance-level surrogate exponent")
        return "\n".join(lines) + "\n"


def sweep(spec: FamilySpec, n_values: list[int]) -> GrowthReport:
    """Exact growth of `spec` at each N, with reference lines for the report."""
    if not n_values:
        raise ValueError("empty N range")
    spec.validate()
    if spec.kind not in ("interval", "geometric", "cn_product", "dn"):
        raise ValueError(f"sweep requires an N-indexed family, not {spec.kind!r}")
    rows = []
    dim = None
    for n in sorted(n_values):
        fam = generate(FamilySpec(kind=spec.kind, n=n))
        if isinstance(fam, MatSet):
            g = mat_growth(fam)
            size, dim = len(fam), fam.d
        else:
            g = growth(fam)
            size, dim = len(fam), fam.dim
        max_size = max(g.sum_size, g.prod_size)
        exp = exponent_from_sizes(size, *g) if size >= 2 else None
        exp_sum = (
            math.log(g.sum_size + g.prod_size) / math.log(size) - 1.0
            if size >= 2
            else None
        )
        sum_ok = prod_ok = None
        if spec.kind == "cn_product":
            sum_ok = 8 * g.sum_size <= 9 * n**3
            prod_ok = g.prod_size <= 2 * n**3
        above = None
        if exp is not None:
            above = exp >= float(DELTA1_DEFAULT) / dim
        rows.append(
            GrowthRow(n, size, g.sum_size, g.prod_size, max_size, exp, exp_sum, sum_ok, prod_ok, above)
        )
    references = {
        "delta1": str(DELTA1_DEFAULT),
        "theorem_exponent": 1.0 + float(DELTA1_DEFAULT) / dim,
        "d2_ceiling_exponent": 1.5 if dim == 2 else None,
        "cn_sum_ceiling_constant": "9/8",
        "cn_prod_ceiling_constant": "2",
    }
    return GrowthReport(spec, dim, rows, references)


# ---------------------------------------------------------------------------
# Exhaustive extremal search


@dataclass(frozen=True)
class SearchResult:
    dim: int
    k: int
    low: int
    high: int
    minimum: int  # min over k-subsets of |S+S| + |S*S|
    minimizers: tuple[tuple[tuple[int, ...], ...], ...]  # all attaining subsets
    subsets_examined: int

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "k": self.k,
            "universe": [self.low, self.high],
            "minimum": self.minimum,
            "minimizers": [[list(p) for p in s] for s in self.minimizers],
            "subsets_examined": self.subsets_examined,
        }


def _naive_growth_total(subset) -> int:
    """Trivially correct growth: direct set comprehensions, no shared code paths."""
    sums = {tuple(x + y for x, y in zip(p, q)) for p in subset for q in subset}
    prods = {tuple(x * y for x, y in zip(p, q)) for p in subset for q in subset}
    return len(sums) + len(prods)


def extremal_search(
    dim: int, k: int, low: int, high: int, budget: int = SEARCH_BUDGET
) -> SearchResult:
    """Minimum of |S+S| + |S*S| over all k-subsets of the integer box [low, high]^dim.

    Plain exhaustive enumeration (the point is to be an oracle, so no pruning);
    C(|box|, k) is checked against the budget before any work happens.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    if low > high:
        raise EmptySetError(f"empty universe [{low}, {high}]")
    universe = sorted(itertools.product(range(low, high + 1), repeat=dim))
    total = comb(len(universe), k)
    if total > budget:
        raise BudgetExceededError(
            f"C({len(universe)}, {k}) = {total} exceeds the budget of {budget}"
        )
    best = None
    minimizers: list = []
    for subset in itertools.combinations(universe, k):
        value = _naive_growth_total(subset)
        if best is None or value < best:
            best = value
            minimizers = [subset]
        elif value == best:
            minimizers.append(subset)
    return SearchResult(dim, k, low, high, best, tuple(minimizers), total)
