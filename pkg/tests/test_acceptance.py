"""Acceptance suite: one test per criterion, one printed PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines.  Expensive artifacts (the 500-instance certificate batch) are built
once in a module fixture and shared by the criteria that inspect them.
"""

import math
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from sumprod.analysis import extremal_search, sweep
from sumprod.decompose import (
    DELTA1_DEFAULT,
    RichFamily,
    ceil_log2,
    decompose,
    sign_refine,
    verify_disjointness,
)
from sumprod.families import (
    FamilySpec,
    gen_cn,
    gen_geometric,
    gen_interval,
    gen_random_box,
    gen_random_product,
)
from sumprod.matrices import diag_embed, gen_dn, mat_growth
from sumprod.pointset import PointSet, cartesian, growth, productset, sumset


def report(criterion: int, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {criterion:>2}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {criterion}: {detail}"


def test_criterion_1_dn_identity():
    start = time.monotonic()
    for n in range(1, 51):
        assert mat_growth(gen_dn(n)) == (2 * n - 1, 2 * n - 1), f"N={n}"
    elapsed = time.monotonic() - start
    report(1, elapsed < 5.0, f"D_N growth = (2N-1, 2N-1) for N=1..50 in {elapsed:.2f}s (< 5s)")


def test_criterion_2_cartesian_factorization():
    start = time.monotonic()
    for n in range(1, 21):
        a, b = gen_interval(n), gen_geometric(n)
        c = cartesian(a, b)
        ga, gb, gc = growth(a), growth(b), growth(c)
        assert gc.sum_size == ga.sum_size * gb.sum_size, f"N={n}"
        assert gc.prod_size == ga.prod_size * gb.prod_size, f"N={n}"
    elapsed = time.monotonic() - start
    report(2, elapsed < 30.0, f"|C_N op C_N| factorizes for N=1..20 in {elapsed:.2f}s (< 30s)")


def test_criterion_3_example_ceilings():
    for n in range(2, 21):
        g = growth(gen_cn(n))
        assert 8 * g.sum_size <= 9 * n**3, f"sum ceiling at N={n}"
        assert g.prod_size <= 2 * n**3, f"prod ceiling at N={n}"
    report(3, True, "|C_N+C_N| <= (9/8)N^3 and |C_N.C_N| <= 2N^3 for N=2..20, exact")


def test_criterion_4_diagonal_equivalence():
    rng = random.Random(20260808)
    checked = 0
    for i in range(100):
        d = 1 + i % 3
        size = rng.randint(1, 50)
        # The 1-D pool of distinct rationals must exceed the requested size.
        span = 60 if d == 1 else 9
        pts = set()
        while len(pts) < size:
            pts.add(
                tuple(
                    Fraction(rng.randint(-span, span), rng.choice((1, 2, 3)))
                    for _ in range(d)
                )
            )
        ps = PointSet.of(pts)
        assert mat_growth(diag_embed(ps)) == growth(ps), f"instance {i}"
        checked += 1
    report(4, checked == 100, "mat_growth(diag_embed(A)) = growth(A) on 100 seeded sets")


# ---------------------------------------------------------------------------
# Criterion 5 instance batch, shared by criteria 5-8


def _instance_schedule():
    """500 deterministic instances: all d >= 2 generators, |A| <= 400, M in 2..8."""
    instances = []
    for i in range(500):
        m = 2 + i % 7
        seed = 10_000 + i
        kind = i % 5
        if kind == 0:
            ps = gen_cn(2 + i % 6)  # |A| <= 49
        elif kind == 1:
            d = 2 + (i // 5) % 2
            size = 5 + (i * 7) % 116  # 5..120
            ps = gen_random_box(d, size, -8, 8, seed)
        elif kind == 2:
            d = 2 + (i // 5) % 2
            per = (3, 4, 5, 6)[i % 4] if d == 2 else (3, 4, 5)[i % 3]
            ps = gen_random_product(d, per, -9, 9, seed)
        elif kind == 3:
            # Wide-range boxes exercise big coordinates and zeros.
            d = 2 + (i // 5) % 2
            size = 10 + (i * 3) % 91
            ps = gen_random_box(d, size, -(10**4), 10**4, seed)
        else:
            # The large tail, up to the full |A| <= 400 budget.
            if i % 50 == 4:
                ps = gen_random_box(2, 400, -40, 40, seed)
            elif i % 25 == 4:
                ps = gen_random_box(3, 300, -10, 10, seed)
            else:
                ps = gen_random_box(2, 60 + (i * 11) % 200, -20, 20, seed)
        assert len(ps) <= 400
        instances.append((ps, m))
    return instances


@pytest.fixture(scope="module")
def certificate_batch():
    instances = _instance_schedule()
    start = time.monotonic()
    docs = [(ps, m, decompose(ps, m=m)) for ps, m in instances]
    elapsed = time.monotonic() - start
    return docs, elapsed


def _walk(cert):
    yield cert
    if cert.structure is not None:
        for child in cert.structure.children.values():
            yield from _walk(child)


def test_criterion_5_certificate_soundness(certificate_batch):
    docs, elapsed = certificate_batch
    violations = 0
    for ps, m, doc in docs:
        g = growth(ps)
        total = g.sum_size + g.prod_size
        if not doc.valid or doc.lower_bound > total:
            violations += 1
        if (doc.certificate.growth_sum, doc.certificate.growth_prod) != tuple(g):
            violations += 1
    ok = violations == 0 and elapsed < 300.0
    report(
        5,
        ok,
        f"500 certificates valid with L <= |A+A|+|A.A| exactly, "
        f"{violations} violations, {elapsed:.1f}s (< 300s)",
    )


def test_criterion_6_sign_refine_bound(certificate_batch):
    docs, _ = certificate_batch
    for ps, _, doc in docs:
        a1, _ = sign_refine(ps)
        assert len(a1) * 3**ps.dim >= len(ps)
        for node in _walk(doc.certificate):
            if node.refined_size is not None:
                assert node.refined_size * 3**node.dim >= node.size
    report(6, True, "|A1| >= |A| / 3^d exactly on every instance and recursion node")


def test_criterion_7_pigeonhole_masses(certificate_batch):
    docs, _ = certificate_batch
    structure_nodes = 0
    for _, m, doc in docs:
        for node in _walk(doc.certificate):
            if node.branch != "structure":
                continue
            structure_nodes += 1
            s = node.structure
            n1 = node.refined_size
            d = node.dim
            assert Fraction(s.mass_f1) >= Fraction(n1, 10**d), "structure mass"
            assert Fraction(s.mass_f2) >= Fraction(n1, 20**d), "direction mass"
            lhs = len(s.fiber_values) * 2**s.level
            assert lhs * 2 * (ceil_log2(n1) + 1) >= s.mass_f2, "dyadic mass"
    report(
        7,
        structure_nodes > 0,
        f"masses >= |A1|/10^d, >= |A1|/20^d and the dyadic bound on "
        f"{structure_nodes} structure nodes",
    )


def test_criterion_8_disjointness(certificate_batch):
    docs, _ = certificate_batch
    checked = 0
    for _, _, doc in docs:
        for node in _walk(doc.certificate):
            if node.branch != "structure":
                continue
            by_name = {iq.name: iq for iq in node.inequalities}
            assert by_name["fiber_sumsets_disjoint"].verified
            assert by_name["fiber_productsets_disjoint"].verified
            checked += 1

    # Negative control: without sign refinement, product fibers of x = -1 and
    # x = 1 collide in first coordinate 1.
    b1 = PointSet.of([(Fraction(-1), Fraction(1)), (Fraction(-1), Fraction(2))])
    b2 = PointSet.of([(Fraction(1), Fraction(1)), (Fraction(1), Fraction(2))])
    fam = RichFamily(2, (0,), 2, (((Fraction(-1),), b1), ((Fraction(1),), b2)))
    ok_products, overlap = verify_disjointness(fam, "products")
    report(
        8,
        checked > 0 and not ok_products and overlap > 0,
        f"disjointness holds on {checked} structure nodes; "
        f"sign-unrefined counterexample fails with overlap {overlap}",
    )


def test_criterion_9_optimization_identity():
    delta1 = DELTA1_DEFAULT
    assert delta1 == Fraction(1, 3) + Fraction(5, 5277)
    worst = math.inf
    for d in (2, 3, 4):
        for r in range(1, d):
            a = float(delta1 / r)
            b = float(delta1 / (d - r))
            for n in (10, 10**2, 10**3, 10**4):
                # Exact 10^-2 grid over [1, 2n].
                xs = np.arange(100, 200 * n + 1, dtype=np.float64) / 100.0
                f = xs**a + (float(n) ** b) * xs ** (-b)
                bound = float(n) ** (1.0 / (1.0 / a + 1.0 / b))
                ratio = float(f.min()) / bound
                worst = min(worst, ratio)
                assert f.min() >= bound * (1.0 - 1e-9), (d, r, n)
    report(
        9,
        True,
        f"x^dr + n^ddr x^-ddr >= n^(1/(1/dr+1/ddr)) on all grids; worst ratio {worst:.6f}",
    )


def test_criterion_10_oracle_equivalence():
    rng = random.Random(77)
    for i in range(200):
        d = 1 + i % 3
        size = rng.randint(1, 200)
        # The 1-D pool must comfortably exceed the requested size.
        span = 400 if d == 1 else 30
        pts = set()
        while len(pts) < size:
            pts.add(
                tuple(
                    Fraction(rng.randint(-span, span), rng.choice((1, 2, 3)))
                    for _ in range(d)
                )
            )
        a = PointSet.of(pts)
        s = sumset(a, a)
        p = productset(a, a)
        oracle_s = sorted({tuple(x + y for x, y in zip(u, v)) for u in a for v in a})
        oracle_p = sorted({tuple(x * y for x, y in zip(u, v)) for u in a for v in a})
        assert list(s.points) == oracle_s, f"instance {i} sumset"
        assert list(p.points) == oracle_p, f"instance {i} productset"

    result = extremal_search(1, 3, 1, 8)
    assert result.minimum == 11
    report(10, True, "200 oracle matches; extremal_search(d=1,k=3,1..8) = 11")


def test_criterion_11_asymptotic_trend():
    cn_report = sweep(FamilySpec(kind="cn_product", n=2), list(range(2, 21)))
    exps = [row.exponent for row in cn_report.rows]
    assert all(x > y for x, y in zip(exps, exps[1:])), "C_N d-hat not decreasing"
    assert all(0.5 < e <= 0.7 for e in exps), "C_N d-hat outside (1/2, 0.7]"

    dn_report = sweep(FamilySpec(kind="dn", n=2), list(range(2, 51)))
    dn_exps = [row.exponent for row in dn_report.rows]
    assert all(x > y for x, y in zip(dn_exps, dn_exps[1:])), "D_N d-hat not decreasing"
    assert dn_exps[-1] < 0.2
    report(
        11,
        True,
        f"C_N d-hat decreasing in ({exps[-1]:.4f}, {exps[0]:.4f}]; "
        f"D_N d-hat decreasing to {dn_exps[-1]:.4f}",
    )
