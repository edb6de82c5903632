import json
import math
import random
from fractions import Fraction

import pytest

from sumprod.decompose import (
    Constants,
    RichFamily,
    base_points,
    ceil_log2,
    decompose,
    dyadic_select,
    enumerate_rich,
    optimize_bound,
    project_fiber,
    rich_mass,
    select_direction,
    sign_refine,
    structure_case,
    unstructured_extract,
    verify_certificate,
    verify_disjointness,
)
from sumprod.errors import EmptySetError
from sumprod.families import gen_cn, gen_random_box
from sumprod.pointset import PointSet, growth


def ints(points):
    return PointSet.of([tuple(Fraction(c) for c in p) for p in points])


GRID_2X3 = ints([(x, y) for x in (1, 2) for y in (1, 2, 3)])


class TestSignRefine:
    def test_mixed_signs(self):
        a1, pattern = sign_refine(ints([(1, 1), (-1, 2), (2, 3)]))
        assert set(a1.points) == {(1, 1), (2, 3)}
        assert pattern == (2, 2)  # (+, +)

    def test_all_positive_class_is_whole_set(self):
        a = ints([(1, 2), (3, 4), (5, 6)])
        a1, _ = sign_refine(a)
        assert a1 == a

    def test_zero_class(self):
        a1, pattern = sign_refine(ints([(0, 1), (0, 2), (1, 1)]))
        assert set(a1.points) == {(0, 1), (0, 2)}
        assert pattern == (0, 2)  # (zero, +)

    def test_tie_break_prefers_smallest_pattern(self):
        # Two classes of size 1: (0,+) beats (+,+).
        a1, pattern = sign_refine(ints([(0, 1), (1, 1)]))
        assert pattern == (0, 2)
        assert a1.points == ((0, 1),)

    def test_class_bound(self):
        rng = random.Random(0)
        for _ in range(30):
            d = rng.randint(1, 3)
            a = ints(
                {
                    tuple(rng.randint(-4, 4) for _ in range(d))
                    for _ in range(rng.randint(1, 40))
                }
            )
            a1, _ = sign_refine(a)
            assert len(a1) * 3**d >= len(a)


class TestRichFamilies:
    def test_grid_enumeration(self):
        fams = enumerate_rich(GRID_2X3, 2)
        by_mask = {f.fixed_coords: f for f in fams}
        assert set(by_mask) == {(0,), (1,)}
        assert [len(fib) for _, fib in by_mask[(0,)].members] == [3, 3]
        assert [len(fib) for _, fib in by_mask[(1,)].members] == [2, 2, 2]
        assert rich_mass(fams) == 12
        assert len(by_mask[(0,)].members) + len(by_mask[(1,)].members) == 5

    def test_all_distinct_coordinates_no_rich(self):
        a = ints([(1, 1), (2, 3), (3, 5)])
        assert enumerate_rich(a, 2) == []

    def test_singleton_threshold_one(self):
        fams = enumerate_rich(ints([(1, 2)]), 1)
        assert len(fams) == 2  # both proper masks of d = 2
        assert all(len(f.members) == 1 for f in fams)

    def test_dimension_one_rejected(self):
        with pytest.raises(ValueError):
            enumerate_rich(ints([(1,), (2,)]), 2)

    def test_structure_case(self):
        assert structure_case(GRID_2X3, 2)
        assert not structure_case(ints([(1, 1), (2, 2), (3, 5)]), 2)
        assert structure_case(gen_cn(4), 3)

    def test_select_direction_tie_break(self):
        fams = enumerate_rich(GRID_2X3, 2)
        chosen = select_direction(fams)
        # Masses tie at 6; the smaller fixed-coordinate tuple (0,) wins.
        assert chosen.fixed_coords == (0,)
        assert chosen.mass == 6

    def test_select_direction_cn4(self):
        fams = enumerate_rich(gen_cn(4), 3)
        chosen = select_direction(fams)
        assert chosen.fixed_coords == (0,)
        assert chosen.mass == 16
        assert [len(f) for _, f in chosen.members] == [4, 4, 4, 4]


class TestDyadic:
    def _family(self, sizes):
        members = []
        for k, s in enumerate(sizes):
            fiber = ints([(k, j) for j in range(s)])
            members.append(((Fraction(k),), fiber))
        return RichFamily(2, (0,), 1, tuple(members))

    def test_equal_sizes(self):
        f3, level = dyadic_select(self._family([3, 3]), 6)
        assert level == 1 and len(f3.members) == 2
        assert len(f3.members) * 2**level == 4

    def test_mass_comparison(self):
        f3, level = dyadic_select(self._family([2, 2, 2, 9]), 15)
        assert level == 3
        assert [len(f) for _, f in f3.members] == [9]

    def test_exact_power(self):
        f3, level = dyadic_select(self._family([8]), 8)
        assert level == 3

    def test_tie_prefers_smaller_level(self):
        # Buckets I=1 (masses 2+2) and I=2 (mass 4) tie; smaller level wins.
        f3, level = dyadic_select(self._family([2, 2, 4]), 8)
        assert level == 1
        assert [len(f) for _, f in f3.members] == [2, 2]

    def test_guarantee(self):
        rng = random.Random(1)
        for _ in range(50):
            sizes = [rng.randint(1, 40) for _ in range(rng.randint(1, 12))]
            fam = self._family(sizes)
            a_size = max(2, sum(sizes))
            f3, level = dyadic_select(fam, a_size)
            lhs = len(f3.members) * 2**level
            assert lhs * 2 * (ceil_log2(a_size) + 1) >= fam.mass


class TestProjectionAndBase:
    def test_project(self):
        fiber = ints([(1, 5), (1, 7)])
        proj = project_fiber(fiber, (0,))
        assert [p[0] for p in proj] == [5, 7]

    def test_project_singleton(self):
        assert len(project_fiber(ints([(3, 4)]), (1,))) == 1

    def test_project_preserves_cardinality(self):
        rng = random.Random(2)
        pts = {(5, rng.randint(-20, 20), rng.randint(-20, 20)) for _ in range(15)}
        fiber = ints(pts)
        assert len(project_fiber(fiber, (0,))) == len(fiber)

    def test_project_rejects_corrupt_fiber(self):
        with pytest.raises(ValueError):
            project_fiber(ints([(1, 5), (2, 7)]), (0,))

    def test_base_points(self):
        fams = enumerate_rich(GRID_2X3, 2)
        f2 = select_direction(fams)
        f3, _ = dyadic_select(f2, 6)
        bp = base_points(f3)
        assert bp.dim == 1 and [p[0] for p in bp] == [1, 2]
        assert len(bp) == len(f3.members)


class TestDisjointness:
    def test_parallel_lines_sums_disjoint(self):
        fams = enumerate_rich(GRID_2X3, 2)
        f3, _ = dyadic_select(select_direction(fams), 6)
        ok, overlap = verify_disjointness(f3, "sums")
        assert ok and overlap == 0

    def test_products_need_sign_refinement(self):
        # Fibers x=-1 and x=1: both product fibers have first coordinate 1.
        b1 = ints([(-1, 1), (-1, 2)])
        b2 = ints([(1, 1), (1, 2)])
        fam = RichFamily(
            2, (0,), 2, (((Fraction(-1),), b1), ((Fraction(1),), b2))
        )
        ok, overlap = verify_disjointness(fam, "products")
        assert not ok and overlap > 0
        # The same family passes for sums (fixed parts -2 and 2 differ).
        ok_sums, _ = verify_disjointness(fam, "sums")
        assert ok_sums

    def test_sign_refined_products_disjoint(self):
        rng = random.Random(3)
        for _ in range(20):
            d = rng.randint(2, 3)
            a = ints(
                {
                    tuple(rng.randint(1, 9) for _ in range(d))
                    for _ in range(rng.randint(4, 30))
                }
            )
            a1, _ = sign_refine(a)
            fams = enumerate_rich(a1, 2)
            if not fams:
                continue
            f3, _ = dyadic_select(select_direction(fams), len(a1))
            assert verify_disjointness(f3, "sums")[0]
            assert verify_disjointness(f3, "products")[0]


class TestUnstructured:
    def test_all_singleton_fibers(self):
        a = ints([(1, 1), (2, 3), (3, 7), (4, 15)])
        a_prime, line = unstructured_extract(a, 2)
        assert a_prime == a
        assert [p[0] for p in line] == [1, 2, 3, 4]

    def test_rich_line_removed(self):
        a = ints([(1, 1), (1, 2), (1, 3), (5, 9), (6, 11)])
        a_prime, line = unstructured_extract(a, 3)
        assert set(a_prime.points) == {(5, 9), (6, 11)}
        assert [p[0] for p in line] == [5, 6]

    def test_pigeonhole_bound(self):
        rng = random.Random(4)
        for _ in range(40):
            a = ints(
                {
                    (rng.randint(-9, 9), rng.randint(-9, 9))
                    for _ in range(rng.randint(1, 40))
                }
            )
            m = rng.randint(2, 5)
            try:
                a_prime, line = unstructured_extract(a, m)
            except EmptySetError:
                continue
            assert len(line) * m >= len(a_prime)

    def test_fully_covered_raises(self):
        with pytest.raises(EmptySetError):
            unstructured_extract(GRID_2X3, 2)


class TestOptimizeBound:
    def test_balanced_case_matches_half_exponent(self):
        d1 = Fraction(1, 3) + Fraction(5, 5277)
        for n in (10, 1000):
            x_star, min_value = optimize_bound(d1, d1, n)
            assert abs(x_star - n**0.5) < 1e-6 * n**0.5
            assert min_value >= float(n) ** (float(d1) / 2)

    def test_exact_half_delta1(self):
        d1 = Fraction(1, 3) + Fraction(5, 5277)
        assert d1 == Fraction(588, 1759)
        assert d1 / 2 == Fraction(1764, 10554) == Fraction(294, 1759)

    def test_grid_domination_small(self):
        x_star, min_value = optimize_bound(Fraction(1, 3), Fraction(1, 4), 2)
        x = 1.0
        while x <= 4.0:
            f = x ** (1 / 3) + 2 ** (1 / 4) * x ** (-1 / 4)
            assert f >= min_value - 1e-12 or f >= 2 ** (1 / (3 + 4)) - 1e-9
            x += 0.1

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            optimize_bound(0, Fraction(1, 2), 10)
        with pytest.raises(ValueError):
            optimize_bound(Fraction(1, 2), Fraction(1, 2), 1)


class TestDecompose:
    def test_cn3_structure_branch(self):
        doc = decompose(gen_cn(3), m=2)
        cert = doc.certificate
        assert cert.branch == "structure"
        assert doc.valid
        g = growth(gen_cn(3))
        assert (cert.growth_sum, cert.growth_prod) == tuple(g) == (30, 30)
        assert cert.lower_bound <= 60
        # Three fibers of 3 points each: bound (a) = 3 * (6 + 5) = 33.
        assert cert.structure.bound_fiber_sum == 33
        # I = 1, base {1,2,3}: bound (b) = 2 * (5 + 6) = 22.
        assert cert.structure.level == 1
        assert cert.structure.bound_base == 22
        assert cert.lower_bound == 33

    def test_one_dimensional_base_case(self):
        doc = decompose(ints([(1,), (2,), (3,)]), m=2)
        assert doc.certificate.branch == "base"
        assert doc.certificate.lower_bound == 11
        assert doc.valid

    def test_generic_set_unstructured_branch(self):
        a = ints([(1, 1), (2, 3), (3, 7), (4, 15)])
        doc = decompose(a, m=2)
        cert = doc.certificate
        assert cert.branch == "unstructured"
        assert doc.valid
        assert cert.unstructured.line_rows == ["1", "2", "3", "4"]
        assert cert.lower_bound == 16  # growth({1,2,3,4}) = (7, 9)

    def test_m_default_and_validation(self):
        doc = decompose(gen_cn(2))
        assert doc.m == 2 * 2 + 2
        with pytest.raises(ValueError):
            decompose(gen_cn(2), m=1)
        with pytest.raises(EmptySetError):
            decompose(PointSet.empty(2))

    def test_soundness_randomized(self):
        rng = random.Random(5)
        for _ in range(60):
            d = rng.randint(1, 3)
            a = ints(
                {
                    tuple(rng.randint(-8, 8) for _ in range(d))
                    for _ in range(rng.randint(1, 50))
                }
            )
            m = rng.randint(2, 6)
            doc = decompose(a, m=m)
            assert doc.valid, doc.certificate.failure
            g = growth(a)
            assert doc.lower_bound <= g.sum_size + g.prod_size

    def test_determinism_byte_for_byte(self):
        a = gen_random_box(2, 30, -9, 9, seed=11)
        assert decompose(a, m=3).dumps() == decompose(a, m=3).dumps()

    def test_exhaustive_mode(self):
        doc = decompose(gen_cn(3), m=2, exhaustive=True)
        assert doc.valid
        children = doc.certificate.structure.children
        assert set(children) == {"base", "fiber_0", "fiber_1", "fiber_2"}

    def test_achieved_exponent(self):
        doc = decompose(gen_cn(3), m=2)
        c = doc.certificate
        assert c.achieved_exponent == pytest.approx(math.log(33) / math.log(9))

    def test_recursion_depth_bounded(self):
        a = gen_random_box(3, 60, -4, 4, seed=13)
        doc = decompose(a, m=2)

        def depth(cert):
            if cert.structure is None:
                return 1
            return 1 + max(depth(ch) for ch in cert.structure.children.values())

        assert depth(doc.certificate) <= 3  # d - 1 recursive levels at most
        assert doc.valid


class TestCertificateSerialization:
    def test_round_trip_and_verify(self):
        doc = decompose(gen_cn(3), m=2)
        ok, msg = verify_certificate(doc.dumps())
        assert ok, msg

    def test_tampered_certificate_rejected(self):
        doc = decompose(gen_cn(3), m=2)
        obj = json.loads(doc.dumps())
        obj["certificate"]["lower_bound"] += 1
        ok, msg = verify_certificate(json.dumps(obj))
        assert not ok

    def test_tampered_inequality_rejected(self):
        doc = decompose(gen_cn(3), m=2)
        obj = json.loads(doc.dumps())
        obj["certificate"]["inequalities"][0]["lhs"] = "99999"
        ok, _ = verify_certificate(json.dumps(obj))
        assert not ok

    def test_garbage_rejected(self):
        assert not verify_certificate("not json")[0]
        assert not verify_certificate(json.dumps({"format": "other"}))[0]

    def test_constants_round_trip(self):
        c = Constants()
        assert Constants.from_json(c.to_json()) == c
        assert c.delta1 == Fraction(588, 1759)

    def test_stable_keys(self):
        doc = decompose(gen_cn(2), m=2)
        text = doc.dumps()
        obj = json.loads(text)
        assert json.dumps(obj, sort_keys=True, indent=2) + "\n" == text
