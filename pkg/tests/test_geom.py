import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from boxpierce.geom import (
    Box,
    CapExceeded,
    ProblemInstance,
    UsageError,
    arrangement_vertices,
    contains,
    exact_piercing,
    greedy_disjoint_lower_bound,
    independent,
    normalize_instance,
    prune_redundant,
    verify_piercing,
)

from conftest import random_boxes
from naive import brute_min_piercing, brute_vertices


def B(lo, hi):
    return Box(tuple(lo), tuple(hi))


SQ = B((0, 0), (2, 2))


@pytest.mark.parametrize("p, expected", [((1, 1), True), ((2, 0), True), ((3, 1), False)])
def test_contains_closed(p, expected):
    assert contains(SQ, p) is expected


def test_contains_dimension_mismatch():
    with pytest.raises(UsageError):
        contains(SQ, (1,))


def test_empty_box_rejected():
    with pytest.raises(UsageError):
        B((1,), (0,))


def test_normalize_tied_intervals():
    inst = normalize_instance([B((0,), (5,)), B((0,), (5,))])
    assert [b.lo + b.hi for b in inst.boxes] == [(0, 4), (2, 6)]


def test_normalize_single_interval():
    assert normalize_instance([B((1,), (2,))]).boxes == (B((0,), (2,)),)


def test_normalize_inconsistent_dimension():
    with pytest.raises(UsageError):
        normalize_instance([B((0,), (1,)), B((0, 0), (1, 1))])


def _intersection_graph(boxes):
    return {(i, j) for i, j in itertools.combinations(range(len(boxes)), 2) if boxes[i].intersects(boxes[j])}


def test_normalize_keeps_disjointness():
    raw = [B((0, 0), (1, 1)), B((2, 2), (3, 3))]
    assert _intersection_graph(normalize_instance(raw).boxes) == set()


@given(st.lists(st.tuples(st.integers(0, 6), st.integers(0, 6), st.integers(0, 3), st.integers(0, 3)),
                min_size=1, max_size=8))
def test_normalize_preserves_intersection_graph(raw):
    # integer corners with small spans produce many ties and touching facets
    boxes = [B((x, y), (x + w, y + h)) for x, y, w, h in raw]
    inst = normalize_instance(boxes)
    assert _intersection_graph(inst.boxes) == _intersection_graph(boxes)
    for a in range(2):
        ends = [c for b in inst.boxes for c in (b.lo[a], b.hi[a])]
        assert len(set(ends)) == len(ends) and all(c % 2 == 0 for c in ends)


@given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 3)), min_size=1, max_size=6),
       st.lists(st.integers(-1, 9), min_size=1, max_size=4))
def test_denormalized_points_keep_membership(raw, xs):
    boxes = [B((x,), (x + w,)) for x, w in raw]
    inst = normalize_instance(boxes)
    for c in range(-1, 4 * len(boxes) + 1):
        p = inst.denormalize_point((c,))
        for b, nb in zip(boxes, inst.boxes):
            if nb.contains((c,)):
                assert b.contains(p)


def test_vertices_single_box():
    inst = normalize_instance([B((0, 0), (2, 2))])
    assert arrangement_vertices(inst) == {(0, 0), (0, 2), (2, 0), (2, 2)}


def test_vertices_crossing_rectangles():
    inst = normalize_instance([B((0, 2), (4, 6)), B((2, 0), (6, 4))])
    got = arrangement_vertices(inst)
    assert got == brute_vertices(inst.boxes)
    # 8 corners, 2 of which lie inside the other box, plus 2 facet crossings
    assert len(got) == 8 + 2


def test_vertices_disjoint_boxes():
    inst = normalize_instance([B((0, 0), (1, 1)), B((2, 2), (3, 3))])
    assert len(arrangement_vertices(inst)) == 8


def test_vertices_cap():
    inst = normalize_instance(random_boxes(random.Random(0), 30, 3))
    with pytest.raises(CapExceeded):
        arrangement_vertices(inst, cap=1000)


def test_vertices_match_second_oracle():
    r = random.Random(7)
    for _ in range(40):
        d = r.choice([1, 2, 3])
        inst = normalize_instance(random_boxes(r, r.randint(1, 6), d))
        assert arrangement_vertices(inst) == brute_vertices(inst.boxes)


def test_verify_piercing_examples():
    inst = ProblemInstance(1, [B((0,), (2,))])
    assert verify_piercing(inst, [(1,)]) == []
    inst = ProblemInstance(1, [B((0,), (2,)), B((4,), (6,))])
    assert verify_piercing(inst, [(1,)]) == [B((4,), (6,))]


def test_exact_disjoint_intervals():
    assert exact_piercing(ProblemInstance(1, [B((0,), (2,)), B((4,), (6,))])).size == 2


def test_exact_common_point():
    boxes = [B((-i, -1 - i), (1 + i, i)) for i in range(6)]
    assert exact_piercing(ProblemInstance(2, boxes)).size == 1


def test_exact_grid():
    boxes = [B((2 * i, 2 * j), (2 * i + 1, 2 * j + 1)) for i in range(5) for j in range(5)]
    inst = ProblemInstance(2, boxes)
    assert greedy_disjoint_lower_bound(inst) == 25
    assert independent(boxes)
    sol = exact_piercing(inst)
    assert sol.size == 25 and verify_piercing(inst, sol.points) == []


def test_exact_matches_brute_force():
    r = random.Random(3)
    for _ in range(30):
        d = r.choice([1, 2, 3])
        boxes = random_boxes(r, r.randint(1, 7), d)
        inst = ProblemInstance(d, boxes)
        sol = exact_piercing(inst)
        assert verify_piercing(inst, sol.points) == []
        assert sol.size == brute_min_piercing(normalize_instance(boxes).boxes)
        assert sol.size >= greedy_disjoint_lower_bound(inst)


def test_exact_refuses_large():
    with pytest.raises(CapExceeded):
        exact_piercing(ProblemInstance(1, [B((i,), (i,)) for i in range(41)]))


def test_prune_keeps_validity():
    r = random.Random(4)
    boxes = random_boxes(r, 40, 2)
    inst = ProblemInstance(2, boxes)
    pts = [b.lo for b in boxes] + [b.hi for b in boxes]
    kept = prune_redundant(inst, pts)
    assert verify_piercing(inst, kept) == []
    assert len(kept) <= len(boxes)
