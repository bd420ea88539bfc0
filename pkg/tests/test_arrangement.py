import math
import random
from fractions import Fraction

import numpy as np
import pytest

from boxpierce.arrangement import ArrangementDS, BatchSampler, batch_sample, slice_weights
from boxpierce.geom import Box, UsageError, arrangement_vertices, normalize_instance

from conftest import random_boxes
from naive import brute_vertices, naive_weight, vertex_weights
from stats_util import ALPHA, chi2_pvalue


def B(lo, hi):
    return Box(tuple(lo), tuple(hi))


def facet_crossings(ds, u):
    lo, hi = ds.rlo[u], ds.rhi[u]
    per_axis = []
    for a in range(ds.d):
        cs = set()
        for i in range(ds.n):
            if all(ds.blo[i][b] < hi[b] and ds.bhi[i][b] >= lo[b] for b in range(ds.d)):
                for c in (ds.blo[i][a], ds.bhi[i][a]):
                    if lo[a] < c < hi[a]:
                        cs.add(c)
        per_axis.append(len(cs))
    return per_axis


def test_single_box_few_cells():
    ds = ArrangementDS(normalize_instance([B((0, 0), (1, 1))]))
    assert ds.n_cells <= 9
    assert ds.cell_violations() == []


def test_partition_audit_2d():
    inst = normalize_instance(random_boxes(random.Random(1), 100, 2))
    ds = ArrangementDS(inst)
    assert ds.cell_violations() == []
    bound = 2 * math.ceil(math.sqrt(inst.n))
    for u in ds.leaves():
        assert max(facet_crossings(ds, u)) <= bound
    assert ds.height() <= 4 * math.ceil(math.log2(ds.n_cells + 1)) + 4


def test_partition_audit_3d_grid():
    boxes = [B((i, j, k), (i + 1.5, j + 1.5, k + 1.5)) for i in range(3) for j in range(3) for k in range(3)]
    ds = ArrangementDS(normalize_instance(boxes))
    assert ds.cell_violations() == []


def test_empty_active_set():
    inst = normalize_instance(random_boxes(random.Random(2), 5, 2))
    ds = ArrangementDS(inst)
    assert ds.total_weight() == 0 and ds.ds_weight(inst.boxes[0]) == 0


def test_all_active_counts_vertices():
    r = random.Random(3)
    for d in (2, 3):
        inst = normalize_instance(random_boxes(r, 8, d))
        ds = ArrangementDS(inst, activate_all=True)
        V = arrangement_vertices(inst)
        assert ds.total_weight() == len(V)
        for b in inst.boxes:
            assert ds.ds_weight(b) == sum(1 for v in V if b.contains(v))


def test_cell_figure_weights():
    # three vertical piles and two horizontal piles, each doubled once
    R1 = B((-10, 2), (20, 8))
    R2 = B((2, -10), (8, 20))
    R3 = B((3, -10), (9, 20))
    R4 = B((1, -10), (7, 20))
    R5 = B((-10, 3), (20, 9))
    raw = [R1, R2, R3, R4, R5]
    inst = normalize_instance(raw)
    ds = ArrangementDS(inst, activate_all=True)
    for i in range(5):
        ds.ds_double(i)

    def rank(p):
        # p sits on facets: x = R3.lo (or R2.hi), y = R5.lo
        out = []
        for a in range(2):
            owners = [(b.lo[a], nb.lo[a]) for b, nb in zip(raw, inst.boxes)] + [
                (b.hi[a], nb.hi[a]) for b, nb in zip(raw, inst.boxes)]
            out.append(next(n for o, n in owners if o == p[a]))
        return tuple(out)

    p2 = rank((3, 3))
    p1 = rank((8, 3))
    assert ds.ds_weight(B(p2, p2)) == 32
    assert ds.ds_weight(B(p1, p1)) == 16


def test_insert_errors():
    inst = normalize_instance(random_boxes(random.Random(4), 3, 2))
    ds = ArrangementDS(inst)
    ds.ds_insert(0)
    with pytest.raises(UsageError):
        ds.ds_insert(0)
    with pytest.raises(UsageError):
        ds.ds_delete(1)
    with pytest.raises(UsageError):
        ds.ds_halve(0)


@pytest.mark.parametrize("d, n", [(2, 30), (3, 10)])
def test_random_script_against_naive(d, n):
    r = random.Random(5 + d)
    inst = normalize_instance(random_boxes(r, n, d))
    ds = ArrangementDS(inst)
    active = [False] * n
    mult: dict = {}
    for step in range(300 if d == 2 else 150):
        i = r.randrange(n)
        op = r.random()
        if op < 0.3:
            if active[i]:
                ds.ds_delete(i)
            else:
                ds.ds_insert(i)
            active[i] = not active[i]
        elif op < 0.6:
            ds.ds_double(i)
            mult[i] = mult.get(i, 0) + 1
        elif op < 0.75 and mult.get(i):
            ds.ds_halve(i)
            mult[i] -= 1
        q = inst.boxes[r.randrange(n)] if r.random() < 0.7 else None
        if step % 5 == 0:
            assert ds.ds_weight(q) == naive_weight(inst.boxes, active, mult, q)
    assert ds.check_invariants()


def test_sample_single_box_uniform_corners():
    inst = normalize_instance(random_boxes(random.Random(6), 4, 3))
    ds = ArrangementDS(inst)
    ds.ds_insert(2)
    b = inst.boxes[2]
    corners = {tuple(b.hi[a] if (m >> a) & 1 else b.lo[a] for a in range(3)): Fraction(1, 8) for m in range(8)}
    draws = ds.sample_many(np.random.default_rng(0), 40_000)
    assert chi2_pvalue(draws, corners) > ALPHA
    r = random.Random(0)
    assert chi2_pvalue([ds.ds_sample(r) for _ in range(8_000)], corners) > ALPHA


def test_doubling_lone_vertex_doubles_its_frequency():
    inst = normalize_instance([B((0, 0), (4, 4)), B((3, 3), (10, 10)), B((0.5, 0.5), (0.6, 0.6))])
    tiny = inst.boxes[2]
    V = arrangement_vertices(inst)
    # a degenerate query box around one corner of the tiny box holds exactly one vertex
    v = (tiny.lo[0], tiny.lo[1])
    base = vertex_weights(inst.boxes, [True] * 3, {})
    ds2 = ArrangementDS(inst, activate_all=True)
    ds2.ds_double(2)
    w = vertex_weights(inst.boxes, [True] * 3, {2: 1})
    assert w[v] == 2 * base[v]
    tot = sum(w.values())
    probs = {p: x / tot for p, x in w.items()}
    draws = ds2.sample_many(np.random.default_rng(1), 60_000)
    assert chi2_pvalue(draws, probs) > ALPHA
    assert set(V) == set(w)


def test_sample_deterministic():
    inst = normalize_instance(random_boxes(random.Random(7), 10, 2))
    a = ArrangementDS(inst, activate_all=True).sample_many(np.random.default_rng(5), 100)
    b = ArrangementDS(inst, activate_all=True).sample_many(np.random.default_rng(5), 100)
    assert a == b


def test_sample_zero_weight():
    ds = ArrangementDS(normalize_instance([B((0, 0), (1, 1))]))
    with pytest.raises(ValueError):
        ds.ds_sample(random.Random(0))


def _exact_vertex_distribution(inst, mult):
    w = vertex_weights(inst.boxes, [True] * inst.n, mult)
    tot = sum(w.values())
    return {p: x / tot for p, x in w.items()}


def test_batch_slice_marginals_three_boxes():
    inst = normalize_instance(random_boxes(random.Random(8), 3, 2))
    sw = slice_weights(inst, {})
    w = vertex_weights(inst.boxes, [True] * 3, {})
    for c, i, weight in sw:
        assert weight == sum(x for p, x in w.items() if p[1] == c)
    draws = batch_sample(inst, {}, 100_000, np.random.default_rng(9))
    tot = sum(w.values())
    marg = {}
    for p, x in w.items():
        marg[p[1]] = marg.get(p[1], 0) + x / tot
    assert chi2_pvalue([p[1] for p in draws], marg) > ALPHA


def test_batch_doubled_box():
    inst = normalize_instance(random_boxes(random.Random(9), 5, 2))
    mult = {1: 1}
    draws = batch_sample(inst, mult, 60_000, np.random.default_rng(3))
    assert chi2_pvalue(draws, _exact_vertex_distribution(inst, mult)) > ALPHA


def test_batch_3d_matches_exact():
    inst = normalize_instance(random_boxes(random.Random(10), 5, 3))
    mult = {0: 2, 3: 1}
    sampler = BatchSampler(inst)
    draws = sampler.sample(mult, 60_000, np.random.default_rng(4))
    assert chi2_pvalue(draws, _exact_vertex_distribution(inst, mult)) > ALPHA
    # the sweep leaves the structure as it found it
    again = sampler.sample(mult, 60_000, np.random.default_rng(4))
    assert again == draws


def test_batch_zero_draws():
    inst = normalize_instance(random_boxes(random.Random(11), 3, 2))
    assert batch_sample(inst, {}, 0, np.random.default_rng(0)) == []
