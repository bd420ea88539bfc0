"""Implicit weighted arrangement of a fixed universe of boxes.

Space is cut into cells so that, inside every cell, each box of the universe
either covers the cell or is partial along exactly one axis.  The arrangement
vertices inside a cell then form a product set and their doubling weights
factor per axis, so one lazy segment tree per axis and cell suffices.

Cells are half-open on the integer lattice of normalized coordinates
(``[lo, hi)`` per axis, with boxes occupying ``[lo, hi + 1)``), so every
vertex belongs to exactly one cell.

The cells hang off a tree: a balanced tree over slabs of the first axis, each
slab leaf rooting a balanced tree over its slabs on the next axis, and so on.
Every node ``u`` stores ``lam[u]`` (number of update boxes that cover ``u``
but not its parent) and ``om[u]`` (weight of the vertices below ``u`` counting
only update boxes that do not cover ``u``).  Hence the weight of the vertices
below ``u`` is ``om[u]`` times ``2**lam`` summed over ``u`` and its ancestors.
"""

from __future__ import annotations

import math
import random
from typing import Sequence

import numpy as np

from .geom import Box, ProblemInstance, UsageError
from .segtree import EXACT, ExactArith, LazySegTree, arith_for


def _bounds(q) -> tuple:
    if isinstance(q, Box):
        return q.lo, q.hi
    return q


class ArrangementDS:
    """Weight/double/halve/sample/insert/delete over the vertices of the active boxes."""

    def __init__(
        self,
        inst: ProblemInstance,
        arith="exact",
        slab_capacity: int | None = None,
        activate_all: bool = False,
    ) -> None:
        if not inst.normalized:
            raise UsageError("ArrangementDS needs a normalized instance")
        self.inst = inst
        self.d = inst.dimension
        self.n = inst.n
        self.ar = arith_for(arith) if isinstance(arith, str) else arith
        self.blo = [b.lo for b in inst.boxes]
        self.bhi = [b.hi for b in inst.boxes]
        self.index = {b: i for i, b in enumerate(inst.boxes)}
        self.t = slab_capacity or max(1, math.isqrt(max(self.n, 1) - 1) + 1)
        self.mult: dict = {}
        self.active = [False] * self.n
        self._plans: dict = {}
        # node storage
        self.rlo: list = []
        self.rhi: list = []
        self.kids: list = []
        self.lam: list = []
        self.om: list = []
        self.seg: list = []
        self.n_cells = 0
        d = self.d
        if self.n:
            lo = tuple(min(b[a] for b in self.blo) - 1 for a in range(d))
            hi = tuple(max(b[a] for b in self.bhi) + 2 for a in range(d))
        else:
            lo, hi = (0,) * d, (1,) * d
        self.root = self._build(lo, hi, list(range(self.n)), 0)
        if activate_all:
            for i in range(self.n):
                self.ds_insert(i)

    # ------------------------------------------------------------- construction
    def _new_node(self, lo: tuple, hi: tuple, kids: list, seg) -> int:
        u = len(self.rlo)
        self.rlo.append(lo)
        self.rhi.append(hi)
        self.kids.append(kids)
        self.lam.append(0)
        self.om.append(self.ar.zero)
        self.seg.append(seg)
        return u

    def _keep(self, i: int, lo: tuple, hi: tuple) -> bool:
        """Box i intersects the region and is not strictly long there."""
        blo, bhi = self.blo[i], self.bhi[i]
        long_ = True
        for a in range(self.d):
            if blo[a] >= hi[a] or bhi[a] < lo[a]:
                return False
            if not (blo[a] < lo[a] and bhi[a] >= hi[a]):
                long_ = False
        return not long_

    def _combine(self, parts: list, axis: int) -> int:
        if len(parts) == 1:
            return parts[0]
        mid = len(parts) // 2
        left = self._combine(parts[:mid], axis)
        right = self._combine(parts[mid:], axis)
        return self._new_node(self.rlo[left], self.rhi[right], [left, right], None)

    def _pieces(self, lo: tuple, hi: tuple, axis: int, bounds: Sequence[int], boxes: list, nxt) -> int:
        cuts = [lo[axis]] + sorted(bounds) + [hi[axis]]
        parts = []
        for s, e in zip(cuts, cuts[1:]):
            plo = lo[:axis] + (s,) + lo[axis + 1 :]
            phi = hi[:axis] + (e,) + hi[axis + 1 :]
            sub = [i for i in boxes if self._keep(i, plo, phi)]
            parts.append(nxt(plo, phi, sub))
        return self._combine(parts, axis)

    def _build(self, lo: tuple, hi: tuple, boxes: list, level: int) -> int:
        if level == self.d:
            return self._refine(lo, hi, boxes)
        a = level
        must: set = set()
        counted: set = set()
        for i in boxes:
            blo, bhi = self.blo[i], self.bhi[i]
            facet_before = any(
                lo[j] <= blo[j] < hi[j] or lo[j] <= bhi[j] < hi[j] for j in range(a)
            )
            for c in (blo[a], bhi[a] + 1):
                if lo[a] < c < hi[a]:
                    (must if facet_before else counted).add(c)
        chosen = set(must)
        chosen.update(sorted(counted)[self.t :: self.t])
        if not chosen:
            return self._build(lo, hi, boxes, level + 1)
        return self._pieces(lo, hi, a, chosen, boxes, lambda plo, phi, sub: self._build(plo, phi, sub, level + 1))

    def _refine(self, lo: tuple, hi: tuple, boxes: list) -> int:
        d = self.d
        for i in boxes:
            blo, bhi = self.blo[i], self.bhi[i]
            facets = [a for a in range(d) if lo[a] <= blo[a] < hi[a] or lo[a] <= bhi[a] < hi[a]]
            if len(facets) < 2:
                continue
            partial = [a for a in range(d) if lo[a] < blo[a] < hi[a] or lo[a] < bhi[a] + 1 < hi[a]]
            if not partial:
                continue
            j = partial[0]
            cuts = {c for c in (blo[j], bhi[j] + 1) if lo[j] < c < hi[j]}
            return self._pieces(lo, hi, j, cuts, boxes, self._refine)
        return self._make_cell(lo, hi, boxes)

    def _make_cell(self, lo: tuple, hi: tuple, boxes: list) -> int:
        trees = []
        for a in range(self.d):
            coords: set = set()
            for i in boxes:
                for c in (self.blo[i][a], self.bhi[i][a]):
                    if lo[a] <= c < hi[a]:
                        coords.add(c)
            trees.append(LazySegTree(sorted(coords), self.ar))
        self.n_cells += 1
        return self._new_node(lo, hi, [], tuple(trees))

    # ------------------------------------------------------------------ helpers
    def _box_id(self, b) -> int:
        if isinstance(b, (int, np.integer)):
            if not 0 <= b < self.n:
                raise UsageError(f"box index {b} outside the universe")
            return int(b)
        try:
            return self.index[b]
        except KeyError:
            raise UsageError("box is not part of the declared universe") from None

    def _leaf_weight(self, u: int):
        ar = self.ar
        w = ar.one
        for t in self.seg[u]:
            w = ar.mul(w, t.total)
            if ar.is_zero(w):
                return ar.zero
        return w

    def _pull(self, u: int) -> None:
        ar = self.ar
        s = ar.zero
        for c in self.kids[u]:
            s = ar.add(s, ar.shl(self.om[c], self.lam[c]))
        self.om[u] = s

    def _plan(self, i: int) -> list:
        """Cached traversal of universe box ``i``: pre-order entries
        ``(node, parent position, kind, partial ranges)`` with kind 0 for an
        inner node, 1 for a covered node and 2 for a partially covered cell."""
        plan = self._plans.get(i)
        if plan is not None:
            return plan
        blo, bhi = self.blo[i], self.bhi[i]
        rlo, rhi, kids, d = self.rlo, self.rhi, self.kids, self.d
        plan = []

        def rec(u: int, parent: int) -> bool:
            lo, hi = rlo[u], rhi[u]
            covers = True
            for a in range(d):
                if blo[a] >= hi[a] or bhi[a] < lo[a]:
                    return False
                if blo[a] > lo[a] or bhi[a] < hi[a] - 1:
                    covers = False
            if covers:
                plan.append((u, parent, 1, ()))
                return True
            if not kids[u]:
                ranges = tuple(
                    (a,) + self.seg[u][a]._range(blo[a], bhi[a])
                    for a in range(d)
                    if blo[a] > lo[a] or bhi[a] < hi[a] - 1
                )
                plan.append((u, parent, 2, ranges))
                return True
            pos = len(plan)
            plan.append((u, parent, 0, ()))
            hit = False
            for c in kids[u]:
                if rec(c, pos):
                    hit = True
            if not hit:
                plan.pop()
            return hit

        rec(self.root, -1)
        self._plans[i] = plan
        return plan

    def _update(self, i: int, k: int) -> None:
        plan = self._plan(i)
        lam, seg = self.lam, self.seg
        for u, _, kind, ranges in plan:
            if kind == 1:
                lam[u] += k
            elif kind == 2:
                for a, l, r in ranges:
                    seg[u][a]._update(l, r, k)
                self.om[u] = self._leaf_weight(u)
        for u, _, kind, _ in reversed(plan):
            if kind == 0:
                self._pull(u)

    def _plan_weight(self, i: int):
        ar = self.ar
        lam, om, seg = self.lam, self.om, self.seg
        plan = self._plan(i)
        acc = [0] * len(plan)
        s = ar.zero
        for p, (u, parent, kind, ranges) in enumerate(plan):
            e = lam[u] + (acc[parent] if parent >= 0 else 0)
            acc[p] = e
            if kind == 1:
                s = ar.add(s, ar.shl(om[u], e))
            elif kind == 2:
                trees = seg[u]
                ws = [t.total for t in trees]
                for a, l, r in ranges:
                    ws[a] = trees[a].weight_range(l, r)
                w = ar.one
                for x in ws:
                    w = ar.mul(w, x)
                s = ar.add(s, ar.shl(w, e))
        return s

    def _activation_plan(self, i: int) -> list:
        """Cached nodes holding a facet of box ``i``: ``(node, cell coords)`` in
        pre-order, with ``None`` for inner nodes."""
        key = ~i
        plan = self._plans.get(key)
        if plan is not None:
            return plan
        blo, bhi = self.blo[i], self.bhi[i]
        rlo, rhi, kids, d = self.rlo, self.rhi, self.kids, self.d
        plan = []

        def rec(u: int) -> bool:
            lo, hi = rlo[u], rhi[u]
            facet = False
            for a in range(d):
                if blo[a] >= hi[a] or bhi[a] < lo[a]:
                    return False
                if lo[a] <= blo[a] < hi[a] or lo[a] <= bhi[a] < hi[a]:
                    facet = True
            if not facet:
                return False
            if not kids[u]:
                coords = tuple(
                    (a, c) for a in range(d) for c in (blo[a], bhi[a]) if lo[a] <= c < hi[a]
                )
                plan.append((u, coords))
                return True
            pos = len(plan)
            plan.append((u, None))
            hit = False
            for c in kids[u]:
                if rec(c):
                    hit = True
            if not hit:
                plan.pop()
            return hit

        rec(self.root)
        self._plans[key] = plan
        return plan

    def _activate(self, i: int, on: bool) -> None:
        plan = self._activation_plan(i)
        seg = self.seg
        for u, coords in plan:
            if coords is None:
                continue
            for a, c in coords:
                if on:
                    seg[u][a].insert(c)
                else:
                    seg[u][a].delete(c)
            self.om[u] = self._leaf_weight(u)
        for u, coords in reversed(plan):
            if coords is None:
                self._pull(u)

    # --------------------------------------------------------------- operations
    def ds_insert(self, b) -> None:
        i = self._box_id(b)
        if self.active[i]:
            raise UsageError(f"box {i} is already active")
        self.active[i] = True
        self._activate(i, True)

    def ds_delete(self, b) -> None:
        i = self._box_id(b)
        if not self.active[i]:
            raise UsageError(f"box {i} is not active")
        self.active[i] = False
        self._activate(i, False)

    def ds_double(self, b, times: int = 1) -> None:
        i = self._box_id(b)
        if times <= 0:
            return
        self.mult[i] = self.mult.get(i, 0) + times
        self._update(i, times)

    def ds_halve(self, b, times: int = 1) -> None:
        i = self._box_id(b)
        if times <= 0:
            return
        have = self.mult.get(i, 0)
        if have < times:
            raise UsageError(f"box {i} has multiplicity {have}, cannot halve {times} times")
        if have == times:
            del self.mult[i]
        else:
            self.mult[i] = have - times
        self._update(i, -times)

    def total_weight(self):
        return self.ar.shl(self.om[self.root], self.lam[self.root])

    def ds_weight(self, q=None):
        """Total doubling weight of the active-arrangement vertices inside ``q``."""
        if q is None:
            return self.total_weight()
        if isinstance(q, (int, np.integer)) or (isinstance(q, Box) and q in self.index):
            return self._plan_weight(self._box_id(q))
        qlo, qhi = _bounds(q)
        ar = self.ar
        rlo, rhi, kids, d = self.rlo, self.rhi, self.kids, self.d

        def rec(u: int, acc: int):
            lo, hi = rlo[u], rhi[u]
            covers = True
            for a in range(d):
                if qlo[a] >= hi[a] or qhi[a] < lo[a]:
                    return ar.zero
                if qlo[a] > lo[a] or qhi[a] < hi[a] - 1:
                    covers = False
            e = acc + self.lam[u]
            if covers:
                return ar.shl(self.om[u], e)
            if not kids[u]:
                w = ar.one
                for a, tree in enumerate(self.seg[u]):
                    w = ar.mul(w, tree.weight(qlo[a], qhi[a]))
                    if ar.is_zero(w):
                        return ar.zero
                return ar.shl(w, e)
            s = ar.zero
            for c in kids[u]:
                s = ar.add(s, rec(c, e))
            return s

        return rec(self.root, 0)

    def _choose(self, rng: random.Random, weights: list) -> int:
        ar = self.ar
        if isinstance(ar, ExactArith) and all(type(w) is int for w in weights):
            r = rng.randrange(sum(weights))
            for j, w in enumerate(weights):
                if r < w:
                    return j
                r -= w
            return len(weights) - 1
        tot = ar.zero
        for w in weights:
            tot = ar.add(tot, w)
        x = rng.random()
        for j, w in enumerate(weights):
            p = ar.ratio(w, tot)
            if x < p:
                return j
            x -= p
        return max(j for j, w in enumerate(weights) if not ar.is_zero(w))

    def _pieces_of(self, q) -> list:
        """Decompose the vertices inside ``q`` into covered nodes and clipped leaves."""
        ar = self.ar
        out: list = []
        rlo, rhi, kids, d = self.rlo, self.rhi, self.kids, self.d
        if q is None:
            w = self.total_weight()
            if not ar.is_zero(w):
                out.append((self.root, None, w))
            return out
        qlo, qhi = _bounds(q)

        def rec(u: int, acc: int) -> None:
            lo, hi = rlo[u], rhi[u]
            covers = True
            for a in range(d):
                if qlo[a] >= hi[a] or qhi[a] < lo[a]:
                    return
                if qlo[a] > lo[a] or qhi[a] < hi[a] - 1:
                    covers = False
            e = acc + self.lam[u]
            if covers:
                w = ar.shl(self.om[u], e)
                if not ar.is_zero(w):
                    out.append((u, None, w))
                return
            if not kids[u]:
                w = ar.one
                for a, tree in enumerate(self.seg[u]):
                    w = ar.mul(w, tree.weight(qlo[a], qhi[a]))
                if not ar.is_zero(w):
                    out.append((u, (qlo, qhi), ar.shl(w, e)))
                return
            for c in kids[u]:
                rec(c, e)

        rec(self.root, 0)
        return out

    def ds_sample(self, rng: random.Random, q=None) -> tuple:
        """One vertex of V(A) (inside ``q`` if given), drawn proportionally to weight."""
        pieces = self._pieces_of(q)
        if not pieces:
            raise ValueError("cannot sample: zero total weight")
        u, clip, _ = pieces[self._choose(rng, [p[2] for p in pieces])]
        if clip is None:
            while self.kids[u]:
                ks = self.kids[u]
                ws = [self.ar.shl(self.om[c], self.lam[c]) for c in ks]
                u = ks[self._choose(rng, ws)]
            return tuple(t.sample(rng) for t in self.seg[u])
        qlo, qhi = clip
        return tuple(t.sample(rng, qlo[a], qhi[a]) for a, t in enumerate(self.seg[u]))

    def sample_many(self, gen: np.random.Generator, count: int, q=None) -> list:
        """``count`` i.i.d. weighted vertices via multinomial splitting."""
        if count <= 0:
            return []
        ar = self.ar
        pieces = self._pieces_of(q)
        if not pieces:
            raise ValueError("cannot sample: zero total weight")
        tot = ar.zero
        for p in pieces:
            tot = ar.add(tot, p[2])
        probs = np.array([ar.ratio(p[2], tot) for p in pieces])
        counts = gen.multinomial(count, probs / probs.sum())
        out: list = []
        stack = []
        for (u, clip, _), c in zip(pieces, counts):
            if not c:
                continue
            if clip is None:
                stack.append((u, int(c)))
            else:
                qlo, qhi = clip
                self._leaf_draw(gen, u, int(c), qlo, qhi, out)
        while stack:
            u, c = stack.pop()
            ks = self.kids[u]
            if not ks:
                self._leaf_draw(gen, u, c, None, None, out)
                continue
            ws = [ar.shl(self.om[k], self.lam[k]) for k in ks]
            wt = ar.zero
            for w in ws:
                wt = ar.add(wt, w)
            pr = np.array([ar.ratio(w, wt) for w in ws])
            for k, ck in zip(ks, gen.multinomial(c, pr / pr.sum())):
                if ck:
                    stack.append((k, int(ck)))
        return out

    def _leaf_draw(self, gen, u: int, c: int, qlo, qhi, out: list) -> None:
        cols = []
        for a, t in enumerate(self.seg[u]):
            if qlo is None:
                xs = t.sample_many(gen, c)
            else:
                xs = t.sample_many(gen, c, qlo[a], qhi[a])
            cols.append([xs[j] for j in gen.permutation(len(xs))])
        out.extend(zip(*cols))

    # ------------------------------------------------------------------- audits
    def is_leaf(self, u: int) -> bool:
        return not self.kids[u]

    def leaves(self) -> list:
        return [u for u in range(len(self.rlo)) if not self.kids[u]]

    def height(self) -> int:
        def rec(u: int) -> int:
            return 1 + max((rec(c) for c in self.kids[u]), default=0)

        return rec(self.root)

    def check_invariants(self) -> bool:
        """Re-derive every node weight from its children / per-axis trees."""
        ar = self.ar
        exact = isinstance(ar, ExactArith)
        for u in range(len(self.rlo)):
            if self.kids[u]:
                s = ar.zero
                for c in self.kids[u]:
                    s = ar.add(s, ar.shl(self.om[c], self.lam[c]))
            else:
                for t in self.seg[u]:
                    if not t.check_consistency():
                        return False
                s = self._leaf_weight(u)
            if exact:
                if s != self.om[u]:
                    return False
            elif ar.is_zero(s) != ar.is_zero(self.om[u]) or (
                not ar.is_zero(s) and abs(ar.ratio(s, self.om[u]) - 1) > 1e-12
            ):
                return False
        return True

    def cell_violations(self) -> list:
        """Cells where some box with a facet inside is partial along another axis."""
        bad = []
        d = self.d
        for u in self.leaves():
            lo, hi = self.rlo[u], self.rhi[u]
            for i in range(self.n):
                blo, bhi = self.blo[i], self.bhi[i]
                if any(blo[a] >= hi[a] or bhi[a] < lo[a] for a in range(d)):
                    continue
                facets = {a for a in range(d) if lo[a] <= blo[a] < hi[a] or lo[a] <= bhi[a] < hi[a]}
                partial = {a for a in range(d) if lo[a] < blo[a] < hi[a] or lo[a] < bhi[a] + 1 < hi[a]}
                if partial and (facets - partial or len(partial) > 1):
                    bad.append((u, i))
        return bad


class _IntervalWeights:
    """The one-dimensional case of :class:`ArrangementDS` as a single segment tree.

    Vertices of an interval arrangement are the endpoints of the active
    intervals; since normalized endpoints are distinct, activating an
    interval activates its two endpoints, and persistent tags make doubles
    applied before activation count exactly when the interval covering them
    is still active.
    """

    def __init__(self, inst: ProblemInstance, ar) -> None:
        self.boxes = inst.boxes
        coords = sorted(c for b in inst.boxes for c in (b.lo[0], b.hi[0]))
        self.tree = LazySegTree(coords, ar)

    def ds_insert(self, i: int) -> None:
        b = self.boxes[i]
        self.tree.insert(b.lo[0])
        self.tree.insert(b.hi[0])

    def ds_delete(self, i: int) -> None:
        b = self.boxes[i]
        self.tree.delete(b.lo[0])
        self.tree.delete(b.hi[0])

    def ds_double(self, i: int, times: int = 1) -> None:
        b = self.boxes[i]
        self.tree.double(b.lo[0], b.hi[0], times)

    def ds_halve(self, i: int, times: int = 1) -> None:
        b = self.boxes[i]
        self.tree.halve(b.lo[0], b.hi[0], times)

    def ds_weight(self, q):
        lo, hi = _bounds(q)
        return self.tree.weight(lo[0], hi[0])

    def sample_many(self, gen: np.random.Generator, count: int, q) -> list:
        lo, hi = _bounds(q)
        return [(x,) for x in self.tree.sample_many(gen, count, lo[0], hi[0])]


class BatchSampler:
    """Reusable sweep for :func:`batch_sample` on a fixed instance.

    A full sweep inserts, doubles, halves and deletes every box, leaving the
    projected structure exactly as it started, so one structure serves every
    call.
    """

    def __init__(self, inst: ProblemInstance, arith="exact", slab_capacity: int | None = None) -> None:
        self.inst = inst
        self.d = d = inst.dimension
        self.ar = arith_for(arith) if isinstance(arith, str) else arith
        if d == 1:
            self.coords = sorted({c for b in inst.boxes for c in (b.lo[0], b.hi[0])})
            return
        self.proj = ProblemInstance(
            d - 1, [b.project(range(d - 1)) for b in inst.boxes], inst.coordinate_map[: d - 1]
        )
        if d == 2:
            self.ds = _IntervalWeights(self.proj, self.ar)
        else:
            self.ds = ArrangementDS(self.proj, self.ar, slab_capacity)
        last = d - 1
        events = []
        for i, b in enumerate(inst.boxes):
            events.append((b.lo[last], 0, i))
            events.append((b.hi[last], 1, i))
        events.sort()
        self.events = events

    def _sweep(self, mult: dict, visit) -> None:
        ds = self.ds
        for j, (c, kind, i) in enumerate(self.events):
            if kind == 0:
                ds.ds_insert(i)
                if mult.get(i):
                    ds.ds_double(i, mult[i])
            visit(ds, j, c, i)
            if kind == 1:
                if mult.get(i):
                    ds.ds_halve(i, mult[i])
                ds.ds_delete(i)

    def slice_weights(self, mult: dict) -> list:
        out: list = []
        boxes = self.proj.boxes
        self._sweep(mult, lambda ds, j, c, i: out.append(ds.ds_weight(boxes[i])))
        return out

    def sample(self, mult: dict, r: int, gen: np.random.Generator) -> list:
        if r <= 0:
            return []
        ar = self.ar
        if self.d == 1:
            t = LazySegTree(self.coords, ar)
            for c in self.coords:
                t.insert(c)
            for i, k in mult.items():
                if k:
                    b = self.inst.boxes[i]
                    t.double(b.lo[0], b.hi[0], k)
            if ar.is_zero(t.total):
                raise ValueError("cannot sample: zero total weight")
            xs = t.sample_many(gen, r)
            return [(xs[j],) for j in gen.permutation(len(xs))]
        alphas = self.slice_weights(mult)
        tot = ar.zero
        for a in alphas:
            tot = ar.add(tot, a)
        if ar.is_zero(tot):
            raise ValueError("cannot sample: zero total weight")
        probs = np.array([ar.ratio(a, tot) for a in alphas])
        delta = gen.multinomial(r, probs / probs.sum())
        out: list = []
        boxes = self.proj.boxes

        def draw(ds, j, c, i) -> None:
            if delta[j]:
                for p in ds.sample_many(gen, int(delta[j]), boxes[i]):
                    out.append(p + (c,))

        self._sweep(mult, draw)
        return [out[j] for j in gen.permutation(len(out))]


def batch_sample(
    inst: ProblemInstance,
    mult: dict,
    r: int,
    gen: np.random.Generator,
    arith="exact",
    slab_capacity: int | None = None,
) -> list:
    """``r`` i.i.d. vertices of the full arrangement, weighted by the doubling multiset.

    ``mult`` maps box index to multiplicity.  The sweep runs along the last
    axis over an arrangement structure for the projections onto the other
    axes: a first pass records the weight of every event slice, a second pass
    replays the events and draws the allotted samples from each slice.
    """
    return BatchSampler(inst, arith, slab_capacity).sample(mult, r, gen)


def slice_weights(inst: ProblemInstance, mult: dict, arith="exact") -> list:
    """Per-event ``(coordinate, box, weight)`` of the sweep (first pass of ``batch_sample``)."""
    if inst.dimension == 1:
        raise UsageError("slices need d >= 2")
    bs = BatchSampler(inst, arith)
    return [(c, i, w) for (c, _, i), w in zip(bs.events, bs.slice_weights(mult))]
