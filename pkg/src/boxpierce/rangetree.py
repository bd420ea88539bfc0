"""Multi-level orthogonal range trees: counting, canonical decomposition, and updates.

Each level is an implicit balanced tree over the points sorted by one axis.  A
node with more than ``leaf_size`` points owns an associated structure on the
next axis; smaller nodes are scanned directly.  The last axis is a plain sorted
array whose implicit segment-tree nodes serve as canonical subsets.

Dynamic updates use the logarithmic method: a stack of static trees with sizes
that are distinct powers of two, plus per-tree tombstones that trigger a
rebuild once they pile up.
"""

from __future__ import annotations

from bisect import bisect_right
from collections import defaultdict
from typing import Iterable, Sequence

import numpy as np

from .geom import Box


def _as_bounds(b, d: int) -> tuple:
    if isinstance(b, Box):
        lo, hi = b.lo, b.hi
    else:
        lo, hi = b
    if len(lo) != d or len(hi) != d:
        raise ValueError(f"query box dimension {len(lo)} does not match tree dimension {d}")
    return lo, hi


class _Level:
    __slots__ = ("axis", "idx", "keys", "m", "P", "assoc", "base", "last")

    def __init__(self, tree: "StaticRangeTree", idx: np.ndarray, axis: int) -> None:
        pts = tree.pts
        order = np.argsort(pts[idx, axis], kind="stable")
        self.idx = idx[order]
        self.keys = pts[self.idx, axis]
        self.axis = axis
        self.m = len(idx)
        P = 1
        while P < self.m:
            P *= 2
        self.P = P
        self.last = axis == tree.d - 1
        self.assoc: dict = {}
        self.base = -1
        if self.last:
            self.base = tree._alloc(2 * P, self)
        else:
            self._build(tree, 1, 0, P)

    def _build(self, tree: "StaticRangeTree", v: int, s: int, e: int) -> None:
        e2 = min(e, self.m)
        if e2 - s <= tree.leaf_size:
            return
        self.assoc[v] = _Level(tree, self.idx[s:e2], self.axis + 1)
        mid = (s + e) // 2
        self._build(tree, 2 * v, s, mid)
        self._build(tree, 2 * v + 1, mid, e)

    def _span(self, v: int) -> tuple:
        depth = v.bit_length() - 1
        width = self.P >> depth
        s = (v - (1 << depth)) * width
        return s, min(s + width, self.m)

    def _nodes(self, pl: int, pr: int) -> list:
        out = []
        l, r = pl + self.P, pr + self.P
        while l < r:
            if l & 1:
                out.append(l)
                l += 1
            if r & 1:
                r -= 1
                out.append(r)
            l >>= 1
            r >>= 1
        return out

    def _positions(self, lo, hi) -> tuple:
        a = self.axis
        return (
            int(np.searchsorted(self.keys, lo[a], "left")),
            int(np.searchsorted(self.keys, hi[a], "right")),
        )

    def _scan(self, tree: "StaticRangeTree", s: int, e: int, lo, hi) -> np.ndarray:
        sub = self.idx[s:e]
        a = self.axis + 1
        pts = tree.pts[sub, a:]
        ok = np.all((pts >= np.asarray(lo[a:])) & (pts <= np.asarray(hi[a:])), axis=1)
        return sub[ok]

    def count(self, tree: "StaticRangeTree", lo, hi) -> int:
        pl, pr = self._positions(lo, hi)
        if pl >= pr:
            return 0
        if self.last:
            return pr - pl
        total = 0
        for v in self._nodes(pl, pr):
            sub = self.assoc.get(v)
            if sub is not None:
                total += sub.count(tree, lo, hi)
            else:
                s, e = self._span(v)
                total += len(self._scan(tree, s, e, lo, hi))
        return total

    def canonical(self, tree: "StaticRangeTree", lo, hi, out: list) -> None:
        pl, pr = self._positions(lo, hi)
        if pl >= pr:
            return
        if self.last:
            out.extend(self.base + v for v in self._nodes(pl, pr))
            return
        for v in self._nodes(pl, pr):
            sub = self.assoc.get(v)
            if sub is not None:
                sub.canonical(tree, lo, hi, out)
            else:
                s, e = self._span(v)
                out.extend(int(i) for i in self._scan(tree, s, e, lo, hi))


class StaticRangeTree:
    """Range tree over a fixed multiset of points."""

    def __init__(self, points: Sequence[Sequence], dim: int | None = None, leaf_size: int = 8) -> None:
        arr = np.asarray(points)
        if arr.size == 0:
            if dim is None:
                raise ValueError("dimension needed for an empty tree")
            arr = np.zeros((0, dim))
        else:
            arr = arr.reshape(len(arr), -1)
        if dim is not None and arr.shape[1] != dim:
            raise ValueError("inconsistent point dimension")
        self.pts = arr
        self.m = len(arr)
        self.d = arr.shape[1]
        self.leaf_size = leaf_size
        self._bases: list = []
        self._levels: list = []
        self._next = self.m  # ids below m are singleton point ids
        self.root = _Level(self, np.arange(self.m), 0)

    def _alloc(self, count: int, level: _Level) -> int:
        b = self._next
        self._next += count
        self._bases.append(b)
        self._levels.append(level)
        return b

    def count(self, b) -> int:
        lo, hi = _as_bounds(b, self.d)
        return self.root.count(self, lo, hi)

    def canonical(self, b) -> list:
        lo, hi = _as_bounds(b, self.d)
        out: list = []
        self.root.canonical(self, lo, hi, out)
        return out

    def subset(self, node_id: int) -> np.ndarray:
        """Indices (into the stored points) of the points in a canonical node."""
        if node_id < self.m:
            return np.array([node_id])
        j = bisect_right(self._bases, node_id) - 1
        lev = self._levels[j]
        v = node_id - self._bases[j]
        s, e = lev._span(v)
        return lev.idx[s:e]

    def report(self, b) -> np.ndarray:
        ids = self.canonical(b)
        if not ids:
            return np.zeros(0, dtype=np.int64)
        return np.concatenate([self.subset(i) for i in ids])


class RangeTree:
    """Dynamic range tree over a multiset of points (logarithmic method)."""

    _ID_SHIFT = 40

    def __init__(self, dim: int, leaf_size: int = 8) -> None:
        self.d = dim
        self.leaf_size = leaf_size
        self._trees: list = []  # entries: [uid, StaticRangeTree, alive(np.bool_), dead list]
        self._where: dict = defaultdict(list)  # point -> [(uid, slot)]
        self._uid = 0
        self.size = 0

    @classmethod
    def build(cls, points: Iterable[Sequence], dim: int | None = None, leaf_size: int = 8) -> "RangeTree":
        pts = [tuple(p) for p in points]
        if dim is None:
            if not pts:
                raise ValueError("dimension needed for an empty tree")
            dim = len(pts[0])
        t = cls(dim, leaf_size)
        for p in pts:
            if len(p) != dim:
                raise ValueError("inconsistent point dimension")
        if pts:
            t._add_tree(pts)
        return t

    # ---------------------------------------------------------------- internals
    def _add_tree(self, pts: list) -> None:
        uid = self._uid
        self._uid += 1
        st = StaticRangeTree(pts, self.d, self.leaf_size)
        entry = [uid, st, np.ones(len(pts), dtype=bool), []]
        self._trees.append(entry)
        for slot, p in enumerate(pts):
            self._where[p].append((uid, slot))
        self.size += len(pts)

    def _drop_tree(self, entry: list) -> list:
        uid, st, alive, _ = entry
        self._trees.remove(entry)
        live = []
        for slot in np.flatnonzero(alive):
            p = tuple(st.pts[slot].tolist())
            live.append(p)
        for slot in range(st.m):
            p = tuple(st.pts[slot].tolist())
            lst = self._where.get(p)
            if lst is not None:
                lst[:] = [x for x in lst if x[0] != uid]
                if not lst:
                    del self._where[p]
        self.size -= len(live)
        return live

    def _live_count(self, entry: list) -> int:
        return int(entry[2].sum())

    # ---------------------------------------------------------------- updates
    def insert_point(self, p: Sequence) -> None:
        p = tuple(p)
        if len(p) != self.d:
            raise ValueError("point dimension mismatch")
        carry = [p]
        # merge trees of size <= carry size (binary counter)
        while True:
            small = [e for e in self._trees if self._live_count(e) <= len(carry)]
            if not small:
                break
            e = min(small, key=self._live_count)
            carry.extend(self._drop_tree(e))
        self._add_tree(carry)

    def delete_point(self, p: Sequence) -> None:
        p = tuple(p)
        lst = self._where.get(p)
        if not lst:
            raise KeyError(f"point {p} is not stored")
        uid, slot = lst.pop()
        if not lst:
            del self._where[p]
        entry = next(e for e in self._trees if e[0] == uid)
        entry[2][slot] = False
        entry[3].append(p)
        self.size -= 1
        if len(entry[3]) > max(4, entry[1].m // 4):
            live = self._drop_tree(entry)
            if live:
                self._add_tree(live)

    def purge(self) -> None:
        """Rebuild every tree holding tombstones so canonical queries are exact."""
        for e in [e for e in self._trees if e[3]]:
            live = self._drop_tree(e)
            if live:
                self._add_tree(live)

    # ---------------------------------------------------------------- queries
    def query_count(self, b) -> int:
        lo, hi = _as_bounds(b, self.d)
        total = 0
        for _, st, _, dead in self._trees:
            total += st.root.count(st, lo, hi)
            if dead:
                arr = np.asarray(dead)
                total -= int(np.all((arr >= np.asarray(lo)) & (arr <= np.asarray(hi)), axis=1).sum())
        return total

    def query_canonical(self, b) -> list:
        """Disjoint canonical node ids whose union is exactly the points in ``b``."""
        lo, hi = _as_bounds(b, self.d)
        self.purge()
        out = []
        for uid, st, _, _ in self._trees:
            for i in st.canonical((lo, hi)):
                out.append((uid << self._ID_SHIFT) | i)
        return out

    def node_points(self, node_id: int) -> list:
        uid = node_id >> self._ID_SHIFT
        local = node_id & ((1 << self._ID_SHIFT) - 1)
        entry = next(e for e in self._trees if e[0] == uid)
        st = entry[1]
        return [tuple(st.pts[i].tolist()) for i in st.subset(local)]

    def node_size(self, node_id: int) -> int:
        uid = node_id >> self._ID_SHIFT
        local = node_id & ((1 << self._ID_SHIFT) - 1)
        entry = next(e for e in self._trees if e[0] == uid)
        return len(entry[1].subset(local))

    def points(self) -> list:
        out = []
        for _, st, alive, _ in self._trees:
            out.extend(tuple(st.pts[i].tolist()) for i in np.flatnonzero(alive))
        return out

    def __len__(self) -> int:
        return self.size


def build(points: Iterable[Sequence], dim: int | None = None) -> RangeTree:
    return RangeTree.build(points, dim)


def query_count(t: RangeTree, b) -> int:
    return t.query_count(b)


def query_canonical(t: RangeTree, b) -> list:
    return t.query_canonical(b)


def insert_point(t: RangeTree, p: Sequence) -> None:
    t.insert_point(p)


def delete_point(t: RangeTree, p: Sequence) -> None:
    t.delete_point(p)
