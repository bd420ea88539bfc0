"""Weak epsilon-nets for boxes.

Pipeline used by the MWU solvers (``weak_net_for_boxes``): draw a weighted
sample, replace coordinates by per-axis ranks, shrink every box to the rank
grid, hit most boxes with a second small sample, and repair the rest through
a dyadic witness cell and a corner-anchored crate inside it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Sequence

import numpy as np

from .geom import Box
from .classic import dnc_pierce_boxes


class SamplingFailure(RuntimeError):
    """A supposedly heavy box kept no sample point after reduction."""

    def __init__(self, boxes: list) -> None:
        super().__init__(f"{len(boxes)} heavy box(es) lost all sample points")
        self.boxes = boxes


# --------------------------------------------------------------------- sampling
class WeightedPoints:
    """Explicit weighted point set; weights may be big ints."""

    def __init__(self, points: Sequence[Sequence], weights: Sequence | None = None) -> None:
        self.points = [tuple(p) for p in points]
        if weights is None:
            weights = [1] * len(self.points)
        self.weights = list(weights)
        if len(self.weights) != len(self.points):
            raise ValueError("points and weights differ in length")

    def probabilities(self) -> np.ndarray:
        ws = self.weights
        if all(isinstance(w, int) for w in ws):
            top = max(ws, default=0)
            if top <= 0:
                raise ValueError("zero total weight")
            shift = max(0, top.bit_length() - 60)
            arr = np.array([w >> shift for w in ws], dtype=float)
        else:
            arr = np.array([float(w) for w in ws])
        tot = arr.sum()
        if not tot > 0:
            raise ValueError("zero total weight")
        return arr / tot

    def sample(self, gen: np.random.Generator, count: int) -> list:
        idx = gen.choice(len(self.points), size=count, p=self.probabilities())
        return [self.points[i] for i in idx]


def _as_sampler(P) -> Callable:
    if isinstance(P, WeightedPoints):
        return P.sample
    if callable(P):
        return P
    if hasattr(P, "sample_many"):
        return lambda gen, count: P.sample_many(gen, count)
    return WeightedPoints(P).sample


def sample_size(eps: float, alpha: float = 32.0) -> int:
    """Smallest power of two at least ``alpha / eps * log2(1 / eps)``."""
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    target = alpha / eps * max(math.log2(1 / eps), 1e-9)
    rho = 1
    while rho < target:
        rho *= 2
    return rho


def sample_reduce(P, eps: float, gen: np.random.Generator, alpha: float = 32.0) -> list:
    """Weight-proportional i.i.d. sample (with repetition) of ``sample_size`` points."""
    rho = sample_size(eps, alpha)
    return list(_as_sampler(P)(gen, rho))


def loglog(x: float) -> float:
    return max(1.0, math.log2(max(math.log2(max(x, 2.0)), 1.0)))


# ------------------------------------------------------------------------ grid
@dataclass
class GridContext:
    """Sample ``Q`` with coordinates replaced by ranks ``1..rho`` per axis."""

    Q: list
    X: np.ndarray  # (rho, d) integer ranks
    vals: list  # per axis: coordinate of the point with rank r at position r-1
    rho: int
    h: int
    d: int
    cache: dict = field(default_factory=dict)

    def to_grid_box(self, lo: Sequence, hi: Sequence):
        """Rank box of the sample points inside ``[lo, hi]``; None if empty on some axis."""
        glo = np.empty(self.d, dtype=np.int64)
        ghi = np.empty(self.d, dtype=np.int64)
        for a in range(self.d):
            glo[a] = np.searchsorted(self.vals[a], lo[a], "left") + 1
            ghi[a] = np.searchsorted(self.vals[a], hi[a], "right")
            if glo[a] > ghi[a]:
                return None
        return glo, ghi

    def mask(self, glo, ghi) -> np.ndarray:
        X = self.X
        return np.all((X >= glo) & (X <= ghi), axis=1)

    def count(self, glo, ghi) -> int:
        return int(self.mask(glo, ghi).sum())

    def grid_point(self, c: Sequence[int]) -> tuple:
        """Original-space point whose coordinates are those of the ranks in ``c``."""
        return tuple(self.vals[a][int(c[a]) - 1].item() for a in range(self.d))


def gridify(Q: Sequence[Sequence]) -> GridContext:
    """Rank every coordinate (ties by point index) to get a point set on ``{1..rho}^d``."""
    Qa = np.asarray(Q)
    rho = len(Qa)
    Qa = Qa.reshape(rho, -1)
    d = Qa.shape[1]
    X = np.empty((rho, d), dtype=np.int64)
    vals = []
    for a in range(d):
        order = np.lexsort((np.arange(rho), Qa[:, a]))
        X[order, a] = np.arange(1, rho + 1)
        vals.append(Qa[order, a])
    h = max(0, (rho - 1).bit_length())
    return GridContext([tuple(q) for q in Q], X, vals, rho, h, d)


# --------------------------------------------------------- canonical rectangles
def canonical_rects_2d(X: np.ndarray, k: int) -> list:
    """Family of rectangles with exactly ``k`` points each.

    Every axis-parallel rectangle holding at least ``4k`` points of ``X``
    contains a member.  Built by a horizontal median split; for every point
    the vertical segment down (or up) to the split line is swept left and
    right until it has swept ``k`` points; then both halves recurse.
    """
    X = np.asarray(X)
    if k <= 0:
        raise ValueError("k must be positive")
    out: list = []
    order = np.argsort(X[:, 1], kind="stable")

    def side(pts: np.ndarray, above: bool) -> None:
        if len(pts) < k:
            return
        xs, ys = X[pts, 0], X[pts, 1]
        ylo_all, yhi_all = ys.min(), ys.max()
        for p in range(len(pts)):
            px, py = xs[p], ys[p]
            band = ys <= py if above else ys >= py
            bx = xs[band]
            left = np.sort(bx[bx <= px])[::-1]
            right = np.sort(bx[bx >= px])
            y0, y1 = (ylo_all, py) if above else (py, yhi_all)
            if len(left) >= k:
                out.append(((int(left[k - 1]), int(y0)), (int(px), int(y1))))
            if len(right) >= k:
                out.append(((int(px), int(y0)), (int(right[k - 1]), int(y1))))

    def rec(idx: np.ndarray) -> None:
        if len(idx) < max(k, 2):
            return
        mid = len(idx) // 2
        below, above = idx[:mid], idx[mid:]
        side(above, True)
        side(below, False)
        rec(above)
        rec(below)

    rec(order)
    return list(dict.fromkeys(out))


# --------------------------------------------------------------------- witness
@dataclass(frozen=True)
class GridBoxId:
    exponents: tuple  # cell side along axis a is 2**exponents[a]
    index: tuple  # cell position within its grid

    def bounds(self) -> tuple:
        lo = tuple(c << e for c, e in zip(self.index, self.exponents))
        hi = tuple((c + 1) << e for c, e in zip(self.index, self.exponents))
        return lo, hi


def find_witness(ctx: GridContext, glo: Sequence[int], ghi: Sequence[int], eps: float | None = None) -> GridBoxId:
    """Dyadic grid cell retaining at least ``|b ∩ X| / 2**d`` of the box's points.

    Walks axis by axis: halve the current cell until the splitting line meets
    the box, then keep the half holding more of the box's points.
    """
    d, X = ctx.d, ctx.X
    glo = np.asarray(glo)
    ghi = np.asarray(ghi)
    inb = np.all((X >= glo) & (X <= ghi), axis=1)
    total = int(inb.sum())
    if eps is not None and total < (eps / 2) * ctx.rho:
        raise ValueError("box is not eps/2-heavy for the grid sample")
    if total == 0:
        raise ValueError("box holds no sample point")
    alo = [0] * d
    ahi = [ctx.rho] * d
    cur = inb
    for a in range(d):
        lo, hi = int(glo[a]), int(ghi[a])
        while True:
            if lo <= alo[a] <= hi or lo <= ahi[a] <= hi:
                break
            mid = (alo[a] + ahi[a]) // 2
            if hi < mid:
                ahi[a] = mid
            elif lo > mid:
                alo[a] = mid
            else:
                left = cur & (X[:, a] <= mid)
                right = cur & (X[:, a] >= mid)
                if int(left.sum()) >= int(right.sum()):
                    ahi[a] = mid
                    cur = left
                else:
                    alo[a] = mid
                    cur = right
                break
        cur = cur & (X[:, a] >= alo[a]) & (X[:, a] <= ahi[a])
    exps = []
    idx = []
    for a in range(d):
        side = ahi[a] - alo[a]
        e = side.bit_length() - 1
        exps.append(e)
        idx.append(alo[a] >> e)
    return GridBoxId(tuple(exps), tuple(idx))


def witness_properties(ctx: GridContext, glo, ghi, w: GridBoxId) -> tuple:
    """(retained count, box contains a cell corner, cell contains a box corner)."""
    alo, ahi = w.bounds()
    ilo = np.maximum(glo, alo)
    ihi = np.minimum(ghi, ahi)
    kept = ctx.count(ilo, ihi) if np.all(ilo <= ihi) else 0
    box_has = all(glo[a] <= alo[a] <= ghi[a] or glo[a] <= ahi[a] <= ghi[a] for a in range(ctx.d))
    cell_has = all(alo[a] <= glo[a] <= ahi[a] or alo[a] <= ghi[a] <= ahi[a] for a in range(ctx.d))
    return kept, box_has, cell_has


# ---------------------------------------------------------------------- crates
def enumerate_kcrates(cell_points: np.ndarray, cell: tuple, k: int) -> list:
    """All maximal corner-anchored boxes of ``cell`` with at most ``k`` interior points.

    Returned as ``(lo, hi)`` tuples, deduplicated across the ``2**d`` corners.
    Extents on all axes but the last range over the point distances from the
    corner; the last extent is then forced (the largest one keeping at most
    ``k`` points strictly inside) and the remaining axes are checked for
    maximality.
    """
    clo, chi = (np.asarray(c, dtype=float) for c in cell)
    d = len(clo)
    pts = np.asarray(cell_points, dtype=float).reshape(-1, d)
    ext = chi - clo
    found: dict = {}
    for signs in product((0, 1), repeat=d):
        flip = np.array(signs) == 1
        U = np.where(flip, chi - pts, pts - clo)
        pos = U > 0
        back = [{float(u): float(x) for u, x in zip(U[:, a], pts[:, a])} for a in range(d)]
        for a in range(d):
            back[a][float(ext[a])] = float(clo[a] if signs[a] else chi[a])
        cands = [sorted({float(x) for x in U[:, a] if 0 < x < ext[a]} | {float(ext[a])}) for a in range(d - 1)]
        last = d - 1
        for prefix in product(*cands):
            t = np.array(prefix + (0.0,))
            strict = pos[:, :last] & (U[:, :last] < t[:last])
            inside_prefix = np.all(strict, axis=1)
            up = np.sort(U[inside_prefix & pos[:, last], last])
            t[last] = min(float(up[k]), float(ext[last])) if len(up) > k else float(ext[last])
            inner = strict.copy() if last else np.zeros((len(U), 0), dtype=bool)
            in_last = pos[:, last] & (U[:, last] < t[last])
            maximal = True
            for a in range(last):
                if t[a] >= ext[a]:
                    continue
                others = in_last.copy()
                for b in range(last):
                    if b != a:
                        others &= inner[:, b]
                if int((others & pos[:, a] & (U[:, a] <= t[a])).sum()) <= k:
                    maximal = False
                    break
            if not maximal:
                continue
            # map extents back through the point coordinates to avoid rounding drift
            far = [back[a].get(float(t[a]), float(chi[a] - t[a]) if signs[a] else float(clo[a] + t[a]))
                   for a in range(d)]
            lo = tuple(far[a] if signs[a] else float(clo[a]) for a in range(d))
            hi = tuple(float(chi[a]) if signs[a] else far[a] for a in range(d))
            found[(lo, hi)] = None
    return list(found)


def crate_in_box(ctx: GridContext, w: GridBoxId, glo, ghi, k: int) -> tuple:
    """Crate inside ``b ∩ A`` found by binary search, and one sample point in it.

    Anchors at a corner of the witness cell ``A`` that lies in ``b``, shrinks
    the first axis to the largest extent with at most ``k`` interior points
    and returns ``(crate_lo, crate_hi, point_index)``.
    """
    d, X = ctx.d, ctx.X
    alo, ahi = w.bounds()
    ilo = np.maximum(np.asarray(glo), alo)
    ihi = np.minimum(np.asarray(ghi), ahi)
    sub = np.flatnonzero(np.all((X >= ilo) & (X <= ihi), axis=1))
    if len(sub) == 0:
        raise ValueError("witness cell and box share no sample point")
    # anchor corner: per axis the cell endpoint lying inside the box
    anchor = np.array([alo[a] if ilo[a] == alo[a] else ahi[a] for a in range(d)])
    sign = np.array([1 if anchor[a] == ilo[a] else -1 for a in range(d)])
    ext = ihi - ilo
    U = (X[sub] - anchor) * sign  # distances from the anchor, within [0, ext]
    t = ext.copy()

    def interior(tt) -> int:
        return int(np.all((U > 0) & (U < tt), axis=1).sum())

    if interior(t) > k:
        lo_t, hi_t = 0, int(ext[0])
        while lo_t < hi_t:
            mid = (lo_t + hi_t + 1) // 2
            tt = t.copy()
            tt[0] = mid
            if interior(tt) <= k:
                lo_t = mid
            else:
                hi_t = mid - 1
        t[0] = lo_t
    in_crate = np.all(U <= t, axis=1)
    cand = sub[in_crate]
    # prefer a point on the far face of the shrunk axis (the one that blocks growth)
    on_face = cand[U[in_crate][:, 0] == t[0]]
    pick = int(on_face[0]) if len(on_face) else int(cand[0])
    c_lo = tuple(int(min(anchor[a], anchor[a] + sign[a] * t[a])) for a in range(d))
    c_hi = tuple(int(max(anchor[a], anchor[a] + sign[a] * t[a])) for a in range(d))
    return c_lo, c_hi, pick


# --------------------------------------------------------- heavy-family piercing
def pierce_heavy_family(
    X: np.ndarray,
    F: Sequence,
    eps: float,
    gen: np.random.Generator,
    alpha: float = 4.0,
    strong: bool = False,
) -> list:
    """Indices of points of ``X`` piercing every member of ``F``.

    A random sample of ``alpha / eps * loglog(1/eps)`` points first, then one
    fixup point for every member left unpierced.  ``strong`` tops members up
    until each holds ``max(1, floor(loglog(1/eps)))`` chosen points.
    """
    X = np.asarray(X)
    m = len(X)
    if m == 0:
        if F:
            raise ValueError("empty point set cannot pierce a nonempty family")
        return []
    members = [(np.asarray(lo), np.asarray(hi)) for lo, hi in F]
    masks = [np.all((X >= lo) & (X <= hi), axis=1) for lo, hi in members]
    for mk in masks:
        if not mk.any():
            raise ValueError("family member contains no point of X")
    size = int(math.ceil(alpha / eps * loglog(1 / eps)))
    chosen = np.zeros(m, dtype=bool)
    chosen[gen.integers(0, m, size=size)] = True
    need = max(1, int(math.floor(loglog(1 / eps)))) if strong else 1
    for mk in masks:
        have = int((mk & chosen).sum())
        if have >= need:
            continue
        free = np.flatnonzero(mk & ~chosen)
        chosen[free[: need - have]] = True
    return [int(i) for i in np.flatnonzero(chosen)]


# ------------------------------------------------------------------ weak net
def massive_threshold(h: int, d: int) -> int:
    return max(1, h) ** (d + 2)


def weak_net_for_boxes(
    P,
    eps: float,
    boxes: Sequence[Box],
    gen: np.random.Generator,
    alpha: float = 32.0,
    net_alpha: float = 1.0,
    mode: str = "auto",
    on_failure: str = "raise",
    stats: dict | None = None,
) -> list:
    """Points piercing every box of ``boxes`` (each assumed eps-heavy for ``P``).

    ``P`` is a :class:`WeightedPoints`, a callable ``(gen, count) -> points``,
    or an object with ``sample_many``.  ``mode`` is ``"strong"`` (every net
    point is a sample point), ``"weak"`` (massive witness cells contribute
    their corners) or ``"auto"`` (strong for d <= 3).  With ``on_failure ==
    "fixup"`` a box that lost all sample points gets its lower corner instead
    of raising :class:`SamplingFailure`.
    """
    if stats is None:
        stats = {}
    boxes = list(boxes)
    m = len(boxes)
    if m == 0:
        return []
    d = boxes[0].dim
    if mode == "auto":
        mode = "strong" if d <= 3 else "weak"
    s2 = int(math.ceil(net_alpha / eps * loglog(1 / eps)))
    if m <= max(1 / eps, s2):
        # few boxes: any piercing set of at most m points meets the size bound
        corners = list(dict.fromkeys(tuple(b.lo) for b in boxes))
        split = list(dict.fromkeys(dnc_pierce_boxes(boxes)))
        stats["path"] = "one-per-box" if len(corners) <= len(split) else "median-split"
        return corners if len(corners) <= len(split) else split
    stats["path"] = "grid"
    Q = sample_reduce(P, eps, gen, alpha)
    ctx = gridify(Q)
    rho = ctx.rho
    k = int(math.ceil((eps / 2 ** (d + 1)) * rho))
    M = massive_threshold(ctx.h, d)
    gboxes = []
    failures = []
    for b in boxes:
        g = ctx.to_grid_box(b.lo, b.hi)
        if g is None or ctx.count(*g) == 0:
            failures.append(b)
            gboxes.append(None)
        else:
            gboxes.append(g)
    if failures and on_failure == "raise":
        raise SamplingFailure(failures)
    stats["sampling_failures"] = len(failures)
    net: list = []
    seen: set = set()

    def add(p: tuple) -> None:
        if p not in seen:
            seen.add(p)
            net.append(p)

    chosen = np.unique(gen.integers(0, rho, size=s2))
    for j in chosen:
        add(ctx.Q[int(j)])
    n2 = len(net)
    stats["second_sample"] = n2
    lo_arr = np.array([b.lo for b in boxes])
    hi_arr = np.array([b.hi for b in boxes])
    from .geom import pierced_mask

    hit = pierced_mask(lo_arr, hi_arr, np.array(net)) if net else np.zeros(m, dtype=bool)
    extra: list = []
    witnesses = crates = massive = 0
    for i in np.flatnonzero(~hit):
        b = boxes[i]
        if extra and pierced_mask(lo_arr[i : i + 1], hi_arr[i : i + 1], np.array(extra))[0]:
            continue
        g = gboxes[i]
        if g is None:
            p = tuple(b.lo)
            add(p)
            extra.append(p)
            continue
        glo, ghi = g
        w = find_witness(ctx, glo, ghi)
        witnesses += 1
        alo, ahi = w.bounds()
        if mode == "weak" and ctx.count(np.array(alo), np.array(ahi)) >= M:
            massive += 1
            for corner in product(*zip(alo, ahi)):
                if all(1 <= c <= rho for c in corner):
                    p = ctx.grid_point(corner)
                    add(p)
                    extra.append(p)
            continue
        _, _, pick = crate_in_box(ctx, w, glo, ghi, k)
        crates += 1
        p = ctx.Q[pick]
        add(p)
        extra.append(p)
    stats.update(witnesses=witnesses, crates=crates, massive=massive, fixups=len(net) - n2, rho=rho, k=k)
    return net
