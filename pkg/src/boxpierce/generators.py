"""Seeded instance and update-script generators."""

from __future__ import annotations

import math

import numpy as np

from .geom import Box, ProblemInstance, UsageError
from .rng import np_rng

KINDS = ("uniform-random", "planted-piercing", "disjoint-grid", "nested", "squares-uniform", "adversarial-crate")


def _r(x) -> float:
    # round so instance files stay short and reproducible
    return round(float(x), 6)


def _box(lo, hi) -> Box:
    return Box(tuple(_r(a) for a in lo), tuple(_r(b) for b in hi))


def uniform_random(n: int, d: int, seed: int, side: float = 0.2) -> ProblemInstance:
    gen = np_rng(seed, "gen/uniform")
    lo = gen.random((n, d))
    w = gen.random((n, d)) * side
    boxes = [_box(lo[i], lo[i] + w[i]) for i in range(n)]
    return ProblemInstance(d, boxes, metadata={"kind": "uniform-random", "seed": seed})


def planted_piercing(n: int, d: int, seed: int, k: int = 10, spread: float = 0.1) -> ProblemInstance:
    """Every box contains one of ``k`` random plant points, so ``k`` points suffice."""
    if k < 1:
        raise UsageError("planted-piercing needs k >= 1")
    gen = np_rng(seed, "gen/planted")
    plants = np.round(gen.random((k, d)), 6)
    owner = np.concatenate([np.arange(min(k, n)), gen.integers(0, k, size=max(0, n - k))])
    boxes = []
    for i in range(n):
        p = plants[owner[i]]
        left = gen.random(d) * spread
        right = gen.random(d) * spread
        lo = np.minimum(np.round(p - left, 6), p)
        hi = np.maximum(np.round(p + right, 6), p)
        boxes.append(Box(tuple(map(float, lo)), tuple(map(float, hi))))
    meta = {"kind": "planted-piercing", "seed": seed, "p_upper": k, "plants": plants.tolist()}
    return ProblemInstance(d, boxes, metadata=meta)


def disjoint_grid(k: int, d: int, seed: int = 0) -> ProblemInstance:
    """``k**d`` pairwise-disjoint unit cubes on a grid; the piercing number is ``k**d``."""
    if k < 1:
        raise UsageError("disjoint-grid needs k >= 1")
    cells = np.indices((k,) * d).reshape(d, -1).T
    boxes = [Box(tuple(float(2 * c) for c in cell), tuple(float(2 * c + 1) for c in cell)) for cell in cells]
    return ProblemInstance(d, boxes, metadata={"kind": "disjoint-grid", "seed": seed, "p_star": k**d})


def nested(n: int, d: int, seed: int) -> ProblemInstance:
    """A chain of boxes around a common core; one point pierces them all."""
    gen = np_rng(seed, "gen/nested")
    core = gen.random(d)
    grow = np.cumsum(gen.random((n, 2, d)) * 0.05 + 1e-3, axis=0)
    boxes = [_box(core - grow[i, 0], core + grow[i, 1]) for i in gen.permutation(n)]
    return ProblemInstance(d, boxes, metadata={"kind": "nested", "seed": seed, "p_star": 1 if n else 0})


def squares_uniform(n: int, seed: int, radius: float = 0.1) -> ProblemInstance:
    gen = np_rng(seed, "gen/squares")
    c = np.round(gen.random((n, 2)), 6)
    r = np.round(gen.random(n) * radius + 1e-6, 6)
    boxes = [Box((float(c[i, 0] - r[i]), float(c[i, 1] - r[i])), (float(c[i, 0] + r[i]), float(c[i, 1] + r[i])))
             for i in range(n)]
    return ProblemInstance(2, boxes, metadata={"kind": "squares-uniform", "seed": seed, "squares": True})


def crate_points(n: int) -> tuple:
    """Point set in ``[0, n/2+1]^4`` with at least ``(n/2)**2`` empty origin-anchored crates.

    Two staircases of ``n/2`` points each, one in the first coordinate pair
    and one in the second, every point pushed next to the origin in the
    other pair so that the crates multiply.
    """
    h = n // 2
    if h < 1:
        raise UsageError("adversarial-crate needs n >= 2")
    tiny = 1.0 / (4 * (h + 1))
    pts = [(float(i), float(h + 1 - i), tiny * i, tiny * i) for i in range(1, h + 1)]
    pts += [(tiny * (i + 0.5), tiny * (i + 0.5), float(i), float(h + 1 - i)) for i in range(1, h + 1)]
    cell = ((0.0,) * 4, (float(h + 1),) * 4)
    return pts, cell


def adversarial_crate(n: int, d: int = 4, seed: int = 0) -> ProblemInstance:
    if d != 4:
        raise UsageError("adversarial-crate is a four-dimensional construction")
    pts, cell = crate_points(n)
    boxes = [Box(p, p) for p in pts]
    meta = {"kind": "adversarial-crate", "seed": seed, "cell": [list(cell[0]), list(cell[1])],
            "crate_lower_bound": (n // 2) ** 2}
    return ProblemInstance(4, boxes, metadata=meta)


def generate(kind: str, n: int, d: int, seed: int, **params) -> ProblemInstance:
    if n < 0 or d < 1:
        raise UsageError("n must be >= 0 and d >= 1")
    if kind == "uniform-random":
        return uniform_random(n, d, seed, **params)
    if kind == "planted-piercing":
        return planted_piercing(n, d, seed, **params)
    if kind == "disjoint-grid":
        k = params.get("k", max(1, round(n ** (1 / d))))
        return disjoint_grid(int(k), d, seed)
    if kind == "nested":
        return nested(n, d, seed)
    if kind == "squares-uniform":
        if d != 2:
            raise UsageError("squares-uniform is planar")
        return squares_uniform(n, seed, **params)
    if kind == "adversarial-crate":
        return adversarial_crate(n, d, seed)
    raise UsageError(f"unknown instance kind {kind!r}")


def update_script(n: int, ops: int, seed: int, squares: bool = False, delete_frac: float = 0.4,
                  k: int | None = None) -> list:
    """Mixed insert/delete script as a list of ``(op, Box)``.

    Starts with ``n`` inserts; the remaining ``ops`` updates delete a random
    live box with probability ``delete_frac``.  With ``k`` set, boxes are drawn
    around ``k`` plant points.
    """
    gen = np_rng(seed, "gen/script")
    plants = gen.random((k, 2)) if k else None

    def fresh() -> Box:
        if squares:
            c = gen.random(2) if plants is None else plants[gen.integers(len(plants))] + (gen.random(2) - 0.5) * 0.1
            c = np.round(c, 6)
            r = round(float(gen.random() * 0.05 + 1e-4), 6)
            return Box(tuple(map(float, c - r)), tuple(map(float, c + r)))
        if plants is not None:
            p = plants[gen.integers(len(plants))]
            return _box(p - gen.random(2) * 0.08, p + gen.random(2) * 0.08)
        lo = gen.random(2)
        return _box(lo, lo + gen.random(2) * 0.1)

    script: list = []
    live: list = []
    for _ in range(n):
        b = fresh()
        script.append(("insert", b))
        live.append(b)
    for _ in range(ops):
        if live and gen.random() < delete_frac:
            j = int(gen.integers(len(live)))
            live[j], live[-1] = live[-1], live[j]
            script.append(("delete", live.pop()))
        else:
            b = fresh()
            script.append(("insert", b))
            live.append(b)
    return script
