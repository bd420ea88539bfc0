"""Exhaustive covering check for families of k-point rectangles on a rank grid."""

import numpy as np


def cover_misses(X, F, k: int) -> int:
    """Rectangles with at least 4k points of ``X`` that contain no member of ``F``.

    Containing a member is monotone under enlargement, so for every
    ``(x1, x2, y1)`` only the lowest top edge that reaches 4k points needs a
    check; every other heavy rectangle contains one of those.
    """
    X = np.asarray(X)
    rho = len(X)
    flo = np.array([f[0] for f in F], dtype=np.int64).reshape(-1, 2)
    fhi = np.array([f[1] for f in F], dtype=np.int64).reshape(-1, 2)
    misses = 0
    for x1 in range(1, rho + 1):
        for x2 in range(x1, rho + 1):
            col = np.sort(X[(X[:, 0] >= x1) & (X[:, 0] <= x2), 1])
            if len(col) < 4 * k:
                continue
            for start in range(len(col) - 4 * k + 1):
                y1 = col[start - 1] + 1 if start else 1
                y2 = col[start + 4 * k - 1]
                inside = (flo[:, 0] >= x1) & (fhi[:, 0] <= x2) & (flo[:, 1] >= y1) & (fhi[:, 1] <= y2)
                misses += not inside.any()
    return misses


def random_rank_set(rho: int, seed: int) -> np.ndarray:
    gen = np.random.default_rng(seed)
    return np.stack([np.arange(1, rho + 1), gen.permutation(rho) + 1], axis=1)
