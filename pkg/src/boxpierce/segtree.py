"""Lazy segment tree holding doubling weights over a fixed universe of endpoints.

Every node keeps an exponent tag that is never pushed down; a node's weight is
``2**tag * (left + right)``.  Because tags stay in place, a leaf activated late
automatically picks up every double/halve applied earlier to intervals that
cover it.
"""

from __future__ import annotations

import math
import random
from bisect import bisect_left, bisect_right
from fractions import Fraction
from typing import Sequence

import numpy as np


class ExactArith:
    """Exact weights as Python ints (Fractions only if an exponent goes negative)."""

    name = "exact"
    zero = 0
    one = 1

    @staticmethod
    def pow2(k: int):
        return 1 << k if k >= 0 else Fraction(1, 1 << -k)

    @staticmethod
    def shl(x, k: int):
        if k == 0 or not x:
            return x
        if type(x) is int:
            if k > 0:
                return x << k
            if not x & ((1 << -k) - 1):
                return x >> -k
        res = x * (1 << k if k >= 0 else Fraction(1, 1 << -k))
        if type(res) is Fraction and res.denominator == 1:
            return res.numerator
        return res

    @staticmethod
    def add(x, y):
        return x + y

    @staticmethod
    def mul(x, y):
        return x * y

    @staticmethod
    def is_zero(x) -> bool:
        return not x

    @staticmethod
    def ratio(x, y) -> float:
        if not y:
            return 0.0
        if type(x) is int and type(y) is int:
            shift = max(0, y.bit_length() - 900)
            return (x >> shift) / (y >> shift) if shift else x / y
        return float(Fraction(x) / Fraction(y))

    @staticmethod
    def to_float(x) -> float:
        return float(x)

    @staticmethod
    def log2(x) -> float:
        if type(x) is int:
            b = x.bit_length()
            if b > 1000:
                return (b - 60) + math.log2(x >> (b - 60))
            return math.log2(x)
        return math.log2(x.numerator) - math.log2(x.denominator)

    @staticmethod
    def choose_left(rng: random.Random, left, right) -> bool:
        if type(left) is int and type(right) is int:
            return rng.randrange(left + right) < left
        return rng.random() * float(left + right) < float(left)


class FloatArith:
    """Weights as (mantissa, exponent) pairs; never overflows, approximate to an ulp."""

    name = "float"
    zero = (0.0, 0)
    one = (0.5, 1)

    @staticmethod
    def _norm(m: float, e: int):
        if m == 0.0:
            return (0.0, 0)
        fm, fe = math.frexp(m)
        return (fm, e + fe)

    @staticmethod
    def pow2(k: int):
        return (0.5, k + 1)

    @staticmethod
    def shl(x, k: int):
        return x if x[0] == 0.0 else (x[0], x[1] + k)

    @staticmethod
    def add(x, y):
        if x[0] == 0.0:
            return y
        if y[0] == 0.0:
            return x
        e = max(x[1], y[1])
        return FloatArith._norm(math.ldexp(x[0], x[1] - e) + math.ldexp(y[0], y[1] - e), e)

    @staticmethod
    def mul(x, y):
        return FloatArith._norm(x[0] * y[0], x[1] + y[1])

    @staticmethod
    def is_zero(x) -> bool:
        return x[0] == 0.0

    @staticmethod
    def ratio(x, y) -> float:
        if y[0] == 0.0:
            return 0.0
        return math.ldexp(x[0] / y[0], x[1] - y[1])

    @staticmethod
    def to_float(x) -> float:
        try:
            return math.ldexp(x[0], x[1])
        except OverflowError:
            return math.inf

    @staticmethod
    def log2(x) -> float:
        return math.log2(x[0]) + x[1]

    @staticmethod
    def choose_left(rng: random.Random, left, right) -> bool:
        tot = FloatArith.add(left, right)
        return rng.random() < FloatArith.ratio(left, tot)

    @staticmethod
    def from_exact(v) -> tuple:
        if not v:
            return (0.0, 0)
        if type(v) is int:
            b = v.bit_length()
            if b <= 1000:
                return FloatArith._norm(float(v), 0)
            return FloatArith._norm(float(v >> (b - 64)), b - 64)
        return FloatArith._norm(float(v), 0)


EXACT = ExactArith()
FLOAT = FloatArith()


def arith_for(mode: str):
    if mode == "exact":
        return EXACT
    if mode == "float":
        return FLOAT
    raise ValueError(f"unknown weight mode {mode!r}")


class LazySegTree:
    """Doubling weights over sorted distinct endpoint coordinates.

    Intervals passed to ``double``/``halve``/``weight``/``sample`` are closed
    coordinate ranges ``[lo, hi]``; ``None`` means unbounded.
    """

    __slots__ = ("coords", "m", "size", "tag", "w", "active", "ar", "n_active")

    def __init__(self, endpoints: Sequence, arith=EXACT) -> None:
        coords = list(endpoints)
        for a, b in zip(coords, coords[1:]):
            if not a < b:
                raise ValueError("endpoints must be sorted and distinct")
        self.coords = coords
        self.m = len(coords)
        size = 1
        while size < max(1, self.m):
            size *= 2
        self.size = size
        self.ar = arith
        self.tag = [0] * (2 * size)
        self.w = [arith.zero] * (2 * size)
        self.active = [False] * self.m
        self.n_active = 0

    # ----------------------------------------------------------------- helpers
    def _range(self, lo, hi) -> tuple:
        l = 0 if lo is None else bisect_left(self.coords, lo)
        r = self.m if hi is None else bisect_right(self.coords, hi)
        return l, r

    def _index(self, c) -> int:
        i = bisect_left(self.coords, c)
        if i == self.m or self.coords[i] != c:
            raise KeyError(f"coordinate {c!r} is not in the universe")
        return i

    def _pull(self, v: int) -> None:
        w, tag, ar = self.w, self.tag, self.ar
        v >>= 1
        while v:
            w[v] = ar.shl(ar.add(w[2 * v], w[2 * v + 1]), tag[v])
            v >>= 1

    def _update(self, l: int, r: int, k: int) -> None:
        if l >= r or k == 0:
            return
        w, tag, ar = self.w, self.tag, self.ar
        l0, r0 = l + self.size, r - 1 + self.size
        l += self.size
        r += self.size
        while l < r:
            if l & 1:
                tag[l] += k
                w[l] = ar.shl(w[l], k)
                l += 1
            if r & 1:
                r -= 1
                tag[r] += k
                w[r] = ar.shl(w[r], k)
            l >>= 1
            r >>= 1
        self._pull(l0)
        self._pull(r0)

    def _canonical(self, l: int, r: int) -> list:
        """Canonical nodes of [l, r) with the tag sum of their strict ancestors."""
        out: list = []
        tag = self.tag

        def rec(v: int, nl: int, nr: int, acc: int) -> None:
            if r <= nl or nr <= l:
                return
            if l <= nl and nr <= r:
                out.append((v, acc))
                return
            mid = (nl + nr) // 2
            acc += tag[v]
            rec(2 * v, nl, mid, acc)
            rec(2 * v + 1, mid, nr, acc)

        if l < r:
            rec(1, 0, self.size, 0)
        return out

    # -------------------------------------------------------------- operations
    def insert(self, c) -> bool:
        """Activate endpoint ``c``; returns False if it was already active."""
        i = self._index(c)
        if self.active[i]:
            return False
        self.active[i] = True
        self.n_active += 1
        v = i + self.size
        self.w[v] = self.ar.pow2(self.tag[v])
        self._pull(v)
        return True

    def delete(self, c) -> bool:
        """Deactivate endpoint ``c``; returns False (no change) if it was inactive."""
        i = self._index(c)
        if not self.active[i]:
            return False
        self.active[i] = False
        self.n_active -= 1
        v = i + self.size
        self.w[v] = self.ar.zero
        self._pull(v)
        return True

    def double(self, lo=None, hi=None, times: int = 1) -> None:
        l, r = self._range(lo, hi)
        self._update(l, r, times)

    def halve(self, lo=None, hi=None, times: int = 1) -> None:
        l, r = self._range(lo, hi)
        self._update(l, r, -times)

    @property
    def total(self):
        return self.w[1]

    def weight(self, lo=None, hi=None):
        l, r = self._range(lo, hi)
        return self.weight_range(l, r)

    def weight_range(self, l: int, r: int):
        """Weight of the leaves with index in ``[l, r)``."""
        if l == 0 and r == self.m:
            return self.w[1]
        if l >= r:
            return self.ar.zero
        ar, w, tag = self.ar, self.w, self.tag
        zero = ar.zero
        sl = sr = zero
        l += self.size
        r += self.size
        while l < r:
            if l & 1:
                sl = ar.add(sl, w[l])
                l += 1
            if r & 1:
                r -= 1
                sr = ar.add(sr, w[r])
            l >>= 1
            r >>= 1
            # the accumulated left part sits below l - 1, the right part below r
            if tag[l - 1]:
                sl = ar.shl(sl, tag[l - 1])
            if tag[r]:
                sr = ar.shl(sr, tag[r])
        v = l - 1
        while v > 1:
            v >>= 1
            if tag[v]:
                sl = ar.shl(sl, tag[v])
        v = r
        while v > 1:
            v >>= 1
            if tag[v]:
                sr = ar.shl(sr, tag[v])
        return ar.add(sl, sr)

    def exponent(self, c) -> int:
        """Doubling exponent currently applied at coordinate ``c``."""
        v = self._index(c) + self.size
        e = 0
        while v:
            e += self.tag[v]
            v >>= 1
        return e

    def leaf_weight(self, c):
        i = self._index(c)
        if not self.active[i]:
            return self.ar.zero
        return self.ar.pow2(self.exponent(c))

    def _descend(self, v: int, rng: random.Random) -> int:
        w, ar, size = self.w, self.ar, self.size
        while v < size:
            v = 2 * v if ar.choose_left(rng, w[2 * v], w[2 * v + 1]) else 2 * v + 1
        return v - size

    def sample(self, rng: random.Random, lo=None, hi=None):
        """One active coordinate in ``[lo, hi]`` drawn proportionally to weight."""
        l, r = self._range(lo, hi)
        nodes = self._canonical(l, r)
        ar = self.ar
        ws = [ar.shl(self.w[v], acc) for v, acc in nodes]
        tot = ar.zero
        for x in ws:
            tot = ar.add(tot, x)
        if ar.is_zero(tot):
            raise ValueError("cannot sample: zero total weight")
        # pick a canonical node, then walk down
        chosen = nodes[-1][0]
        rest = tot
        for (v, _), x in zip(nodes, ws):
            if ar.is_zero(x):
                continue
            other = ar.add(rest, _neg(ar, x))
            if ar.is_zero(other) or ar.choose_left(rng, x, other):
                chosen = v
                break
            rest = other
        return self.coords[self._descend(chosen, rng)]

    def sample_many(self, gen: np.random.Generator, count: int, lo=None, hi=None) -> list:
        """``count`` i.i.d. weighted draws via multinomial splitting down the tree."""
        if count <= 0:
            return []
        l, r = self._range(lo, hi)
        nodes = self._canonical(l, r)
        ar = self.ar
        ws = [ar.shl(self.w[v], acc) for v, acc in nodes]
        tot = ar.zero
        for x in ws:
            tot = ar.add(tot, x)
        if ar.is_zero(tot):
            raise ValueError("cannot sample: zero total weight")
        probs = np.array([ar.ratio(x, tot) for x in ws])
        probs /= probs.sum()
        counts = gen.multinomial(count, probs)
        out: list = []
        w, size, coords = self.w, self.size, self.coords
        exact = isinstance(ar, ExactArith)
        ratio, add, is_zero = ar.ratio, ar.add, ar.is_zero
        # uniforms for single-draw descents, consumed in order
        depth = size.bit_length()
        U = gen.random(count * depth).tolist()
        ui = 0
        stack = [(v, int(c)) for (v, _), c in zip(nodes, counts) if c]
        while stack:
            v, c = stack.pop()
            if c == 1:
                while v < size:
                    a, b = w[2 * v], w[2 * v + 1]
                    if is_zero(b):
                        v = 2 * v
                    elif is_zero(a):
                        v = 2 * v + 1
                    else:
                        p = a / (a + b) if exact and type(a) is int and type(b) is int else ratio(a, add(a, b))
                        v = 2 * v if U[ui] < p else 2 * v + 1
                        ui += 1
                out.append(coords[v - size])
                continue
            if v >= size:
                out.extend([coords[v - size]] * c)
                continue
            a, b = w[2 * v], w[2 * v + 1]
            if is_zero(a):
                stack.append((2 * v + 1, c))
                continue
            if is_zero(b):
                stack.append((2 * v, c))
                continue
            p = a / (a + b) if exact and type(a) is int and type(b) is int else ratio(a, add(a, b))
            cl = int(gen.binomial(c, p))
            if cl:
                stack.append((2 * v, cl))
            if c - cl:
                stack.append((2 * v + 1, c - cl))
        return out

    def active_coords(self) -> list:
        return [c for c, a in zip(self.coords, self.active) if a]

    def check_consistency(self) -> bool:
        """Recompute every node weight from leaf exponents and compare."""
        ar = self.ar
        size = self.size
        for i in range(size):
            v = size + i
            expect = ar.pow2(self.tag[v]) if i < self.m and self.active[i] else ar.zero
            if not _close(ar, expect, self.w[v]):
                return False
        for v in range(size - 1, 0, -1):
            expect = ar.shl(ar.add(self.w[2 * v], self.w[2 * v + 1]), self.tag[v])
            if not _close(ar, expect, self.w[v]):
                return False
        return True


def _neg(ar, x):
    if ar is EXACT or isinstance(ar, ExactArith):
        return -x
    return (-x[0], x[1])


def _close(ar, a, b) -> bool:
    if isinstance(ar, ExactArith):
        return a == b
    if ar.is_zero(a) or ar.is_zero(b):
        return ar.is_zero(a) and ar.is_zero(b)
    return abs(ar.ratio(a, b) - 1.0) <= 4e-16 * 4
