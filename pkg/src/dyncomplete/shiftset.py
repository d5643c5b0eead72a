"""Finite unions of integer intervals with infinite endpoints."""

from __future__ import annotations

import math
import re
from collections.abc import Iterable
from dataclasses import dataclass

INF = math.inf
Bound = int | float  # float only for +-inf

_TOKEN = re.compile(r"\s*([\[(])\s*([+-]?(?:inf|\d+))\s*,\s*([+-]?(?:inf|\d+))\s*([\])])\s*")


def _bound(text: str) -> Bound:
    t = text.lstrip("+")
    if t == "inf":
        return INF
    if t == "-inf":
        return -INF
    return int(text)


@dataclass(frozen=True)
class ShiftSet:
    intervals: tuple[tuple[Bound, Bound], ...] = ()

    def __post_init__(self):
        ivs = sorted((lo, hi) for lo, hi in self.intervals if lo <= hi)
        for lo, hi in ivs:
            if lo == INF or hi == -INF:
                raise ValueError(f"interval ({lo}, {hi}) is empty at infinity")
            for b in (lo, hi):
                if not (math.isinf(b) or float(b).is_integer()):
                    raise ValueError(f"non-integer bound {b}")
        merged: list[list[Bound]] = []
        for lo, hi in ivs:
            lo = lo if math.isinf(lo) else int(lo)
            hi = hi if math.isinf(hi) else int(hi)
            if merged and lo <= merged[-1][1] + 1:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        object.__setattr__(self, "intervals", tuple((lo, hi) for lo, hi in merged))

    @classmethod
    def empty(cls) -> "ShiftSet":
        return cls()

    @classmethod
    def all(cls) -> "ShiftSet":
        return cls(((-INF, INF),))

    @classmethod
    def point(cls, s: int) -> "ShiftSet":
        return cls(((s, s),))

    @classmethod
    def ray_up(cls, s: int) -> "ShiftSet":
        return cls(((s, INF),))

    @classmethod
    def ray_down(cls, s: int) -> "ShiftSet":
        return cls(((-INF, s),))

    @classmethod
    def of(cls, points: Iterable[int]) -> "ShiftSet":
        return cls(tuple((p, p) for p in points))

    def is_empty(self) -> bool:
        return not self.intervals

    def is_all(self) -> bool:
        return self.intervals == ((-INF, INF),)

    def __bool__(self) -> bool:
        return bool(self.intervals)

    def __contains__(self, t: int) -> bool:
        return any(lo <= t <= hi for lo, hi in self.intervals)

    def union(self, other: "ShiftSet") -> "ShiftSet":
        return ShiftSet(self.intervals + other.intervals)

    def intersect(self, other: "ShiftSet") -> "ShiftSet":
        out = []
        a, b = self.intervals, other.intervals
        i = j = 0
        while i < len(a) and j < len(b):
            lo = max(a[i][0], b[j][0])
            hi = min(a[i][1], b[j][1])
            if lo <= hi:
                out.append((lo, hi))
            if a[i][1] < b[j][1]:
                i += 1
            else:
                j += 1
        return ShiftSet(tuple(out))

    def complement(self) -> "ShiftSet":
        out = []
        cur: Bound = -INF
        for lo, hi in self.intervals:
            if lo > cur:
                out.append((cur, lo - 1))
            cur = hi + 1
        if cur != INF:
            out.append((cur, INF))
        return ShiftSet(tuple(out))

    def difference(self, other: "ShiftSet") -> "ShiftSet":
        return self.intersect(other.complement())

    def translate(self, k: int) -> "ShiftSet":
        return ShiftSet(tuple((lo + k, hi + k) for lo, hi in self.intervals))

    def reflect(self) -> "ShiftSet":
        return ShiftSet(tuple((-hi, -lo) for lo, hi in self.intervals))

    def subset(self, other: "ShiftSet") -> bool:
        return self.difference(other).is_empty()

    __or__ = union
    __and__ = intersect
    __sub__ = difference
    __le__ = subset

    def finite_endpoints(self) -> list[int]:
        return [int(b) for iv in self.intervals for b in iv if not math.isinf(b)]

    def limit_intersect(self, d: int) -> "ShiftSet":
        """The intersection of translate(self, j*d) over all j >= 0.

        Raises ValueError if the answer is an arithmetic progression, which
        has no interval-union form.
        """
        if d == 0 or self.is_empty() or self.is_all():
            return self
        if d < 0:
            return self.reflect().limit_intersect(-d).reflect()
        # t survives iff t, t-d, t-2d, ... all lie in self; needs a left ray.
        lo0, a = self.intervals[0]
        if lo0 != -INF:
            return ShiftSet()
        if a == INF:
            return self
        top = max(self.finite_endpoints())
        alive: dict[int, bool] = {}
        for t in range(a + 1, top + d + 1):
            alive[t] = t in self and (t - d <= a or alive[t - d])
        points = [t for t, ok in alive.items() if ok]
        tail = [t for t in range(top + 1, top + d + 1) if alive[t]]
        if tail and len(tail) < d:
            raise ValueError(f"limit of {self} under step {d} is an arithmetic progression")
        pieces = [(-INF, a)] + [(t, t) for t in points if t <= top]
        if tail:
            pieces.append((top + 1, INF))
        return ShiftSet(tuple(pieces))

    def eventual_subset(self, d: int, target: "ShiftSet") -> bool:
        """Whether translate(self, j*d) is inside target for some j >= 0."""
        if d == 0:
            return self.subset(target)
        ends = self.finite_endpoints() + target.finite_endpoints()
        span = (max(ends) - min(ends)) if ends else 0
        # Past this many steps the relative position of all endpoints is frozen.
        last = span // abs(d) + 2
        return any(self.translate(j * d).subset(target) for j in range(last + 1))

    def __str__(self) -> str:
        return format_shiftset(self)

    def __repr__(self) -> str:
        return f"ShiftSet({format_shiftset(self)!r})"


def _fmt_bound(b: Bound) -> str:
    if b == INF:
        return "inf"
    if b == -INF:
        return "-inf"
    return str(int(b))


def format_shiftset(s: ShiftSet) -> str:
    parts = []
    for lo, hi in s.intervals:
        left = "(" if lo == -INF else "["
        right = ")" if hi == INF else "]"
        parts.append(f"{left}{_fmt_bound(lo)},{_fmt_bound(hi)}{right}")
    return " ".join(parts)


def parse_shiftset(text: str) -> ShiftSet:
    pos = 0
    pieces = []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"bad interval list {text!r} at offset {pos}")
        lb, lo_s, hi_s, rb = m.groups()
        lo, hi = _bound(lo_s), _bound(hi_s)
        if (lb == "(") != (lo == -INF):
            raise ValueError(f"bracket {lb!r} does not match bound {lo_s!r}")
        if (rb == ")") != (hi == INF):
            raise ValueError(f"bracket {rb!r} does not match bound {hi_s!r}")
        if lo == INF or hi == -INF or lo > hi:
            raise ValueError(f"empty interval {m.group(0).strip()!r}")
        pieces.append((lo, hi))
        pos = m.end()
    return ShiftSet(tuple(pieces))
