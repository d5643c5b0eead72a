"""Finitely described metrics: a prefix of balls plus a tail rule.

Tail rules (k = prefix length, n > k):

* ``Constant``: ball(n) = B_k.
* ``Shift(d, moving R, anchor A)``: ball(n) = translate(R, (n-k)d) ∪ A.
  R defaults to B_k and A to the zero subcategory, so the plain rule is
  translate(B_k, (n-k)d). The anchor keeps a fixed part while the rest
  drifts, which is what a family like {s >= n} ∪ {-47} needs.
* ``Slowdown(s, base)``: ball(n) = base.ball(ceil(n/s)).

Every question about all n at once (chain condition, rapid decrease,
refinement, equality of balls) is decided exactly by checking n up to a
horizon: past it the drifting sets have moved beyond every finite endpoint
in play, and the predicate is periodic (period 1 for Constant and Shift,
s times the base period for Slowdown).
"""

from __future__ import annotations

import math
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field

from .dercat import HomTable
from .shiftset import ShiftSet
from .subcat import Subcategory, forbidden_right, is_extension_closed_bounded, thick_closure


MAX_WITNESSES = 8


class FiniteHorizonError(ValueError):
    """Raised when a ball beyond a finite-horizon prefix is requested."""


@dataclass(frozen=True)
class Constant:
    pass


@dataclass(frozen=True)
class Shift:
    d: int
    moving: Subcategory | None = None
    anchor: Subcategory | None = None


@dataclass(frozen=True)
class Slowdown:
    s: int
    base: "Metric"


Tail = Constant | Shift | Slowdown | None


@dataclass(frozen=True)
class Metric:
    prefix: tuple[Subcategory, ...]
    tail: Tail
    provenance: str = "unverified"
    horizon: int | None = None  # set only for finite-horizon results
    _balls: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))
        if not self.prefix:
            raise ValueError("a metric needs at least one explicit ball")
        key = self.table.key
        if any(b.table.key != key for b in self.prefix):
            raise ValueError("balls over different tables")
        tail = self.tail
        if isinstance(tail, Shift):
            if tail.d == 0:
                raise ValueError("Shift tail needs a nonzero step")
            moving = tail.moving if tail.moving is not None else self.prefix[-1]
            anchor = tail.anchor if tail.anchor is not None else Subcategory.zero(self.table)
            if not moving.translate(tail.d).subset(moving):
                raise ValueError("moving part of a Shift tail must satisfy translate(R, d) ⊆ R")
            object.__setattr__(self, "tail", Shift(tail.d, moving, anchor))
        elif isinstance(tail, Slowdown):
            if tail.s < 2:
                raise ValueError("Slowdown factor must be at least 2")
            if tail.base.table.key != key:
                raise ValueError("Slowdown base over a different table")
        elif tail is None:
            if self.horizon is None:
                raise ValueError("a metric without a tail needs a horizon")
        elif not isinstance(tail, Constant):
            raise ValueError(f"unknown tail {tail!r}")

    @property
    def table(self) -> HomTable:
        return self.prefix[0].table

    @property
    def k(self) -> int:
        return len(self.prefix)

    @property
    def finite_horizon(self) -> bool:
        return self.tail is None

    def ball(self, n: int) -> Subcategory:
        if n < 1:
            raise ValueError("balls are indexed from 1")
        if n <= self.k:
            return self.prefix[n - 1]
        cached = self._balls.get(n)
        if cached is not None:
            return cached
        tail = self.tail
        if isinstance(tail, Constant):
            out = self.prefix[-1]
        elif isinstance(tail, Shift):
            out = tail.moving.translate((n - self.k) * tail.d) | tail.anchor
        elif isinstance(tail, Slowdown):
            out = tail.base.ball(-(-n // tail.s))
        else:
            raise FiniteHorizonError(f"ball {n} lies beyond the finite horizon {self.k}")
        if len(self._balls) < 4096:
            self._balls[n] = out
        return out

    def balls(self, upto: int) -> list[Subcategory]:
        return [self.ball(n) for n in range(1, upto + 1)]


# horizons

def _sets(m: Metric) -> list[Subcategory]:
    out = list(m.prefix)
    if isinstance(m.tail, Shift):
        out += [m.tail.moving, m.tail.anchor]
    elif isinstance(m.tail, Slowdown):
        out += _sets(m.tail.base)
    return out


def span(m: Metric) -> tuple[int, int]:
    ends = [e for s in _sets(m) for e in s.finite_endpoints()]
    return (min(ends), max(ends)) if ends else (0, 0)


def _join(*spans: tuple[int, int]) -> tuple[int, int]:
    return min(s[0] for s in spans), max(s[1] for s in spans)


def period(m: Metric) -> int:
    if isinstance(m.tail, Slowdown):
        return m.tail.s * period(m.tail.base)
    return 1


def far_index(m: Metric, lo: int, hi: int) -> int:
    """An index past which m looks the same to anything living in [lo, hi].

    For a Shift tail this is where the drifting part has cleared every finite
    endpoint of m and of the window, with a margin for the ±1 and ±d
    comparisons used by the checks.
    """
    tail = m.tail
    if isinstance(tail, Shift):
        olo, ohi = span(m)
        width = max(hi, ohi) - min(lo, olo)
        d = abs(tail.d)
        return m.k + (width + 2 * d + 2) // d + 2
    if isinstance(tail, Slowdown):
        return m.k + tail.s * (far_index(tail.base, lo, hi) + 1)
    return m.k


def horizon(m: Metric) -> int:
    return far_index(m, *span(m)) + 2 * period(m) + 2


# validation

@dataclass(frozen=True)
class MetricVerdict:
    is_metric: bool
    is_good: bool
    witnesses: tuple[dict, ...]
    extension: str
    checked_upto: int

    def to_json(self) -> dict:
        return {"is_metric": self.is_metric, "is_good": self.is_good, "witnesses": list(self.witnesses),
                "extension_closed": self.extension, "checked_upto": self.checked_upto}


def validate(m: Metric, verify_budget: int | None = None) -> MetricVerdict:
    """Chain and rapid-decrease checks, exact via the horizon argument.

    Extension-closedness is reported from provenance; with verify_budget the
    bounded verifier is also run on the distinct balls up to the horizon.
    """
    upto = m.k if m.finite_horizon else horizon(m)
    witnesses = []
    chain_ok = True
    good_ok = True
    last = m.k - 1 if m.finite_horizon else upto
    for n in range(1, last + 1):
        cur, nxt = m.ball(n), m.ball(n + 1)
        if not nxt.subset(cur):
            chain_ok = False
            witnesses.append({"check": "chain", "n": n})
        for j in (1, -1):
            if not nxt.translate(j).subset(cur):
                good_ok = False
                witnesses.append({"check": "rapid", "n": n, "shift": j})
                break
    del witnesses[MAX_WITNESSES:]
    ext = m.provenance if m.provenance.startswith("guaranteed") else "unverified"
    if verify_budget is not None:
        seen: dict[Subcategory, int] = {}
        for n in range(1, upto + 1):
            seen.setdefault(m.ball(n), n)
        for b, n in seen.items():
            res = is_extension_closed_bounded(b, verify_budget)
            if res["verdict"] == "counterexample":
                chain_ok = False
                witnesses.append({"check": "extension", "ball": n, **res})
                break
        else:
            if ext == "unverified":
                ext = f"verified up to budget {verify_budget}"
    return MetricVerdict(chain_ok, chain_ok and good_ok, tuple(witnesses), ext, upto)


# comparison

def _le(m1: Metric, m2: Metric) -> bool:
    """Whether for all n there is an m with ball(m1, m) ⊆ ball(m2, n).

    The inner predicate is monotone in n and eventually constant, so one far
    n decides it; for that n, m1's balls decrease, so one far m decides.
    """
    lo, hi = _join(span(m1), span(m2))
    n = far_index(m2, lo, hi) + period(m2)
    target = m2.ball(n)
    ends = target.finite_endpoints()
    if ends:
        lo, hi = min(lo, *ends), max(hi, *ends)
    mm = far_index(m1, lo, hi) + period(m1)
    return m1.ball(mm).subset(target)


def le(m1: Metric, m2: Metric) -> bool | None:
    if m1.finite_horizon or m2.finite_horizon:
        return None
    if not (validate(m1).is_metric and validate(m2).is_metric):
        return None
    return _le(m1, m2)


def compare(m1: Metric, m2: Metric) -> str:
    """One of "m1<=m2", "m2<=m1", "equivalent", "incomparable", "unknown"."""
    if m1.table.key != m2.table.key:
        raise ValueError("metrics over different tables")
    a, b = le(m1, m2), le(m2, m1)
    if a is None or b is None:
        return "unknown"
    if a and b:
        return "equivalent"
    if a:
        return "m1<=m2"
    if b:
        return "m2<=m1"
    return "incomparable"


def refinement_witness(m1: Metric, m2: Metric) -> int | None:
    """Least n with no m such that ball(m1, m) ⊆ ball(m2, n), or None."""
    if _le(m1, m2):
        return None
    lo, hi = _join(span(m1), span(m2))
    far = far_index(m2, lo, hi) + period(m2)
    for n in range(1, far + 1):
        target = m2.ball(n)
        ends = target.finite_endpoints()
        wlo, whi = (min(lo, *ends), max(hi, *ends)) if ends else (lo, hi)
        mm = far_index(m1, wlo, whi) + period(m1)
        if not m1.ball(mm).subset(target):
            return n
    return far


def balls_equal(m1: Metric, m2: Metric, start: int = 1) -> bool:
    """Exact ball-wise equality for all n >= start."""
    lo, hi = _join(span(m1), span(m2))
    upto = max(far_index(m1, lo, hi), far_index(m2, lo, hi)) + 2 * math.lcm(period(m1), period(m2)) + 2
    return all(m1.ball(n) == m2.ball(n) for n in range(start, upto + 1))


# limits

def _limit_from(m: Metric, n0: int, f: Callable[[Subcategory], Subcategory]) -> Subcategory:
    """∩_{n >= n0} f(ball(n)) for f commuting with unions and translations."""
    if m.finite_horizon:
        raise FiniteHorizonError("intersection over a finite-horizon metric")
    acc = Subcategory.everything(m.table)
    for n in range(n0, m.k + 1):
        acc = acc & f(m.prefix[n - 1])
    first = max(m.k + 1, n0)
    tail = m.tail
    if isinstance(tail, Constant):
        return acc & f(m.prefix[-1])
    if isinstance(tail, Shift):
        j0 = first - m.k
        moving = f(tail.moving).translate(j0 * tail.d).limit_intersect(tail.d)
        return acc & (moving | f(tail.anchor))
    return acc & _limit_from(tail.base, -(-first // tail.s), f)


def intersection_ball(m: Metric) -> Subcategory:
    """B = ∩_n ball(n), exactly."""
    return _limit_from(m, 1, lambda s: s)


def forbidden_limit(m: Metric) -> Subcategory:
    """∩_n of the objects receiving a nonzero map from ball(n)."""
    return _limit_from(m, 1, forbidden_right)


# improvement

def improvement_ball(m: Metric, n: int) -> Subcategory:
    """C_n = ∩_{|i| < n} translate(ball(n - |i|), i)."""
    acc = m.ball(n)
    for i in range(1, n):
        b = m.ball(n - i)
        acc = acc & b.translate(i) & b.translate(-i)
    return acc


def _step_candidates(m: Metric) -> list[int]:
    steps = [1]
    t = m
    while isinstance(t.tail, Slowdown):
        t = t.tail.base
    if isinstance(t.tail, Shift):
        steps.append(abs(t.tail.d))
    top = max(steps)
    return [x for k in range(1, top + 1) for x in (k, -k)]


def _anchor(first: Subcategory, last: Subcategory, d: int) -> Subcategory:
    """Parts of first ∩ last that cannot drift in direction d."""
    both = first & last
    out = {}
    for r, s in both.items():
        keep = [(lo, hi) for lo, hi in s.intervals if (hi != math.inf if d > 0 else lo != -math.inf)]
        out[r] = ShiftSet(tuple(keep))
    return Subcategory(first.table, out)


def infer_tail(balls: list[Subcategory], steps: list[int], min_window: int) -> tuple[int, Tail] | None:
    """Find the shortest prefix after which balls follow a Constant or Shift rule.

    balls[i] is ball i+1; a rule is accepted only if it reproduces at least
    min_window further balls.
    """
    total = len(balls)
    for k in range(1, total - min_window + 1):
        rest = balls[k:]
        base = balls[k - 1]
        if all(b == base for b in rest):
            return k, Constant()
        first, last = balls[k], balls[-1]
        for d in steps:
            for anchor in (_anchor(first, last, d), Subcategory.zero(first.table)):
                moving = (first - anchor).translate(-d)
                if not moving.translate(d).subset(moving):
                    continue
                if all(moving.translate(j * d) | anchor == b for j, b in enumerate(rest, 1)):
                    return k, Shift(d, moving, anchor)
    return None


def _preserves_provenance(m: Metric) -> bool:
    return m.provenance.startswith("guaranteed")


def improvement(m: Metric, length: int | None = None) -> Metric:
    """The coarsest good metric refining m.

    Balls C_n = ∩_{|i| < n} translate(B_{n-|i|}, i) are materialized up to a
    horizon through the equivalent recursion C_n = B_n ∩ ΣC_{n-1} ∩ Σ^{-1}C_{n-1}
    (the extra terms it carries are larger balls, hence redundant). A tail
    is inferred and checked against the recursion over twice that horizon.
    If no rule fits, a finite-horizon metric is returned.
    """
    if m.finite_horizon:
        raise FiniteHorizonError("cannot improve a finite-horizon metric")
    h = horizon(m)
    total = max(length or 0, 3 * m.k + 8, 2 * h + 8)
    cs = [m.ball(1)]
    for n in range(2, total + 1):
        cs.append(m.ball(n) & cs[-1].translate(1) & cs[-1].translate(-1))
    prov = "guaranteed (improvement)" if _preserves_provenance(m) else "unverified"
    found = infer_tail(cs, _step_candidates(m), min_window=total - h - 2)
    if found is not None:
        k, tail = found
        out = Metric(tuple(cs[:k]), tail, prov)
        prev = cs[-1]
        ok = True
        for n in range(total + 1, 2 * total + 1):
            prev = m.ball(n) & prev.translate(1) & prev.translate(-1)
            if out.ball(n) != prev:
                ok = False
                break
        if ok:
            return out
    return Metric(tuple(cs), None, prov, horizon=total)


def _slow_view(m: Metric, s: int) -> Metric | None:
    """A metric V with m.ball(n) = V.ball(ceil(n/s)) for every n >= m.k, if one exists."""
    tail = m.tail
    if isinstance(tail, Constant):
        return Metric(tuple(m.ball(min(s * j, m.k)) for j in range(1, -(-m.k // s) + 1)), Constant(), m.provenance)
    if isinstance(tail, Slowdown) and tail.s % s == 0:
        t = tail.s // s
        return tail.base if t == 1 else slowdown(tail.base, t)
    return None


def intersect_metrics(m1: Metric, m2: Metric) -> Metric:
    """Ball-wise intersection, materialized and re-tailed.

    A Constant or Shift tail is inferred first. Failing that, if both sides
    are Slowdowns (or Constant) with a common factor s, the result is a
    Slowdown by s of the intersected bases.
    """
    lo, hi = _join(span(m1), span(m2))
    h = max(far_index(m1, lo, hi), far_index(m2, lo, hi)) + 2 * math.lcm(period(m1), period(m2)) + 2
    total = 2 * h + 8
    bs = [m1.ball(n) & m2.ball(n) for n in range(1, total + 1)]
    steps = sorted(set(_step_candidates(m1)) | set(_step_candidates(m2)), key=lambda x: (abs(x), -x))
    prov = ("guaranteed (ball-wise intersection)"
            if _preserves_provenance(m1) and _preserves_provenance(m2) else "unverified")
    found = infer_tail(bs, steps, min_window=total - h - 2)
    if found is not None:
        k, tail = found
        return Metric(tuple(bs[:k]), tail, prov)
    factors = [m.tail.s for m in (m1, m2) if isinstance(m.tail, Slowdown)]
    if factors:
        s = math.gcd(*factors)
        v1, v2 = _slow_view(m1, s), _slow_view(m2, s)
        if s >= 2 and v1 is not None and v2 is not None:
            base = intersect_metrics(v1, v2)
            if not base.finite_horizon:
                k = max(m1.k, m2.k)
                return Metric(tuple(bs[:k]), Slowdown(s, base), prov)
    return Metric(tuple(bs), None, prov, horizon=total)


# constructors

def _is_standard_aisle(u: Subcategory) -> bool:
    sets = {u.get(r) for r in u.table.modules}
    return len(sets) == 1 and (next(iter(sets)).is_empty() or len(next(iter(sets)).intervals) == 1
                               and next(iter(sets)).intervals[0][1] == math.inf)


def make_aisle_metric(u: Subcategory) -> Metric:
    """{Σ^n U}: prefix translate(U, 1), tail Shift(+1). Checks ΣU ⊆ U."""
    if not u.translate(1).subset(u):
        raise ValueError("not an aisle: translate(U, 1) is not contained in U")
    if _is_standard_aisle(u) or (u.is_shift_closed() and thick_closure(u) == u):
        prov = "guaranteed (aisle)"
    else:
        prov = "unverified (only the shift test was checked)"
    if u.is_zero() or u.is_shift_closed():
        return Metric((u.translate(1),), Constant(), prov)
    return Metric((u.translate(1),), Shift(1), prov)


def standard_aisle(t: HomTable, start: int = 0) -> Subcategory:
    return Subcategory.of_modules(t, t.modules, ShiftSet.ray_up(start))


def make_constant_metric(u: Subcategory, allow_non_thick: bool = False) -> Metric:
    if thick_closure(u) == u:
        return Metric((u,), Constant(), "guaranteed (constant thick)")
    if not allow_non_thick:
        raise ValueError("constant metric needs a thick subcategory (pass allow_non_thick to override)")
    return Metric((u,), Constant(), "unverified")


def cohomology_metric(t: HomTable, ignored_degrees=()) -> Metric:
    """B_n = {X : H^i(X) = 0 for all i > -n outside ignored_degrees}.

    H^i vanishes on M@s unless i = -s, so B_n holds every module at shifts
    s >= n plus the shifts -i for ignored degrees i. Vanishing of cohomology
    in a set of degrees is preserved by extensions.
    """
    anchor = Subcategory.of_modules(t, t.modules, ShiftSet.of(-i for i in ignored_degrees))
    moving = standard_aisle(t, 1)
    return Metric((moving | anchor,), Shift(1, moving, anchor), "guaranteed (cohomology vanishing)")


def slowdown(base: Metric, s: int = 2) -> Metric:
    """ball(n) = base.ball(ceil(n/s))."""
    return Metric((base.ball(1),), Slowdown(s, base), base.provenance)


# JSON

def _tail_json(m: Metric):
    tail = m.tail
    if isinstance(tail, Constant):
        return {"kind": "constant"}
    if isinstance(tail, Shift):
        out = {"kind": "shift", "d": tail.d}
        if tail.moving != m.prefix[-1]:
            out["moving"] = tail.moving.to_json()
        if not tail.anchor.is_zero():
            out["anchor"] = tail.anchor.to_json()
        return out
    if isinstance(tail, Slowdown):
        return {"kind": "slowdown", "s": tail.s, "base": metric_to_json(tail.base)}
    return {"kind": "finite-horizon", "horizon": m.horizon}


def metric_to_json(m: Metric) -> dict:
    return {"prefix": [b.to_json() for b in m.prefix], "tail": _tail_json(m), "provenance": m.provenance}


def metric_from_json(t: HomTable, doc: Mapping, path: str = "$") -> Metric:
    if not isinstance(doc, Mapping):
        raise ValueError(f"{path}: expected an object")
    prefix = doc.get("prefix")
    if not isinstance(prefix, list) or not prefix:
        raise ValueError(f"{path}.prefix: expected a nonempty list")
    balls = tuple(Subcategory.from_json(t, b, f"{path}.prefix[{i}]") for i, b in enumerate(prefix))
    tdoc = doc.get("tail")
    if not isinstance(tdoc, Mapping):
        raise ValueError(f"{path}.tail: expected an object")
    kind = tdoc.get("kind")
    try:
        if kind == "constant":
            tail: Tail = Constant()
        elif kind == "shift":
            d = tdoc.get("d")
            if not isinstance(d, int) or d == 0:
                raise ValueError(f"{path}.tail.d: expected a nonzero integer")
            moving = Subcategory.from_json(t, tdoc["moving"], f"{path}.tail.moving") if "moving" in tdoc else None
            anchor = Subcategory.from_json(t, tdoc["anchor"], f"{path}.tail.anchor") if "anchor" in tdoc else None
            tail = Shift(d, moving, anchor)
        elif kind == "slowdown":
            s = tdoc.get("s")
            if not isinstance(s, int) or s < 2:
                raise ValueError(f"{path}.tail.s: expected an integer >= 2")
            tail = Slowdown(s, metric_from_json(t, tdoc.get("base"), f"{path}.tail.base"))
        else:
            raise ValueError(f"{path}.tail.kind: expected constant, shift or slowdown, got {kind!r}")
        # A provenance claim read from a file is recorded but never trusted.
        declared = doc.get("provenance")
        return Metric(balls, tail, f"declared: {declared}" if declared else "unverified")
    except ValueError as exc:
        msg = str(exc)
        raise ValueError(msg if msg.startswith("$") else f"{path}: {msg}") from None
