from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dyncomplete.dercat import DerIndec, DerObject
from dyncomplete.shiftset import ShiftSet
from dyncomplete.subcat import (Subcategory, is_extension_closed_bounded, is_thick, left_perp, membership,
                                right_perp, thick_closure)

from conftest import table
from test_dercat import by_name


def names(a2):
    return [by_name(a2, n) for n in ("S(1)", "P(2)", "S(2)")]


def test_membership(a2):
    s1, p2, _ = names(a2)
    s = Subcategory.of_modules(a2, [s1])
    assert membership(s, DerObject.of([DerIndec(s1, 7)]))
    assert not membership(s, DerObject.of([DerIndec(s1, 0), DerIndec(p2, 0)]))
    assert membership(Subcategory.zero(a2), DerObject(()))


def test_perps(a1, a2):
    s1, p2, s2 = names(a2)
    assert right_perp(Subcategory.of_modules(a2, [s1])) == Subcategory.of_modules(a2, [s2])
    assert left_perp(Subcategory.of_modules(a2, [s2])) == Subcategory.of_modules(a2, [s1])
    assert right_perp(Subcategory.zero(a2)).is_everything()
    assert left_perp(Subcategory.everything(a2)).is_zero()
    assert left_perp(Subcategory.zero(a2)).is_everything()
    k0 = Subcategory.of_objects(a1, [DerIndec(0, 0)])
    assert right_perp(k0).get(0) == ShiftSet.point(0).complement()


def test_thick_closure(a2):
    s1, p2, s2 = names(a2)
    assert thick_closure(Subcategory.of_objects(a2, [DerIndec(s1, 0)])) == Subcategory.of_modules(a2, [s1])
    assert thick_closure(Subcategory.of_objects(a2, [DerIndec(p2, 0), DerIndec(s2, 0)])).is_everything()
    assert thick_closure(Subcategory.zero(a2)).is_zero()


def perp_oracle(t, s, lo=-6, hi=6):
    """Right perp by direct scan of the derived Hom over a finite window."""
    objs = s.objects_in(lo - 2, hi + 2)
    return {(r, u) for r in t.modules for u in range(lo, hi + 1)
            if all(t.hom_derived(x, DerIndec(r, u)) == 0 for x in objs)}


@st.composite
def subcats(draw, t):
    allowed = {}
    for r in t.modules:
        pts = draw(st.lists(st.integers(-3, 3), max_size=3))
        s = ShiftSet.of(pts)
        if draw(st.booleans()):
            s = s | ShiftSet.ray_up(draw(st.integers(-3, 3)))
        allowed[r] = s
    return Subcategory(t, allowed)


@given(st.data())
@settings(max_examples=60, deadline=None)
def test_right_perp_matches_scan(data):
    t = table("A3")
    s = data.draw(subcats(t))
    rp = right_perp(s)
    got = {(r, u) for r in t.modules for u in range(-6, 7) if u in rp.get(r)}
    # the window scan only misses maps from objects outside [lo-2, hi+2], which cannot reach it
    assert got == perp_oracle(t, s)


@given(st.data())
@settings(max_examples=40, deadline=None)
def test_thick_closure_is_idempotent(data):
    t = table("A3")
    s = data.draw(subcats(t))
    c = thick_closure(s)
    assert is_thick(c)
    assert s.shift_closure() <= c


def test_set_algebra_and_json(a2):
    s1, p2, s2 = names(a2)
    a = Subcategory.of_modules(a2, [s1], ShiftSet.ray_up(0))
    b = Subcategory.of_modules(a2, [s1, s2])
    assert a <= b and not b <= a
    assert (a | b) == b and (a & b) == a
    assert (b - a).get(s1) == ShiftSet.ray_down(-1)
    assert a.translate(2).get(s1) == ShiftSet.ray_up(2)
    assert Subcategory.from_json(a2, b.to_json()) == b
    assert b.complement().complement() == b
    with pytest.raises(ValueError, match=r"\$\["):
        Subcategory.from_json(a2, {"2,2": "(-inf,inf)"})
    with pytest.raises(ValueError):
        Subcategory.from_json(a2, {"1,0": "[0,inf]"})


def test_extension_closure_verifier(a2):
    s1, p2, s2 = names(a2)
    res = is_extension_closed_bounded(Subcategory.of_modules(a2, [s1, s2]), budget=2)
    assert res["verdict"] == "counterexample"
    assert res == {"verdict": "counterexample", "A": ["S(1)@-2"], "E": ["P(2)@-2"], "B": ["S(2)@-2"]}
    assert is_extension_closed_bounded(Subcategory.everything(a2), budget=2)["verdict"] == "verified-up-to-budget"
    assert is_extension_closed_bounded(Subcategory.zero(a2))["verdict"] == "verified-up-to-budget"
    assert is_extension_closed_bounded(Subcategory.of_modules(a2, [s1]), budget=3)["verdict"] == "verified-up-to-budget"


def test_verifier_cap_reports_unknown(a2):
    res = is_extension_closed_bounded(Subcategory.everything(a2), budget=4, max_maps=3)
    assert res["verdict"] == "unknown"


def test_describe(a2):
    s1 = names(a2)[0]
    assert Subcategory.zero(a2).describe() == "0"
    assert Subcategory.everything(a2).describe() == "D^b"
    assert Subcategory.of_modules(a2, [s1]).describe() == "add{S(1)@(-inf,inf)}"
