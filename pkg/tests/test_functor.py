from __future__ import annotations

import pytest

from dyncomplete.dercat import DerIndec, DerObject
from dyncomplete.functor import (adjunction_failures, certify_fully_faithful, compose, declare_adjoints,
                                 evaluation_pair, functor_from_json, identity, image_metric, inclusion,
                                 is_compression, preimage_metric, serre_conjugate, shift_functor, tensor_projective,
                                 vertex_evaluation, zero_functor)
from dyncomplete.metric import (balls_equal, cohomology_metric, make_aisle_metric, make_constant_metric,
                                standard_aisle)
from dyncomplete.shiftset import ShiftSet
from dyncomplete.subcat import Subcategory

from conftest import table
from corpus import corpus
from test_dercat import by_name


def labels(t, x):
    return [t.label(y) for y in x]


def test_vertex_evaluation(a1, a2):
    g = vertex_evaluation(a2, a1, "2")
    s1, p2, s2 = (by_name(a2, n) for n in ("S(1)", "P(2)", "S(2)"))
    assert g.apply(DerIndec(s1, 0)).is_zero()
    assert labels(a1, g.apply(DerIndec(p2, 0))) == ["S(1)@0"]
    assert labels(a1, g.apply(DerIndec(s2, 0))) == ["S(1)@0"]
    assert g.flags["full"] == "unknown"


def test_tensor_projective(a1, a2):
    f = tensor_projective(a1, a2, "2")
    for s in range(-3, 4):
        assert labels(a2, f.apply(DerIndec(0, s))) == [f"P(2)@{s}"]
    assert certify_fully_faithful(f)
    assert f.flags["full"] == "certified-by-constructor"


def test_adjunction_and_right_adjoint(a1, a2):
    f, g = evaluation_pair(a1, a2, "2")
    assert adjunction_failures(f, g) == []
    j = serre_conjugate(g)
    assert labels(a2, j.apply(DerIndec(0, 0))) == ["S(2)@0"]
    assert adjunction_failures(g, j) == []
    assert certify_fully_faithful(j)


def test_wrong_adjoint_is_detected(a1, a2):
    f = tensor_projective(a1, a2, "1")
    g = vertex_evaluation(a2, a1, "2")
    assert adjunction_failures(f, g)


def test_preimage_metric_example(a1, a2):
    f, g = evaluation_pair(a1, a2, "2")
    m = preimage_metric(g, cohomology_metric(a1))
    s1, p2, s2 = (by_name(a2, n) for n in ("S(1)", "P(2)", "S(2)"))
    for n in range(1, 20):
        b = m.ball(n)
        assert b.get(s1).is_all()
        assert b.get(p2) == ShiftSet.ray_up(n) and b.get(s2) == ShiftSet.ray_up(n)
    assert m.provenance.startswith("guaranteed")


def test_preimage_trivial_cases(a2):
    for _, m in corpus(a2, 10, seed=6):
        assert balls_equal(preimage_metric(identity(a2), m), m)
        z = preimage_metric(zero_functor(a2, a2), m)
        assert all(z.ball(n).is_everything() for n in range(1, 10))


def test_preimage_matches_ballwise(a1, a3):
    g = vertex_evaluation(a3, a1, "2")
    for _, m in corpus(a1, 20, seed=7):
        p = preimage_metric(g, m)
        for n in range(1, 25):
            b = m.ball(n)
            for r in a3.modules:
                for s in range(-8, 9):
                    inside = all(y in b for y in g.apply(DerIndec(r, s)))
                    assert (s in p.ball(n).get(r)) == inside


def test_image_metric(a1, a2):
    f = tensor_projective(a1, a2, "2")
    p2 = by_name(a2, "P(2)")
    img = image_metric(f, cohomology_metric(a1))
    for n in range(1, 10):
        assert img.ball(n) == Subcategory.of_modules(a2, [p2], ShiftSet.ray_up(n))
    assert balls_equal(image_metric(identity(a2), cohomology_metric(a2)), cohomology_metric(a2))
    s2 = by_name(a2, "S(2)")
    inc = inclusion(a1, a2, {0: DerObject.of([DerIndec(s2, 0)])})
    c = image_metric(inc, make_constant_metric(Subcategory.everything(a1)))
    assert c.ball(3) == Subcategory.of_modules(a2, [s2])
    with pytest.raises(ValueError, match="full"):
        image_metric(vertex_evaluation(a2, a1, "2"), cohomology_metric(a2))


def test_inclusion_requires_certificate(a1, a2):
    p2 = by_name(a2, "P(2)")
    inclusion(a1, a2, {0: DerObject.of([DerIndec(p2, 0)])})
    with pytest.raises(ValueError):
        inclusion(a1, a2, {0: DerObject.of([DerIndec(p2, 0), DerIndec(p2, 1)])})


def test_compression(a1, a2):
    f, g = evaluation_pair(a1, a2, "2")
    coh = cohomology_metric(a1)
    pre = preimage_metric(g, coh)
    assert is_compression(g, pre, coh)["verdict"] == "yes"
    assert is_compression(f, coh, pre)["verdict"] == "yes"
    coarse = make_constant_metric(Subcategory.zero(a2))
    fine = make_aisle_metric(standard_aisle(a2))
    res = is_compression(identity(a2), fine, coarse)
    assert res == {"verdict": "no", "n": 1}
    assert is_compression(identity(a2), coarse, fine)["verdict"] == "yes"


def test_compose_and_shift(a1, a2):
    f, g = evaluation_pair(a1, a2, "2")
    gf = compose(f, g)
    assert labels(a1, gf.apply(DerIndec(0, 2))) == ["S(1)@2"]
    sh = shift_functor(a2, 3)
    assert labels(a2, sh.apply(DerIndec(0, 0))) == [a2.label(DerIndec(0, 3))]
    assert certify_fully_faithful(sh)


def test_json_roundtrip_downgrades_certificates(a1, a2):
    f, g = evaluation_pair(a1, a2, "2")
    tables = {a1.key: a1, a2.key: a2}
    back = functor_from_json(g.to_json(), tables)
    assert back.same_objects(g)
    assert back.left_adjoint is not None and back.left_adjoint.same_objects(f)
    assert back.left_adjoint.flags["full"] == "asserted"
    assert back.flags["triangulated"] == "asserted"


def test_json_errors(a1, a2):
    tables = {a1.key: a1, a2.key: a2}
    with pytest.raises(ValueError, match="unknown quiver hash"):
        functor_from_json({"source": "nope", "target": a1.key, "map": {}}, tables)
    with pytest.raises(ValueError, match=r"\$\.map\['9,9'\]"):
        functor_from_json({"source": a2.key, "target": a1.key, "map": {"9,9": []}}, tables)
    with pytest.raises(ValueError, match="missing"):
        functor_from_json({"source": a2.key, "target": a1.key, "map": {}}, tables)


def test_declare_adjoints_checks_direction(a1, a2):
    with pytest.raises(ValueError):
        declare_adjoints(vertex_evaluation(a2, a1, "2"), vertex_evaluation(a2, a1, "1"))
