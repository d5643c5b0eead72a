"""Object-level functors between modeled derived categories.

A functor is recorded by where it sends each module placed at shift 0;
it is extended additively and shift-equivariantly. Nothing here acts on
morphisms, so properties such as fullness are certified through Hom
dimensions only.
"""

from __future__ import annotations

from collections.abc import Mapping

from .dercat import DerIndec, DerObject, HomTable
from .metric import (Constant, Metric, Shift, Slowdown, _step_candidates, far_index, infer_tail, le, period,
                     refinement_witness, span)
from .quiver import format_dim, parse_dim
from .subcat import Subcategory
from .shiftset import ShiftSet

FLAG_VALUES = ("asserted", "certified-by-constructor", "unknown")
FLAG_NAMES = ("full", "faithful", "triangulated")
CERTIFIED = "certified-by-constructor"


class FunctorSpec:
    def __init__(self, source: HomTable, target: HomTable, object_map: Mapping[int, DerObject],
                 flags: Mapping[str, str] | None = None, name: str = ""):
        self.source = source
        self.target = target
        missing = [r for r in source.modules if r not in object_map]
        if missing:
            raise ValueError(f"object map is missing source modules {missing}")
        for r, img in object_map.items():
            for y in img:
                if not 0 <= y.module < len(target):
                    raise ValueError(f"image of module {r} refers to an unknown target module")
        self.object_map = {r: DerObject(tuple(object_map[r])) for r in source.modules}
        self.flags = {k: "unknown" for k in FLAG_NAMES}
        for k, v in (flags or {}).items():
            if k not in FLAG_NAMES or v not in FLAG_VALUES:
                raise ValueError(f"bad flag {k}={v}")
            self.flags[k] = v
        self.name = name
        self.left_adjoint: FunctorSpec | None = None
        self.right_adjoint: FunctorSpec | None = None

    def __repr__(self) -> str:
        return f"FunctorSpec({self.name or 'unnamed'})"

    def apply(self, x) -> DerObject:
        if isinstance(x, DerIndec) or (isinstance(x, tuple) and len(x) == 2 and isinstance(x[0], int)):
            x = DerObject((DerIndec(*x),))
        out: list[DerIndec] = []
        for y in x:
            out.extend(self.object_map[y.module].shifted(y.shift))
        return DerObject(tuple(out))

    def same_objects(self, other: "FunctorSpec") -> bool:
        return (self.source.key == other.source.key and self.target.key == other.target.key
                and self.object_map == other.object_map)

    def to_json(self, with_adjoints: bool = True) -> dict:
        reg_s, reg_t = self.source.registry, self.target.registry
        out = {"source": self.source.key, "target": self.target.key,
               "map": {format_dim(reg_s[r]): [[format_dim(reg_t[y.module]), y.shift] for y in img]
                       for r, img in sorted(self.object_map.items())},
               "flags": dict(sorted(self.flags.items()))}
        if self.name:
            out["name"] = self.name
        if with_adjoints:
            if self.left_adjoint is not None:
                out["left_adjoint"] = self.left_adjoint.to_json(with_adjoints=False)
            if self.right_adjoint is not None:
                out["right_adjoint"] = self.right_adjoint.to_json(with_adjoints=False)
        return out


def declare_adjoints(left: FunctorSpec, right: FunctorSpec) -> None:
    """Record that left is left adjoint to right."""
    if left.source.key != right.target.key or left.target.key != right.source.key:
        raise ValueError("adjoint functors must go in opposite directions")
    left.right_adjoint = right
    right.left_adjoint = left


def functor_from_json(doc: Mapping, tables: Mapping[str, HomTable], path: str = "$") -> FunctorSpec:
    """Parse a FunctorSpec; tables maps quiver hashes to Hom tables."""
    try:
        src, tgt = tables[doc["source"]], tables[doc["target"]]
    except KeyError as exc:
        raise ValueError(f"{path}: unknown quiver hash {exc}") from None
    mapping = doc.get("map")
    if not isinstance(mapping, Mapping):
        raise ValueError(f"{path}.map: expected an object")
    object_map = {}
    for key, images in mapping.items():
        try:
            r = src.registry.index(parse_dim(key, src.quiver.n))
            object_map[r] = DerObject(tuple(DerIndec(tgt.registry.index(parse_dim(y, tgt.quiver.n)), int(s))
                                            for y, s in images))
        except (KeyError, ValueError, TypeError) as exc:
            raise ValueError(f"{path}.map[{key!r}]: {exc}") from None
    flags = doc.get("flags", {})
    # Certificates do not survive serialization; a file can only assert.
    flags = {k: ("asserted" if v == CERTIFIED else v) for k, v in flags.items()}
    try:
        f = FunctorSpec(src, tgt, object_map, flags, doc.get("name", ""))
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None
    if "left_adjoint" in doc:
        declare_adjoints(functor_from_json(doc["left_adjoint"], tables, f"{path}.left_adjoint"), f)
    if "right_adjoint" in doc:
        declare_adjoints(f, functor_from_json(doc["right_adjoint"], tables, f"{path}.right_adjoint"))
    return f


# certificates

def hom_preservation_failures(f: FunctorSpec) -> list[tuple[DerIndec, DerIndec]]:
    """Pairs of indecomposables where dim Hom changes under f."""
    shifts = [y.shift for img in f.object_map.values() for y in img] or [0]
    w = 2 + max(shifts) - min(shifts)
    bad = []
    for a in f.source.modules:
        x = DerIndec(a, 0)
        fx = f.apply(x)
        for b in f.source.modules:
            for s in range(-w, w + 1):
                y = DerIndec(b, s)
                if f.source.hom_derived(x, y) != f.target.hom_objects(fx, f.apply(y)):
                    bad.append((x, y))
    return bad


def certify_fully_faithful(f: FunctorSpec) -> bool:
    """Object-level certificate: indecomposables go injectively to indecomposables
    and every Hom dimension is preserved."""
    images = []
    for r in f.source.modules:
        img = f.object_map[r]
        if len(img) != 1:
            return False
        images.append(img.summands[0].module)
    if len(set(images)) != len(images):
        return False
    return not hom_preservation_failures(f)


def adjunction_failures(left: FunctorSpec, right: FunctorSpec, window: int = 2) -> list[tuple[DerIndec, DerIndec]]:
    """Pairs (X, Y) with dim Hom(left X, Y) != dim Hom(X, right Y).

    Y runs over shifts within the window, widened by the largest shift any
    image carries so that no nonzero Hom is missed.
    """
    shifts = [y.shift for g in (left, right) for img in g.object_map.values() for y in img] or [0]
    w = window + max(abs(s) for s in shifts)
    bad = []
    for a in left.source.modules:
        x = DerIndec(a, 0)
        lx = left.apply(x)
        for b in right.source.modules:
            for s in range(-w, w + 1):
                y = DerIndec(b, s)
                if left.target.hom_objects(lx, DerObject((y,))) != left.source.hom_objects(DerObject((x,)),
                                                                                          right.apply(y)):
                    bad.append((x, y))
    return bad


# constructors

def identity(t: HomTable) -> FunctorSpec:
    f = FunctorSpec(t, t, {r: DerObject(((r, 0),)) for r in t.modules},
                    {k: CERTIFIED for k in FLAG_NAMES}, "identity")
    f.left_adjoint = f
    f.right_adjoint = f
    return f


def shift_functor(t: HomTable, k: int) -> FunctorSpec:
    f = FunctorSpec(t, t, {r: DerObject(((r, k),)) for r in t.modules},
                    {x: CERTIFIED for x in FLAG_NAMES}, f"shift^{k}")
    return f


def zero_functor(source: HomTable, target: HomTable) -> FunctorSpec:
    return FunctorSpec(source, target, {r: DerObject() for r in source.modules},
                       {"triangulated": CERTIFIED}, "zero")


def inclusion(source: HomTable, target: HomTable, object_map: Mapping[int, DerObject], name: str = "inclusion"
              ) -> FunctorSpec:
    f = FunctorSpec(source, target, object_map, {"triangulated": "asserted"}, name)
    if not certify_fully_faithful(f):
        raise ValueError("object map fails the fully faithful certificate")
    f.flags["full"] = f.flags["faithful"] = CERTIFIED
    return f


def vertex_evaluation(source: HomTable, target: HomTable, v: str | int) -> FunctorSpec:
    """RHom(P_v, -) into the derived category of the field: M@s goes to K^{dim M_v}@s."""
    if target.quiver.n != 1:
        raise ValueError("vertex evaluation lands in the one-vertex quiver")
    vi = source.quiver.index(v) if isinstance(v, str) else v
    object_map = {r: DerObject(tuple(DerIndec(0, 0) for _ in range(source.registry[r][vi])))
                  for r in source.modules}
    label = source.quiver.vertices[vi]
    return FunctorSpec(source, target, object_map, {"triangulated": CERTIFIED}, f"RHom(P({label}),-)")


def tensor_projective(source: HomTable, target: HomTable, v: str | int) -> FunctorSpec:
    """- ⊗ P_v from the derived category of the field: K@s goes to P_v@s."""
    if source.quiver.n != 1:
        raise ValueError("tensoring with P_v starts from the one-vertex quiver")
    vi = target.quiver.index(v) if isinstance(v, str) else v
    f = FunctorSpec(source, target, {0: DerObject(((target.proj[vi], 0),))},
                    {"triangulated": CERTIFIED}, f"-⊗P({target.quiver.vertices[vi]})")
    if certify_fully_faithful(f):
        f.flags["full"] = f.flags["faithful"] = CERTIFIED
    return f


def evaluation_pair(field: HomTable, t: HomTable, v: str | int) -> tuple[FunctorSpec, FunctorSpec]:
    """(F, G) = (- ⊗ P_v, RHom(P_v, -)) with F declared left adjoint to G."""
    f = tensor_projective(field, t, v)
    g = vertex_evaluation(t, field, v)
    declare_adjoints(f, g)
    return f, g


def compose(f: FunctorSpec, g: FunctorSpec) -> FunctorSpec:
    """g after f."""
    if f.target.key != g.source.key:
        raise ValueError("functors are not composable")
    flags = {k: (CERTIFIED if f.flags[k] == g.flags[k] == CERTIFIED else
                 "asserted" if "unknown" not in (f.flags[k], g.flags[k]) else "unknown") for k in FLAG_NAMES}
    return FunctorSpec(f.source, g.target, {r: g.apply(img) for r, img in f.object_map.items()},
                       flags, f"{g.name}∘{f.name}")


def _serre_power(t: HomTable, x: DerIndec, k: int) -> DerIndec:
    for _ in range(abs(k)):
        x = t.serre(x) if k > 0 else t.serre_inv(x)
    return x


def conjugate(f: FunctorSpec, k: int) -> FunctorSpec:
    """S_target^k ∘ f ∘ S_source^{-k}, object-level."""
    src, tgt = f.source, f.target
    object_map = {}
    for r in src.modules:
        pre = _serre_power(src, DerIndec(r, 0), -k)
        img = f.apply(pre)
        object_map[r] = DerObject(tuple(_serre_power(tgt, y, k) for y in img))
    # Serre functors are equivalences, so f's flags carry over.
    return FunctorSpec(src, tgt, object_map, dict(f.flags), f"S^{k}{f.name}S^{-k}")


def serre_conjugate(f: FunctorSpec) -> FunctorSpec:
    """The other adjoint of f through Serre functors.

    With a declared left adjoint F of f, returns S ∘ F ∘ S^{-1}, a right
    adjoint of f. With only a declared right adjoint J, returns
    S^{-1} ∘ J ∘ S, a left adjoint of f.
    """
    if f.left_adjoint is not None:
        out = conjugate(f.left_adjoint, 1)
        out.left_adjoint = f
        return out
    if f.right_adjoint is not None:
        out = conjugate(f.right_adjoint, -1)
        out.right_adjoint = f
        return out
    raise ValueError("serre_conjugate needs a declared adjoint")


# metric transport

def preimage_subcat(f: FunctorSpec, x: Subcategory) -> Subcategory:
    out = {}
    for r in f.source.modules:
        acc = ShiftSet.all()
        for y in set(f.object_map[r]):
            acc = acc & x.get(y.module).translate(-y.shift)
        out[r] = acc
    return Subcategory(f.source, out)


def image_subcat(f: FunctorSpec, s: Subcategory) -> Subcategory:
    out: dict[int, ShiftSet] = {}
    for r, ss in s.items():
        for y in set(f.object_map[r]):
            out[y.module] = out.get(y.module, ShiftSet()) | ss.translate(y.shift)
    return Subcategory(f.target, out)


def _guaranteed(m: Metric) -> bool:
    return m.provenance.startswith("guaranteed")


def preimage_metric(f: FunctorSpec, m: Metric) -> Metric:
    """Ball-wise preimage; the tail rule is carried over symbolically when exact."""
    if m.table.key != f.target.key:
        raise ValueError("metric lives on a different category than the functor's target")
    prov = "guaranteed (preimage)" if _guaranteed(m) and f.flags["triangulated"] != "unknown" else "unverified"
    prefix = tuple(preimage_subcat(f, b) for b in m.prefix)
    tail = m.tail
    if isinstance(tail, Constant):
        return Metric(prefix, Constant(), prov)
    if isinstance(tail, Slowdown):
        return Metric(prefix, Slowdown(tail.s, preimage_metric(f, tail.base)), prov)
    if isinstance(tail, Shift):
        single = all(len(set(img)) <= 1 for img in f.object_map.values())
        if tail.anchor.is_zero() or single:
            moving = preimage_subcat(f, tail.moving)
            anchor = {}
            for r in f.source.modules:
                if len(f.object_map[r]) == 0:
                    continue
                y = f.object_map[r].summands[0]
                anchor[r] = tail.anchor.get(y.module).translate(-y.shift)
            return Metric(prefix, Shift(tail.d, moving, Subcategory(f.source, anchor)), prov)
        lo, hi = span(m)
        h = far_index(m, lo, hi) + 2 * period(m) + 2
        total = 2 * h + 8
        balls = [preimage_subcat(f, m.ball(n)) for n in range(1, total + 1)]
        found = infer_tail(balls, _step_candidates(m), min_window=total - h - 2)
        if found is not None:
            k, t = found
            return Metric(tuple(balls[:k]), t, prov)
        return Metric(tuple(balls), None, prov, horizon=total)
    raise ValueError("cannot transport a finite-horizon metric")


def image_metric(f: FunctorSpec, m: Metric, force: bool = False) -> Metric:
    """Ball-wise add-closure of images; refuses when fullness is unknown."""
    if m.table.key != f.source.key:
        raise ValueError("metric lives on a different category than the functor's source")
    if f.flags["full"] == "unknown" and not force:
        raise ValueError("image metric needs a full functor (fullness is unknown; pass force to override)")
    full = f.flags["full"] != "unknown"
    prov = "guaranteed (image under a full functor)" if full and _guaranteed(m) else "unverified"
    prefix = tuple(image_subcat(f, b) for b in m.prefix)
    tail = m.tail
    if isinstance(tail, Constant):
        return Metric(prefix, Constant(), prov)
    if isinstance(tail, Slowdown):
        return Metric(prefix, Slowdown(tail.s, image_metric(f, tail.base, force)), prov)
    if isinstance(tail, Shift):
        return Metric(prefix, Shift(tail.d, image_subcat(f, tail.moving), image_subcat(f, tail.anchor)), prov)
    raise ValueError("cannot transport a finite-horizon metric")


def is_compression(f: FunctorSpec, m_src: Metric, m_tgt: Metric) -> dict:
    """Whether for all n there is an m with f(ball(m_src, m)) ⊆ ball(m_tgt, n)."""
    img = image_metric(f, m_src, force=True)
    ok = le(img, m_tgt)
    if ok is None:
        return {"verdict": "unknown"}
    if ok:
        return {"verdict": "yes"}
    return {"verdict": "no", "n": refinement_witness(img, m_tgt)}


__all__ = [
    "FunctorSpec", "declare_adjoints", "functor_from_json", "certify_fully_faithful", "adjunction_failures",
    "hom_preservation_failures", "identity", "shift_functor", "zero_functor", "inclusion", "vertex_evaluation",
    "tensor_projective", "evaluation_pair", "compose", "conjugate", "serre_conjugate", "preimage_subcat",
    "image_subcat", "preimage_metric", "image_metric", "is_compression",
]
