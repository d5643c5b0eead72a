"""Cones of explicit maps and finite-window Cauchy diagnostics.

A map between module objects placed at shifts s and s' is nonzero only for
s' - s in {0, 1}: degree 0 maps are intertwiners, degree 1 maps are Ext
classes given by cocycles. Composites of total degree 2 vanish since the
path algebra is hereditary.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction

from .dercat import DerIndec, DerObject, HomTable
from .linalg import RatMatrix
from .replin import Cocycle, Representation, RepMap, decompose, extension, is_coboundary, kernel_cokernel


def module_object(rep: Representation, table: HomTable, shift: int = 0) -> DerObject:
    """Krull-Schmidt form of a module placed at one shift."""
    parts = decompose(rep, table)
    return DerObject(tuple(DerIndec(r, shift) for r, k in parts.items() for _ in range(k)))


def cone_of_map(f: RepMap, table: HomTable, shift: int = 0) -> DerObject:
    """Cone of a degree-0 map M@shift -> N@shift: coker@shift + ker@(shift+1)."""
    ker, coker = kernel_cokernel(f)
    return module_object(coker, table, shift) + module_object(ker, table, shift + 1)


def cone_of_extension(z: Cocycle, m: Representation, n: Representation, table: HomTable,
                      shift: int = 0) -> DerObject:
    """Cone of the degree-1 map M@shift -> N@(shift+1) with class z in Ext^1(M, N).

    The cone is the middle term E of 0 -> N -> E -> M -> 0, placed at shift+1.
    """
    return module_object(extension(n, m, z), table, shift + 1)


def cone_of_zero(x: DerObject, y: DerObject) -> DerObject:
    return y + x.shifted(1)


@dataclass(frozen=True)
class Morphism:
    """A map source@s -> target@t between module objects."""

    source: Representation
    source_shift: int
    target: Representation
    target_shift: int
    hom: RepMap | None = None
    ext: Cocycle | None = None

    def __post_init__(self):
        deg = self.degree
        if self.hom is not None:
            if deg != 0 or self.ext is not None:
                raise ValueError("an intertwiner needs equal shifts")
            if self.hom.source != self.source or self.hom.target != self.target:
                raise ValueError("intertwiner does not match the objects")
        if self.ext is not None:
            if deg != 1:
                raise ValueError("an Ext class needs the target one shift higher")
            q = self.source.quiver
            for a, (i, j) in enumerate(q.arrow_indices()):
                if self.ext[a].shape != (self.target.dim[j], self.source.dim[i]):
                    raise ValueError(f"cocycle block at arrow {q.arrow_key(a)} has the wrong shape")

    @property
    def degree(self) -> int:
        return self.target_shift - self.source_shift

    def is_zero(self) -> bool:
        if self.hom is not None:
            return self.hom.is_zero()
        if self.ext is not None:
            return is_coboundary(self.source, self.target, self.ext)
        return True

    def then(self, g: "Morphism") -> "Morphism":
        """The composite g after self."""
        if self.target != g.source or self.target_shift != g.source_shift:
            raise ValueError("maps are not composable")
        out = dict(source=self.source, source_shift=self.source_shift, target=g.target,
                   target_shift=g.target_shift)
        if self.is_zero() or g.is_zero() or self.degree + g.degree > 1:
            return Morphism(**out)
        q = self.source.quiver
        if self.degree == 0 and g.degree == 0:
            return Morphism(**out, hom=self.hom.then(g.hom))
        if self.degree == 0:
            # pull the class back along self
            z = tuple(g.ext[a] @ self.hom.components[i] for a, (i, j) in enumerate(q.arrow_indices()))
            return Morphism(**out, ext=z)
        z = tuple(g.hom.components[j] @ self.ext[a] for a, (i, j) in enumerate(q.arrow_indices()))
        return Morphism(**out, ext=z)

    def cone(self, table: HomTable) -> DerObject:
        if self.is_zero():
            return cone_of_zero(module_object(self.source, table, self.source_shift),
                                module_object(self.target, table, self.target_shift))
        if self.degree == 0:
            return cone_of_map(self.hom, table, self.source_shift)
        return cone_of_extension(self.ext, self.source, self.target, table, self.source_shift)


@dataclass(frozen=True)
class MapWindow:
    """Objects E_1..E_r (modules at shifts) with maps E_i -> E_{i+1}."""

    table: HomTable
    objects: tuple[tuple[Representation, int], ...]
    maps: tuple[Morphism, ...]
    declared_tail: str = "none"

    def __post_init__(self):
        if self.declared_tail not in ("none", "constant-identity"):
            raise ValueError(f"unknown tail {self.declared_tail!r}")
        if len(self.maps) != max(len(self.objects) - 1, 0):
            raise ValueError("a window of r objects needs r - 1 maps")
        for k, f in enumerate(self.maps):
            (m, s), (n, t) = self.objects[k], self.objects[k + 1]
            if (f.source, f.source_shift, f.target, f.target_shift) != (m, s, n, t):
                raise ValueError(f"map {k + 1} is not composable with its neighbours")

    def __len__(self) -> int:
        return len(self.objects)

    def object(self, k: int) -> DerObject:
        """E_k, 1-indexed."""
        rep, s = self.objects[k - 1]
        return module_object(rep, self.table, s)

    def cones(self) -> dict[tuple[int, int], DerObject]:
        """All D_{a,b} = cone(E_a -> E_b) for 1 <= a < b <= r."""
        out = {}
        r = len(self)
        for a in range(1, r):
            comp = self.maps[a - 1]
            out[(a, a + 1)] = comp.cone(self.table)
            for b in range(a + 2, r + 1):
                comp = comp.then(self.maps[b - 2])
                out[(a, b)] = comp.cone(self.table)
        return out


def identity_morphism(rep: Representation, shift: int = 0) -> Morphism:
    return Morphism(rep, shift, rep, shift, hom=RepMap.identity(rep))


def constant_window(table: HomTable, rep: Representation, length: int, shift: int = 0,
                    tail: str = "none") -> MapWindow:
    objs = tuple((rep, shift) for _ in range(length))
    maps = tuple(identity_morphism(rep, shift) for _ in range(length - 1))
    return MapWindow(table, objs, maps, tail)


def window_is_cauchy(w: MapWindow, m, i: int, good_bound: int | None = None) -> dict:
    """Least index M with every cone D_{a,b} (M <= a < b) in ball(m, i).

    Without a declared tail the window must supply at least one pair past M;
    with a constant-identity tail the last index qualifies vacuously.
    With good_bound, every shift of the cones by |j| <= good_bound is tested.
    """
    ball = m.ball(i)
    r = len(w)
    shifts = range(-good_bound, good_bound + 1) if good_bound is not None else (0,)
    cones = w.cones()
    bad_from = 0
    for (a, b), d in cones.items():
        if any(d.shifted(j) not in ball for j in shifts):
            bad_from = max(bad_from, a)
    start = bad_from + 1
    limit = r if w.declared_tail == "constant-identity" else r - 1
    ok = start <= limit
    return {"verdict": "cauchy" if ok else "not-cauchy", "from_index": start if ok else None,
            "i": i, "variant": "good" if good_bound is not None else "plain",
            "bound": good_bound}


def null_test(w: MapWindow, m, i_max: int) -> dict:
    """Necessary condition for a null sequence: eventually E_k lies in every ball."""
    for i in range(1, i_max + 1):
        ball = m.ball(i)
        bad = [k for k in range(1, len(w) + 1) if w.object(k) not in ball]
        if bad and bad[-1] == len(w):
            return {"verdict": "obstruction", "index": bad[-1], "i": i}
    return {"verdict": "null-consistent", "i_max": i_max}


# JSON

def _matrix(rows: int, cols: int, data) -> RatMatrix:
    if rows == 0:
        return RatMatrix.zeros(0, cols)
    return RatMatrix(rows, cols, [[Fraction(str(x)) for x in r] for r in data])


def window_from_json(table: HomTable, doc: Mapping) -> MapWindow:
    q = table.quiver
    objs = []
    for k, o in enumerate(doc.get("objects", [])):
        try:
            objs.append((Representation.from_json(q, o["rep"]), int(o.get("shift", 0))))
        except (KeyError, ValueError, TypeError) as exc:
            raise ValueError(f"$.objects[{k}]: {exc}") from None
    maps = []
    for k, f in enumerate(doc.get("maps", [])):
        (m, s), (n, t) = objs[k], objs[k + 1]
        kind = f.get("kind", "zero")
        try:
            if kind == "zero":
                maps.append(Morphism(m, s, n, t))
            elif kind == "hom":
                comps = f["components"]
                mats = tuple(_matrix(n.dim[v], m.dim[v], comps.get(q.vertices[v], []))
                             for v in range(q.n))
                maps.append(Morphism(m, s, n, t, hom=RepMap(m, n, mats)))
            elif kind == "ext":
                coc = f["cocycle"]
                mats = tuple(_matrix(n.dim[j], m.dim[i], coc.get(q.arrow_key(a), []))
                             for a, (i, j) in enumerate(q.arrow_indices()))
                maps.append(Morphism(m, s, n, t, ext=mats))
            else:
                raise ValueError(f"unknown map kind {kind!r}")
        except (KeyError, ValueError, TypeError) as exc:
            raise ValueError(f"$.maps[{k}]: {exc}") from None
    return MapWindow(table, tuple(objs), tuple(maps), doc.get("tail", "none"))


def object_json(table: HomTable, x: DerObject) -> list[str]:
    return [table.label(y) for y in x]


def window_to_json(w: MapWindow) -> dict:
    q = w.table.quiver
    maps = []
    for f in w.maps:
        if f.hom is not None:
            maps.append({"kind": "hom", "components": {q.vertices[v]: c.to_strings()
                                                       for v, c in enumerate(f.hom.components)}})
        elif f.ext is not None:
            maps.append({"kind": "ext", "cocycle": {q.arrow_key(a): z.to_strings() for a, z in enumerate(f.ext)}})
        else:
            maps.append({"kind": "zero"})
    return {"objects": [{"rep": r.to_json(), "shift": s} for r, s in w.objects], "maps": maps,
            "tail": w.declared_tail}


def euler_class(table: HomTable, x: DerObject) -> tuple[int, ...]:
    """Class in the Grothendieck group: sum of (-1)^shift dim."""
    out = [0] * table.quiver.n
    for y in x:
        sign = -1 if y.shift % 2 else 1
        for v, c in enumerate(table.registry[y.module]):
            out[v] += sign * c
    return tuple(out)


def window_objects(w: MapWindow) -> Sequence[DerObject]:
    return [w.object(k) for k in range(1, len(w) + 1)]
