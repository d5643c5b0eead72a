"""Combinatorial model of the bounded derived category of a Dynkin quiver.

An indecomposable is a pair (root index, shift s) standing for the shifted
module with cohomology concentrated in degree -s. Hom dimensions between
indecomposables come from one Hom and one Ext table over module pairs.
"""

from __future__ import annotations

import heapq
import json
import os
import random
from collections import Counter
from collections.abc import Iterable
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

from filelock import FileLock

from .linalg import RatMatrix
from .quiver import Quiver, RootRegistry, enumerate_positive_roots, euler_form, euler_matrix, format_dim
from .replin import Representation, construct_indecomposable, hom_dim

CACHE_ENV = "DYNCOMPLETE_CACHE"


class DerIndec(NamedTuple):
    module: int
    shift: int

    def shifted(self, k: int) -> "DerIndec":
        return DerIndec(self.module, self.shift + k)


@dataclass(frozen=True)
class DerObject:
    summands: tuple[DerIndec, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "summands", tuple(sorted(DerIndec(*x) for x in self.summands)))

    @classmethod
    def of(cls, items: Iterable) -> "DerObject":
        return cls(tuple(items))

    def __add__(self, other: "DerObject") -> "DerObject":
        return DerObject(self.summands + other.summands)

    def shifted(self, k: int) -> "DerObject":
        return DerObject(tuple(x.shifted(k) for x in self.summands))

    def is_zero(self) -> bool:
        return not self.summands

    def counts(self) -> Counter:
        return Counter(self.summands)

    def __iter__(self):
        return iter(self.summands)

    def __len__(self) -> int:
        return len(self.summands)


class HomTable:
    """Hom/Ext dimensions, projectives, injectives and the AR translate."""

    def __init__(self, quiver: Quiver, registry: RootRegistry, hom, ext, proj, inj, tau_map, seed: int = 0):
        self.quiver = quiver
        self.registry = registry
        self.hom = tuple(tuple(r) for r in hom)
        self.ext = tuple(tuple(r) for r in ext)
        self.proj = tuple(proj)
        self.inj = tuple(inj)
        self.tau_map = tuple(tuple(x) for x in tau_map)
        self.seed = seed
        self.key = quiver.key()
        self._witness: dict[int, Representation] = {}
        inv = {}
        for r, (img, delta) in enumerate(self.tau_map):
            inv[img] = (r, -delta)
        if len(inv) != len(registry):
            raise ValueError("tau is not a bijection on modules")
        self._tau_inv = tuple(inv[r] for r in range(len(registry)))
        self.topo_order = _topological_order(self.hom)

    def __len__(self) -> int:
        return len(self.registry)

    @property
    def modules(self) -> range:
        return range(len(self.registry))

    def __eq__(self, other) -> bool:
        return isinstance(other, HomTable) and self.to_json() == other.to_json()

    def __hash__(self) -> int:
        return hash(self.key)

    def witness(self, r: int) -> Representation:
        if r not in self._witness:
            rng = random.Random(f"{self.seed}:{r}")
            self._witness[r] = construct_indecomposable(self.quiver, self.registry[r], rng)
        return self._witness[r]

    def is_projective(self, r: int) -> bool:
        return r in self.proj

    def is_injective(self, r: int) -> bool:
        return r in self.inj

    def name(self, r: int) -> str:
        q = self.quiver
        d = self.registry[r]
        if sum(d) == 1:
            return f"S({q.vertices[d.index(1)]})"
        if r in self.proj:
            return f"P({q.vertices[self.proj.index(r)]})"
        if r in self.inj:
            return f"I({q.vertices[self.inj.index(r)]})"
        return f"M({format_dim(d)})"

    def label(self, x: DerIndec) -> str:
        return f"{self.name(x.module)}@{x.shift}"

    def hom_derived(self, x: DerIndec, y: DerIndec) -> int:
        rel = y.shift - x.shift
        if rel == 0:
            return self.hom[x.module][y.module]
        if rel == 1:
            return self.ext[x.module][y.module]
        return 0

    def hom_objects(self, x: DerObject, y: DerObject) -> int:
        return sum(self.hom_derived(a, b) for a in x for b in y)

    def tau(self, x: DerIndec) -> DerIndec:
        img, delta = self.tau_map[x.module]
        return DerIndec(img, x.shift + delta)

    def tau_inv(self, x: DerIndec) -> DerIndec:
        pre, delta = self._tau_inv[x.module]
        return DerIndec(pre, x.shift + delta)

    def serre(self, x: DerIndec) -> DerIndec:
        return self.tau(x).shifted(1)

    def serre_inv(self, x: DerIndec) -> DerIndec:
        return self.tau_inv(x.shifted(-1))

    def to_json(self) -> dict:
        return {"v": 1, "quiver_hash": self.key, "quiver": self.quiver.to_json(),
                "roots": [format_dim(r) for r in self.registry],
                "hom": [list(r) for r in self.hom], "ext": [list(r) for r in self.ext],
                "tau": [list(t) for t in self.tau_map], "proj": list(self.proj), "inj": list(self.inj)}


def _topological_order(hom) -> tuple[int, ...]:
    """Linear extension of "Hom(X, Y) != 0", ties broken by root index."""
    n = len(hom)
    indeg = [sum(1 for x in range(n) if x != y and hom[x][y]) for y in range(n)]
    heap = [y for y in range(n) if indeg[y] == 0]
    heapq.heapify(heap)
    out = []
    while heap:
        x = heapq.heappop(heap)
        out.append(x)
        for y in range(n):
            if y != x and hom[x][y]:
                indeg[y] -= 1
                if indeg[y] == 0:
                    heapq.heappush(heap, y)
    if len(out) != n:
        raise ValueError("Hom relation has a cycle; module category is not directed")
    return tuple(out)


def coxeter_candidates(q: Quiver) -> list[RatMatrix]:
    """The two sign conventions -E^{-1}E^T and -E^{-T}E, E the Euler matrix."""
    e = RatMatrix.from_rows(euler_matrix(q))
    return [-(e.inverse() @ e.T), -(e.T.inverse() @ e)]


def _tau_from_dims(registry, proj, inj, dims) -> list[tuple[int, int]] | None:
    out = []
    for r in range(len(registry)):
        if r in proj:
            out.append((inj[proj.index(r)], -1))
            continue
        d = dims(r)
        if d not in registry:
            return None
        out.append((registry.index(d), 0))
    if len({t for t, _ in out}) != len(out):
        return None
    return out


def serre_failures(t: HomTable, window: int = 2) -> list[tuple[DerIndec, DerIndec]]:
    """Pairs violating dim Hom(X, Y) = dim Hom(Y, serre X) in the shift window."""
    bad = []
    for a in t.modules:
        x = DerIndec(a, 0)
        sx = t.serre(x)
        for b in t.modules:
            for s in range(-window, window + 1):
                y = DerIndec(b, s)
                if t.hom_derived(x, y) != t.hom_derived(y, sx):
                    bad.append((x, y))
    return bad


def ar_translate_oracle(t: HomTable, r: int) -> tuple[int, ...]:
    """Dimension vector of tau M read off from dim (tau M)_v = dim Ext^1(M, P_v)."""
    return tuple(t.ext[r][p] for p in t.proj)


def _compute(q: Quiver, seed: int) -> HomTable:
    reg = enumerate_positive_roots(q)
    wit = [construct_indecomposable(q, d, random.Random(f"{seed}:{r}")) for r, d in enumerate(reg)]
    hom = [[hom_dim(m, n) for n in wit] for m in wit]
    ext = [[hom[i][j] - euler_form(q, reg[i], reg[j]) for j in range(len(reg))] for i in range(len(reg))]
    for row in ext:
        assert min(row) >= 0, "negative Ext dimension"
    n = q.n
    proj = [reg.index(tuple(q.paths(v, w) for w in range(n))) for v in range(n)]
    inj = [reg.index(tuple(q.paths(w, v) for w in range(n))) for v in range(n)]
    for p in proj:
        assert not any(ext[p]), "projective with nonzero Ext^1 row"
    for i in inj:
        assert not any(row[i] for row in ext), "injective with nonzero Ext^1 column"
    passing = []
    for phi in coxeter_candidates(q):
        def dims(r, phi=phi):
            v = phi @ RatMatrix(n, 1, [[x] for x in reg[r]])
            return tuple(int(v[i, 0]) if v[i, 0].denominator == 1 else -1 for i in range(n))
        tau_map = _tau_from_dims(reg, proj, inj, dims)
        if tau_map is None:
            continue
        table = HomTable(q, reg, hom, ext, proj, inj, tau_map, seed)
        if not serre_failures(table):
            passing.append(table)
    if len(passing) == 1:
        table = passing[0]
    else:
        probe = HomTable(q, reg, hom, ext, proj, inj, [(r, 0) for r in range(len(reg))], seed)
        tau_map = _tau_from_dims(reg, proj, inj, lambda r: ar_translate_oracle(probe, r))
        if tau_map is None:
            raise RuntimeError("could not determine the AR translate")
        table = HomTable(q, reg, hom, ext, proj, inj, tau_map, seed)
        if serre_failures(table):
            raise RuntimeError("Serre duality fails for every AR translate candidate")
    table._witness.update(dict(enumerate(wit)))
    return table


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "dyncomplete"


def _load_cached(path: Path, q: Quiver, seed: int) -> HomTable | None:
    try:
        doc = json.loads(path.read_text())
        if doc.get("quiver_hash") != q.key() or doc.get("v") != 1:
            return None
        reg = enumerate_positive_roots(q)
        if doc["roots"] != [format_dim(r) for r in reg]:
            return None
        n = len(reg)
        hom, ext = doc["hom"], doc["ext"]
        if len(hom) != n or len(ext) != n or any(len(r) != n for r in hom + ext):
            return None
        return HomTable(q, reg, hom, ext, doc["proj"], doc["inj"], doc["tau"], seed)
    except (OSError, ValueError, KeyError, TypeError, json.JSONDecodeError):
        return None


_MEMO: dict[tuple[str, int], HomTable] = {}


def build_hom_table(q: Quiver, seed: int = 0, cache_dir: str | Path | None | bool = None) -> HomTable:
    """Build (or load) the Hom table of q.

    cache_dir=None uses $DYNCOMPLETE_CACHE or ~/.cache/dyncomplete;
    cache_dir=False disables the disk cache. A corrupt cache file is rebuilt.
    """
    memo_key = (q.key(), seed)
    if cache_dir is None and memo_key in _MEMO:
        return _MEMO[memo_key]
    table = None
    path = None
    if cache_dir is not False:
        base = default_cache_dir() if cache_dir is None else Path(cache_dir)
        path = base / f"{q.key()}.json"
        if path.exists():
            table = _load_cached(path, q, seed)
    if table is None:
        table = _compute(q, seed)
        if path is not None:
            path.parent.mkdir(parents=True, exist_ok=True)
            with FileLock(str(path) + ".lock"):
                tmp = path.with_suffix(f".tmp{os.getpid()}")
                tmp.write_text(json.dumps(table.to_json(), sort_keys=True))
                os.replace(tmp, path)
    if cache_dir is None:
        _MEMO[memo_key] = table
    return table


def ar_quiver_dot(t: HomTable, lo: int = -1, hi: int = 1) -> str:
    """DOT text of the AR quiver restricted to shifts lo..hi."""
    q = t.quiver
    nodes: dict[DerIndec, None] = {}
    edges: set[tuple[DerIndec, DerIndec]] = set()
    span = (hi - lo + 3) * (len(t) + 1)

    def orbit(v: int) -> dict[int, DerIndec]:
        out = {0: DerIndec(t.proj[v], 0)}
        for k in range(1, span):
            out[k] = t.tau_inv(out[k - 1])
            out[-k] = t.tau(out[-k + 1])
        return out

    orbits = [orbit(v) for v in range(q.n)]

    def keep(x: DerIndec) -> bool:
        return lo <= x.shift <= hi

    for o in orbits:
        for x in o.values():
            if keep(x):
                nodes[x] = None
    for s, w in q.arrow_indices():
        for k in range(-span + 1, span - 1):
            a, b, c = orbits[w][k], orbits[s][k], orbits[w][k + 1]
            if keep(a) and keep(b):
                edges.add((a, b))
            if keep(b) and keep(c):
                edges.add((b, c))
    lines = ["digraph AR {", "  rankdir=LR;"]
    for x in sorted(nodes):
        lines.append(f'  "{t.label(x)}";')
    for a, b in sorted(edges):
        lines.append(f'  "{t.label(a)}" -> "{t.label(b)}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
