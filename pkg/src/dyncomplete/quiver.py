"""Simply laced Dynkin quivers, their bilinear forms and positive roots."""

from __future__ import annotations

import hashlib
import json
from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

DimVector = tuple[int, ...]

# Largest coefficient of the highest root per type; bounds the brute-force box.
_BOX_BOUND = {"A": 1, "D": 2, "E6": 3, "E7": 4, "E8": 6}


class QuiverError(ValueError):
    """Raised for malformed or non-Dynkin quiver documents."""


@dataclass(frozen=True)
class Quiver:
    vertices: tuple[str, ...]
    arrows: tuple[tuple[str, str], ...]
    dynkin_type: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "arrows", tuple(tuple(a) for a in self.arrows))
        object.__setattr__(self, "dynkin_type", classify(self.vertices, self.arrows))

    @property
    def n(self) -> int:
        return len(self.vertices)

    def index(self, label: str) -> int:
        try:
            return self.vertices.index(label)
        except ValueError:
            raise KeyError(f"unknown vertex {label!r}") from None

    def arrow_indices(self) -> list[tuple[int, int]]:
        return [(self.index(s), self.index(t)) for s, t in self.arrows]

    def arrow_key(self, a: int) -> str:
        s, t = self.arrows[a]
        return f"{s}->{t}"

    def paths(self, i: int, j: int) -> int:
        """Number of paths from vertex i to vertex j (the trivial path counts)."""
        out: dict[int, list[int]] = {}
        for s, t in self.arrow_indices():
            out.setdefault(s, []).append(t)
        count = 0
        stack = [i]
        while stack:
            v = stack.pop()
            if v == j:
                count += 1
            stack.extend(out.get(v, ()))
        return count

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices), "arrows": [list(a) for a in self.arrows]}

    def key(self) -> str:
        """Content hash of the canonical JSON document."""
        blob = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def reoriented(self, flips: Sequence[bool]) -> "Quiver":
        arrows = [(t, s) if f else (s, t) for (s, t), f in zip(self.arrows, flips)]
        return Quiver(self.vertices, tuple(arrows))


def classify(vertices: Sequence[str], arrows: Sequence[tuple[str, str]]) -> str:
    """Return the Dynkin type ("A3", "D4", "E6", ...) or raise QuiverError."""
    n = len(vertices)
    if n == 0:
        raise QuiverError("quiver has no vertices")
    if len(set(vertices)) != n:
        dup = sorted({v for v in vertices if list(vertices).count(v) > 1})
        raise QuiverError(f"duplicate vertex labels: {dup}")
    pos = {v: i for i, v in enumerate(vertices)}
    edges: set[frozenset[int]] = set()
    for a in arrows:
        if len(a) != 2:
            raise QuiverError(f"arrow {a!r} must be a [source, target] pair")
        s, t = a
        if s not in pos or t not in pos:
            raise QuiverError(f"arrow {s}->{t} refers to an unknown vertex")
        if s == t:
            raise QuiverError(f"loop at vertex {s!r}")
        e = frozenset((pos[s], pos[t]))
        if e in edges:
            raise QuiverError(f"multi-edge between {s!r} and {t!r}")
        edges.add(e)
    adj: dict[int, set[int]] = {i: set() for i in range(n)}
    for e in edges:
        a, b = tuple(e)
        adj[a].add(b)
        adj[b].add(a)
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for w in adj[v] - seen:
            seen.add(w)
            stack.append(w)
    if len(seen) != n:
        raise QuiverError("underlying graph is disconnected")
    if len(edges) != n - 1:
        raise QuiverError("cycle in underlying graph")
    deg = {v: len(adj[v]) for v in adj}
    branch = [v for v in deg if deg[v] >= 3]
    if any(deg[v] > 3 for v in branch) or len(branch) > 1:
        raise QuiverError("degree pattern is not Dynkin (a vertex of degree > 3 or two branch points)")
    if not branch:
        return f"A{n}"
    c = branch[0]
    arms = []
    for start in adj[c]:
        length, prev, cur = 1, c, start
        while deg[cur] == 2:
            prev, cur = cur, next(iter(adj[cur] - {prev}))
            length += 1
        arms.append(length)
    p, q, r = sorted(arms)
    if p == 1 and q == 1:
        return f"D{n}"
    if (p, q) == (1, 2) and r in (2, 3, 4):
        return f"E{n}"
    raise QuiverError(f"degree pattern is not Dynkin (arms {p},{q},{r})")


def parse_quiver(doc: str | Mapping) -> Quiver:
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise QuiverError(f"$: invalid JSON ({exc.msg})") from None
    if not isinstance(doc, Mapping):
        raise QuiverError("$: expected an object")
    verts = doc.get("vertices")
    arrows = doc.get("arrows", [])
    if not isinstance(verts, list) or not all(isinstance(v, str) for v in verts):
        raise QuiverError("$.vertices: expected a list of strings")
    if not isinstance(arrows, list):
        raise QuiverError("$.arrows: expected a list")
    for i, a in enumerate(arrows):
        if not (isinstance(a, list) and len(a) == 2 and all(isinstance(x, str) for x in a)):
            raise QuiverError(f"$.arrows[{i}]: expected [source, target]")
    return Quiver(tuple(verts), tuple(tuple(a) for a in arrows))


def standard_quiver(name: str) -> Quiver:
    """A fixed orientation of the named Dynkin diagram, vertices "1".."n".

    Type A points every arrow towards vertex 1. D and E attach the arms to a
    path 1-2-...; all arrows point from the larger label to the smaller.
    """
    kind, n = name[0].upper(), int(name[1:])
    labels = [str(i) for i in range(1, n + 1)]
    if kind == "A" and n >= 1:
        edges = [(i + 1, i) for i in range(1, n)]
    elif kind == "D" and n >= 4:
        edges = [(i + 1, i) for i in range(1, n - 1)] + [(n, n - 2)]
    elif kind == "E" and n in (6, 7, 8):
        edges = [(i + 1, i) for i in range(1, n - 1)] + [(n, 3)]
    else:
        raise QuiverError(f"unknown Dynkin type {name!r}")
    return Quiver(tuple(labels), tuple((str(s), str(t)) for s, t in edges))


def _check(q: Quiver, *vecs: Sequence[int]) -> None:
    for v in vecs:
        if len(v) != q.n:
            raise ValueError(f"dimension vector {tuple(v)} has length {len(v)}, expected {q.n}")


def euler_form(q: Quiver, d: Sequence[int], e: Sequence[int]) -> int:
    _check(q, d, e)
    total = sum(x * y for x, y in zip(d, e))
    for s, t in q.arrow_indices():
        total -= d[s] * e[t]
    return total


def tits_form(q: Quiver, d: Sequence[int]) -> int:
    return euler_form(q, d, d)


def euler_matrix(q: Quiver) -> list[list[int]]:
    """E with <d,e> = d^T E e."""
    n = q.n
    m = [[int(i == j) for j in range(n)] for i in range(n)]
    for s, t in q.arrow_indices():
        m[s][t] -= 1
    return m


@dataclass(frozen=True)
class RootRegistry:
    roots: tuple[DimVector, ...]
    _pos: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        self._pos.update({r: i for i, r in enumerate(self.roots)})
        if len(self._pos) != len(self.roots):
            raise ValueError("duplicate roots")

    def __len__(self) -> int:
        return len(self.roots)

    def __iter__(self) -> Iterator[DimVector]:
        return iter(self.roots)

    def __getitem__(self, i: int) -> DimVector:
        return self.roots[i]

    def __contains__(self, d) -> bool:
        return tuple(d) in self._pos

    def index(self, d: Sequence[int]) -> int:
        try:
            return self._pos[tuple(d)]
        except KeyError:
            raise KeyError(f"{format_dim(d)} is not a positive root") from None


def expected_root_count(dynkin_type: str) -> int:
    kind, n = dynkin_type[0], int(dynkin_type[1:])
    if kind == "A":
        return n * (n + 1) // 2
    if kind == "D":
        return n * (n - 1)
    return {6: 36, 7: 63, 8: 120}[n]


def enumerate_positive_roots(q: Quiver) -> RootRegistry:
    """All d >= 0, d != 0 with q(d) = 1, in lexicographic order.

    Brute force over the box bounded by the largest highest-root coefficient
    of the type.
    """
    kind = q.dynkin_type[0]
    bound = _BOX_BOUND[kind] if kind in "AD" else _BOX_BOUND[q.dynkin_type]
    n = q.n
    grid = np.indices((bound + 1,) * n, dtype=np.int16).reshape(n, -1)
    val = (grid.astype(np.int32) ** 2).sum(axis=0)
    for s, t in q.arrow_indices():
        val -= grid[s].astype(np.int32) * grid[t]
    hits = grid[:, val == 1].T
    roots = tuple(tuple(int(x) for x in row) for row in hits if row.any())
    return RootRegistry(roots)


def format_dim(d: Sequence[int]) -> str:
    return ",".join(str(int(x)) for x in d)


def parse_dim(text: str, n: int | None = None) -> DimVector:
    try:
        d = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise ValueError(f"bad dimension vector {text!r}") from None
    if n is not None and len(d) != n:
        raise ValueError(f"dimension vector {text!r} has length {len(d)}, expected {n}")
    return d
