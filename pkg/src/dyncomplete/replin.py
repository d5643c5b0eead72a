"""Explicit quiver representations, intertwiners, Hom and Ext computations."""

from __future__ import annotations

import random
from collections import Counter
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction

from .linalg import RatMatrix, block_diag, hstack, rank
from .quiver import DimVector, Quiver, euler_form, format_dim, parse_dim, tits_form

__all__ = [
    "RatMatrix", "Representation", "RepMap", "hom_space", "hom_dim", "ext_dim", "ext_basis",
    "extension", "is_coboundary", "construct_indecomposable", "decompose", "kernel_cokernel", "direct_sum",
]


@dataclass(frozen=True)
class Representation:
    quiver: Quiver
    dim: DimVector
    maps: tuple[RatMatrix, ...]

    def __post_init__(self):
        object.__setattr__(self, "dim", tuple(int(x) for x in self.dim))
        object.__setattr__(self, "maps", tuple(self.maps))
        q = self.quiver
        if len(self.dim) != q.n or any(x < 0 for x in self.dim):
            raise ValueError(f"bad dimension vector {self.dim}")
        if len(self.maps) != len(q.arrows):
            raise ValueError("one matrix per arrow is required")
        for a, (s, t) in enumerate(q.arrow_indices()):
            if self.maps[a].shape != (self.dim[t], self.dim[s]):
                raise ValueError(f"arrow {q.arrow_key(a)}: shape {self.maps[a].shape}, "
                                 f"expected {(self.dim[t], self.dim[s])}")

    @classmethod
    def zero(cls, q: Quiver) -> "Representation":
        return cls.from_dim(q, (0,) * q.n)

    @classmethod
    def from_dim(cls, q: Quiver, d: Sequence[int]) -> "Representation":
        """The semisimple representation of dimension d (all arrows zero)."""
        return cls(q, tuple(d), tuple(RatMatrix.zeros(d[t], d[s]) for s, t in q.arrow_indices()))

    @classmethod
    def simple(cls, q: Quiver, v: int) -> "Representation":
        return cls.from_dim(q, tuple(int(i == v) for i in range(q.n)))

    @property
    def total_dim(self) -> int:
        return sum(self.dim)

    def is_integral(self) -> bool:
        return all(m.is_integral() for m in self.maps)

    def to_json(self) -> dict:
        return {"dim": format_dim(self.dim),
                "arrows": {self.quiver.arrow_key(a): m.to_strings() for a, m in enumerate(self.maps)}}

    @classmethod
    def from_json(cls, q: Quiver, doc: Mapping) -> "Representation":
        d = parse_dim(doc["dim"], q.n)
        arrows = doc.get("arrows", {})
        maps = []
        for a, (s, t) in enumerate(q.arrow_indices()):
            key = q.arrow_key(a)
            if key in arrows:
                data = arrows[key]
                if d[t] == 0:
                    data = []
                maps.append(RatMatrix(d[t], d[s], [[Fraction(str(x)) for x in r] for r in data]))
            elif d[s] == 0 or d[t] == 0:
                maps.append(RatMatrix.zeros(d[t], d[s]))
            else:
                raise ValueError(f"missing matrix for arrow {key}")
        unknown = set(arrows) - {q.arrow_key(a) for a in range(len(q.arrows))}
        if unknown:
            raise ValueError(f"unknown arrows {sorted(unknown)}")
        return cls(q, d, tuple(maps))


def direct_sum(*reps: Representation) -> Representation:
    q = reps[0].quiver
    d = tuple(sum(r.dim[v] for r in reps) for v in range(q.n))
    maps = tuple(block_diag([r.maps[a] for r in reps]) for a in range(len(q.arrows)))
    return Representation(q, d, maps)


@dataclass(frozen=True)
class RepMap:
    source: Representation
    target: Representation
    components: tuple[RatMatrix, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        src, tgt = self.source, self.target
        if src.quiver != tgt.quiver:
            raise ValueError("quiver mismatch")
        q = src.quiver
        for v in range(q.n):
            if self.components[v].shape != (tgt.dim[v], src.dim[v]):
                raise ValueError(f"component at vertex {q.vertices[v]} has the wrong shape")
        for a, (i, j) in enumerate(q.arrow_indices()):
            if self.components[j] @ src.maps[a] != tgt.maps[a] @ self.components[i]:
                raise ValueError(f"intertwiner equation fails at arrow {q.arrow_key(a)}")

    @classmethod
    def identity(cls, m: Representation) -> "RepMap":
        return cls(m, m, tuple(RatMatrix.identity(x) for x in m.dim))

    @classmethod
    def zero(cls, m: Representation, n: Representation) -> "RepMap":
        return cls(m, n, tuple(RatMatrix.zeros(n.dim[v], m.dim[v]) for v in range(m.quiver.n)))

    def then(self, g: "RepMap") -> "RepMap":
        """The composite g after self."""
        return RepMap(self.source, g.target, tuple(b @ a for a, b in zip(self.components, g.components)))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)


def _hom_system(m: Representation, n: Representation) -> tuple[list[list[Fraction]], list[int]]:
    q = m.quiver
    if n.quiver != q:
        raise ValueError("quiver mismatch")
    off = [0]
    for v in range(q.n):
        off.append(off[-1] + n.dim[v] * m.dim[v])
    nunk = off[-1]
    rows: list[list[Fraction]] = []
    for a, (i, j) in enumerate(q.arrow_indices()):
        ma, na = m.maps[a], n.maps[a]
        for r in range(n.dim[j]):
            for c in range(m.dim[i]):
                row = [Fraction(0)] * nunk
                for k in range(m.dim[j]):
                    x = ma[k, c]
                    if x:
                        row[off[j] + r * m.dim[j] + k] += x
                for k in range(n.dim[i]):
                    x = na[r, k]
                    if x:
                        row[off[i] + k * m.dim[i] + c] -= x
                rows.append(row)
    return rows, off


def hom_dim(m: Representation, n: Representation) -> int:
    rows, off = _hom_system(m, n)
    return off[-1] - (rank(rows) if rows else 0)


def hom_space(m: Representation, n: Representation) -> tuple[int, list[RepMap]]:
    rows, off = _hom_system(m, n)
    nunk = off[-1]
    q = m.quiver
    if rows:
        basis_vecs = RatMatrix.from_rows(rows, nunk).nullspace()
    else:
        basis_vecs = [[Fraction(int(i == k)) for i in range(nunk)] for k in range(nunk)]
    maps = []
    for vec in basis_vecs:
        comps = []
        for v in range(q.n):
            r, c = n.dim[v], m.dim[v]
            block = vec[off[v]:off[v + 1]]
            comps.append(RatMatrix(r, c, [block[x * c:(x + 1) * c] for x in range(r)]))
        maps.append(RepMap(m, n, tuple(comps)))
    return len(maps), maps


def ext_dim(m: Representation, n: Representation) -> int:
    e = hom_dim(m, n) - euler_form(m.quiver, m.dim, n.dim)
    assert e >= 0, "negative Ext dimension: internal inconsistency"
    return e


Cocycle = tuple[RatMatrix, ...]


def _coboundaries(m: Representation, n: Representation) -> tuple[list[int], list[list[Fraction]]]:
    """Offsets of the per-arrow blocks in a flattened cocycle, and the nonzero
    columns N_a phi_i - phi_j M_a of the coboundary map, one per entry of phi."""
    q = m.quiver
    arrows = q.arrow_indices()
    zoff = [0]
    for i, j in arrows:
        zoff.append(zoff[-1] + n.dim[j] * m.dim[i])
    zdim = zoff[-1]
    cols: list[list[Fraction]] = []
    for v in range(q.n):
        for r in range(n.dim[v]):
            for c in range(m.dim[v]):
                col = [Fraction(0)] * zdim
                for a, (i, j) in enumerate(arrows):
                    if i == v:  # N_a phi_i: entry (x, c) gains N_a[x, r]
                        for x in range(n.dim[j]):
                            col[zoff[a] + x * m.dim[i] + c] += n.maps[a][x, r]
                    if j == v:  # -phi_j M_a: entry (r, y) loses M_a[c, y]
                        for y in range(m.dim[i]):
                            col[zoff[a] + r * m.dim[i] + y] -= m.maps[a][c, y]
                if any(col):
                    cols.append(col)
    return zoff, cols


def ext_basis(m: Representation, n: Representation) -> list[Cocycle]:
    """Cocycles z (one matrix N_j x M_i per arrow i->j) spanning Ext^1(M, N).

    The cocycle space is everything; standard basis vectors are chosen
    greedily to complete the coboundaries.
    """
    arrows = m.quiver.arrow_indices()
    zoff, span = _coboundaries(m, n)
    zdim = zoff[-1]
    base = rank(span) if span else 0
    chosen: list[int] = []
    for k in range(zdim):
        e = [Fraction(int(x == k)) for x in range(zdim)]
        if rank(span + [e]) > base:
            span.append(e)
            base += 1
            chosen.append(k)
    out = []
    for k in chosen:
        mats = []
        for a, (i, j) in enumerate(arrows):
            r, c = n.dim[j], m.dim[i]
            mats.append(RatMatrix(r, c, [[int(zoff[a] + x * c + y == k) for y in range(c)] for x in range(r)]))
        out.append(tuple(mats))
    return out


def is_coboundary(m: Representation, n: Representation, z: Cocycle) -> bool:
    """Whether z represents the zero class in Ext^1(M, N)."""
    if all(x.is_zero() for x in z):
        return True
    _, span = _coboundaries(m, n)
    flat = [x for mat in z for row in mat.tolist() for x in row]
    base = rank(span) if span else 0
    return rank(span + [flat]) == base


def extension(n: Representation, m: Representation, z: Cocycle) -> Representation:
    """Middle term E of the extension 0 -> N -> E -> M -> 0 given by cocycle z."""
    q = m.quiver
    maps = []
    for a, (i, j) in enumerate(q.arrow_indices()):
        top = hstack([n.maps[a], z[a]]) if n.dim[j] else RatMatrix.zeros(0, n.dim[i] + m.dim[i])
        bottom = hstack([RatMatrix.zeros(m.dim[j], n.dim[i]), m.maps[a]]) if m.dim[j] else \
            RatMatrix.zeros(0, n.dim[i] + m.dim[i])
        data = top.tolist() + bottom.tolist()
        maps.append(RatMatrix(n.dim[j] + m.dim[j], n.dim[i] + m.dim[i], data))
    return Representation(q, tuple(x + y for x, y in zip(n.dim, m.dim)), tuple(maps))


def construct_indecomposable(q: Quiver, d: Sequence[int], seed: int | random.Random = 0,
                             attempts: int = 32) -> Representation:
    """A representation of dimension d with dim End = 1.

    Arrow matrices are random integers, widening the range every few
    failures; the endomorphism certificate is checked before returning.
    """
    d = tuple(int(x) for x in d)
    if len(d) != q.n or any(x < 0 for x in d) or not any(d) or tits_form(q, d) != 1:
        raise ValueError(f"{format_dim(d)} is not a positive root")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    for attempt in range(attempts):
        bound = 3 + attempt // 4
        maps = tuple(RatMatrix(d[t], d[s], [[rng.randint(-bound, bound) for _ in range(d[s])]
                                              for _ in range(d[t])])
                     for s, t in q.arrow_indices())
        rep = Representation(q, d, maps)
        if hom_dim(rep, rep) == 1:
            return rep
    raise RuntimeError(f"no indecomposable certificate for {format_dim(d)} after {attempts} attempts")


def kernel_cokernel(f: RepMap) -> tuple[Representation, Representation]:
    src, tgt = f.source, f.target
    q = src.quiver
    kb: list[RatMatrix] = []  # columns span ker f_v
    qp: list[RatMatrix] = []  # rows cut out im f_v
    for v in range(q.n):
        fv = f.components[v]
        ns = fv.nullspace() if fv.rows else [[Fraction(int(i == k)) for i in range(fv.cols)]
                                              for k in range(fv.cols)]
        kb.append(RatMatrix(fv.cols, len(ns), [list(r) for r in zip(*ns)]) if ns else RatMatrix.zeros(fv.cols, 0))
        ft = fv.T
        ls = ft.nullspace() if ft.rows else [[Fraction(int(i == k)) for i in range(ft.cols)]
                                              for k in range(ft.cols)]
        qp.append(RatMatrix(len(ls), fv.rows, ls) if ls else RatMatrix.zeros(0, fv.rows))
    kmaps, cmaps = [], []
    for a, (i, j) in enumerate(q.arrow_indices()):
        ki, kj = kb[i], kb[j]
        if ki.cols and kj.cols:
            kmaps.append(kj.left_inverse() @ src.maps[a] @ ki)
        else:
            kmaps.append(RatMatrix.zeros(kj.cols, ki.cols))
        qi, qj = qp[i], qp[j]
        if qi.rows and qj.rows:
            cmaps.append(qj @ tgt.maps[a] @ qi.right_inverse())
        else:
            cmaps.append(RatMatrix.zeros(qj.rows, qi.rows))
    ker = Representation(q, tuple(k.cols for k in kb), tuple(kmaps))
    coker = Representation(q, tuple(p.rows for p in qp), tuple(cmaps))
    return ker, coker


def decompose(m: Representation, table) -> Counter:
    """Multiplicities of indecomposable summands of m, by root index.

    Solves C m = h where C[Y][X] = dim Hom(Y, X) is unitriangular in the
    table's topological order and h[Y] = dim Hom(Y, M).
    """
    order = table.topo_order
    h = {y: hom_dim(table.witness(y), m) for y in order}
    mult: dict[int, int] = {}
    for pos in range(len(order) - 1, -1, -1):
        y = order[pos]
        val = h[y] - sum(table.hom[y][x] * mult[x] for x in order[pos + 1:])
        if val < 0:
            raise ValueError("inconsistent decomposition (negative multiplicity)")
        mult[y] = val
    out = Counter({x: k for x, k in mult.items() if k})
    total = [0] * m.quiver.n
    for x, k in out.items():
        for v, c in enumerate(table.registry[x]):
            total[v] += k * c
    if tuple(total) != m.dim:
        raise ValueError("inconsistent decomposition (dimension mismatch)")
    return out
