"""Exact rational matrices.

Everything here works over :class:`fractions.Fraction`. Rank computations
on integer data go through a fraction-free elimination that keeps rows
primitive, which is markedly faster than Fraction arithmetic for the small
dense systems produced by intertwiner equations.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from fractions import Fraction
from math import gcd, lcm


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError("floating point entries are not allowed")
    return Fraction(x)


class RatMatrix:
    """Immutable dense matrix of Fractions."""

    __slots__ = ("rows", "cols", "_d")

    def __init__(self, rows: int, cols: int, data: Iterable[Iterable] | None = None):
        self.rows = rows
        self.cols = cols
        if data is None:
            self._d = tuple((Fraction(0),) * cols for _ in range(rows))
        else:
            d = tuple(tuple(_frac(x) for x in r) for r in data)
            if len(d) != rows or any(len(r) != cols for r in d):
                raise ValueError(f"entry grid does not match shape {rows}x{cols}")
            self._d = d

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None) -> "RatMatrix":
        rows = list(rows)
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(len(rows), cols, rows)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RatMatrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls(n, n, [[int(i == j) for j in range(n)] for i in range(n)])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self._d[i][j]

    def tolist(self) -> list[list[Fraction]]:
        return [list(r) for r in self._d]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self._d[i]

    def col(self, j: int) -> tuple[Fraction, ...]:
        return tuple(r[j] for r in self._d)

    def __eq__(self, other) -> bool:
        return isinstance(other, RatMatrix) and self.shape == other.shape and self._d == other._d

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self._d))

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(x) for x in r) for r in self._d)
        return f"RatMatrix({self.rows}x{self.cols}: [{body}])"

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        ot = list(zip(*other._d)) if other.rows else [()] * other.cols
        data = [[sum((a * b for a, b in zip(r, c)), Fraction(0)) for c in ot] for r in self._d]
        return RatMatrix(self.rows, other.cols, data)

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        return RatMatrix(self.rows, self.cols,
                         [[a + b for a, b in zip(r, s)] for r, s in zip(self._d, other._d)])

    def __neg__(self) -> "RatMatrix":
        return RatMatrix(self.rows, self.cols, [[-a for a in r] for r in self._d])

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        return self + (-other)

    def scale(self, c) -> "RatMatrix":
        c = _frac(c)
        return RatMatrix(self.rows, self.cols, [[c * a for a in r] for r in self._d])

    @property
    def T(self) -> "RatMatrix":
        return RatMatrix(self.cols, self.rows, [list(c) for c in zip(*self._d)] if self.rows else
                         [[] for _ in range(self.cols)])

    def is_zero(self) -> bool:
        return all(a == 0 for r in self._d for a in r)

    def is_integral(self) -> bool:
        return all(a.denominator == 1 for r in self._d for a in r)

    def rref(self) -> tuple["RatMatrix", list[int]]:
        m = self.tolist()
        pivots: list[int] = []
        r = 0
        for c in range(self.cols):
            p = next((i for i in range(r, self.rows) if m[i][c] != 0), None)
            if p is None:
                continue
            m[r], m[p] = m[p], m[r]
            inv = 1 / m[r][c]
            m[r] = [x * inv for x in m[r]]
            for i in range(self.rows):
                if i != r and m[i][c] != 0:
                    f = m[i][c]
                    m[i] = [x - f * y for x, y in zip(m[i], m[r])]
            pivots.append(c)
            r += 1
            if r == self.rows:
                break
        return RatMatrix(self.rows, self.cols, m), pivots

    def rank(self) -> int:
        return rank(self.tolist())

    def nullspace(self) -> list[list[Fraction]]:
        """Basis of {x : self @ x = 0} as plain vectors."""
        red, piv = self.rref()
        free = [c for c in range(self.cols) if c not in piv]
        basis = []
        for f in free:
            v = [Fraction(0)] * self.cols
            v[f] = Fraction(1)
            for i, p in enumerate(piv):
                v[p] = -red[i, f]
            basis.append(v)
        return basis

    def left_inverse(self) -> "RatMatrix":
        """L with L @ self = I; requires full column rank."""
        return self.T.right_inverse().T

    def right_inverse(self) -> "RatMatrix":
        """R with self @ R = I; requires full row rank."""
        if self.rows == 0:
            return RatMatrix(self.cols, 0)
        # R = A^T (A A^T)^{-1}; the Gram matrix is invertible iff A has full row rank.
        g = self @ self.T
        red, piv = RatMatrix(g.rows, 2 * g.rows,
                             [list(r) + [int(i == j) for j in range(g.rows)]
                              for i, r in enumerate(g.tolist())]).rref()
        if piv != list(range(g.rows)):
            raise ValueError("matrix does not have full row rank")
        ginv = RatMatrix(g.rows, g.rows, [r[g.rows:] for r in red.tolist()])
        return self.T @ ginv

    def inverse(self) -> "RatMatrix":
        if self.rows != self.cols:
            raise ValueError("inverse of a non-square matrix")
        return self.right_inverse()

    def to_strings(self) -> list[list[str]]:
        return [[str(a) for a in r] for r in self._d]

    @classmethod
    def from_strings(cls, rows: int, cols: int, data) -> "RatMatrix":
        return cls(rows, cols, data)


def hstack(blocks: Sequence[RatMatrix]) -> RatMatrix:
    rows = blocks[0].rows
    return RatMatrix(rows, sum(b.cols for b in blocks),
                     [sum((list(b.row(i)) for b in blocks), []) for i in range(rows)])


def vstack(blocks: Sequence[RatMatrix]) -> RatMatrix:
    cols = blocks[0].cols
    return RatMatrix(sum(b.rows for b in blocks), cols, [list(b.row(i)) for b in blocks for i in range(b.rows)])


def block_diag(blocks: Sequence[RatMatrix]) -> RatMatrix:
    rows = sum(b.rows for b in blocks)
    cols = sum(b.cols for b in blocks)
    data = [[Fraction(0)] * cols for _ in range(rows)]
    r0 = c0 = 0
    for b in blocks:
        for i in range(b.rows):
            for j in range(b.cols):
                data[r0 + i][c0 + j] = b[i, j]
        r0 += b.rows
        c0 += b.cols
    return RatMatrix(rows, cols, data)


def _primitive(row: list[int]) -> list[int]:
    g = 0
    for x in row:
        if x:
            g = gcd(g, x)
            if g == 1:
                return row
    return [x // g for x in row] if g > 1 else row


def rank(rows: Sequence[Sequence]) -> int:
    """Rank of a rational matrix given as rows, by fraction-free elimination."""
    work: list[list[int]] = []
    for r in rows:
        fr = [_frac(x) for x in r]
        den = lcm(*(x.denominator for x in fr)) if fr else 1
        ir = [int(x * den) for x in fr]
        if any(ir):
            work.append(_primitive(ir))
    if not work:
        return 0
    ncols = len(work[0])
    rk = 0
    for c in range(ncols):
        p = next((i for i in range(rk, len(work)) if work[i][c]), None)
        if p is None:
            continue
        work[rk], work[p] = work[p], work[rk]
        prow = work[rk]
        a = prow[c]
        for i in range(rk + 1, len(work)):
            b = work[i][c]
            if b:
                g = gcd(a, b)
                fa, fb = a // g, b // g
                work[i] = _primitive([fa * x - fb * y for x, y in zip(work[i], prow)])
        rk += 1
        if rk == len(work):
            break
    return rk
