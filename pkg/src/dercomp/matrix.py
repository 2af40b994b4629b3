"""Matrices over the supported rings.

Entries are stored as one ``dict`` per row mapping column index to a nonzero
payload.  The differentials of cobar totalizations are very sparse, and dense
storage made the larger totalizations impractical.  ``to_rows`` gives the
dense row-major view.

Matrices are treated as immutable: nothing in the package mutates ``rows``
after construction.
"""
from __future__ import annotations

from typing import Iterable, Sequence

from .rings import Integers, Ring, RingError

__all__ = ["Matrix", "hstack", "vstack", "block_diag", "axpy"]


def _is_int_ring(ring: Ring) -> bool:
    return isinstance(ring, Integers)


def axpy(ring: Ring, dst: dict, src: dict, q) -> None:
    """In place ``dst += q * src`` for sparse vectors."""
    if _is_int_ring(ring):
        for k, v in src.items():
            nv = dst.get(k, 0) + q * v
            if nv:
                dst[k] = nv
            elif k in dst:
                del dst[k]
        return
    add, mul, isz = ring.add, ring.mul, ring.is_zero
    zero = ring.zero()
    for k, v in src.items():
        nv = add(dst.get(k, zero), mul(q, v))
        if not isz(nv):
            dst[k] = nv
        elif k in dst:
            del dst[k]


class Matrix:
    __slots__ = ("ring", "nrows", "ncols", "rows", "_cache")

    def __init__(self, ring: Ring, nrows: int, ncols: int, rows: list[dict] | None = None):
        self.ring = ring
        self.nrows = nrows
        self.ncols = ncols
        self.rows = rows if rows is not None else [{} for _ in range(nrows)]
        if len(self.rows) != nrows:
            raise ValueError("row count mismatch")
        self._cache = {}

    # construction ----------------------------------------------------------
    @classmethod
    def from_rows(cls, ring: Ring, data: Sequence[Sequence], ncols: int | None = None) -> "Matrix":
        data = [list(r) for r in data]
        if ncols is None:
            ncols = len(data[0]) if data else 0
        rows = []
        for r in data:
            if len(r) != ncols:
                raise ValueError("ragged matrix data")
            row = {}
            for j, v in enumerate(r):
                v = ring.normalize(ring.from_int(v) if isinstance(v, int) and not isinstance(ring, Integers) else v)
                if not ring.is_zero(v):
                    row[j] = v
            rows.append(row)
        return cls(ring, len(rows), ncols, rows)

    @classmethod
    def from_columns(cls, ring: Ring, cols: Sequence[Sequence], nrows: int) -> "Matrix":
        return cls.from_rows(ring, [[c[i] for c in cols] for i in range(nrows)], len(cols)) if cols else cls(ring, nrows, 0)

    @classmethod
    def from_sparse_columns(cls, ring: Ring, cols: Sequence[dict], nrows: int) -> "Matrix":
        rows: list[dict] = [{} for _ in range(nrows)]
        for j, col in enumerate(cols):
            for i, v in col.items():
                rows[i][j] = v
        return cls(ring, nrows, len(cols), rows)

    @classmethod
    def zero(cls, ring: Ring, nrows: int, ncols: int) -> "Matrix":
        return cls(ring, nrows, ncols)

    @classmethod
    def identity(cls, ring: Ring, n: int) -> "Matrix":
        one = ring.one()
        return cls(ring, n, n, [{i: one} for i in range(n)])

    @classmethod
    def scalar(cls, ring: Ring, n: int, c) -> "Matrix":
        c = ring.normalize(c)
        if ring.is_zero(c):
            return cls.zero(ring, n, n)
        return cls(ring, n, n, [{i: c} for i in range(n)])

    # views -----------------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def to_rows(self) -> list[list]:
        z = self.ring.zero()
        return [[r.get(j, z) for j in range(self.ncols)] for r in self.rows]

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i].get(j, self.ring.zero())

    def sparse_columns(self) -> list[dict]:
        cols: list[dict] = [{} for _ in range(self.ncols)]
        for i, r in enumerate(self.rows):
            for j, v in r.items():
                cols[j][i] = v
        return cols

    def column(self, j: int) -> dict:
        return {i: r[j] for i, r in enumerate(self.rows) if j in r}

    def nnz(self) -> int:
        return sum(len(r) for r in self.rows)

    def is_zero(self) -> bool:
        return not any(self.rows)

    def transpose(self) -> "Matrix":
        return Matrix(self.ring, self.ncols, self.nrows, self.sparse_columns())

    @property
    def T(self) -> "Matrix":
        return self.transpose()

    def __repr__(self):
        return f"Matrix({self.ring}, {self.to_rows()!r})"

    # arithmetic ------------------------------------------------------------
    def _same(self, other: "Matrix"):
        if self.ring != other.ring:
            raise RingError(f"ring mismatch: {self.ring} vs {other.ring}")

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return (self.ring == other.ring and self.shape == other.shape
                and all(a == b for a, b in zip(self.rows, other.rows)))

    __hash__ = None

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._same(other)
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        ring = self.ring
        orows = other.rows
        out = []
        if _is_int_ring(ring):
            for r in self.rows:
                acc: dict = {}
                for k, a in r.items():
                    for j, b in orows[k].items():
                        acc[j] = acc.get(j, 0) + a * b
                out.append({j: v for j, v in acc.items() if v})
        else:
            for r in self.rows:
                acc = {}
                for k, a in r.items():
                    axpy(ring, acc, orows[k], a)
                out.append(acc)
        return Matrix(ring, self.nrows, other.ncols, out)

    def apply(self, vec: dict) -> dict:
        """Sparse matrix-vector product; ``vec`` maps column index to value."""
        ring = self.ring
        out = {}
        if _is_int_ring(ring):
            for i, r in enumerate(self.rows):
                s = 0
                if len(r) < len(vec):
                    for j, a in r.items():
                        b = vec.get(j)
                        if b:
                            s += a * b
                else:
                    for j, b in vec.items():
                        a = r.get(j)
                        if a:
                            s += a * b
                if s:
                    out[i] = s
            return out
        zero = ring.zero()
        for i, r in enumerate(self.rows):
            s = zero
            for j, a in r.items():
                b = vec.get(j)
                if b is not None:
                    s = ring.add(s, ring.mul(a, b))
            if not ring.is_zero(s):
                out[i] = s
        return out

    def __add__(self, other: "Matrix") -> "Matrix":
        self._same(other)
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        one = self.ring.one()
        rows = []
        for a, b in zip(self.rows, other.rows):
            r = dict(a)
            axpy(self.ring, r, b, one)
            rows.append(r)
        return Matrix(self.ring, self.nrows, self.ncols, rows)

    def __neg__(self) -> "Matrix":
        neg = self.ring.neg
        return Matrix(self.ring, self.nrows, self.ncols, [{j: neg(v) for j, v in r.items()} for r in self.rows])

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def scale(self, c) -> "Matrix":
        ring = self.ring
        c = ring.normalize(c)
        if ring.is_zero(c):
            return Matrix.zero(ring, self.nrows, self.ncols)
        rows = []
        for r in self.rows:
            nr = {}
            for j, v in r.items():
                w = ring.mul(c, v)
                if not ring.is_zero(w):
                    nr[j] = w
            rows.append(nr)
        return Matrix(ring, self.nrows, self.ncols, rows)

    def map_entries(self, fn, ring: Ring | None = None) -> "Matrix":
        """Apply ``fn`` entrywise (e.g. a ring homomorphism) into ``ring``."""
        ring = ring or self.ring
        rows = []
        for r in self.rows:
            nr = {}
            for j, v in r.items():
                w = ring.normalize(fn(v))
                if not ring.is_zero(w):
                    nr[j] = w
            rows.append(nr)
        return Matrix(ring, self.nrows, self.ncols, rows)

    def submatrix(self, row_idx: Iterable[int], col_idx: Iterable[int]) -> "Matrix":
        row_idx = list(row_idx)
        col_idx = list(col_idx)
        cmap = {c: k for k, c in enumerate(col_idx)}
        rows = []
        for i in row_idx:
            r = self.rows[i]
            rows.append({cmap[j]: v for j, v in r.items() if j in cmap})
        return Matrix(self.ring, len(row_idx), len(col_idx), rows)


def hstack(ring: Ring, mats: Sequence[Matrix], nrows: int | None = None) -> Matrix:
    if nrows is None:
        nrows = mats[0].nrows
    rows: list[dict] = [{} for _ in range(nrows)]
    off = 0
    for m in mats:
        if m.nrows != nrows:
            raise ValueError("hstack row mismatch")
        for i, r in enumerate(m.rows):
            for j, v in r.items():
                rows[i][off + j] = v
        off += m.ncols
    return Matrix(ring, nrows, off, rows)


def vstack(ring: Ring, mats: Sequence[Matrix], ncols: int | None = None) -> Matrix:
    if ncols is None:
        ncols = mats[0].ncols
    rows = []
    for m in mats:
        if m.ncols != ncols:
            raise ValueError("vstack column mismatch")
        rows.extend(dict(r) for r in m.rows)
    return Matrix(ring, len(rows), ncols, rows)


def block_diag(ring: Ring, mats: Sequence[Matrix]) -> Matrix:
    nrows = sum(m.nrows for m in mats)
    ncols = sum(m.ncols for m in mats)
    rows = []
    off = 0
    for m in mats:
        for r in m.rows:
            rows.append({off + j: v for j, v in r.items()})
        off += m.ncols
    return Matrix(ring, nrows, ncols, rows)
