"""Exact linear algebra: Smith normal form, kernels, images, solving.

Two elimination paths live here:

* :func:`smith_normal_form` is the dense textbook algorithm with both
  transforms, used for presentation matrices and for the public SNF API.
* :class:`RowEchelon` is a sparse row-echelon engine with optional tracking
  of the row transform and its inverse.  Kernels, solves and the homology
  subquotients of large complexes go through it.

Both work over Z and over fields (F/p, Q, Z/p).  Non-Euclidean rings
(Z/m composite, monic quotients) are handled by encoding into the base ring
first, see :func:`as_integer_representation`.
"""
from __future__ import annotations

from dataclasses import dataclass

from .matrix import Matrix, axpy, hstack
from .rings import (
    Integers,
    IntegersMod,
    MonicQuotient,
    NonEuclideanError,
    Ring,
    ZZ,
    is_prime,
)

__all__ = [
    "SnfDecomposition",
    "smith_normal_form",
    "invariant_factors",
    "RowEchelon",
    "column_echelon",
    "kernel_basis",
    "image_basis",
    "solve",
    "rank",
    "Subquotient",
    "as_integer_representation",
    "encode_vector",
    "decode_vector",
    "multiplication_matrix",
    "is_euclidean_ring",
]


def is_euclidean_ring(ring: Ring) -> bool:
    if isinstance(ring, IntegersMod):
        return is_prime(ring.m)
    return ring.is_euclidean


def _require_euclidean(ring: Ring):
    if not is_euclidean_ring(ring):
        raise NonEuclideanError(f"{ring} is non-Euclidean; use integer-representation fallback")


def _dot(ring: Ring, a: dict, b: dict):
    if len(a) > len(b):
        a, b = b, a
    if isinstance(ring, Integers):
        s = 0
        for k, v in a.items():
            w = b.get(k)
            if w:
                s += v * w
        return s
    s = ring.zero()
    for k, v in a.items():
        w = b.get(k)
        if w is not None:
            s = ring.add(s, ring.mul(v, w))
    return s


# ---------------------------------------------------------------------------
# sparse row echelon
# ---------------------------------------------------------------------------

class RowEchelon:
    """Row echelon form ``T @ rows = R`` of a list of sparse rows.

    For Z the pivot in each column is reached by repeated Euclidean steps
    (smallest absolute value, lowest row index on ties) and made positive;
    over a field it is scaled to 1.  When ``track`` is set the transform
    ``T`` is kept as rows; with ``inverse`` also the rows of ``(T^-1)^T``.
    """

    def __init__(self, ring: Ring, rows: list[dict], ncols: int, track: bool = False, inverse: bool = False):
        _require_euclidean(ring)
        self.ring = ring
        self.ncols = ncols
        self.rows = [dict(r) for r in rows]
        m = len(self.rows)
        one = ring.one()
        self.T = [{i: one} for i in range(m)] if track else None
        self.TinvT = [{i: one} for i in range(m)] if inverse else None
        self.pivots: list[int] = []
        self._reduce()

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def _addrow(self, i: int, j: int, q):
        """row_i -= q * row_j"""
        ring = self.ring
        negq = ring.neg(q)
        axpy(ring, self.rows[i], self.rows[j], negq)
        if self.T is not None:
            axpy(ring, self.T[i], self.T[j], negq)
        if self.TinvT is not None:
            axpy(ring, self.TinvT[j], self.TinvT[i], q)

    def _swap(self, i: int, j: int):
        if i == j:
            return
        for lst in (self.rows, self.T, self.TinvT):
            if lst is not None:
                lst[i], lst[j] = lst[j], lst[i]

    def _scale(self, i: int, u):
        """row_i *= u for a unit u."""
        ring = self.ring
        if u == ring.one():
            return
        uinv = ring.inverse(u)
        self.rows[i] = {k: ring.mul(u, v) for k, v in self.rows[i].items()}
        if self.T is not None:
            self.T[i] = {k: ring.mul(u, v) for k, v in self.T[i].items()}
        if self.TinvT is not None:
            self.TinvT[i] = {k: ring.mul(uinv, v) for k, v in self.TinvT[i].items()}

    def _reduce(self):
        ring = self.ring
        rows = self.rows
        m = len(rows)
        isint = isinstance(ring, Integers)
        cols = sorted(set().union(*rows)) if rows else []
        r = 0
        for c in cols:
            if r == m:
                break
            cand = [i for i in range(r, m) if c in rows[i]]
            if not cand:
                continue
            while True:
                if isint:
                    piv = min(cand, key=lambda i: (abs(rows[i][c]), i))
                else:
                    piv = cand[0]
                a = rows[piv][c]
                rest = []
                for i in cand:
                    if i == piv:
                        continue
                    b = rows[i][c]
                    q = b // a if isint else ring.divmod(b, a)[0]
                    self._addrow(i, piv, q)
                    if c in rows[i]:
                        rest.append(i)
                if not rest:
                    break
                cand = rest + [piv]
            self._swap(piv, r)
            a = rows[r][c]
            if isint:
                if a < 0:
                    self._scale(r, -1)
            else:
                self._scale(r, ring.inverse(a))
            self.pivots.append(c)
            r += 1

    def basis(self) -> list[dict]:
        """Echelon basis of the row space (row lattice over Z)."""
        return self.rows[: self.rank]

    def combination(self, b: dict):
        """Coefficients y with ``sum_i y_i R_i = b``, or ``None`` if b is not in the span."""
        ring = self.ring
        isint = isinstance(ring, Integers)
        res = dict(b)
        y = {}
        for i, c in enumerate(self.pivots):
            v = res.get(c)
            if v is None:
                continue
            a = self.rows[i][c]
            if isint:
                if v % a:
                    return None
                q = v // a
            else:
                q = ring.divmod(v, a)[0]
            y[i] = q
            axpy(ring, res, self.rows[i], ring.neg(q))
        if res:
            return None
        return y


def column_echelon(M: Matrix, track: bool = True, inverse: bool = False) -> RowEchelon:
    """Echelon of the columns of ``M`` (rows of ``M^T``), cached on ``M``."""
    key = "colech"
    ech = M._cache.get(key)
    if ech is not None and (not track or ech.T is not None) and (not inverse or ech.TinvT is not None):
        return ech
    ech = RowEchelon(M.ring, M.sparse_columns(), M.nrows, track=track, inverse=inverse)
    M._cache[key] = ech
    return ech


# ---------------------------------------------------------------------------
# dense Smith normal form
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SnfDecomposition:
    """``U @ M @ V == D`` with U, V invertible and D diagonal, d1 | d2 | ..."""

    U: Matrix
    D: Matrix
    V: Matrix
    rows: int
    cols: int

    @property
    def diagonal(self) -> list:
        return [self.D[i, i] for i in range(min(self.rows, self.cols))]


def _dense_snf(A: list[list], ring: Ring, want_u=True, want_uinv=False, want_v=True, want_vinv=False):
    """In-place SNF of a dense matrix. Returns (A, U, Uinv, V, Vinv)."""
    m = len(A)
    n = len(A[0]) if m else 0
    zero, one = ring.zero(), ring.one()
    isint = isinstance(ring, Integers)

    def ident(k):
        return [[one if i == j else zero for j in range(k)] for i in range(k)]

    U = ident(m) if want_u else None
    Uinv = ident(m) if want_uinv else None
    V = ident(n) if want_v else None
    Vinv = ident(n) if want_vinv else None
    add, mul, neg = ring.add, ring.mul, ring.neg

    def row_op(i, j, q):  # row_i += q row_j
        if isint:
            Ai, Aj = A[i], A[j]
            for c in range(n):
                if Aj[c]:
                    Ai[c] += q * Aj[c]
            if U is not None:
                Ui, Uj = U[i], U[j]
                for c in range(m):
                    if Uj[c]:
                        Ui[c] += q * Uj[c]
            if Uinv is not None:
                for row in Uinv:
                    if row[i]:
                        row[j] -= q * row[i]
            return
        Ai, Aj = A[i], A[j]
        for c in range(n):
            Ai[c] = add(Ai[c], mul(q, Aj[c]))
        if U is not None:
            for c in range(m):
                U[i][c] = add(U[i][c], mul(q, U[j][c]))
        if Uinv is not None:
            for row in Uinv:
                row[j] = add(row[j], neg(mul(q, row[i])))

    def col_op(i, j, q):  # col_i += q col_j
        for row in A:
            if not ring.is_zero(row[j]):
                row[i] = add(row[i], mul(q, row[j]))
        if V is not None:
            for row in V:
                row[i] = add(row[i], mul(q, row[j]))
        if Vinv is not None:
            Vi, Vj = Vinv[i], Vinv[j]
            for c in range(n):
                Vj[c] = add(Vj[c], neg(mul(q, Vi[c])))

    def row_swap(i, j):
        if i == j:
            return
        A[i], A[j] = A[j], A[i]
        if U is not None:
            U[i], U[j] = U[j], U[i]
        if Uinv is not None:
            for row in Uinv:
                row[i], row[j] = row[j], row[i]

    def col_swap(i, j):
        if i == j:
            return
        for row in A:
            row[i], row[j] = row[j], row[i]
        if V is not None:
            for row in V:
                row[i], row[j] = row[j], row[i]
        if Vinv is not None:
            Vinv[i], Vinv[j] = Vinv[j], Vinv[i]

    def row_scale(i, u):
        if u == one:
            return
        uinv = ring.inverse(u)
        A[i] = [mul(u, x) for x in A[i]]
        if U is not None:
            U[i] = [mul(u, x) for x in U[i]]
        if Uinv is not None:
            for row in Uinv:
                row[i] = mul(row[i], uinv)

    def quo(a, b):
        return a // b if isint else ring.divmod(a, b)[0]

    def divides(a, b):
        if isint:
            return b % a == 0
        return ring.is_zero(ring.divmod(b, a)[1])

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                Ai = A[i]
                for j in range(t, n):
                    x = Ai[j]
                    if not ring.is_zero(x):
                        key = (ring.norm(x), i, j)
                        if best is None or key < best:
                            best = key
            if best is None:
                return A, U, Uinv, V, Vinv
            _, i0, j0 = best
            row_swap(t, i0)
            col_swap(t, j0)
            p = A[t][t]
            for i in range(t + 1, m):
                if not ring.is_zero(A[i][t]):
                    row_op(i, t, neg(quo(A[i][t], p)))
            for j in range(t + 1, n):
                if not ring.is_zero(A[t][j]):
                    col_op(j, t, neg(quo(A[t][j], p)))
            if any(not ring.is_zero(A[i][t]) for i in range(t + 1, m)) or any(
                not ring.is_zero(A[t][j]) for j in range(t + 1, n)
            ):
                continue
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if not ring.is_zero(A[i][j]) and not divides(p, A[i][j]):
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_op(t, bad, one)
        unit, _ = ring.canonical_associate(A[t][t])
        row_scale(t, unit)
    return A, U, Uinv, V, Vinv


def smith_normal_form(M: Matrix) -> SnfDecomposition:
    """Smith normal form over Z, F/p or Q, with the identity ``U M V = D`` checked."""
    ring = M.ring
    if not is_euclidean_ring(ring) or isinstance(ring, IntegersMod):
        raise NonEuclideanError(f"SNF unsupported over {ring}; use as_integer_representation")
    A, U, _, V, _ = _dense_snf(M.to_rows(), ring)
    m, n = M.shape
    D = Matrix.from_rows(ring, A, n) if m else Matrix(ring, 0, n)
    Um = Matrix.from_rows(ring, U, m) if m else Matrix(ring, 0, 0)
    Vm = Matrix.from_rows(ring, V, n) if n else Matrix(ring, 0, 0)
    if Um @ M @ Vm != D:
        raise AssertionError("SNF identity U M V = D failed")
    return SnfDecomposition(Um, D, Vm, m, n)


def invariant_factors(M: Matrix) -> list:
    """Nonzero diagonal entries of the Smith form, in divisibility order."""
    snf = smith_normal_form(M)
    return [d for d in snf.diagonal if not M.ring.is_zero(d)]


# ---------------------------------------------------------------------------
# encodings for non-Euclidean rings
# ---------------------------------------------------------------------------

def multiplication_matrix(ring: MonicQuotient, a) -> list[list]:
    """Matrix of ``x -> a*x`` on the basis 1, t, ..., t^(deg-1)."""
    n = ring.degree
    cols = []
    basis_elt = ring.one()
    t = ring.gen()
    for _ in range(n):
        cols.append(ring.mul(a, basis_elt))
        basis_elt = ring.mul(basis_elt, t)
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def as_integer_representation(M: Matrix) -> Matrix:
    """Encode a matrix over Z/m or a monic quotient into the base ring.

    * ``Z/m``: the result is ``[lift(M) | m I]``; its columns are relators,
      so its cokernel over Z is the cokernel of M as an abelian group.
    * ``base[t]/(f)``: each entry becomes the ``deg f`` square block of
      multiplication by that entry.  Kernel and cokernel of the encoding are
      the Λ-kernel and Λ-cokernel viewed as base-modules, because the image
      of the block matrix is already closed under the t-action.
    """
    ring = M.ring
    if isinstance(ring, IntegersMod):
        lifted = Matrix(ZZ, M.nrows, M.ncols, [dict(r) for r in M.rows])
        return hstack(ZZ, [lifted, Matrix.scalar(ZZ, M.nrows, ring.m)], M.nrows)
    if isinstance(ring, MonicQuotient):
        n = ring.degree
        base = ring.base
        rows: list[dict] = [{} for _ in range(M.nrows * n)]
        for i, r in enumerate(M.rows):
            for j, a in r.items():
                block = multiplication_matrix(ring, a)
                for bi in range(n):
                    for bj in range(n):
                        v = block[bi][bj]
                        if not base.is_zero(v):
                            rows[i * n + bi][j * n + bj] = v
        return Matrix(base, M.nrows * n, M.ncols * n, rows)
    return M


def encode_vector(ring: MonicQuotient, vec: dict) -> dict:
    n = ring.degree
    out = {}
    for i, a in vec.items():
        for e, c in enumerate(a):
            if not ring.base.is_zero(c):
                out[i * n + e] = c
    return out


def decode_vector(ring: MonicQuotient, vec: dict) -> dict:
    n = ring.degree
    base = ring.base
    acc: dict[int, list] = {}
    for k, c in vec.items():
        i, e = divmod(k, n)
        acc.setdefault(i, [base.zero()] * n)[e] = c
    out = {}
    for i, coeffs in acc.items():
        v = tuple(coeffs)
        if any(v):
            out[i] = v
    return out


# ---------------------------------------------------------------------------
# kernels, images, solving
# ---------------------------------------------------------------------------

def kernel_basis(M: Matrix) -> Matrix:
    """Columns form a basis of ker M (a direct summand over a PID).

    Over a monic quotient the result is a base-ring basis of the kernel of
    the block encoding; over composite Z/m it is a spanning set.
    """
    ring = M.ring
    if isinstance(ring, MonicQuotient):
        return kernel_basis(as_integer_representation(M))
    if isinstance(ring, IntegersMod) and not is_prime(ring.m):
        enc = as_integer_representation(M)
        K = kernel_basis(enc)
        cols = []
        for col in K.sparse_columns():
            v = {i: c % ring.m for i, c in col.items() if i < M.ncols and c % ring.m}
            if v:
                cols.append(v)
        return Matrix.from_sparse_columns(ring, cols, M.ncols)
    ech = column_echelon(M, track=True)
    return Matrix.from_sparse_columns(ring, ech.T[ech.rank:], M.ncols)


def image_basis(M: Matrix) -> Matrix:
    """Columns form a basis of the column space (lattice) of M."""
    _require_euclidean(M.ring)
    ech = column_echelon(M, track=False)
    return Matrix.from_sparse_columns(M.ring, ech.basis(), M.nrows)


def rank(M: Matrix) -> int:
    if isinstance(M.ring, MonicQuotient):
        raise NonEuclideanError("rank over a monic quotient is not defined here")
    return column_echelon(M, track=False).rank


def solve(M: Matrix, b) -> list | None:
    """Exact solution of ``M x = b``; ``None`` certifies that none exists.

    ``b`` may be a list (length ``M.nrows``) or a sparse dict.  Returns a
    dense list.
    """
    ring = M.ring
    if isinstance(b, dict):
        bvec = {i: v for i, v in b.items() if not ring.is_zero(v)}
    else:
        if len(b) != M.nrows:
            raise ValueError(f"shape mismatch: {M.shape} vs rhs of length {len(b)}")
        bvec = {i: ring.normalize(v) for i, v in enumerate(b) if not ring.is_zero(ring.normalize(v))}
    x = _solve_sparse(M, bvec)
    if x is None:
        return None
    z = ring.zero()
    return [x.get(j, z) for j in range(M.ncols)]


def _solve_sparse(M: Matrix, bvec: dict):
    ring = M.ring
    if isinstance(ring, MonicQuotient):
        enc = as_integer_representation(M)
        x = _solve_sparse(enc, encode_vector(ring, bvec))
        return None if x is None else decode_vector(ring, x)
    if isinstance(ring, IntegersMod) and not is_prime(ring.m):
        enc = as_integer_representation(M)
        x = _solve_sparse(enc, {i: int(v) for i, v in bvec.items()})
        if x is None:
            return None
        return {j: v % ring.m for j, v in x.items() if j < M.ncols and v % ring.m}
    ech = column_echelon(M, track=True)
    y = ech.combination(bvec)
    if y is None:
        return None
    x: dict = {}
    for i, c in y.items():
        axpy(ring, x, ech.T[i], c)
    return x


# ---------------------------------------------------------------------------
# subquotients ker(A) / im(B)
# ---------------------------------------------------------------------------

def _snf_row_tracked(ring: Ring, Xrows: list[dict], ncols: int):
    """Diagonalize X by row ops (tracked) and free column ops.

    Returns ``(diag, U, UinvT)`` with ``U X V = diag`` for some invertible V;
    ``diag`` has length ``len(Xrows)`` (zeros past the rank).
    """
    k = len(Xrows)
    e1 = RowEchelon(ring, Xrows, ncols, track=True, inverse=True)
    r = e1.rank
    zero = ring.zero()
    if r == 0:
        return [zero] * k, e1.T, e1.TinvT
    e2 = RowEchelon(ring, [dict(c) for c in _transpose_rows(e1.rows[:r], ncols)], r)
    Lt = e2.basis()
    L = [[Lt[j].get(i, zero) for j in range(len(Lt))] for i in range(r)]
    A, U2, U2inv, _, _ = _dense_snf(L, ring, want_u=True, want_uinv=True, want_v=False)
    diag = [A[i][i] if i < len(A[0]) else zero for i in range(r)] + [zero] * (k - r)
    U = []
    for i in range(r):
        row: dict = {}
        for j in range(r):
            c = U2[i][j]
            if not ring.is_zero(c):
                axpy(ring, row, e1.T[j], c)
        U.append(row)
    U.extend(e1.T[r:])
    UinvT = []
    for i in range(r):
        row = {}
        for j in range(r):
            c = U2inv[j][i]
            if not ring.is_zero(c):
                axpy(ring, row, e1.TinvT[j], c)
        UinvT.append(row)
    UinvT.extend(e1.TinvT[r:])
    return diag, U, UinvT


def _transpose_rows(rows: list[dict], ncols: int) -> list[dict]:
    out: list[dict] = [{} for _ in range(ncols)]
    for i, r in enumerate(rows):
        for j, v in r.items():
            out[j][i] = v
    return [c for c in out if c]


class Subquotient:
    """The module ``ker(A) / im(B)`` for composable ``B``, ``A`` with ``A B = 0``.

    Works over Z and fields.  After construction:

    * ``free_rank`` and ``torsion`` (invariant factors > 1, ascending) give
      the canonical form;
    * ``lifts[g]`` is a cycle representing canonical generator ``g`` (free
      generators first, then torsion);
    * :meth:`classify` sends a cycle to its coordinates on those generators.
    """

    def __init__(self, A: Matrix, B: Matrix):
        ring = A.ring
        _require_euclidean(ring)
        if B.nrows != A.ncols:
            raise ValueError("incompatible shapes for ker(A)/im(B)")
        self.ring = ring
        self.dim = A.ncols
        ech = column_echelon(A, track=True, inverse=True)
        r = ech.rank
        K = ech.T[r:]
        Y = ech.TinvT[r:]
        self._Y = Y
        k = len(K)
        Xrows: list[dict] = [{} for _ in range(k)]
        isz = ring.is_zero
        for j, col in enumerate(B.sparse_columns()):
            if not col:
                continue
            for i in range(k):
                s = _dot(ring, Y[i], col)
                if not isz(s):
                    Xrows[i][j] = s
        diag, U, UinvT = _snf_row_tracked(ring, Xrows, B.ncols)
        self._U = U
        order_free = [i for i in range(k) if isz(diag[i])]
        order_tors = [i for i in range(k) if not isz(diag[i]) and ring.norm(diag[i]) > 1]
        self.free_rank = len(order_free)
        self.torsion = [diag[i] for i in order_tors]
        self._order = order_free + order_tors
        self._mods = [None] * len(order_free) + self.torsion
        lifts = []
        for i in self._order:
            v: dict = {}
            for l, c in UinvT[i].items():
                axpy(ring, v, K[l], c)
            lifts.append(v)
        self.lifts = lifts

    @property
    def ngens(self) -> int:
        return len(self._order)

    def classify(self, z: dict) -> list:
        """Coordinates of the class of cycle ``z`` on the canonical generators."""
        ring = self.ring
        isint = isinstance(ring, Integers)
        y = {}
        for l, Yl in enumerate(self._Y):
            s = _dot(ring, Yl, z)
            if not ring.is_zero(s):
                y[l] = s
        out = []
        for i, d in zip(self._order, self._mods):
            c = _dot(ring, self._U[i], y)
            if d is not None and isint:
                c %= d
            out.append(c)
        return out
