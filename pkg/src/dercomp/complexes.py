"""Bounded chain complexes of finite-rank free modules.

Grading is homological throughout: ``d_n : C_n -> C_{n-1}`` is stored as a
``rank(n-1) x rank(n)`` matrix.  Cochain-type objects (duals, Hom into a
module) live in non-positive degrees.

Sign conventions:

* tensor: ``d(x ⊗ y) = dx ⊗ y + (-1)^|x| x ⊗ dy``, basis ordered by
  ``(p, left index, right index)``;
* Hom: degree ``n`` is ``prod_p Hom(C_p, D_{p+n})``,
  ``d f = d_D f - (-1)^n f d_C``, basis ordered by ``(p, target, source)``;
* cone: ``Cone_n = Y_n ⊕ X_{n-1}``, ``d(y, x) = (dy + f x, -dx)``;
* fiber: ``Fib_n = X_n ⊕ Y_{n+1}``, ``d(x, y) = (dx, f x - dy)``;
* totalization of a cosimplicial complex: degree ``m`` is
  ``⊕_{k<=n} X^k_{m+k}`` ordered by ``k``, with
  ``D = (-1)^k d + sum_i (-1)^i δ^i``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .linalg import (
    Subquotient,
    as_integer_representation,
    image_basis,
    is_euclidean_ring,
    kernel_basis,
    solve,
)
from .matrix import Matrix, axpy, block_diag, hstack, vstack
from .modules import (
    CanonicalForm,
    ModuleMap,
    PresentedModule,
    canonical_presentation,
    free_module,
    homology_at,
)
from .rings import MonicQuotient, Ring, RingError

__all__ = [
    "ChainComplex",
    "ChainMap",
    "HomologyGroup",
    "homology",
    "homology_group",
    "induced_map",
    "tensor_complex",
    "tensor_map",
    "hom_complex",
    "hom_precompose",
    "hom_postcompose",
    "mapping_cone",
    "homotopy_fiber",
    "fiber_projection",
    "shift",
    "direct_sum_complex",
    "truncate_good",
    "truncation_map",
    "truncation_kernel",
    "concentrated",
    "restrict_complex",
    "restrict_chain_map",
    "CosimplicialComplex",
    "TotTower",
    "totalize",
    "tot_map",
    "d_complex",
]


class ChainComplex:
    """``ranks[n]`` free generators in degree ``n``; ``diffs[n] : C_n -> C_{n-1}``."""

    def __init__(self, ring: Ring, ranks: dict, diffs: dict | None = None, check: bool = True):
        self.ring = ring
        self.ranks = {n: r for n, r in ranks.items() if r}
        diffs = diffs or {}
        self.diffs: dict[int, Matrix] = {}
        for n, D in diffs.items():
            if D.ring != ring:
                raise RingError("differential over the wrong ring")
            if D.shape != (self.rank(n - 1), self.rank(n)):
                raise ValueError(f"d_{n} has shape {D.shape}, expected {(self.rank(n - 1), self.rank(n))}")
            if not D.is_zero():
                self.diffs[n] = D
        self._hcache: dict = {}
        if check:
            for n in self.diffs:
                if n - 1 in self.diffs and not (self.diffs[n - 1] @ self.diffs[n]).is_zero():
                    raise ValueError(f"d∘d ≠ 0 at degree {n}")

    def rank(self, n: int) -> int:
        return self.ranks.get(n, 0)

    def d(self, n: int) -> Matrix:
        D = self.diffs.get(n)
        if D is None:
            return Matrix(self.ring, self.rank(n - 1), self.rank(n))
        return D

    @property
    def degrees(self) -> list[int]:
        return sorted(self.ranks)

    @property
    def lo(self) -> int:
        return min(self.ranks) if self.ranks else 0

    @property
    def hi(self) -> int:
        return max(self.ranks) if self.ranks else 0

    def rank_vector(self, lo: int | None = None, hi: int | None = None) -> list[int]:
        lo = self.lo if lo is None else lo
        hi = self.hi if hi is None else hi
        return [self.rank(n) for n in range(lo, hi + 1)]

    def __repr__(self):
        return f"ChainComplex({self.ring}, ranks={dict(sorted(self.ranks.items()))})"


def concentrated(ring: Ring, rank: int = 1, degree: int = 0) -> ChainComplex:
    """``ring^rank`` in a single degree."""
    return ChainComplex(ring, {degree: rank})


class ChainMap:
    """Degree-0 map of complexes given by ``components[n] : X_n -> Y_n``."""

    def __init__(self, source: ChainComplex, target: ChainComplex, components: dict, check: bool = True):
        if source.ring != target.ring:
            raise RingError("ring mismatch in chain map")
        self.source = source
        self.target = target
        self.components: dict[int, Matrix] = {}
        for n, F in components.items():
            if F.shape != (target.rank(n), source.rank(n)):
                raise ValueError(f"component {n} has shape {F.shape}")
            if not F.is_zero():
                self.components[n] = F
        if check:
            degs = set(source.ranks) | set(target.ranks)
            for n in degs:
                lhs = target.d(n) @ self.f(n)
                rhs = self.f(n - 1) @ source.d(n)
                if lhs != rhs:
                    raise ValueError(f"chain map square fails at degree {n}")

    @property
    def ring(self) -> Ring:
        return self.source.ring

    def f(self, n: int) -> Matrix:
        F = self.components.get(n)
        if F is None:
            return Matrix(self.ring, self.target.rank(n), self.source.rank(n))
        return F

    def compose(self, other: "ChainMap") -> "ChainMap":
        """``self ∘ other``"""
        degs = set(other.source.ranks)
        return ChainMap(other.source, self.target, {n: self.f(n) @ other.f(n) for n in degs}, check=False)

    def __matmul__(self, other):
        return self.compose(other)

    def __eq__(self, other):
        if not isinstance(other, ChainMap):
            return NotImplemented
        degs = set(self.source.ranks) | set(other.source.ranks)
        return all(self.f(n) == other.f(n) for n in degs)

    __hash__ = None

    @classmethod
    def identity(cls, C: ChainComplex) -> "ChainMap":
        return cls(C, C, {n: Matrix.identity(C.ring, r) for n, r in C.ranks.items()}, check=False)

    @classmethod
    def zero(cls, X: ChainComplex, Y: ChainComplex) -> "ChainMap":
        return cls(X, Y, {}, check=False)


# ---------------------------------------------------------------------------
# homology
# ---------------------------------------------------------------------------

def restrict_complex(C: ChainComplex) -> ChainComplex:
    """Block-encode a complex over ``base[t]/(f)`` as a complex over the base."""
    ring = C.ring
    if not isinstance(ring, MonicQuotient):
        return C
    deg = ring.degree
    return ChainComplex(ring.base, {n: r * deg for n, r in C.ranks.items()},
                        {n: as_integer_representation(D) for n, D in C.diffs.items()}, check=False)


def restrict_chain_map(f: ChainMap) -> ChainMap:
    if not isinstance(f.ring, MonicQuotient):
        return f
    return ChainMap(restrict_complex(f.source), restrict_complex(f.target),
                    {n: as_integer_representation(F) for n, F in f.components.items()}, check=False)


@dataclass
class HomologyGroup:
    """``H_n`` in canonical form, with cycle representatives and a classifier."""

    degree: int
    form: CanonicalForm
    _sq: Subquotient

    @property
    def module(self) -> PresentedModule:
        return canonical_presentation(self.form)

    @property
    def lifts(self) -> list[dict]:
        return self._sq.lifts

    def classify(self, z: dict) -> list:
        return self._sq.classify(z)

    def __str__(self):
        return str(self.form)


def homology_group(C: ChainComplex, n: int) -> HomologyGroup:
    """Homology with generators; over a monic quotient it is the underlying base-module."""
    key = ("hg", n)
    hg = C._hcache.get(key)
    if hg is not None:
        return hg
    flagged = isinstance(C.ring, MonicQuotient)
    B = restrict_complex(C)
    if not is_euclidean_ring(B.ring):
        raise RingError(f"homology generators need a Euclidean ring, got {B.ring}")
    sq = Subquotient(B.d(n), B.d(n + 1))
    form = CanonicalForm(B.ring, sq.free_rank, tuple(sq.torsion), flagged)
    hg = HomologyGroup(n, form, sq)
    C._hcache[key] = hg
    return hg


def homology(C: ChainComplex, n: int) -> PresentedModule:
    """``H_n(C)`` as a presented module (canonical presentation where possible)."""
    B = restrict_complex(C)
    if is_euclidean_ring(B.ring):
        return homology_group(C, n).module
    ring = C.ring
    X, Y, Z = free_module(ring, C.rank(n + 1)), free_module(ring, C.rank(n)), free_module(ring, C.rank(n - 1))
    return homology_at(ModuleMap(X, Y, C.d(n + 1), check=False), ModuleMap(Y, Z, C.d(n), check=False))


def induced_map(f: ChainMap, n: int) -> ModuleMap:
    """``H_n(f)`` between the canonical presentations of source and target homology."""
    hs = homology_group(f.source, n)
    ht = homology_group(f.target, n)
    F = restrict_chain_map(f).f(n)
    cols = []
    ring = hs.form.ring
    for z in hs.lifts:
        c = ht.classify(F.apply(z))
        cols.append({i: v for i, v in enumerate(c) if not ring.is_zero(v)})
    mat = Matrix.from_sparse_columns(ring, cols, ht.form.free_rank + len(ht.form.factors))
    return ModuleMap(hs.module, ht.module, mat, check=False)


# ---------------------------------------------------------------------------
# tensor and Hom
# ---------------------------------------------------------------------------

def _tensor_index(C: ChainComplex, D: ChainComplex) -> dict:
    """``idx[n] = {(p, i, j): position}`` in lexicographic ``(p, i, j)`` order."""
    idx: dict[int, dict] = {}
    for p in C.degrees:
        for q in D.degrees:
            n = p + q
            blk = idx.setdefault(n, {})
            base = len(blk)
            rq = D.rank(q)
            for i in range(C.rank(p)):
                for j in range(rq):
                    blk[(p, i, j)] = base + i * rq + j
    # re-sort each degree by (p, i, j)
    for n, blk in idx.items():
        keys = sorted(blk)
        idx[n] = {k: pos for pos, k in enumerate(keys)}
    return idx


def tensor_complex(C: ChainComplex, D: ChainComplex) -> ChainComplex:
    if C.ring != D.ring:
        raise RingError(f"ring mismatch: {C.ring} vs {D.ring}")
    ring = C.ring
    idx = _tensor_index(C, D)
    ranks = {n: len(b) for n, b in idx.items()}
    diffs = {}
    for n, blk in idx.items():
        if n - 1 not in idx:
            continue
        tgt = idx[n - 1]
        rows: list[dict] = [{} for _ in range(len(tgt))]
        Ccols = {}
        Dcols = {}
        for (p, i, j), col in blk.items():
            q = n - p
            if p not in Ccols:
                Ccols[p] = C.d(p).sparse_columns()
            if q not in Dcols:
                Dcols[q] = D.d(q).sparse_columns()
            for a, v in Ccols[p][i].items():
                r = tgt[(p - 1, a, j)]
                rows[r][col] = ring.add(rows[r].get(col, ring.zero()), v)
            sgn = -1 if p % 2 else 1
            for b, w in Dcols[q][j].items():
                r = tgt[(p, i, b)]
                val = w if sgn == 1 else ring.neg(w)
                rows[r][col] = ring.add(rows[r].get(col, ring.zero()), val)
        rows = [{k: v for k, v in r.items() if not ring.is_zero(v)} for r in rows]
        diffs[n] = Matrix(ring, len(tgt), len(blk), rows)
    return ChainComplex(ring, ranks, diffs, check=False)


def tensor_map(f: ChainMap, g: ChainMap) -> ChainMap:
    """``f ⊗ g`` (both degree 0, so no signs)."""
    src = tensor_complex(f.source, g.source)
    tgt = tensor_complex(f.target, g.target)
    ring = src.ring
    si = _tensor_index(f.source, g.source)
    ti = _tensor_index(f.target, g.target)
    comps = {}
    for n, blk in si.items():
        tgt_blk = ti.get(n, {})
        rows: list[dict] = [{} for _ in range(len(tgt_blk))]
        cache = {}
        for (p, i, j), col in blk.items():
            q = n - p
            if (p, q) not in cache:
                cache[(p, q)] = (f.f(p).sparse_columns(), g.f(q).sparse_columns())
            fc, gc = cache[(p, q)]
            for a, v in fc[i].items():
                for b, w in gc[j].items():
                    r = tgt_blk[(p, a, b)]
                    rows[r][col] = ring.add(rows[r].get(col, ring.zero()), ring.mul(v, w))
        rows = [{k: v for k, v in r.items() if not ring.is_zero(v)} for r in rows]
        comps[n] = Matrix(ring, len(tgt_blk), len(blk), rows)
    return ChainMap(src, tgt, comps, check=False)


def _hom_index(C: ChainComplex, D: ChainComplex) -> dict:
    idx: dict[int, dict] = {}
    for p in C.degrees:
        for r in D.degrees:
            n = r - p
            blk = idx.setdefault(n, {})
            for b in range(D.rank(r)):
                for a in range(C.rank(p)):
                    blk[(p, b, a)] = None
    for n, blk in idx.items():
        idx[n] = {k: pos for pos, k in enumerate(sorted(blk))}
    return idx


def hom_complex(C: ChainComplex, D: ChainComplex) -> ChainComplex:
    if C.ring != D.ring:
        raise RingError(f"ring mismatch: {C.ring} vs {D.ring}")
    ring = C.ring
    idx = _hom_index(C, D)
    ranks = {n: len(b) for n, b in idx.items()}
    diffs = {}
    Crows = {p: C.d(p + 1).rows for p in C.degrees}
    Dcols = {r: D.d(r).sparse_columns() for r in D.degrees}
    for n, blk in idx.items():
        tgt = idx.get(n - 1)
        if not tgt:
            continue
        rows: list[dict] = [{} for _ in range(len(tgt))]
        sgn_neg = (n % 2 == 0)  # coefficient of f∘d_C is -(-1)^n
        for (p, b, a), col in blk.items():
            r = p + n
            # d_D ∘ f : e_{b,a} -> sum_{b'} d_D[b', b] e_{b', a}
            for bb, v in Dcols[r][b].items():
                k = tgt[(p, bb, a)]
                rows[k][col] = ring.add(rows[k].get(col, ring.zero()), v)
            # f ∘ d_C : e_{b,a} (on C_p) -> sum_{a'} d_C[a, a'] e_{b, a'} (on C_{p+1})
            if C.rank(p + 1):
                for aa, v in Crows[p][a].items():
                    k = tgt[(p + 1, b, aa)]
                    val = ring.neg(v) if sgn_neg else v
                    rows[k][col] = ring.add(rows[k].get(col, ring.zero()), val)
        rows = [{k: v for k, v in r.items() if not ring.is_zero(v)} for r in rows]
        diffs[n] = Matrix(ring, len(tgt), len(blk), rows)
    return ChainComplex(ring, ranks, diffs, check=False)


def hom_precompose(g: ChainMap, D: ChainComplex) -> ChainMap:
    """``g^* : Hom(C, D) -> Hom(C', D)``, ``f -> f ∘ g`` for ``g : C' -> C``."""
    ring = D.ring
    src = hom_complex(g.target, D)
    tgt = hom_complex(g.source, D)
    si = _hom_index(g.target, D)
    ti = _hom_index(g.source, D)
    comps = {}
    for n, blk in si.items():
        tb = ti.get(n, {})
        rows: list[dict] = [{} for _ in range(len(tb))]
        for (p, b, a), col in blk.items():
            # (e_{b,a} ∘ g)(a') = g[a, a'] e_b
            for aa, v in g.f(p).rows[a].items():
                rows[tb[(p, b, aa)]][col] = v
        comps[n] = Matrix(ring, len(tb), len(blk), rows)
    return ChainMap(src, tgt, comps, check=False)


def hom_postcompose(C: ChainComplex, h: ChainMap) -> ChainMap:
    """``h_* : Hom(C, D) -> Hom(C, D')``, ``f -> h ∘ f``."""
    ring = C.ring
    src = hom_complex(C, h.source)
    tgt = hom_complex(C, h.target)
    si = _hom_index(C, h.source)
    ti = _hom_index(C, h.target)
    comps = {}
    for n, blk in si.items():
        tb = ti.get(n, {})
        rows: list[dict] = [{} for _ in range(len(tb))]
        cols_cache = {}
        for (p, b, a), col in blk.items():
            r = p + n
            if r not in cols_cache:
                cols_cache[r] = h.f(r).sparse_columns()
            for bb, v in cols_cache[r][b].items():
                rows[tb[(p, bb, a)]][col] = v
        comps[n] = Matrix(ring, len(tb), len(blk), rows)
    return ChainMap(src, tgt, comps, check=False)


# ---------------------------------------------------------------------------
# cones, fibers, shifts, sums, truncation
# ---------------------------------------------------------------------------

def mapping_cone(f: ChainMap) -> ChainComplex:
    X, Y = f.source, f.target
    ring = X.ring
    degs = set(Y.degrees) | {n + 1 for n in X.degrees}
    ranks = {n: Y.rank(n) + X.rank(n - 1) for n in degs}
    diffs = {}
    for n in degs:
        top = hstack(ring, [Y.d(n), f.f(n - 1)], Y.rank(n - 1))
        bot = hstack(ring, [Matrix(ring, X.rank(n - 2), Y.rank(n)), -X.d(n - 1)], X.rank(n - 2))
        diffs[n] = vstack(ring, [top, bot], ranks[n])
    return ChainComplex(ring, ranks, diffs)


def homotopy_fiber(f: ChainMap) -> ChainComplex:
    X, Y = f.source, f.target
    ring = X.ring
    degs = set(X.degrees) | {n - 1 for n in Y.degrees}
    ranks = {n: X.rank(n) + Y.rank(n + 1) for n in degs}
    diffs = {}
    for n in degs:
        top = hstack(ring, [X.d(n), Matrix(ring, X.rank(n - 1), Y.rank(n + 1))], X.rank(n - 1))
        bot = hstack(ring, [f.f(n), -Y.d(n + 1)], Y.rank(n))
        diffs[n] = vstack(ring, [top, bot], ranks[n])
    return ChainComplex(ring, ranks, diffs)


def fiber_projection(f: ChainMap) -> ChainMap:
    """The map ``Fib(f) -> X``, ``(x, y) -> x``."""
    F = homotopy_fiber(f)
    X = f.source
    ring = X.ring
    comps = {}
    for n in F.degrees:
        comps[n] = hstack(ring, [Matrix.identity(ring, X.rank(n)), Matrix(ring, X.rank(n), f.target.rank(n + 1))], X.rank(n))
    return ChainMap(F, X, comps, check=False)


def shift(C: ChainComplex, s: int) -> ChainComplex:
    """Suspension: ``shift(C, s)_n = C_{n-s}`` with differential ``(-1)^s d``."""
    sign = -1 if s % 2 else 1
    diffs = {n + s: (D if sign == 1 else -D) for n, D in C.diffs.items()}
    return ChainComplex(C.ring, {n + s: r for n, r in C.ranks.items()}, diffs, check=False)


def direct_sum_complex(*cs: ChainComplex) -> ChainComplex:
    ring = cs[0].ring
    degs = set().union(*(c.ranks for c in cs))
    ranks = {n: sum(c.rank(n) for c in cs) for n in degs}
    diffs = {n: block_diag(ring, [c.d(n) for c in cs]) for n in degs}
    return ChainComplex(ring, ranks, diffs, check=False)


def truncate_good(C: ChainComplex, s: int) -> ChainComplex:
    """``τ≤s C``: degrees ≤ s kept, degree s+1 replaced by a basis of ``im d_{s+1}``."""
    if not is_euclidean_ring(C.ring):
        raise RingError(f"truncation needs a PID, got {C.ring}")
    ring = C.ring
    img = image_basis(C.d(s + 1))
    ranks = {n: r for n, r in C.ranks.items() if n <= s}
    ranks[s + 1] = img.ncols
    diffs = {n: D for n, D in C.diffs.items() if n <= s}
    diffs[s + 1] = img
    return ChainComplex(ring, ranks, diffs, check=False)


def truncation_map(C: ChainComplex, s: int) -> ChainMap:
    """The quotient map ``C -> τ≤s C``."""
    T = truncate_good(C, s)
    ring = C.ring
    comps = {n: Matrix.identity(ring, r) for n, r in C.ranks.items() if n <= s}
    img = T.d(s + 1)
    cols = []
    for col in C.d(s + 1).sparse_columns():
        x = solve(img, col) if col else [ring.zero()] * img.ncols
        cols.append({i: v for i, v in enumerate(x) if not ring.is_zero(v)})
    comps[s + 1] = Matrix.from_sparse_columns(ring, cols, img.ncols)
    return ChainMap(C, T, comps)


def truncation_kernel(C: ChainComplex, s: int) -> ChainMap:
    """Inclusion of ``ker(C -> τ≤s C)``: degrees ``> s+1`` of ``C`` and ``ker d_{s+1}``.

    The sequence ``K -> C -> τ≤s C`` is degreewise split exact.
    """
    ring = C.ring
    Z = kernel_basis(C.d(s + 1))
    ranks = {n: r for n, r in C.ranks.items() if n > s + 1}
    if Z.ncols:
        ranks[s + 1] = Z.ncols
    diffs = {n: D for n, D in C.diffs.items() if n > s + 2}
    comps = {n: Matrix.identity(ring, r) for n, r in ranks.items() if n > s + 1}
    if Z.ncols:
        comps[s + 1] = Z
        cols = []
        for col in C.d(s + 2).sparse_columns():
            x = solve(Z, col) if col else [ring.zero()] * Z.ncols
            cols.append({i: v for i, v in enumerate(x) if not ring.is_zero(v)})
        if C.rank(s + 2):
            diffs[s + 2] = Matrix.from_sparse_columns(ring, cols, Z.ncols)
    elif C.rank(s + 2):
        diffs[s + 2] = Matrix.zero(ring, 0, C.rank(s + 2))
    K = ChainComplex(ring, ranks, diffs, check=True)
    return ChainMap(K, C, comps)


# ---------------------------------------------------------------------------
# cosimplicial complexes and totalization
# ---------------------------------------------------------------------------

class CosimplicialComplex:
    """Levels ``X^0..X^N`` with cofaces ``δ^i : X^k -> X^{k+1}`` (``i = 0..k+1``),
    optional codegeneracies ``σ^i : X^k -> X^{k-1}`` (``i = 0..k-1``) and an
    optional coaugmentation ``M -> X^0``."""

    def __init__(self, levels: list[ChainComplex], cofaces: dict, codegeneracies: dict | None = None,
                 augmentation: ChainMap | None = None, check: bool = True):
        self.levels = levels
        self.cofaces = cofaces
        self.codegeneracies = codegeneracies
        self.augmentation = augmentation
        for k in range(len(levels) - 1):
            for i in range(k + 2):
                if (k, i) not in cofaces:
                    raise ValueError(f"missing coface δ^{i} on level {k}")
        if check:
            self.check_identities()

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def _eq(self, f: ChainMap, g: ChainMap, what: str):
        if f != g:
            raise ValueError(f"cosimplicial identity fails: {what}")

    def check_identities(self):
        d, s = self.cofaces, self.codegeneracies
        N = self.depth
        for k in range(N - 1):
            for j in range(k + 3):
                for i in range(j):
                    self._eq(d[(k + 1, j)] @ d[(k, i)], d[(k + 1, i)] @ d[(k, j - 1)], f"δ{j}δ{i} on level {k}")
        if self.augmentation is not None and N >= 1:
            self._eq(d[(0, 0)] @ self.augmentation, d[(0, 1)] @ self.augmentation, "coaugmentation")
        if not s:
            return
        for k in range(2, N + 1):
            for j in range(k - 1):
                for i in range(j + 1):
                    self._eq(s[(k - 1, j)] @ s[(k, i)], s[(k - 1, i)] @ s[(k, j + 1)], f"σ{j}σ{i} on level {k}")
        for k in range(N):
            for j in range(k + 1):
                for i in range(k + 2):
                    lhs = s[(k + 1, j)] @ d[(k, i)]
                    if i < j:
                        rhs = d[(k - 1, i)] @ s[(k, j - 1)]
                    elif i in (j, j + 1):
                        rhs = ChainMap.identity(self.levels[k])
                    else:
                        rhs = d[(k - 1, i - 1)] @ s[(k, j)]
                    self._eq(lhs, rhs, f"σ{j}δ{i} on level {k}")


def _coord_solver(K: Matrix) -> Callable[[dict], dict]:
    ring = K.ring

    def coords(v: dict) -> dict:
        if not v:
            return {}
        x = solve(K, v)
        if x is None:
            raise AssertionError("vector left the normalized subcomplex")
        return {i: c for i, c in enumerate(x) if not ring.is_zero(c)}
    return coords


class TotTower:
    """Truncated totalizations ``Tot^0 .. Tot^N`` of a cosimplicial complex.

    The complex is assembled once at depth ``N``; ``Tot^n`` is the leading
    block (levels ``k <= n``) and the projection ``Tot^n -> Tot^{n-1}``
    forgets level ``n``.  Only Tot-degrees ``lo..hi`` are materialized, so
    homology is valid in degrees ``lo+1 .. hi-1`` (and at ``lo`` when
    ``lo`` is below the support).
    """

    def __init__(self, X: CosimplicialComplex, n: int, lo: int, hi: int, mode: str = "unnormalized"):
        if mode not in ("unnormalized", "normalized"):
            raise ValueError(f"unknown mode {mode!r}")
        if n > X.depth:
            raise ValueError(f"cofaces only provided up to level {X.depth}")
        if mode == "normalized" and not X.codegeneracies and n > 0:
            raise ValueError("normalized mode needs codegeneracies")
        self.X = X
        self.n = n
        self.lo, self.hi = lo, hi
        self.mode = mode
        ring = X.levels[0].ring
        self.ring = ring
        # normalized bases: bases[k][j] matrix with columns spanning N^k_j
        self._bases: dict = {}
        self._coords: dict = {}
        self._stages: dict = {}
        if mode == "normalized":
            for k in range(n + 1):
                L = X.levels[k]
                for m in range(lo, hi + 1):
                    j = m + k
                    r = L.rank(j)
                    if k == 0 or r == 0:
                        continue
                    S = vstack(ring, [X.codegeneracies[(k, t)].f(j) for t in range(k)], r)
                    K = kernel_basis(S)
                    self._bases[(k, j)] = K
                    self._coords[(k, j)] = _coord_solver(K)
        # offsets[m] = list of (k, start, size) in level order
        self.offsets: dict[int, list] = {}
        for m in range(lo, hi + 1):
            off = 0
            parts = []
            for k in range(n + 1):
                size = self._dim(k, m + k)
                parts.append((k, off, size))
                off += size
            self.offsets[m] = parts
        self.D: dict[int, Matrix] = {m: self._build_D(m) for m in range(lo + 1, hi + 1)}

    def _dim(self, k: int, j: int) -> int:
        if (k, j) in self._bases:
            return self._bases[(k, j)].ncols
        return self.X.levels[k].rank(j)

    def _basis_vectors(self, k: int, j: int) -> list[dict]:
        if (k, j) in self._bases:
            return self._bases[(k, j)].sparse_columns()
        return [{i: self.ring.one()} for i in range(self.X.levels[k].rank(j))]

    def _to_coords(self, k: int, j: int, v: dict) -> dict:
        c = self._coords.get((k, j))
        return c(v) if c else v

    def _build_D(self, m: int) -> Matrix:
        ring = self.ring
        X = self.X
        src = self.offsets[m]
        tgt = {k: (off, size) for k, off, size in self.offsets[m - 1]}
        total_t = sum(size for _, _, size in self.offsets[m - 1])
        cols: list[dict] = []
        for k, _, size in src:
            if not size:
                continue
            j = m + k
            L = X.levels[k]
            dint = L.d(j)
            faces = [X.cofaces[(k, i)].f(j) for i in range(k + 2)] if k < self.n else []
            for v in self._basis_vectors(k, j):
                col: dict = {}
                w = dint.apply(v)
                if w:
                    if k % 2:
                        w = {a: ring.neg(b) for a, b in w.items()}
                    off, _ = tgt[k]
                    for a, b in self._to_coords(k, j - 1, w).items():
                        col[off + a] = b
                if faces:
                    acc: dict = {}
                    for i, F in enumerate(faces):
                        axpy(ring, acc, F.apply(v), ring.one() if i % 2 == 0 else ring.neg(ring.one()))
                    if acc:
                        off, _ = tgt[k + 1]
                        for a, b in self._to_coords(k + 1, j, acc).items():
                            col[off + a] = b
                cols.append(col)
        return Matrix.from_sparse_columns(ring, cols, total_t)

    def stage_rank(self, n: int, m: int) -> int:
        return sum(size for k, _, size in self.offsets[m] if k <= n)

    def stage(self, n: int) -> ChainComplex:
        """``Tot^n`` restricted to the materialized degrees."""
        if n > self.n:
            raise ValueError("stage beyond assembled depth")
        cached = self._stages.get(n)
        if cached is not None:
            return cached
        ranks = {m: self.stage_rank(n, m) for m in range(self.lo, self.hi + 1)}
        diffs = {}
        for m, D in self.D.items():
            diffs[m] = D.submatrix(range(ranks[m - 1]), range(ranks[m]))
        C = ChainComplex(self.ring, ranks, diffs, check=False)
        self._stages[n] = C
        return C

    def projection(self, n: int) -> ChainMap:
        """``Tot^n -> Tot^{n-1}``"""
        src, tgt = self.stage(n), self.stage(n - 1)
        ring = self.ring
        comps = {m: Matrix(ring, tgt.rank(m), src.rank(m), [{i: ring.one()} for i in range(tgt.rank(m))])
                 for m in src.ranks}
        return ChainMap(src, tgt, comps, check=False)

    def augmentation(self, n: int) -> ChainMap:
        """``M -> Tot^n`` through level 0."""
        eta = self.X.augmentation
        if eta is None:
            raise ValueError("no coaugmentation provided")
        tgt = self.stage(n)
        ring = self.ring
        comps = {}
        for m in range(self.lo, self.hi + 1):
            F = eta.f(m)
            comps[m] = Matrix(ring, tgt.rank(m), eta.source.rank(m),
                              [dict(F.rows[i]) if i < F.nrows else {} for i in range(tgt.rank(m))])
        src = ChainComplex(ring, {m: eta.source.rank(m) for m in range(self.lo, self.hi + 1)},
                           {m: eta.source.d(m) for m in range(self.lo + 1, self.hi + 1)}, check=False)
        return ChainMap(src, tgt, comps, check=False)


def tot_map(T1: TotTower, T2: TotTower, level_maps: list[ChainMap], n: int) -> ChainMap:
    """``Tot^n(X) -> Tot^n(Y)`` from level maps commuting with cofaces (and codegeneracies)."""
    ring = T1.ring
    src, tgt = T1.stage(n), T2.stage(n)
    comps = {}
    for m in range(max(T1.lo, T2.lo), min(T1.hi, T2.hi) + 1):
        toff = {k: off for k, off, _ in T2.offsets[m]}
        cols = []
        for k, _, size in T1.offsets[m]:
            if k > n or not size:
                continue
            F = level_maps[k].f(m + k)
            for v in T1._basis_vectors(k, m + k):
                w = T2._to_coords(k, m + k, F.apply(v))
                cols.append({toff[k] + a: b for a, b in w.items()})
        comps[m] = Matrix.from_sparse_columns(ring, cols, tgt.rank(m))
    return ChainMap(src, tgt, comps, check=False)


def totalize(X: CosimplicialComplex, n: int, lo: int, hi: int, mode: str = "unnormalized") -> TotTower:
    return TotTower(X, n, lo, hi, mode)


def d_complex(X: CosimplicialComplex, n: int, mode: str = "unnormalized") -> ChainComplex:
    """``Tot^n`` over the full degree range supported by the levels."""
    lo = min(L.lo - k for k, L in enumerate(X.levels[: n + 1]) if L.ranks) - 1
    hi = max(L.hi - k for k, L in enumerate(X.levels[: n + 1]) if L.ranks) + 1
    return TotTower(X, n, lo, hi, mode).stage(n)
