"""The cobar cosimplicial complex ``k -> B^{⊗(k+1)} ⊗ M``.

Level ``k`` is the left-associated tensor product of ``k+1`` copies of the
DG algebra ``B`` and the complex ``M``.  A basis element is a tuple of
``(degree, index)`` pairs, one per factor.  Within a total degree the order
agrees with iterated :func:`~dercomp.complexes.tensor_complex`: compare the
partial degree sums from the right, then the indices from the left.

* coface ``δ^s`` inserts the unit of ``B`` in slot ``s``;
* codegeneracy ``σ^t`` multiplies slots ``t`` and ``t+1``;
* the coaugmentation is ``x -> 1 ⊗ x``.

None of these maps has degree, so no Koszul signs appear except in the
internal differential.
"""
from __future__ import annotations

from .complexes import ChainComplex, ChainMap, CosimplicialComplex
from .matrix import Matrix
from .resolutions import DGAlgebra

__all__ = ["cobar_cosimplicial", "cobar_map", "level_basis"]


def _sort_key(elem: tuple) -> tuple:
    sums = []
    s = 0
    for deg, _ in elem:
        s += deg
        sums.append(s)
    return tuple(reversed(sums[:-1])) + tuple(i for _, i in elem)


def level_basis(factors: list[ChainComplex], top: int) -> dict[int, list[tuple]]:
    """Basis tuples of ``F_0 ⊗ ... ⊗ F_r`` in degrees ``<= top``."""
    per = [[(d, i) for d in F.degrees for i in range(F.rank(d))] for F in factors]
    out: dict[int, list] = {}

    def rec(pos, acc, deg):
        if pos == len(per):
            out.setdefault(deg, []).append(tuple(acc))
            return
        for d, i in per[pos]:
            if deg + d <= top:
                acc.append((d, i))
                rec(pos + 1, acc, deg + d)
                acc.pop()

    rec(0, [], 0)
    for j in out:
        out[j].sort(key=_sort_key)
    return out


def _vec_add(ring, acc: dict, key, v):
    nv = ring.add(acc.get(key, ring.zero()), v)
    if ring.is_zero(nv):
        acc.pop(key, None)
    else:
        acc[key] = nv


class _Level:
    def __init__(self, B: DGAlgebra, M: ChainComplex, k: int, top: int):
        self.k = k
        self.factors = [B.underlying] * (k + 1) + [M]
        self.basis = level_basis(self.factors, top)
        self.index = {j: {e: n for n, e in enumerate(b)} for j, b in self.basis.items()}
        self.top = top

    def rank(self, j):
        return len(self.basis.get(j, ()))


def _differential(ring, level: _Level) -> dict:
    cols_cache = {}
    diffs = {}
    for j, basis in level.basis.items():
        if j - 1 not in level.basis:
            continue
        tgt = level.index[j - 1]
        cols = []
        for e in basis:
            acc: dict = {}
            partial = 0
            for slot, (deg, i) in enumerate(e):
                F = level.factors[slot]
                key = (id(F), deg)
                if key not in cols_cache:
                    cols_cache[key] = F.d(deg).sparse_columns()
                col = cols_cache[key][i] if deg in F.ranks else {}
                for a, v in col.items():
                    new = e[:slot] + ((deg - 1, a),) + e[slot + 1:]
                    _vec_add(ring, acc, tgt[new], v if partial % 2 == 0 else ring.neg(v))
                partial += deg
            cols.append(acc)
        diffs[j] = Matrix.from_sparse_columns(ring, cols, len(tgt))
    return diffs


def _coface(ring, B: DGAlgebra, src: _Level, tgt: _Level, s: int) -> dict:
    unit = B.unit_vector()
    comps = {}
    for j, basis in src.basis.items():
        tidx = tgt.index.get(j, {})
        cols = []
        for e in basis:
            acc = {}
            for c, v in unit.items():
                acc[tidx[e[:s] + ((0, c),) + e[s:]]] = v
            cols.append(acc)
        comps[j] = Matrix.from_sparse_columns(ring, cols, len(tidx))
    return comps


def _codegeneracy(ring, B: DGAlgebra, src: _Level, tgt: _Level, t: int) -> dict:
    comps = {}
    for j, basis in src.basis.items():
        tidx = tgt.index.get(j)
        if tidx is None:
            # above the materialized range of the target level
            comps[j] = Matrix.zero(ring, 0, len(basis))
            continue
        cols = []
        for e in basis:
            (p, i), (q, l) = e[t], e[t + 1]
            acc: dict = {}
            for c, v in B.product(p, i, q, l).items():
                _vec_add(ring, acc, tidx[e[:t] + ((p + q, c),) + e[t + 2:]], v)
            cols.append(acc)
        comps[j] = Matrix.from_sparse_columns(ring, cols, len(tidx))
    return comps


def cobar_cosimplicial(B: DGAlgebra, M: ChainComplex, depth: int, top: int,
                       codegeneracies: bool = True, check: bool = False) -> CosimplicialComplex:
    """Levels ``0..depth``, all materialized in degrees ``<= top + depth + 1``.

    A common truncation degree keeps every coface and codegeneracy an honest
    chain map, and level ``k`` still reaches the degree ``top + k`` that
    ``Tot`` reads.

    ``top`` should be at least one more than the highest Tot-degree whose
    homology is wanted.  Codegeneracies are built only when ``B`` has a
    multiplication and ``codegeneracies`` is set.
    """
    if B.ring != M.ring:
        raise ValueError("algebra and module over different rings")
    if M.ranks and M.lo < 0:
        raise ValueError("module complex must be connective")
    ring = B.ring
    lv = [_Level(B, M, k, top + depth + 1) for k in range(depth + 1)]
    levels = []
    for L in lv:
        ranks = {j: len(b) for j, b in L.basis.items()}
        levels.append(ChainComplex(ring, ranks, _differential(ring, L), check=check))
    cofaces = {}
    for k in range(depth):
        for s in range(k + 2):
            cofaces[(k, s)] = ChainMap(levels[k], levels[k + 1], _coface(ring, B, lv[k], lv[k + 1], s), check=check)
    codegs = None
    if codegeneracies and B.has_multiplication:
        codegs = {}
        for k in range(1, depth + 1):
            for t in range(k):
                codegs[(k, t)] = ChainMap(levels[k], levels[k - 1], _codegeneracy(ring, B, lv[k], lv[k - 1], t), check=check)
    Mt = ChainComplex(ring, {j: r for j, r in M.ranks.items() if j <= top},
                      {j: D for j, D in M.diffs.items() if j <= top}, check=False)
    aug_comps = {}
    idx0 = lv[0].index
    for j in Mt.degrees:
        cols = [{idx0[j][((0, 0), (j, i))]: ring.one()} for i in range(Mt.rank(j))]
        aug_comps[j] = Matrix.from_sparse_columns(ring, cols, levels[0].rank(j))
    aug = ChainMap(Mt, levels[0], aug_comps, check=check)
    X = CosimplicialComplex(levels, cofaces, codegs, aug, check=check)
    X.level_bases = [L.basis for L in lv]
    X.level_index = [L.index for L in lv]
    X.top = top
    return X


def cobar_map(X: CosimplicialComplex, Y: CosimplicialComplex, phi: dict | None = None,
              g: ChainMap | None = None, check: bool = False) -> list[ChainMap]:
    """Level maps ``phi^{⊗(k+1)} ⊗ g`` between two cobar complexes.

    ``phi[d]`` is the degree-``d`` matrix of a DG algebra map (identity if
    omitted) and ``g`` a chain map of modules (identity if omitted).
    """
    ring = X.levels[0].ring
    depth = min(X.depth, Y.depth)
    cache: dict = {}

    def col(slot_is_module, deg, i):
        key = (slot_is_module, deg)
        if key not in cache:
            if slot_is_module:
                cache[key] = g.f(deg).sparse_columns() if g is not None else None
            else:
                if phi is None:
                    cache[key] = None
                else:
                    cache[key] = phi[deg].sparse_columns() if deg in phi else []
        cols = cache[key]
        if cols is None:
            return {i: ring.one()}
        return cols[i] if cols else {}

    maps = []
    for k in range(depth + 1):
        comps = {}
        for j, basis in X.level_bases[k].items():
            tidx = Y.level_index[k].get(j, {})
            cols = []
            for e in basis:
                acc = {(): ring.one()}
                for slot, (deg, i) in enumerate(e):
                    c = col(slot == len(e) - 1, deg, i)
                    nxt = {}
                    for pre, v in acc.items():
                        for a, w in c.items():
                            _vec_add(ring, nxt, pre + ((deg, a),), ring.mul(v, w))
                    acc = nxt
                cols.append({tidx[t]: v for t, v in acc.items()})
            comps[j] = Matrix.from_sparse_columns(ring, cols, len(tidx))
        maps.append(ChainMap(X.levels[k], Y.levels[k], comps, check=check))
    return maps
