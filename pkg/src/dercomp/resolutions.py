"""Free resolutions and DG-algebra models.

Koszul complexes are exterior algebras on generators ``e_0 .. e_{r-1}``;
the basis in degree ``j`` is the ``j``-subsets in colex order and
``d e_I = sum_j (-1)^j s_{i_j} e_{I - i_j}`` for ``I = {i_0 < i_1 < ...}``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable

from .complexes import ChainComplex, ChainMap, homology_group, mapping_cone, tensor_complex
from .linalg import image_basis, is_euclidean_ring, solve
from .matrix import Matrix
from .modules import PresentedModule
from .rings import Integers, MonicQuotient, NonEuclideanError, Ring, RingError, ZZ

__all__ = [
    "DGAlgebra",
    "koszul_dga",
    "koszul_power",
    "koszul_transition",
    "null_homotopy",
    "is_regular",
    "koszul_algebra_map",
    "ResolutionData",
    "resolve_pid",
    "group_ring",
    "cyclic_group_resolution",
    "trivial_module_resolution",
    "base_change_complex",
    "base_change_map",
    "comparison_lift",
    "frobenius_map",
    "augmentation_map",
]


def _colex(r: int, j: int) -> list[tuple]:
    return sorted(combinations(range(r), j), key=lambda I: tuple(reversed(I)))


class DGAlgebra:
    """A connective commutative DG algebra with a basis-level product.

    ``product(p, i, q, j)`` returns the product of basis element ``i`` in
    degree ``p`` with basis element ``j`` in degree ``q`` as a sparse vector
    in degree ``p + q``.  The unit is basis element 0 in degree 0.
    Construction checks the unit, associativity, graded commutativity and
    the Leibniz rule (the multiplication is a chain map) on all basis
    elements.
    """

    def __init__(self, underlying: ChainComplex, product: Callable | None, name: str = "B", check: bool = True):
        self.underlying = underlying
        self.ring = underlying.ring
        self.name = name
        self._product = product
        self._mult: ChainMap | None = None
        if underlying.lo < 0:
            raise ValueError("DG algebra must be connective")
        if underlying.rank(0) < 1:
            raise ValueError("DG algebra needs a unit in degree 0")
        if not underlying.d(0).is_zero():
            raise ValueError("d(1) must vanish")
        if check and product is not None:
            self.check()

    @property
    def has_multiplication(self) -> bool:
        return self._product is not None

    def unit_vector(self) -> dict:
        return {0: self.ring.one()}

    def unit(self) -> ChainMap:
        R0 = ChainComplex(self.ring, {0: 1})
        B = self.underlying
        return ChainMap(R0, B, {0: Matrix(self.ring, B.rank(0), 1, [{0: self.ring.one()} if i == 0 else {} for i in range(B.rank(0))])})

    def product(self, p: int, i: int, q: int, j: int) -> dict:
        if self._product is None:
            raise ValueError(f"{self.name} has no multiplication")
        return self._product(p, i, q, j)

    def multiplication(self) -> ChainMap:
        """``μ : B ⊗ B -> B`` on the tensor basis order."""
        if self._mult is not None:
            return self._mult
        B = self.underlying
        BB = tensor_complex(B, B)
        ring = self.ring
        comps = {}
        for n in BB.degrees:
            cols = []
            for p in B.degrees:
                q = n - p
                for i in range(B.rank(p)):
                    for j in range(B.rank(q)):
                        cols.append(self.product(p, i, q, j))
            comps[n] = Matrix.from_sparse_columns(ring, cols, B.rank(n))
        self._mult = ChainMap(BB, B, comps)
        return self._mult

    def _mul_vec(self, p: int, x: dict, q: int, y: dict) -> dict:
        ring = self.ring
        out: dict = {}
        for i, a in x.items():
            for j, b in y.items():
                for k, c in self.product(p, i, q, j).items():
                    v = ring.add(out.get(k, ring.zero()), ring.mul(ring.mul(a, b), c))
                    if ring.is_zero(v):
                        out.pop(k, None)
                    else:
                        out[k] = v
        return out

    def check(self):
        B = self.underlying
        ring = self.ring
        one = self.unit_vector()
        degs = B.degrees
        for p in degs:
            for i in range(B.rank(p)):
                e = {i: ring.one()}
                if self._mul_vec(0, one, p, e) != e or self._mul_vec(p, e, 0, one) != e:
                    raise ValueError("unit law fails")
        for p in degs:
            for q in degs:
                for i in range(B.rank(p)):
                    for j in range(B.rank(q)):
                        xy = self.product(p, i, q, j)
                        yx = self.product(q, j, p, i)
                        if (p * q) % 2:
                            yx = {k: ring.neg(v) for k, v in yx.items()}
                        if xy != yx:
                            raise ValueError("graded commutativity fails")
                        for r in degs:
                            for k in range(B.rank(r)):
                                left = self._mul_vec(p + q, xy, r, {k: ring.one()})
                                right = self._mul_vec(p, {i: ring.one()}, q + r, self.product(q, j, r, k))
                                if left != right:
                                    raise ValueError("associativity fails")
        self.multiplication()  # Leibniz: the chain map check


def koszul_dga(ring: Ring, S: list, check: bool = True) -> DGAlgebra:
    """Exterior DG algebra on ``len(S)`` generators with ``d e_i = s_i``."""
    if not S:
        raise ValueError("generator list must be nonempty")
    S = [ring.normalize(ring.from_int(s) if isinstance(s, int) and not isinstance(ring, Integers) else s) for s in S]
    r = len(S)
    bases = {j: _colex(r, j) for j in range(r + 1)}
    index = {j: {I: k for k, I in enumerate(b)} for j, b in bases.items()}
    diffs = {}
    for j in range(1, r + 1):
        rows: list[dict] = [{} for _ in bases[j - 1]]
        for col, I in enumerate(bases[j]):
            for pos, i in enumerate(I):
                s = S[i]
                if ring.is_zero(s):
                    continue
                rest = I[:pos] + I[pos + 1:]
                rows[index[j - 1][rest]][col] = s if pos % 2 == 0 else ring.neg(s)
        diffs[j] = Matrix(ring, len(bases[j - 1]), len(bases[j]), rows)
    C = ChainComplex(ring, {j: len(b) for j, b in bases.items()}, diffs)
    one = ring.one()

    def product(p, i, q, j):
        I, J = bases[p][i], bases[q][j]
        if set(I) & set(J):
            return {}
        inv = sum(1 for a in I for b in J if a > b)
        K = tuple(sorted(I + J))
        return {index[p + q][K]: one if inv % 2 == 0 else ring.neg(one)}

    label = ",".join(ring.format(s) for s in S)
    A = DGAlgebra(C, product, name=f"K({label})", check=check)
    A.generators = S
    A.koszul_basis = bases
    return A


def koszul_power(ring: Ring, S: list, k: int, check: bool = True) -> DGAlgebra:
    """``K(s_1^k, ..., s_r^k)``"""
    if k < 1:
        raise ValueError("k must be >= 1")
    S = [ring.normalize(ring.from_int(s) if isinstance(s, int) and not isinstance(ring, Integers) else s) for s in S]
    pw = []
    for s in S:
        v = ring.one()
        for _ in range(k):
            v = ring.mul(v, s)
        pw.append(v)
    return koszul_dga(ring, pw, check=check)


def koszul_transition(ring: Ring, S: list, k: int) -> ChainMap:
    """``K(S^{k+1}) -> K(S^k)``: identity in degree 0, ``e_I -> (prod_{i in I} s_i) e_I``."""
    hi = koszul_power(ring, S, k + 1, check=False)
    lo = koszul_power(ring, S, k, check=False)
    S = [ring.normalize(ring.from_int(s) if isinstance(s, int) and not isinstance(ring, Integers) else s) for s in S]
    comps = {}
    for j, basis in hi.koszul_basis.items():
        rows: list[dict] = [{} for _ in basis]
        for idx, I in enumerate(basis):
            c = ring.one()
            for i in I:
                c = ring.mul(c, S[i])
            if not ring.is_zero(c):
                rows[idx][idx] = c
        comps[j] = Matrix(ring, len(basis), len(basis), rows)
    return ChainMap(hi.underlying, lo.underlying, comps)


def null_homotopy(ring: Ring, S: list, k: int, j: int = 0) -> dict:
    """Homotopy ``h = e_j ∧ -`` on ``K(S^k)`` with ``dh + hd = s_j^k · id``.

    Returns ``{n: h_n}`` with ``h_n : K_n -> K_{n+1}``; the identity is
    verified before returning.
    """
    A = koszul_power(ring, S, k, check=False)
    K = A.underlying
    r = len(S)
    h = {}
    for n in range(r + 1):
        cols = []
        for i in range(K.rank(n)):
            cols.append(A.product(1, j, n, i) if n < r else {})
        h[n] = Matrix.from_sparse_columns(ring, cols, K.rank(n + 1))
    sk = A.generators[j]
    for n in range(r + 1):
        lhs = K.d(n + 1) @ h[n]
        if n - 1 in h:
            lhs = lhs + h[n - 1] @ K.d(n)
        if lhs != Matrix.scalar(ring, K.rank(n), sk):
            raise AssertionError(f"null homotopy identity fails in degree {n}")
    return h


def koszul_algebra_map(B: DGAlgebra, C: DGAlgebra, images: list[dict]) -> ChainMap:
    """Algebra map out of a Koszul algebra sending ``e_i`` to ``images[i]`` (degree 1).

    ``e_I`` goes to the ordered product of the images; the chain map check
    verifies compatibility with the differentials.
    """
    ring = B.ring
    comps = {}
    for j, basis in B.koszul_basis.items():
        cols = []
        for I in basis:
            acc = C.unit_vector()
            deg = 0
            for i in I:
                acc = C._mul_vec(deg, acc, 1, images[i])
                deg += 1
            cols.append(acc)
        comps[j] = Matrix.from_sparse_columns(ring, cols, C.underlying.rank(j))
    return ChainMap(B.underlying, C.underlying, comps)


def is_regular(A: DGAlgebra) -> bool:
    """``H_i = 0`` for all ``i >= 1``."""
    C = A.underlying
    return all(homology_group(C, i).form.is_zero() for i in range(1, C.hi + 1))


# ---------------------------------------------------------------------------
# resolutions
# ---------------------------------------------------------------------------

@dataclass
class ResolutionData:
    """A free resolution ``complex -> module`` with its window certificate.

    ``exact_through`` is the top degree in which vanishing of ``H_i`` was
    verified; for finite-length resolutions it is ``None`` (absolute).
    """

    module: PresentedModule
    complex: ChainComplex
    exact_through: int | None = None
    notes: dict = field(default_factory=dict)

    @property
    def ring(self) -> Ring:
        return self.complex.ring


def resolve_pid(M: PresentedModule) -> ResolutionData:
    """Length ≤ 1 resolution ``0 -> im(R) -> F_0`` from a basis of the relation lattice."""
    ring = M.ring
    if not is_euclidean_ring(ring) or isinstance(ring, MonicQuotient):
        raise NonEuclideanError(f"{ring} is not a PID here; use the built-in resolutions")
    img = image_basis(M.relations) if M.nrels else Matrix(ring, M.ngens, 0)
    ranks = {0: M.ngens, 1: img.ncols}
    C = ChainComplex(ring, ranks, {1: img} if img.ncols else {})
    return ResolutionData(M, C, None, {"length": 1 if img.ncols else 0})


def group_ring(q: int, base: Ring = ZZ) -> MonicQuotient:
    """``base[t]/(t^q - 1)``"""
    mod = [base.neg(base.one())] + [base.zero()] * (q - 1) + [base.one()]
    return MonicQuotient(base, tuple(mod))


def _prime_power(q: int) -> bool:
    if q < 2:
        return False
    p = next(d for d in range(2, q + 1) if q % d == 0)
    while q % p == 0:
        q //= p
    return q == 1


def cyclic_group_resolution(q: int, length: int, base: Ring = ZZ) -> ResolutionData:
    """Periodic resolution ``... -> Λ --N--> Λ --(t-1)--> Λ`` of the trivial module.

    ``Λ = base[t]/(t^q - 1)``; degrees ``0..length``; odd differentials are
    ``t - 1``, even ones ``N = 1 + t + ... + t^(q-1)``.  Exactness is
    verified in degrees ``1..length-1`` on the underlying base complex.
    """
    if not _prime_power(q):
        raise ValueError(f"q = {q} is not a prime power")
    if length < 1:
        raise ValueError("length must be >= 1")
    L = group_ring(q, base)
    t = L.gen()
    tm1 = L.sub(t, L.one())
    norm = tuple(base.one() for _ in range(q))
    diffs = {}
    for n in range(1, length + 1):
        diffs[n] = Matrix.from_rows(L, [[tm1 if n % 2 else norm]])
    C = ChainComplex(L, {n: 1 for n in range(length + 1)}, diffs)
    triv = PresentedModule(L, 1, Matrix.from_rows(L, [[tm1]]))
    for n in range(1, length):
        if not homology_group(C, n).form.is_zero():
            raise AssertionError(f"periodic resolution not exact in degree {n}")
    h0 = homology_group(C, 0).form
    if h0.free_rank != 1 or h0.factors:
        raise AssertionError("H_0 of the periodic resolution is not the base ring")
    return ResolutionData(triv, C, length - 1, {"q": q, "base": str(base)})


def trivial_module_resolution(q: int, d: int, length: int) -> ResolutionData:
    """Free ``Z[t]/(t^q-1)``-resolution of ``Z/d`` with trivial action: cone of ``d`` on the periodic one."""
    P = cyclic_group_resolution(q, length, ZZ)
    C = P.complex
    L = C.ring
    f = ChainMap(C, C, {n: Matrix.scalar(L, C.rank(n), L.from_int(d)) for n in C.degrees})
    R = mapping_cone(f)
    R = ChainComplex(L, {n: r for n, r in R.ranks.items() if n <= length},
                     {n: D for n, D in R.diffs.items() if n <= length})
    tm1 = L.sub(L.gen(), L.one())
    M = PresentedModule(L, 1, Matrix.from_rows(L, [[tm1, L.from_int(d)]]))
    return ResolutionData(M, R, length - 1, {"q": q, "d": d})


# ---------------------------------------------------------------------------
# change of rings and comparison maps
# ---------------------------------------------------------------------------

def base_change_complex(C: ChainComplex, phi: Callable, ring: Ring) -> ChainComplex:
    """Apply a ring homomorphism entrywise to every differential."""
    return ChainComplex(ring, dict(C.ranks), {n: D.map_entries(phi, ring) for n, D in C.diffs.items()})


def base_change_map(f: ChainMap, phi: Callable, ring: Ring) -> ChainMap:
    return ChainMap(base_change_complex(f.source, phi, ring), base_change_complex(f.target, phi, ring),
                    {n: F.map_entries(phi, ring) for n, F in f.components.items()})


def frobenius_map(src: MonicQuotient, tgt: MonicQuotient, power: int) -> Callable:
    """The ring map ``t -> t^power`` between monic quotients over the same base."""
    if src.base != tgt.base:
        raise RingError("base rings differ")
    image_t = tgt.power(tgt.gen(), power)

    def phi(a):
        acc = tgt.zero()
        for c in reversed(a):
            acc = tgt.add(tgt.mul(acc, image_t), tgt.reduce([c]))
        return acc
    return phi


def augmentation_map(src: MonicQuotient, target: Ring) -> Callable:
    """``t -> 1`` followed by reduction into ``target`` (Z or F/p)."""
    def eps(a):
        return target.normalize(target.from_int(int(src.evaluate(a, src.base.one()))))
    return eps


def comparison_lift(f0: Matrix, source: ResolutionData, target: ResolutionData, top: int,
                    phi: Callable | None = None) -> ChainMap:
    """Lift a degree-0 map through two resolutions by solving degreewise.

    ``f0`` is the map on degree-0 generators (over the target ring).  With a
    ring map ``phi`` the source is first base-changed along it, so the lift
    is ``phi``-semilinear.  Each component solves
    ``d'_n f_n = f_{n-1} d_n`` exactly; failure raises ``ValueError``.
    """
    P = source.complex
    Q = target.complex
    ring = Q.ring
    if phi is not None:
        P = base_change_complex(P, phi, ring)
    elif P.ring != ring:
        raise RingError("resolutions over different rings need a ring map")
    comps = {0: f0}
    for n in range(1, top + 1):
        rhs = comps[n - 1] @ P.d(n)
        D = Q.d(n)
        cols = []
        for col in rhs.sparse_columns():
            if not col:
                cols.append({})
                continue
            x = solve(D, col)
            if x is None:
                raise ValueError(f"no lift in degree {n}: invalid resolution data")
            cols.append({i: v for i, v in enumerate(x) if not ring.is_zero(v)})
        comps[n] = Matrix.from_sparse_columns(ring, cols, Q.rank(n))
    Pt = ChainComplex(ring, {n: P.rank(n) for n in range(top + 1)}, {n: P.d(n) for n in range(1, top + 1)}, check=False)
    Qt = ChainComplex(ring, {n: Q.rank(n) for n in range(top + 1)}, {n: Q.d(n) for n in range(1, top + 1)}, check=False)
    return ChainMap(Pt, Qt, comps)
