"""Finitely presented modules and maps between them.

A :class:`PresentedModule` on ``g`` generators with relation matrix ``R``
(``g`` rows, one column per relator) is ``coker(R)``.  Presentations are not
simplified behind the caller's back; :func:`canonical_form` is the single
normalization point.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .linalg import (
    as_integer_representation,
    image_basis,
    is_euclidean_ring,
    kernel_basis,
    smith_normal_form,
    solve,
)
from .matrix import Matrix, block_diag, hstack
from .rings import (
    Integers,
    IntegersMod,
    MonicQuotient,
    PrimeField,
    Rationals,
    Ring,
    RingError,
    ZZ,
    is_prime,
)

__all__ = [
    "PresentedModule",
    "ModuleMap",
    "CanonicalForm",
    "canonical_form",
    "canonical_presentation",
    "render_module",
    "homology_at",
    "restrict_scalars",
    "restrict_map",
    "tensor",
    "direct_sum",
    "is_isomorphic_pid",
    "free_module",
    "cyclic_module",
    "parse_module",
]


@dataclass(frozen=True, eq=False)
class PresentedModule:
    ring: Ring
    ngens: int
    relations: Matrix

    def __post_init__(self):
        if self.relations.nrows != self.ngens:
            raise ValueError(f"relations have {self.relations.nrows} rows for {self.ngens} generators")
        if self.relations.ring != self.ring:
            raise RingError("relation matrix over the wrong ring")

    @property
    def nrels(self) -> int:
        return self.relations.ncols

    def canonical(self) -> "CanonicalForm":
        return canonical_form(self)

    def is_zero(self) -> bool:
        return canonical_form(self).is_zero()

    def __str__(self):
        return str(canonical_form(self))


def free_module(ring: Ring, n: int) -> PresentedModule:
    return PresentedModule(ring, n, Matrix(ring, n, 0))


def cyclic_module(ring: Ring, d) -> PresentedModule:
    return PresentedModule(ring, 1, Matrix.from_rows(ring, [[d]]))


def parse_module(text: str, ring: Ring) -> PresentedModule:
    """Parse ``"Z^2 + Z/4"``, ``"Z/(t-1)"`` or ``"0"``.

    A summand without ``/`` is free (optional ``^rank``); ``X/d`` is the
    cyclic module on one generator killed by the ring element ``d``.
    """
    if ":" in text:
        return _parse_relation_literal(text, ring)
    parts = []
    for raw in _split_top(text):
        term = raw.strip()
        if not term:
            raise ValueError(f"empty summand in module literal {text!r}")
        if term == "0":
            continue
        if "/" in term:
            d = term.split("/", 1)[1].strip()
            if d.startswith("(") and d.endswith(")"):
                d = d[1:-1]
            parts.append(cyclic_module(ring, ring.parse_element(d)))
        else:
            rank = 1
            if "^" in term:
                _, _, exp = term.partition("^")
                if not exp.strip().isdigit():
                    raise ValueError(f"bad rank in {term!r}")
                rank = int(exp)
            parts.append(free_module(ring, rank))
    return direct_sum(*parts) if parts else free_module(ring, 0)


def _parse_relation_literal(text: str, ring: Ring) -> PresentedModule:
    """``"Z: rel [[2, 0], [0, 3]]"``: one row per generator, one column per relator."""
    head, _, body = text.partition(":")
    body = body.strip()
    if not body.startswith("rel"):
        raise ValueError(f"expected 'rel [[...]]' after ':' in {text!r}")
    try:
        rows = json.loads(body[3:].strip())
    except json.JSONDecodeError as e:
        raise ValueError(f"bad relation matrix in {text!r}: {e}") from None
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ValueError(f"relation matrix must be a nonempty list of rows in {text!r}")
    if len({len(r) for r in rows}) != 1:
        raise ValueError("relation matrix rows have different lengths")
    entries = [[ring.parse_element(str(x)) for x in r] for r in rows]
    if "^" in head and int(head.partition("^")[2]) != len(rows):
        raise ValueError("generator count does not match the relation matrix")
    ncols = len(rows[0])
    return PresentedModule(ring, len(rows), Matrix.from_rows(ring, entries) if ncols else Matrix(ring, len(rows), 0))


def _split_top(text: str) -> list[str]:
    out, depth, cur = [], 0, ""
    for ch in text:
        depth += ch == "("
        depth -= ch == ")"
        if ch == "+" and depth == 0:
            out.append(cur)
            cur = ""
        else:
            cur += ch
    out.append(cur)
    return out


# ---------------------------------------------------------------------------
# canonical form
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CanonicalForm:
    """``ring^free_rank + sum ring/(d_i)`` with 1 < d_1 | d_2 | ..."""

    ring: Ring
    free_rank: int
    factors: tuple = ()
    underlying: bool = field(default=False, compare=False)

    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.factors

    def __str__(self):
        return render_module(self.ring, self.free_rank, self.factors)

    def as_tuple(self) -> tuple:
        return (self.free_rank, list(self.factors))


def _ring_symbol(ring: Ring) -> str:
    if isinstance(ring, Integers):
        return "Z"
    if isinstance(ring, Rationals):
        return "Q"
    return str(ring)


def render_module(ring: Ring, free_rank: int, factors) -> str:
    """``"Z^2 + Z/2 + Z/4"``; the zero module renders as ``"0"``."""
    sym = _ring_symbol(ring)
    parts = []
    if free_rank:
        base = sym if "/" not in sym else f"({sym})"
        if free_rank == 1:
            parts.append(sym)
        else:
            parts.append(f"{base}^{free_rank}")
    for d in factors:
        parts.append(f"{sym}/{ring.format(d)}" if isinstance(ring, Integers) else f"{sym}/({ring.format(d)})")
    return " + ".join(parts) if parts else "0"


def _base_form(M: PresentedModule) -> PresentedModule:
    ring = M.ring
    if isinstance(ring, MonicQuotient) or (isinstance(ring, IntegersMod) and not is_prime(ring.m)):
        return restrict_scalars(M)
    return M


def canonical_form(M: PresentedModule) -> CanonicalForm:
    """Free rank and invariant factors via Smith normal form.

    Modules over ``Z/m`` (composite) or a monic quotient are classified as
    modules over the base ring; the result carries ``underlying=True``.
    """
    B = _base_form(M)
    flagged = B is not M
    ring = B.ring
    if isinstance(ring, IntegersMod):
        ring_f = PrimeField(ring.m)
        B = PresentedModule(ring_f, B.ngens, Matrix(ring_f, B.ngens, B.nrels, [dict(r) for r in B.relations.rows]))
        ring = ring_f
    if not is_euclidean_ring(ring):
        raise RingError(f"no canonical form over {ring}")
    if B.nrels == 0 or B.ngens == 0:
        return CanonicalForm(ring, B.ngens, (), flagged)
    diag = smith_normal_form(B.relations).diagonal
    nonzero = [d for d in diag if not ring.is_zero(d)]
    free = B.ngens - len(nonzero)
    factors = tuple(d for d in nonzero if ring.norm(d) > 1)
    return CanonicalForm(ring, free, factors, flagged)


def canonical_presentation(cf: CanonicalForm) -> PresentedModule:
    """Diagonal presentation of a canonical form: free generators first."""
    ring = cf.ring
    n = cf.free_rank + len(cf.factors)
    rows = [{} for _ in range(n)]
    for k, d in enumerate(cf.factors):
        rows[cf.free_rank + k][k] = d
    return PresentedModule(ring, n, Matrix(ring, n, len(cf.factors), rows))


def is_isomorphic_pid(M: PresentedModule, N: PresentedModule) -> bool:
    if M.ring != N.ring:
        raise RingError(f"ring mismatch: {M.ring} vs {N.ring}")
    return canonical_form(M) == canonical_form(N)


# ---------------------------------------------------------------------------
# change of rings
# ---------------------------------------------------------------------------

def restrict_scalars(M: PresentedModule) -> PresentedModule:
    """View a module over ``Z/m`` or ``base[t]/(f)`` as a module over Z or the base."""
    ring = M.ring
    if isinstance(ring, IntegersMod):
        return PresentedModule(ZZ, M.ngens, as_integer_representation(M.relations))
    if isinstance(ring, MonicQuotient):
        n = ring.degree
        rel = as_integer_representation(M.relations)
        return PresentedModule(ring.base, M.ngens * n, rel)
    return M


def restrict_map(f: "ModuleMap") -> "ModuleMap":
    ring = f.ring
    if isinstance(ring, IntegersMod):
        mat = Matrix(ZZ, f.matrix.nrows, f.matrix.ncols, [dict(r) for r in f.matrix.rows])
        return ModuleMap(restrict_scalars(f.source), restrict_scalars(f.target), mat, check=False)
    if isinstance(ring, MonicQuotient):
        return ModuleMap(restrict_scalars(f.source), restrict_scalars(f.target),
                         as_integer_representation(f.matrix), check=False)
    return f


# ---------------------------------------------------------------------------
# maps
# ---------------------------------------------------------------------------

def _in_span(R: Matrix, col: dict) -> bool:
    if not col:
        return True
    if R.ncols == 0:
        return False
    return solve(R, col) is not None


class ModuleMap:
    """A homomorphism given by its matrix on generators."""

    def __init__(self, source: PresentedModule, target: PresentedModule, matrix: Matrix, check: bool = True):
        if matrix.shape != (target.ngens, source.ngens):
            raise ValueError(f"map matrix shape {matrix.shape} != {(target.ngens, source.ngens)}")
        if not (source.ring == target.ring == matrix.ring):
            raise RingError("ring mismatch in module map")
        self.source = source
        self.target = target
        self.matrix = matrix
        if check and source.nrels:
            img = matrix @ source.relations
            for col in img.sparse_columns():
                if not _in_span(target.relations, col):
                    raise ValueError("module map is not well defined on relations")

    @property
    def ring(self) -> Ring:
        return self.matrix.ring

    def compose(self, other: "ModuleMap") -> "ModuleMap":
        """``self ∘ other``"""
        return ModuleMap(other.source, self.target, self.matrix @ other.matrix, check=False)

    def __matmul__(self, other: "ModuleMap") -> "ModuleMap":
        return self.compose(other)

    def is_zero(self) -> bool:
        return all(_in_span(self.target.relations, c) for c in self.matrix.sparse_columns())

    def cokernel(self) -> PresentedModule:
        rel = hstack(self.ring, [self.matrix, self.target.relations], self.target.ngens)
        return PresentedModule(self.ring, self.target.ngens, rel)

    def _kernel_lattice(self) -> Matrix:
        """Basis (columns) of ``{x : f x in im R_target}`` inside the free cover of the source."""
        f = restrict_map(self)
        ring = f.ring
        s = f.source.ngens
        stacked = hstack(ring, [f.matrix, f.target.relations], f.target.ngens)
        K = kernel_basis(stacked)
        proj = Matrix(ring, s, K.ncols, [dict(K.rows[i]) for i in range(s)])
        return image_basis(proj)

    def kernel(self) -> tuple[PresentedModule, "ModuleMap"]:
        """Kernel module and its inclusion into the source (over the base ring)."""
        f = restrict_map(self)
        ring = f.ring
        B = self._kernel_lattice()
        rels = []
        for col in f.source.relations.sparse_columns():
            x = solve(B, col)
            if x is None:
                raise AssertionError("source relation outside kernel lattice")
            rels.append({i: v for i, v in enumerate(x) if not ring.is_zero(v)})
        K = PresentedModule(ring, B.ncols, Matrix.from_sparse_columns(ring, rels, B.ncols))
        return K, ModuleMap(K, f.source, B, check=False)

    def image(self) -> PresentedModule:
        f = restrict_map(self)
        B = self._kernel_lattice()
        return PresentedModule(f.ring, f.source.ngens, B)

    def is_surjective(self) -> bool:
        return self.cokernel().is_zero()

    def is_injective(self) -> bool:
        return self.kernel()[0].is_zero()

    def is_isomorphism(self) -> bool:
        return self.is_surjective() and self.is_injective()

    def __repr__(self):
        return f"ModuleMap({self.source} -> {self.target}, {self.matrix.to_rows()})"


def homology_at(f: ModuleMap, g: ModuleMap) -> PresentedModule:
    """``ker(g) / im(f)`` for ``X --f--> Y --g--> Z`` with ``g f = 0``."""
    if f.target.ngens != g.source.ngens:
        raise ValueError("maps are not composable")
    if not g.compose(f).is_zero():
        raise ValueError("g∘f ≠ 0: malformed complex")
    f = restrict_map(f)
    g = restrict_map(g)
    ring = f.ring
    B = g._kernel_lattice()
    rels = []
    for col in f.matrix.sparse_columns() + f.target.relations.sparse_columns():
        if not col:
            continue
        x = solve(B, col)
        if x is None:
            raise AssertionError("boundary outside the cycle lattice")
        rels.append({i: v for i, v in enumerate(x) if not ring.is_zero(v)})
    return PresentedModule(ring, B.ncols, Matrix.from_sparse_columns(ring, rels, B.ncols))


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------

def _kron(ring: Ring, A: Matrix, B: Matrix) -> Matrix:
    rows = [{} for _ in range(A.nrows * B.nrows)]
    for i, ra in enumerate(A.rows):
        for j, a in ra.items():
            for k, rb in enumerate(B.rows):
                for l, b in rb.items():
                    v = ring.mul(a, b)
                    if not ring.is_zero(v):
                        rows[i * B.nrows + k][j * B.ncols + l] = v
    return Matrix(ring, A.nrows * B.nrows, A.ncols * B.ncols, rows)


def tensor(M: PresentedModule, N: PresentedModule) -> PresentedModule:
    """``M ⊗ N`` on generators ``m_i ⊗ n_j`` (index ``i * N.ngens + j``)."""
    if M.ring != N.ring:
        raise RingError(f"ring mismatch: {M.ring} vs {N.ring}")
    ring = M.ring
    left = _kron(ring, M.relations, Matrix.identity(ring, N.ngens))
    right = _kron(ring, Matrix.identity(ring, M.ngens), N.relations)
    n = M.ngens * N.ngens
    return PresentedModule(ring, n, hstack(ring, [left, right], n))


def direct_sum(*mods: PresentedModule) -> PresentedModule:
    ring = mods[0].ring
    if any(m.ring != ring for m in mods):
        raise RingError("ring mismatch in direct sum")
    rel = block_diag(ring, [m.relations for m in mods])
    return PresentedModule(ring, sum(m.ngens for m in mods), rel)
