"""Inverse systems of finitely presented modules over a finite window.

Every verdict carries a certificate that :func:`check_certificate`
re-validates with matrix algebra only.  Pro-statements are window
statements; ``Undetermined`` is a legitimate outcome.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

from .linalg import solve
from .matrix import Matrix, hstack
from .modules import (
    CanonicalForm,
    ModuleMap,
    PresentedModule,
    canonical_form,
    direct_sum,
)
from .rings import Integers, Ring, is_prime

__all__ = [
    "ModuleTower",
    "AdicModule",
    "TowerVerdict",
    "composite",
    "lim_lim1",
    "is_pro_trivial",
    "eventually_constant",
    "match_adic",
    "interleave_maps",
    "pro_isomorphic",
    "check_certificate",
    "window_holim",
]


@dataclass
class ModuleTower:
    """Stages ``T_0 .. T_K`` with ``maps[k] : T_{k+1} -> T_k``."""

    stages: list[PresentedModule]
    maps: list[ModuleMap]
    label: str = ""

    def __post_init__(self):
        if len(self.maps) != len(self.stages) - 1:
            raise ValueError("need one map per consecutive pair of stages")
        for k, f in enumerate(self.maps):
            if f.source is not self.stages[k + 1] and f.source.ngens != self.stages[k + 1].ngens:
                raise ValueError(f"map {k} has the wrong source")
            if f.target is not self.stages[k] and f.target.ngens != self.stages[k].ngens:
                raise ValueError(f"map {k} has the wrong target")

    @property
    def ring(self) -> Ring:
        return self.stages[0].ring

    @property
    def top(self) -> int:
        return len(self.stages) - 1

    def forms(self) -> list[CanonicalForm]:
        return [canonical_form(s) for s in self.stages]


def composite(T: ModuleTower, k: int, t: int) -> ModuleMap:
    """The map ``T_{k+t} -> T_k``."""
    S = T.stages[k]
    f = ModuleMap(S, S, Matrix.identity(T.ring, S.ngens), check=False)
    for j in range(k, k + t):
        f = f.compose(T.maps[j])
    return f


@dataclass(frozen=True)
class AdicModule:
    """Symbolic ``lim_k M / I^k M`` for ``I = (generators)``; never materialized."""

    base: PresentedModule
    generators: tuple

    def ideal_generator(self) -> int:
        g = 0
        for s in self.generators:
            g = gcd(g, int(s))
        return g

    def __eq__(self, other):
        if not isinstance(other, AdicModule):
            return NotImplemented
        return (self.ideal_generator() == other.ideal_generator()
                and canonical_form(self.base) == canonical_form(other.base))

    def __hash__(self):
        return hash((self.ideal_generator(), canonical_form(self.base)))

    def __str__(self):
        cf = canonical_form(self.base)
        g = self.ideal_generator()
        if not isinstance(cf.ring, Integers):
            return f"({cf})^_({g})"
        if g == 0:
            return str(cf)
        if g == 1:
            return "0"
        sym = f"Z_{g}" if is_prime(g) else f"Z_({g})"
        parts = []
        if cf.free_rank == 1:
            parts.append(sym)
        elif cf.free_rank > 1:
            parts.append(f"{sym}^{cf.free_rank}")
        for d in cf.factors:
            e = 1
            h = gcd(d, g)
            while h > 1:
                e *= h
                h = gcd(d // e, g)
            if e > 1:
                parts.append(f"Z/{e}")
        return " + ".join(parts) if parts else "0"


@dataclass
class TowerVerdict:
    kind: str
    value: object = None
    certificate: dict = field(default_factory=dict)

    def __str__(self):
        return self.kind if self.value is None else f"{self.kind}({self.value})"


# ---------------------------------------------------------------------------
# basic verdicts
# ---------------------------------------------------------------------------

def is_pro_trivial(T: ModuleTower) -> TowerVerdict:
    """Minimal ``t`` with every length-``t`` composite in the window zero."""
    K = T.top
    if all(canonical_form(s).is_zero() for s in T.stages):
        return TowerVerdict("ProTrivial", None, {"shift": 0})
    for t in range(1, K + 1):
        if all(composite(T, k, t).is_zero() for k in range(0, K - t + 1)):
            return TowerVerdict("ProTrivial", None, {"shift": t})
    return TowerVerdict("Undetermined", None, {"reason": "no zero composites in window"})


def eventually_constant(T: ModuleTower) -> TowerVerdict:
    """Smallest ``s < K`` after which every window map is an isomorphism."""
    K = T.top
    iso = [f.is_isomorphism() for f in T.maps]
    for s in range(K):
        if all(iso[s:]):
            return TowerVerdict("EventuallyConstant", str(canonical_form(T.stages[s])), {"from": s})
    return TowerVerdict("Undetermined", None, {"reason": "maps not eventually isomorphisms"})


def lim_lim1(T: ModuleTower, adic: TowerVerdict | None = None) -> tuple[TowerVerdict, TowerVerdict]:
    """Window verdicts for ``lim`` and ``lim^1``.

    ``adic`` may carry a successful :func:`match_adic` verdict for this tower.
    """
    surj = all(f.is_surjective() for f in T.maps)
    pt = is_pro_trivial(T)
    if pt.kind == "ProTrivial":
        zero = TowerVerdict("EventuallyConstant", "0", {"pro_trivial_shift": pt.certificate["shift"]})
        return zero, TowerVerdict("EventuallyConstant", "0", {"pro_trivial_shift": pt.certificate["shift"]})
    lim1 = (TowerVerdict("EventuallyConstant", "0", {"surjective_window": True}) if surj
            else TowerVerdict("Undetermined", None, {"reason": "window maps not all surjective"}))
    if adic is not None and adic.kind == "AdicPattern":
        return adic, lim1
    ec = eventually_constant(T)
    if ec.kind == "EventuallyConstant":
        return ec, TowerVerdict("EventuallyConstant", "0", {"isomorphisms_from": ec.certificate["from"]})
    return TowerVerdict("Undetermined", None, {"reason": "no pattern certified"}), lim1


# ---------------------------------------------------------------------------
# adic pattern
# ---------------------------------------------------------------------------

def _quotient_by_power(M: PresentedModule, g, c: int) -> PresentedModule:
    ring = M.ring
    gc = ring.one()
    for _ in range(c):
        gc = ring.mul(gc, g)
    extra = Matrix.scalar(ring, M.ngens, gc)
    return PresentedModule(ring, M.ngens, hstack(ring, [M.relations, extra], M.ngens))


def _ideal_gen(ring: Ring, S) -> object:
    g = ring.zero()
    for s in S:
        g = gcd(int(g), int(s)) if isinstance(ring, Integers) else s
    return g


def match_adic(T: ModuleTower, M: PresentedModule, S, augmentations: list[ModuleMap], cmax: int | None = None) -> TowerVerdict:
    """Certify ``T_k ≅ M / I^{c(k)} M`` compatibly, with ``c`` cofinal or stable.

    ``augmentations[k] : M -> T_k`` are the caller's natural maps.  For each
    ``k`` the exponent ``c(k)`` is the least ``c`` for which the map factors
    through an isomorphism ``M / I^c M -> T_k``.
    """
    ring = T.ring
    if not isinstance(ring, Integers):
        return TowerVerdict("Undetermined", None, {"reason": f"adic matching implemented over Z, got {ring}"})
    K = T.top
    cmax = cmax if cmax is not None else 2 * K + 8
    g = _ideal_gen(ring, S)
    for k in range(K):
        lhs = T.maps[k].compose(augmentations[k + 1])
        diff = ModuleMap(M, T.stages[k], lhs.matrix - augmentations[k].matrix, check=False)
        if not diff.is_zero():
            return TowerVerdict("Undetermined", None, {"reason": f"augmentation not compatible at stage {k}"})
    cs = []
    for k in range(K + 1):
        a = augmentations[k]
        found = None
        for c in range(cmax + 1):
            Q = _quotient_by_power(M, g, c)
            try:
                f = ModuleMap(Q, T.stages[k], a.matrix, check=True)
            except ValueError:
                continue
            if f.is_isomorphism():
                found = c
            break
        if found is None:
            return TowerVerdict("Undetermined", None, {"reason": f"stage {k} is not M/I^c M via the augmentation"})
        cs.append(found)
    if any(b < a for a, b in zip(cs, cs[1:])):
        return TowerVerdict("Undetermined", None, {"reason": "exponents not monotone", "exponents": cs})
    strictly = all(b > a for a, b in zip(cs, cs[1:]))
    last = cs[-1]
    q1 = _quotient_by_power(M, g, last)
    q2 = _quotient_by_power(M, g, last + 1)
    stable = ModuleMap(q2, q1, Matrix.identity(ring, M.ngens), check=False).is_isomorphism()
    if not (strictly or stable):
        return TowerVerdict("Undetermined", None, {"reason": "exponents neither cofinal nor stable", "exponents": cs})
    return TowerVerdict("AdicPattern", AdicModule(M, tuple(int(s) for s in S)),
                        {"exponents": cs, "stable": stable, "generator": int(g)})


# ---------------------------------------------------------------------------
# pro-isomorphism
# ---------------------------------------------------------------------------

def interleave_maps(a: list[ModuleMap], b: list[ModuleMap], shift: int) -> list[ModuleMap] | None:
    """Maps ``f_k : A_{k+shift} -> B_k`` with ``f_k a_{k+shift} = b_k``.

    ``a[k] : M -> A_k`` must be surjective.  Returns ``None`` when some
    ``f_k`` does not exist (kernel containment fails).
    """
    out = []
    for k in range(len(b)):
        if k + shift >= len(a):
            break
        ak, bk = a[k + shift], b[k]
        A, B = ak.target, bk.target
        ring = A.ring
        big = hstack(ring, [ak.matrix, A.relations], A.ngens)
        cols = []
        for j in range(A.ngens):
            x = solve(big, {j: ring.one()})
            if x is None:
                return None
            pre = {i: v for i, v in enumerate(x[: ak.matrix.ncols]) if not ring.is_zero(v)}
            cols.append(bk.matrix.apply(pre))
        mat = Matrix.from_sparse_columns(ring, cols, B.ngens)
        try:
            f = ModuleMap(A, B, mat, check=True)
        except ValueError:
            return None
        if not ModuleMap(ak.source, B, (f.compose(ak)).matrix - bk.matrix, check=False).is_zero():
            return None
        out.append(f)
    return out


def _same_map(f: ModuleMap, g: ModuleMap) -> bool:
    return ModuleMap(f.source, f.target, f.matrix - g.matrix, check=False).is_zero()


def pro_isomorphic(T1: ModuleTower, T2: ModuleTower, f: list[ModuleMap], s: int,
                   g: list[ModuleMap], t: int) -> TowerVerdict:
    """Check an interleaving ``f_k : T1_{k+s} -> T2_k``, ``g_k : T2_{k+t} -> T1_k``.

    Both families must commute with the tower maps, and the composites
    ``g_k f_{k+t}`` and ``f_k g_{k+s}`` must equal the tower composites of
    length ``s + t``.
    """
    cert = {"shift_f": s, "shift_g": t, "checked": 0}
    if not f or not g:
        return TowerVerdict("Undetermined", None, {"reason": "no interleave maps in window"})
    checked = 0
    for k in range(len(f) - 1):
        if not _same_map(T2.maps[k].compose(f[k + 1]), f[k].compose(T1.maps[k + s])):
            return TowerVerdict("Undetermined", None, {"reason": f"f not natural at {k}"})
        checked += 1
    for k in range(len(g) - 1):
        if not _same_map(T1.maps[k].compose(g[k + 1]), g[k].compose(T2.maps[k + t])):
            return TowerVerdict("Undetermined", None, {"reason": f"g not natural at {k}"})
        checked += 1
    for k in range(len(g)):
        if k + t < len(f):
            if not _same_map(g[k].compose(f[k + t]), composite(T1, k, s + t)):
                return TowerVerdict("Undetermined", None, {"reason": f"g f ≠ tower composite at {k}"})
            checked += 1
    for k in range(len(f)):
        if k + s < len(g):
            if not _same_map(f[k].compose(g[k + s]), composite(T2, k, s + t)):
                return TowerVerdict("Undetermined", None, {"reason": f"f g ≠ tower composite at {k}"})
            checked += 1
    if checked == 0:
        return TowerVerdict("Undetermined", None, {"reason": "window too short"})
    cert["checked"] = checked
    return TowerVerdict("ProIsomorphic", None, cert)


# ---------------------------------------------------------------------------
# certificates and the window holim
# ---------------------------------------------------------------------------

def check_certificate(T: ModuleTower, v: TowerVerdict, **data) -> bool:
    """Re-validate a verdict from its certificate alone."""
    if v.kind == "ProTrivial":
        t = v.certificate["shift"]
        if t == 0:
            return all(canonical_form(s).is_zero() for s in T.stages)
        return all(composite(T, k, t).is_zero() for k in range(T.top - t + 1))
    if v.kind == "EventuallyConstant" and "from" in v.certificate:
        s = v.certificate["from"]
        return all(f.is_isomorphism() for f in T.maps[s:])
    if v.kind == "AdicPattern":
        M = v.value.base
        g = v.certificate["generator"]
        augs = data["augmentations"]
        for k, c in enumerate(v.certificate["exponents"]):
            Q = _quotient_by_power(M, g, c)
            if not ModuleMap(Q, T.stages[k], augs[k].matrix).is_isomorphism():
                return False
        return True
    if v.kind == "ProIsomorphic":
        return pro_isomorphic(T, data["other"], data["f"], v.certificate["shift_f"],
                              data["g"], v.certificate["shift_g"]).kind == "ProIsomorphic"
    return v.kind == "Undetermined"


def window_holim(T: ModuleTower) -> tuple[PresentedModule, PresentedModule]:
    """Kernel and cokernel of ``prod_{k<=K} T_k -> prod_{k<K} T_k``, ``x -> x_k - f(x_{k+1})``.

    These are the window ``lim`` and ``lim^1``.
    """
    ring = T.ring
    src = direct_sum(*T.stages)
    tgt = direct_sum(*T.stages[:-1]) if T.top else PresentedModule(ring, 0, Matrix(ring, 0, 0))
    offs_s = [0]
    for s in T.stages:
        offs_s.append(offs_s[-1] + s.ngens)
    rows: list[dict] = [{} for _ in range(tgt.ngens)]
    for k in range(T.top):
        for i in range(T.stages[k].ngens):
            rows[offs_s[k] + i][offs_s[k] + i] = ring.one()
        F = T.maps[k].matrix
        for i, r in enumerate(F.rows):
            for j, v in r.items():
                rows[offs_s[k] + i][offs_s[k + 1] + j] = ring.neg(v)
    D = ModuleMap(src, tgt, Matrix(ring, tgt.ngens, src.ngens, rows), check=False)
    K, _ = D.kernel()
    return K, D.cokernel()
