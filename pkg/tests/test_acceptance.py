"""Acceptance criteria 1-10.

Each test records its outcome through ``conftest.record``; the terminal
summary prints one line per criterion.  Run standalone with
``python3 tests/test_acceptance.py``.
"""
import random
import sys
import time
from math import comb

import pytest

from conftest import record
from dercomp.completion import (
    CompletionProblem,
    algebraic_to_geometric_shadow,
    compare_gm_cobar,
    cyclic_stage_comparison,
    derived_completion,
    fiber_tower_check,
    multitor,
    theorem_main_shadow,
    two_stage_complex,
)
from dercomp.complexes import concentrated, homology_group
from dercomp.matrix import Matrix
from dercomp.modules import canonical_form, parse_module
from dercomp.resolutions import (
    augmentation_map,
    base_change_complex,
    cyclic_group_resolution,
    koszul_algebra_map,
    koszul_dga,
    koszul_power,
    null_homotopy,
)
from dercomp.rings import ZZ, PrimeField
from dercomp.towers import AdicModule, check_certificate, is_pro_trivial, match_adic

from oracle import koszul_tensor_mod_p
from properties import FAMILIES

GRID = [(p, m) for p in (2, 3) for m in ("Z", f"Z/{p * p}", f"Z + Z/{p * p}")]
GRID_IDS = [f"p{p}-{m.replace(' ', '')}" for p, m in GRID]


def _complete(p, module, n=4, d=3):
    M = parse_module(module, ZZ)
    t = time.perf_counter()
    r = derived_completion(CompletionProblem(koszul_dga(ZZ, [p]), M, n, d, "normalized"))
    return M, r, time.perf_counter() - t


def _canon(text):
    return str(canonical_form(parse_module(text, ZZ)))


# -- 1 ---------------------------------------------------------------------------

@pytest.mark.parametrize("p,module", GRID, ids=GRID_IDS)
def test_criterion_1_degree_zero_and_adic(p, module):
    M, r, dt = _complete(p, module)
    want = [_canon(" + ".join(f"Z/{p ** (n + 1)}" if s.strip() == "Z" else f"Z/{min(p ** (n + 1), p * p)}"
                              for s in module.split("+"))) for n in range(5)]
    got = r.forms(0)
    adic = match_adic(r.tower(0), r.module_homology[0].module, [p], r.augmentations(0))
    ok = (got == want and adic.kind == "AdicPattern" and adic.value == AdicModule(M, (p,))
          and check_certificate(r.tower(0), adic, augmentations=r.augmentations(0)) and dt < 10)
    record(1, ok, f"p={p} M={module}: H0 {','.join(got)}; adic {adic}; {dt:.2f}s")
    assert ok


@pytest.mark.parametrize("p,module", GRID, ids=GRID_IDS)
def test_criterion_1_higher_vanishing(p, module):
    _, r, _ = _complete(p, module)
    bad = {i: r.forms(i) for i in (1, 2, 3) if r.forms(i) != ["0"] * 5}
    ok = not bad
    record(1, ok, f"p={p} M={module}: H_i(Tot^n) for i=1..3 " + ("all 0" if ok else f"nonzero {bad}"))
    assert ok, f"H_i(Tot^n) nonzero: {bad}"


# -- 2 ---------------------------------------------------------------------------

@pytest.mark.parametrize("p", [2, 3])
def test_criterion_2_augmentation_isomorphisms(p):
    _, r, dt = _complete(p, f"Z/{p}")
    fails = [(n, i) for n in range(5) for i in range(4) if not r.augmentation_maps[(n, i)].is_isomorphism()]
    ok = not fails and dt < 5
    record(2, ok, f"p={p}: " + ("all augmentations iso" if ok else
                                f"not iso at (n, i) = {fails}; H1 stages {','.join(r.forms(1))}"))
    assert ok


@pytest.mark.parametrize("p", [2, 3])
def test_criterion_2_pro_level(p):
    _, r, _ = _complete(p, f"Z/{p}")
    h0 = all(r.augmentation_maps[(n, 0)].is_isomorphism() for n in range(5))
    dead = [is_pro_trivial(r.tower(i)) for i in (1, 2, 3)]
    ok = h0 and all(v.kind == "ProTrivial" for v in dead)
    record(2, ok, f"p={p}: H0 iso at every stage; towers in degrees 1..3 {', '.join(str(v.kind) for v in dead)}")
    assert ok


# -- 3 ---------------------------------------------------------------------------

@pytest.mark.parametrize("p,module", GRID, ids=GRID_IDS)
def test_criterion_3_greenlees_may(p, module):
    M = parse_module(module, ZZ)
    t = time.perf_counter()
    rep = compare_gm_cobar(ZZ, [p], M, 4, 5, 2)
    dt = time.perf_counter() - t
    lim = rep["lim_gm"]
    ok = (rep["verdict"] == "PASS" and rep["interleave"].kind == "ProIsomorphic"
          and lim.kind == "AdicPattern" and lim.value == AdicModule(M, (p,)) and dt < 10)
    record(3, ok, f"p={p} M={module}: {rep['verdict']}, interleave {rep['interleave'].certificate}, "
                  f"lim {lim.value}; {dt:.2f}s")
    assert ok


# -- 4 ---------------------------------------------------------------------------

@pytest.mark.parametrize("p", [2, 3, 5])
def test_criterion_4_null_homotopy(p):
    ok = True
    for k in range(1, 5):
        h = null_homotopy(ZZ, [p], k)
        K = koszul_power(ZZ, [p], k).underlying
        for n in range(K.lo, K.hi + 1):
            lhs = K.d(n + 1) @ h[n] if n in h else Matrix.zero(ZZ, K.rank(n), K.rank(n))
            if n - 1 in h:
                lhs = lhs + h[n - 1] @ K.d(n)
            ok = ok and lhs == Matrix.scalar(ZZ, K.rank(n), p ** k)
    record(4, ok, f"s={p}: dh + hd = s^k id for k=1..4")
    assert ok


# -- 5 ---------------------------------------------------------------------------

@pytest.mark.parametrize("p,module", GRID, ids=GRID_IDS)
def test_criterion_5_fiber_tower(p, module):
    M = parse_module(module, ZZ)
    t = time.perf_counter()
    reps = [fiber_tower_check(CompletionProblem(koszul_dga(ZZ, [p]), M, n, 3, "normalized"), n) for n in range(4)]
    dt = time.perf_counter() - t
    ok = all(r["ok"] for r in reps) and dt < 20
    bad = [(r["n"], row) for r in reps for row in r["rows"] if not (row["match"] and row["images_agree"])]
    record(5, ok, f"p={p} M={module}: n=0..3 " + ("match" if ok else f"mismatch {bad}") + f"; {dt:.2f}s")
    assert ok


# -- 6 ---------------------------------------------------------------------------

def test_criterion_6_main_shadow():
    B = koszul_dga(ZZ, [2, 2])
    C = koszul_dga(ZZ, [2])
    phi = koszul_algebra_map(B, C, [{0: 1}, {0: 1}])
    t = time.perf_counter()
    rep = theorem_main_shadow(B, C, phi, concentrated(ZZ), 4, 1)
    dt = time.perf_counter() - t
    d0, d1 = rep["degrees"][0], rep["degrees"][1]
    want = [f"Z/{2 ** (n + 1)}" for n in range(5)]
    ok = (rep["label"] == "empirical shadow" and d0["stagewise_iso"] and d0["B"] == want and d0["C"] == want
          and d1["kernel"].kind == "ProTrivial" and d1["kernel"].certificate["shift"] <= 3
          and d1["cokernel"].kind == "ProTrivial" and dt < 60)
    record(6, ok, f"H0 {','.join(d0['B'])} stage-wise iso; H1 kernel {d1['kernel'].kind} "
                  f"shift {d1['kernel'].certificate.get('shift')}, cokernel {d1['cokernel'].kind}; {dt:.2f}s")
    assert ok


# -- 7 ---------------------------------------------------------------------------

@pytest.mark.parametrize("p", [2, 3, 5])
def test_criterion_7_multitor(p):
    ok = True
    rows = []
    for k in range(4):
        mt = multitor(ZZ, [parse_module(f"Z/{p}", ZZ)] * (k + 1), k + 1)
        dims = [len(mt[i].form.factors) if mt[i].form.free_rank == 0 else -1 for i in range(k + 2)]
        primes = all(d == p for i in range(k + 2) for d in mt[i].form.factors)
        oracle = koszul_tensor_mod_p(p, k)
        want = [comb(k, i) for i in range(k + 2)]
        good = primes and dims == want == [oracle.get(i, 0) for i in range(k + 2)]
        ok = ok and good
        rows.append(f"k={k}:{dims}")
    record(7, ok, f"p={p}: " + " ".join(rows))
    assert ok


# -- 8 ---------------------------------------------------------------------------

@pytest.mark.parametrize("q", [2, 4])
def test_criterion_8_group_ring_tor(q):
    F = PrimeField(2)
    R = cyclic_group_resolution(q, 8, base=F)
    C = base_change_complex(R.complex, augmentation_map(R.ring, F), F)
    forms = [str(homology_group(C, i)) for i in range(7)]
    Rz = cyclic_group_resolution(q, 8)
    Cz = base_change_complex(Rz.complex, augmentation_map(Rz.ring, F), F)
    forms_z = [str(homology_group(Cz, i)) for i in range(7)]
    ok = forms == ["F/2"] * 7 and forms_z == forms
    record(8, ok, f"q={q}: Tor_i = {forms[0]} for i=0..6")
    assert ok


def test_criterion_8_stage_comparison():
    t = time.perf_counter()
    rep = cyclic_stage_comparison(2, 4, 6, 2)
    dt = time.perf_counter() - t
    pattern = [r["map"] for r in rep["rows"]]
    ok = rep["ok"] and pattern == ["iso", "zero"] * 3 + ["iso"] and dt < 60
    record(8, ok, f"Z/2 -> Z/4 on degrees 0..6: {','.join(pattern)}; {dt:.2f}s")
    assert ok


# -- 9 ---------------------------------------------------------------------------

@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("h1", ["Z", "Z/p"])
def test_criterion_9_two_stage(p, h1):
    h1 = h1.replace("p", str(p))
    M = two_stage_complex(parse_module("Z", ZZ), parse_module(h1, ZZ))
    t = time.perf_counter()
    rep = algebraic_to_geometric_shadow(M, koszul_dga(ZZ, [p]), [p], 4, 2)
    dt = time.perf_counter() - t
    ok = rep["ok"] and rep["exact"] and dt < 20
    summary = "; ".join(f"H{i} {d['predicted']} {'ok' if d['match'] else 'MISMATCH'}" for i, d in rep["degrees"].items())
    record(9, ok, f"p={p} (Z, {h1}): {summary}; {dt:.2f}s")
    assert ok


# -- 10 --------------------------------------------------------------------------

COUNTS = {"dd": 50, "kunneth": 50, "connectivity": 30, "quasi_iso": 25, "les": 30, "lim1": 30}


def test_criterion_10_property_suites():
    t = time.perf_counter()
    failures = []
    total = 0
    for name, n in COUNTS.items():
        for seed in range(n):
            total += 1
            try:
                FAMILIES[name](random.Random(f"{name}-{seed}"))
            except AssertionError as e:
                failures.append(f"{name}#{seed}: {e}")
    dt = time.perf_counter() - t
    ok = not failures and total >= 200 and dt < 120
    record(10, ok, f"{total} randomized instances, {len(failures)} failures; {dt:.2f}s"
           + (f" ({failures[:3]})" if failures else ""))
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
