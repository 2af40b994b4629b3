import pytest
from hypothesis import given, settings, strategies as st

from dercomp.matrix import Matrix
from dercomp.modules import (
    ModuleMap,
    PresentedModule,
    canonical_form,
    cyclic_module,
    direct_sum,
    free_module,
    homology_at,
    is_isomorphic_pid,
    parse_module,
    restrict_scalars,
    tensor,
)
from dercomp.rings import ZZ, IntegersMod, parse_ring

from oracle import render, snf_diagonal


def pm(rows, ngens=None):
    R = Matrix.from_rows(ZZ, rows) if rows and rows[0] else Matrix(ZZ, ngens, 0)
    return PresentedModule(ZZ, R.nrows, R)


def test_canonical_form_examples():
    assert canonical_form(pm([[2, 0], [0, 3]])).as_tuple() == (0, [6])
    assert canonical_form(free_module(ZZ, 2)).as_tuple() == (2, [])
    assert canonical_form(cyclic_module(ZZ, 5)).as_tuple() == (0, [5])


def test_rendering():
    assert str(canonical_form(parse_module("Z^2 + Z/4 + Z/2", ZZ))) == "Z^2 + Z/2 + Z/4"
    assert str(canonical_form(free_module(ZZ, 0))) == "0"


def _map(src, tgt, rows):
    return ModuleMap(src, tgt, Matrix.from_rows(ZZ, rows) if rows and rows[0] else Matrix(ZZ, tgt.ngens, src.ngens))


def test_homology_at_examples():
    Z = free_module(ZZ, 1)
    O = free_module(ZZ, 0)
    f = _map(Z, Z, [[3]])
    g = ModuleMap(Z, O, Matrix(ZZ, 0, 1))
    assert str(canonical_form(homology_at(f, g))) == "Z/3"
    f1 = _map(Z, Z, [[1]])
    assert str(canonical_form(homology_at(f1, g))) == "0"
    zero_in = ModuleMap(O, Z, Matrix(ZZ, 1, 0))
    assert str(canonical_form(homology_at(zero_in, g))) == "Z"


def test_homology_at_rejects_non_complex():
    Z = free_module(ZZ, 1)
    with pytest.raises(ValueError):
        homology_at(_map(Z, Z, [[1]]), _map(Z, Z, [[1]]))


def test_restrict_scalars_examples():
    F3 = IntegersMod(3)
    M = restrict_scalars(free_module(F3, 1))
    assert M.ring == ZZ and str(canonical_form(M)) == "Z/3"
    R = parse_ring("Z[t]/(t^2-1)")
    L = restrict_scalars(free_module(R, 1))
    assert L.ring == ZZ and canonical_form(L).as_tuple() == (2, [])
    assert str(canonical_form(restrict_scalars(free_module(R, 0)))) == "0"


def test_tensor_examples():
    F = cyclic_module(ZZ, 3)
    assert str(canonical_form(tensor(F, F))) == "Z/3"
    M = parse_module("Z + Z/4", ZZ)
    assert is_isomorphic_pid(tensor(M, free_module(ZZ, 1)), M)
    assert is_isomorphic_pid(direct_sum(cyclic_module(ZZ, 2), cyclic_module(ZZ, 3)), cyclic_module(ZZ, 6))


def test_map_well_definedness():
    with pytest.raises(ValueError):
        ModuleMap(cyclic_module(ZZ, 2), free_module(ZZ, 1), Matrix.from_rows(ZZ, [[1]]))
    f = ModuleMap(cyclic_module(ZZ, 4), cyclic_module(ZZ, 2), Matrix.from_rows(ZZ, [[1]]))
    K, inc = f.kernel()
    assert str(canonical_form(K)) == "Z/2"
    assert f.is_surjective() and not f.is_injective()


def test_parse_module_literals():
    assert str(canonical_form(parse_module("Z: rel [[2, 0], [0, 3]]", ZZ))) == "Z/6"
    assert str(canonical_form(parse_module("0", ZZ))) == "0"
    with pytest.raises(ValueError):
        parse_module("Z^x", ZZ)


# -- property suites ---------------------------------------------------------

small = st.integers(-6, 6)
rel_mats = st.integers(1, 3).flatmap(
    lambda r: st.integers(1, 3).flatmap(
        lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r)))
unimod = st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(-3, 3)), max_size=6)


def _apply_row_ops(rows, ops):
    rows = [list(r) for r in rows]
    n = len(rows)
    for i, j, q in ops:
        i, j = i % n, j % n
        if i != j:
            rows[i] = [a + q * b for a, b in zip(rows[i], rows[j])]
    return rows


@settings(max_examples=60)
@given(rel_mats, unimod, unimod)
def test_canonical_form_is_presentation_invariant(rows, rops, cops):
    M = pm(rows)
    rows2 = _apply_row_ops(rows, rops)                       # change of generators
    cols = [list(c) for c in zip(*rows2)]
    cols = _apply_row_ops(cols, cops)                        # change of relators
    rows3 = [list(r) for r in zip(*cols)]
    assert canonical_form(M) == canonical_form(pm(rows3))
    free = len(rows) - len(snf_diagonal(rows))
    tors = [d for d in snf_diagonal(rows) if d != 1]
    assert str(canonical_form(M)) == render(free, tors)


@settings(max_examples=40)
@given(rel_mats, rel_mats)
def test_tensor_symmetry_and_zero(a, b):
    A, B = pm(a), pm(b)
    assert is_isomorphic_pid(tensor(A, B), tensor(B, A))
    assert str(canonical_form(tensor(A, free_module(ZZ, 0)))) == "0"
