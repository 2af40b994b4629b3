from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from dercomp.matrix import Matrix
from dercomp.modules import ModuleMap, canonical_form, cyclic_module, free_module, parse_module
from dercomp.rings import ZZ
from dercomp.towers import (
    AdicModule,
    ModuleTower,
    check_certificate,
    composite,
    eventually_constant,
    interleave_maps,
    is_pro_trivial,
    lim_lim1,
    match_adic,
    pro_isomorphic,
    window_holim,
)


def cyclic_tower(orders, mults):
    stages = [cyclic_module(ZZ, a) for a in orders]
    maps = [ModuleMap(stages[k + 1], stages[k], Matrix.from_rows(ZZ, [[m]])) for k, m in enumerate(mults)]
    return ModuleTower(stages, maps)


def quotients(M, g, n, start=1):
    """``M / g^{k+start} M`` for ``k = 0..n`` with the projections and the augmentations."""
    stages = [parse_module(f"Z/{g ** (k + start)}", ZZ) for k in range(n + 1)]
    maps = [ModuleMap(stages[k + 1], stages[k], Matrix.identity(ZZ, 1)) for k in range(n)]
    augs = [ModuleMap(M, s, Matrix.identity(ZZ, 1)) for s in stages]
    return ModuleTower(stages, maps), augs


def test_adic_tower_of_integers():
    Z = free_module(ZZ, 1)
    T, augs = quotients(Z, 3, 4)
    v = match_adic(T, Z, [3], augs)
    assert v.kind == "AdicPattern" and str(v.value) == "Z_3"
    assert v.certificate["exponents"] == [1, 2, 3, 4, 5]
    assert check_certificate(T, v, augmentations=augs)
    lim, lim1 = lim_lim1(T, v)
    assert str(lim.value) == "Z_3" and lim1.value == "0"


def test_adic_module_rendering():
    M = parse_module("Z + Z/12", ZZ)
    assert str(AdicModule(M, (2,))) == "Z_2 + Z/4"
    assert str(AdicModule(M, (6,))) == "Z_(6) + Z/12"
    assert str(AdicModule(M, (0,))) == "Z + Z/12"
    assert str(AdicModule(M, (1,))) == "0"
    assert AdicModule(M, (4, 6)) == AdicModule(M, (2,))


def test_stable_adic_pattern():
    # M = Z/4 with I = (2): M/2^c M stabilizes at c = 2
    M = cyclic_module(ZZ, 4)
    stages = [cyclic_module(ZZ, 2)] + [cyclic_module(ZZ, 4)] * 3
    maps = [ModuleMap(stages[k + 1], stages[k], Matrix.identity(ZZ, 1)) for k in range(3)]
    T = ModuleTower(stages, maps)
    augs = [ModuleMap(M, s, Matrix.identity(ZZ, 1)) for s in stages]
    v = match_adic(T, M, [2], augs)
    assert v.kind == "AdicPattern" and v.certificate["stable"]
    assert str(v.value) == "Z/4"


def test_adic_rejects_incompatible_augmentations():
    Z = free_module(ZZ, 1)
    T, augs = quotients(Z, 2, 3)
    augs[2] = ModuleMap(Z, T.stages[2], Matrix.from_rows(ZZ, [[3]]))
    assert match_adic(T, Z, [2], augs).kind == "Undetermined"


def test_pro_trivial_with_shift():
    T = cyclic_tower([2] * 5, [0, 0, 0, 0])
    v = is_pro_trivial(T)
    assert v.kind == "ProTrivial" and v.certificate["shift"] == 1
    assert check_certificate(T, v)
    T2 = cyclic_tower([4] * 5, [2, 2, 2, 2])
    v2 = is_pro_trivial(T2)
    assert v2.certificate["shift"] == 2 and check_certificate(T2, v2)
    T0 = cyclic_tower([1] * 3, [0, 0])
    assert is_pro_trivial(T0).certificate["shift"] == 0


def test_not_pro_trivial_in_window():
    T = cyclic_tower([2] * 4, [1, 1, 1])
    assert is_pro_trivial(T).kind == "Undetermined"
    v = eventually_constant(T)
    assert v.kind == "EventuallyConstant" and v.value == "Z/2" and check_certificate(T, v)


def test_eventually_constant_after_start():
    T = cyclic_tower([3, 9, 9, 9], [1, 1, 1])
    v = eventually_constant(T)
    assert v.certificate["from"] == 1 and v.value == "Z/9"


def test_composite():
    T = cyclic_tower([8] * 4, [2, 2, 2])
    assert composite(T, 0, 3).matrix.to_rows() == [[8]]
    assert composite(T, 0, 3).is_zero()
    assert composite(T, 1, 0).matrix == Matrix.identity(ZZ, 1)


def test_window_holim_constant():
    T = cyclic_tower([5] * 4, [1, 1, 1])
    lim, lim1 = window_holim(T)
    assert str(canonical_form(lim)) == "Z/5" and str(canonical_form(lim1)) == "0"


def test_interleave_and_pro_isomorphism():
    Z = free_module(ZZ, 1)
    A, a = quotients(Z, 2, 5)
    B, b = quotients(Z, 2, 4, start=2)
    # B_k = Z/2^{k+2} is a quotient of A_{k+1} but not of A_k
    assert interleave_maps(a, b, 0) is None
    f = interleave_maps(a, b, 1)
    g = interleave_maps(b, a, 0)
    assert f is not None and g is not None
    v = pro_isomorphic(A, B, f, 1, g, 0)
    assert v.kind == "ProIsomorphic" and check_certificate(A, v, other=B, f=f, g=g)
    same = interleave_maps(a, a, 0)
    assert pro_isomorphic(A, A, same, 0, same, 0).kind == "ProIsomorphic"
    wrong = [ModuleMap(B.stages[k], A.stages[k], Matrix.from_rows(ZZ, [[2]])) for k in range(5)]
    assert pro_isomorphic(A, B, f, 1, wrong, 0).kind == "Undetermined"


def test_tower_shape_validation():
    with pytest.raises(ValueError):
        ModuleTower([cyclic_module(ZZ, 2)] * 3, [])


# -- brute force lim / lim^1 on small finite towers --------------------------

def brute_lim_orders(orders, mults):
    src = list(product(*[range(a) for a in orders]))
    kernel = 0
    images = set()
    for x in src:
        y = tuple((x[k] - mults[k] * x[k + 1]) % orders[k] for k in range(len(mults)))
        images.add(y)
        if not any(y):
            kernel += 1
    tgt = 1
    for a in orders[:-1]:
        tgt *= a
    return kernel, tgt // len(images)


def order(form):
    n = 1
    for d in form.factors:
        n *= d
    return n


@st.composite
def finite_towers(draw):
    n = draw(st.integers(1, 3))
    orders = [draw(st.sampled_from([1, 2, 3, 4, 6, 8])) for _ in range(n + 1)]
    mults = []
    for k in range(n):
        ok = [m for m in range(orders[k]) if (m * orders[k + 1]) % orders[k] == 0] or [0]
        mults.append(draw(st.sampled_from(ok)))
    return orders, mults


@settings(max_examples=60)
@given(finite_towers())
def test_window_holim_brute_force(tw):
    orders, mults = tw
    T = cyclic_tower(orders, mults)
    lim, lim1 = window_holim(T)
    ck, cc = brute_lim_orders(orders, mults)
    assert order(canonical_form(lim)) == ck
    assert order(canonical_form(lim1)) == cc
    v = is_pro_trivial(T)
    if v.kind == "ProTrivial":
        assert check_certificate(T, v)


@settings(max_examples=40)
@given(st.lists(st.sampled_from([1, 2, 4, 8, 16]), min_size=2, max_size=5))
def test_surjective_towers_have_no_lim1(sizes):
    sizes = sorted(sizes)
    T = cyclic_tower(sizes, [1] * (len(sizes) - 1))
    assert all(f.is_surjective() for f in T.maps)
    _, lim1 = window_holim(T)
    assert canonical_form(lim1).is_zero()
    _, v1 = lim_lim1(T)
    assert v1.kind == "EventuallyConstant" and v1.value == "0"
