import pytest

from dercomp.complexes import ChainMap, homology_group, tensor_complex
from dercomp.matrix import Matrix
from dercomp.modules import canonical_form, cyclic_module, free_module, parse_module
from dercomp.resolutions import (
    augmentation_map,
    base_change_complex,
    comparison_lift,
    cyclic_group_resolution,
    group_ring,
    is_regular,
    koszul_dga,
    koszul_power,
    koszul_transition,
    null_homotopy,
    resolve_pid,
    trivial_module_resolution,
)
from dercomp.rings import ZZ, NonEuclideanError, PrimeField, parse_ring


def H(C, n):
    return str(homology_group(C, n))


@pytest.mark.parametrize("text,ranks", [("Z/6", {0: 1, 1: 1}), ("Z^2 + Z/4", {0: 3, 1: 1}), ("Z^3", {0: 3, 1: 0})])
def test_resolve_pid(text, ranks):
    M = parse_module(text, ZZ)
    R = resolve_pid(M)
    assert {n: R.complex.rank(n) for n in (0, 1)} == ranks
    assert H(R.complex, 0) == str(canonical_form(M))
    assert H(R.complex, 1) == "0"


def test_resolve_pid_rejects_group_ring():
    L = group_ring(2)
    with pytest.raises(NonEuclideanError):
        resolve_pid(free_module(L, 1))


@pytest.mark.parametrize("S,h0,h1", [([3], "Z/3", "0"), ([2, 2], "Z/2", "Z/2"), ([4, 3], "0", "0"), ([0], "Z", "Z")])
def test_koszul_homology(S, h0, h1):
    C = koszul_dga(ZZ, S).underlying
    assert H(C, 0) == h0 and H(C, 1) == h1


def test_regularity():
    assert is_regular(koszul_dga(ZZ, [5]))
    assert not is_regular(koszul_dga(ZZ, [2, 2]))
    assert not is_regular(koszul_dga(ZZ, [0]))


@pytest.mark.parametrize("S", [[2], [3, 5], [2, 2, 3]])
def test_koszul_tensor_union(S):
    a, b = S[:1], S[1:] or [1]
    T = tensor_complex(koszul_dga(ZZ, a).underlying, koszul_dga(ZZ, b).underlying)
    U = koszul_dga(ZZ, a + b).underlying
    for n in range(len(a + b) + 1):
        assert H(T, n) == H(U, n)


@pytest.mark.parametrize("S", [[2], [3], [2, 3]])
@pytest.mark.parametrize("k", [1, 2])
def test_koszul_transition(S, k):
    t = koszul_transition(ZZ, S, k)
    assert t.components[0] == Matrix.identity(ZZ, 1)
    hi = koszul_power(ZZ, S, k + 1).underlying
    assert t.source.ranks == hi.ranks


def test_koszul_power_generators():
    A = koszul_power(ZZ, [2, 3], 3)
    assert A.generators == [8, 27]


@pytest.mark.parametrize("S,k,j", [([3], 1, 0), ([2, 5], 2, 1), ([2, 2, 3], 1, 2)])
def test_null_homotopy(S, k, j):
    h = null_homotopy(ZZ, S, k, j)
    assert set(h) == set(range(len(S) + 1))


def test_cyclic_group_resolution_shape():
    R = cyclic_group_resolution(2, 4)
    L = R.ring
    t = L.gen()
    assert R.complex.d(1).to_rows() == [[L.sub(t, L.one())]]
    assert R.complex.d(2).to_rows() == [[L.add(t, L.one())]]
    assert R.complex.d(3) == R.complex.d(1)


@pytest.mark.parametrize("q,p", [(2, 2), (4, 2), (3, 3)])
def test_group_homology_mod_p(q, p):
    R = cyclic_group_resolution(q, 5)
    F = PrimeField(p)
    C = base_change_complex(R.complex, augmentation_map(R.ring, F), F)
    assert all(H(C, i) == f"F/{p}" for i in range(5))


def test_integral_group_homology():
    R = cyclic_group_resolution(4, 6)
    C = base_change_complex(R.complex, augmentation_map(R.ring, ZZ), ZZ)
    assert [H(C, i) for i in range(5)] == ["Z", "Z/4", "0", "Z/4", "0"]


def test_cyclic_resolution_rejects():
    with pytest.raises(ValueError):
        cyclic_group_resolution(6, 3)
    with pytest.raises(ValueError):
        cyclic_group_resolution(2, 0)


def test_trivial_module_resolution():
    R = trivial_module_resolution(2, 3, 4)
    C = base_change_complex(R.complex, augmentation_map(R.ring, ZZ), ZZ)
    # Tor^{Z[C2]}(Z/3, Z) = H_*(C2; Z/3) = Z/3 in degree 0 only
    assert [H(C, i) for i in range(3)] == ["Z/3", "0", "0"]


def test_comparison_lift_identity():
    R = resolve_pid(cyclic_module(ZZ, 6))
    f = comparison_lift(Matrix.identity(ZZ, 1), R, R, 1)
    assert f.components[1] == Matrix.identity(ZZ, 1)


def test_comparison_lift_projection():
    # Z/4 -> Z/2 lifts with multiplication by 2 in degree 1
    src = resolve_pid(cyclic_module(ZZ, 4))
    tgt = resolve_pid(cyclic_module(ZZ, 2))
    f = comparison_lift(Matrix.identity(ZZ, 1), src, tgt, 1)
    assert f.components[1].to_rows() in ([[2]], [[-2]])


def test_comparison_lift_failure():
    # the identity on generators does not lift Z/2 -> Z/4
    src = resolve_pid(cyclic_module(ZZ, 2))
    tgt = resolve_pid(cyclic_module(ZZ, 4))
    with pytest.raises(ValueError):
        comparison_lift(Matrix.identity(ZZ, 1), src, tgt, 1)


def test_monic_quotient_koszul():
    R = parse_ring("Z[t]/(t^2-1)")
    A = koszul_dga(R, [R.sub(R.gen(), R.one())])
    assert isinstance(A.unit(), ChainMap)
