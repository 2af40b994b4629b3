import pytest
from hypothesis import given, settings, strategies as st

from dercomp.linalg import (
    Subquotient,
    as_integer_representation,
    image_basis,
    invariant_factors,
    kernel_basis,
    rank,
    smith_normal_form,
    solve,
)
from dercomp.matrix import Matrix
from dercomp.rings import QQ, ZZ, IntegersMod, PrimeField, RingError, parse_ring

from oracle import rank_int, snf_diagonal


def M(rows, ring=ZZ):
    return Matrix.from_rows(ring, rows)


def test_snf_diag_2_3():
    d = smith_normal_form(M([[2, 0], [0, 3]]))
    assert d.diagonal == [1, 6]
    assert d.U @ M([[2, 0], [0, 3]]) @ d.V == d.D


def test_snf_zero_matrix():
    Z = Matrix.zero(ZZ, 3, 2)
    d = smith_normal_form(Z)
    assert d.D == Z
    assert d.U == Matrix.identity(ZZ, 3) and d.V == Matrix.identity(ZZ, 2)


def test_snf_single_prime():
    assert smith_normal_form(M([[7]])).diagonal == [7]


def test_snf_rejects_composite_mod():
    with pytest.raises(RingError):
        smith_normal_form(M([[2]], IntegersMod(4)))


def test_kernel_examples():
    assert kernel_basis(M([[5]])).ncols == 0
    K = kernel_basis(M([[1, 1], [1, 1]]))
    assert K.ncols == 1
    col = K.to_rows()
    assert col in ([[1], [-1]], [[-1], [1]])
    assert kernel_basis(M([[0]])).to_rows() == [[1]]


def test_solve_examples():
    assert solve(M([[2]]), [4]) == [2]
    assert solve(M([[2]]), [3]) is None
    assert solve(Matrix.identity(ZZ, 3), [1, -2, 5]) == [1, -2, 5]


def test_integer_representation_companion():
    R = parse_ring("Z[t]/(t^2-1)")
    enc = as_integer_representation(Matrix.from_rows(R, [[R.gen()]]))
    assert enc.to_rows() == [[0, 1], [1, 0]]


def test_integer_representation_mod4():
    enc = as_integer_representation(M([[2]], IntegersMod(4)))
    assert enc.ring == ZZ
    assert [d for d in snf_diagonal(enc.to_rows()) if d != 1] == [2]


def test_integer_representation_identity():
    R = parse_ring("Z[t]/(t^3-2)")
    enc = as_integer_representation(Matrix.identity(R, 2))
    assert enc == Matrix.identity(ZZ, 6)


def test_field_snf():
    F = PrimeField(5)
    assert smith_normal_form(M([[2, 4], [1, 2]], F)).diagonal == [1, 0]
    assert smith_normal_form(M([[QQ.parse_element("1/2"), 0]], QQ)).diagonal == [1]


def test_subquotient_classify():
    # ker(Z^2 -> 0) / <(2, 0), (0, 3)> = Z/6
    sq = Subquotient(Matrix.zero(ZZ, 0, 2), M([[2, 0], [0, 3]]))
    assert sq.torsion == [6] and sq.free_rank == 0
    assert sq.classify({0: 1}) != [0]
    assert sq.classify({0: 2}) == [0]
    assert sq.classify({0: 6}) == [0]
    assert sq.classify(sq.lifts[0]) == [1]


# -- property suites ---------------------------------------------------------

small = st.integers(-6, 6)


def matrices(max_r=4, max_c=4):
    return st.integers(1, max_r).flatmap(
        lambda r: st.integers(1, max_c).flatmap(
            lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r)))


@settings(max_examples=80)
@given(matrices())
def test_snf_against_oracle(rows):
    A = M(rows)
    d = smith_normal_form(A)
    assert d.U @ A @ d.V == d.D
    assert [x for x in d.diagonal if x != 0] == snf_diagonal(rows)
    diag = [x for x in d.diagonal if x]
    assert all(b % a == 0 for a, b in zip(diag, diag[1:]))


@settings(max_examples=60)
@given(matrices())
def test_kernel_and_image(rows):
    A = M(rows)
    K = kernel_basis(A)
    assert (A @ K).is_zero() if K.ncols else True
    assert K.ncols + rank(A) == A.ncols
    assert rank(A) == rank_int(rows)
    assert image_basis(A).ncols == rank(A)


@settings(max_examples=60)
@given(matrices(), st.lists(small, min_size=4, max_size=4))
def test_solve_certificate(rows, x):
    A = M(rows)
    x = x[: A.ncols]
    b = A.apply({i: v for i, v in enumerate(x) if v})
    sol = solve(A, [b.get(i, 0) for i in range(A.nrows)])
    assert sol is not None
    assert A.apply({i: v for i, v in enumerate(sol) if v}) == b
    # perturbing by a non-multiple of the first invariant factor may break solvability,
    # and when solve says no, the oracle agrees
    b2 = [b.get(i, 0) for i in range(A.nrows)]
    b2[0] += 1
    s2 = solve(A, b2)
    if s2 is None:
        aug = [r + [v] for r, v in zip(rows, b2)]
        assert snf_diagonal(aug) != snf_diagonal(rows) or rank_int(aug) > rank_int(rows)
    else:
        assert A.apply({i: v for i, v in enumerate(s2) if v}) == {i: v for i, v in enumerate(b2) if v}


@settings(max_examples=30)
@given(matrices(3, 3))
def test_invariant_factors_mod_p(rows):
    F = PrimeField(3)
    A = Matrix.from_rows(F, [[F.normalize(F.from_int(x)) for x in r] for r in rows])
    r = len([x for x in invariant_factors(A) if not F.is_zero(x)])
    from oracle import rank_mod_p
    assert r == rank_mod_p(rows, 3)
