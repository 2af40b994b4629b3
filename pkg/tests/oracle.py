"""Independent dense oracles used by the tests.

Plain lists of Python ints, textbook algorithms, no imports from the
package: these are the reference values the engine is checked against.
"""
from __future__ import annotations

from math import gcd


def snf_diagonal(A: list[list[int]]) -> list[int]:
    """Nonzero invariant factors of an integer matrix (classical elimination)."""
    A = [list(r) for r in A]
    m = len(A)
    n = len(A[0]) if m else 0
    diag = []
    t = 0
    while t < min(m, n):
        nz = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
        if not nz:
            break
        _, pi, pj = min(nz)
        A[t], A[pi] = A[pi], A[t]
        for r in A:
            r[t], r[pj] = r[pj], r[t]
        while True:
            changed = False
            for i in range(t + 1, m):
                if A[i][t]:
                    q = A[i][t] // A[t][t]
                    A[i] = [a - q * b for a, b in zip(A[i], A[t])]
                    if A[i][t]:
                        A[t], A[i] = A[i], A[t]
                        changed = True
            for j in range(t + 1, n):
                if A[t][j]:
                    q = A[t][j] // A[t][t]
                    for r in A:
                        r[j] -= q * r[t]
                    if A[t][j]:
                        for r in A:
                            r[t], r[j] = r[j], r[t]
                        changed = True
            if changed:
                continue
            bad = [(i, j) for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % A[t][t]]
            if bad:
                i, _ = bad[0]
                A[t] = [a + b for a, b in zip(A[t], A[i])]
                continue
            break
        diag.append(abs(A[t][t]))
        t += 1
    # normalize to a divisibility chain
    out = sorted(diag)
    changed = True
    while changed:
        changed = False
        for i in range(len(out)):
            for j in range(i + 1, len(out)):
                a, b = out[i], out[j]
                if b % a:
                    g = gcd(a, b)
                    out[i], out[j] = g, a * b // g
                    changed = True
        out.sort()
    return out


def rank_int(A: list[list[int]]) -> int:
    return len(snf_diagonal(A)) if A and A[0] else 0


def homology_int(ranks: dict[int, int], diffs: dict[int, list[list[int]]], n: int) -> tuple[int, list[int]]:
    """``(free_rank, torsion)`` of ``H_n`` for dense integer differentials ``d_n : C_n -> C_{n-1}``."""
    cn = ranks.get(n, 0)
    rk_out = rank_int(diffs[n]) if n in diffs and cn and ranks.get(n - 1, 0) else 0
    din = diffs.get(n + 1)
    if din is not None and cn and ranks.get(n + 1, 0):
        inv = snf_diagonal(din)
    else:
        inv = []
    free = cn - rk_out - len(inv)
    return free, [d for d in inv if d != 1]


def render(free: int, torsion: list[int]) -> str:
    parts = []
    if free == 1:
        parts.append("Z")
    elif free > 1:
        parts.append(f"Z^{free}")
    parts += [f"Z/{d}" for d in torsion]
    return " + ".join(parts) if parts else "0"


def rank_mod_p(A: list[list[int]], p: int) -> int:
    A = [[x % p for x in r] for r in A]
    rank = 0
    rows, cols = len(A), len(A[0]) if A else 0
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if A[r][c]), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        inv = pow(A[rank][c], -1, p)
        A[rank] = [x * inv % p for x in A[rank]]
        for r in range(rows):
            if r != rank and A[r][c]:
                f = A[r][c]
                A[r] = [(x - f * y) % p for x, y in zip(A[r], A[rank])]
        rank += 1
    return rank


def kron(A: list[list[int]], B: list[list[int]]) -> list[list[int]]:
    return [[a * b for a in ra for b in rb] for ra in A for rb in B]


def eye(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def koszul_tensor_mod_p(p: int, k: int) -> dict[int, int]:
    """``dim_{F_p} H_i(K(p)^{⊗k} ⊗ F_p)`` built as an explicit tensor of dense matrices.

    Over ``F_p`` every differential of ``K(p)`` vanishes, so the oracle
    assembles the complex anyway (signs included) and counts ranks.
    """
    # complex as graded pieces: list of (degree -> list of basis tuples)
    basis = {0: [()]}
    for _ in range(k):
        new: dict[int, list] = {}
        for d, elems in basis.items():
            for e in elems:
                new.setdefault(d, []).append(e + (0,))
                new.setdefault(d + 1, []).append(e + (1,))
        basis = new
    index = {d: {e: i for i, e in enumerate(b)} for d, b in basis.items()}
    dims = {}
    mats = {}
    for d, elems in basis.items():
        if d == 0:
            continue
        M = [[0] * len(elems) for _ in basis[d - 1]]
        for j, e in enumerate(elems):
            sign = 1
            for slot, bit in enumerate(e):
                if bit:
                    f = e[:slot] + (0,) + e[slot + 1:]
                    M[index[d - 1][f]][j] += sign * p
                    sign = -sign
        mats[d] = M
    for d in sorted(basis):
        n = len(basis[d])
        r_out = rank_mod_p(mats[d], p) if d in mats else 0
        r_in = rank_mod_p(mats[d + 1], p) if d + 1 in mats else 0
        dims[d] = n - r_out - r_in
    return dims
