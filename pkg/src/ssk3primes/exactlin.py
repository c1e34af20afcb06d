"""Exact integer and rational linear algebra.

Everything here works on plain nested lists of ``int`` / ``Fraction``; no
floating point is used anywhere.  The short-vector routines implement the
Fincke-Pohst enumeration with an exact rational LDL^T decomposition.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt
from typing import Iterator, Sequence

IntMatrix = list[list[int]]
RatMatrix = list[list[Fraction]]


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> list[list]:
    Bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def transpose(A: Sequence[Sequence]) -> list[list]:
    return [list(col) for col in zip(*A)]


def block_diagonal(blocks: Sequence[Sequence[Sequence[int]]]) -> IntMatrix:
    n = sum(len(b) for b in blocks)
    out = [[0] * n for _ in range(n)]
    off = 0
    for b in blocks:
        k = len(b)
        for i in range(k):
            for j in range(k):
                out[off + i][off + j] = b[i][j]
        off += k
    return out


def det(M: Sequence[Sequence[int]]) -> int:
    """Determinant of an integer matrix by fraction-free Bareiss elimination."""
    n = len(M)
    if n == 0:
        return 1
    A = [list(map(int, row)) for row in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k] != 0:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def inverse(M: Sequence[Sequence]) -> RatMatrix:
    """Exact inverse over Q.  Raises ``ValueError`` for singular input."""
    n = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(M)]
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c] != 0), None)
        if piv is None:
            raise ValueError("singular matrix")
        A[c], A[piv] = A[piv], A[c]
        p = A[c][c]
        A[c] = [x / p for x in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return [row[n:] for row in A]


def _nearest_quotient(a: int, b: int) -> int:
    # q minimising |a - q*b|; keeps entries small during reduction
    q, r = divmod(a, b)
    if 2 * abs(r) > abs(b):
        q += 1 if (r > 0) == (b > 0) else 0
    return q


def smith_normal_form(M: Sequence[Sequence[int]]) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return ``(D, U, V)`` with ``U @ M @ V == D`` and ``D`` in Smith form.

    The diagonal of ``D`` is non-negative with ``d_1 | d_2 | ...``; zero
    entries, if any, come last.  ``U`` and ``V`` are unimodular.
    """
    m = len(M)
    n = len(M[0]) if m else 0
    A = [list(map(int, row)) for row in M]
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, f):  # row_dst += f * row_src
        A[dst] = [x + f * y for x, y in zip(A[dst], A[src])]
        U[dst] = [x + f * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, f):  # col_dst += f * col_src
        for row in A:
            row[dst] += f * row[src]
        for row in V:
            row[dst] += f * row[src]

    for t in range(min(m, n)):
        while True:
            # smallest nonzero entry of the trailing block becomes the pivot
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            swap_rows(t, best[0])
            swap_cols(t, best[1])
            p = A[t][t]
            clean = True
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -_nearest_quotient(A[i][t], p))
                    clean = clean and A[i][t] == 0
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -_nearest_quotient(A[t][j], p))
                    clean = clean and A[t][j] == 0
            if not clean:
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if A[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
    return A, U, V


def invariant_factors(M: Sequence[Sequence[int]]) -> list[int]:
    D, _, _ = smith_normal_form(M)
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0))]


def discriminant_group(G: Sequence[Sequence[int]]) -> tuple[list[int], list[list[Fraction]]]:
    """Invariant factors (all >= 2) of ``L^dual / L`` and dual-lattice generators.

    Generators are rational coordinate vectors with respect to the lattice
    basis; generator ``i`` has order ``orders[i]`` in the quotient.
    """
    if det(G) == 0:
        raise ValueError("degenerate lattice")
    D, _, V = smith_normal_form(G)
    n = len(G)
    orders, gens = [], []
    for i in range(n):
        d = D[i][i]
        if d >= 2:
            orders.append(d)
            gens.append([Fraction(V[r][i], d) for r in range(n)])
    return orders, gens


def lattice_basis(generators: Sequence[Sequence[int]], dim: int) -> IntMatrix:
    """A basis (as columns) of the Z-span of integer column vectors, via SNF."""
    cols = [list(map(int, g)) for g in generators]
    if not cols:
        return [[] for _ in range(dim)]
    M = transpose(cols)
    D, U, _ = smith_normal_form(M)
    Uinv = inverse(U)
    basis = []
    for i in range(min(dim, len(cols))):
        d = D[i][i]
        if d:
            basis.append([int(Uinv[r][i] * d) for r in range(dim)])
    return transpose(basis) if basis else [[] for _ in range(dim)]


def integer_kernel(M: Sequence[Sequence[int]]) -> IntMatrix:
    """Basis (as columns) of ``{x in Z^n : M x = 0}``."""
    m = len(M)
    n = len(M[0])
    D, _, V = smith_normal_form(M)
    rank = sum(1 for i in range(min(m, n)) if D[i][i])
    cols = [[V[r][j] for r in range(n)] for j in range(rank, n)]
    return transpose(cols) if cols else [[] for _ in range(n)]


def _ldl(G: Sequence[Sequence[int]]) -> tuple[list[Fraction], RatMatrix]:
    # Q(x) = sum_i d_i (x_i + sum_{j>i} mu[i][j] x_j)^2
    n = len(G)
    Q = [[Fraction(x) for x in row] for row in G]
    for i in range(n):
        if Q[i][i] <= 0:
            raise ValueError("matrix is not positive definite")
        for j in range(i + 1, n):
            Q[j][i] = Q[i][j]
            Q[i][j] = Q[i][j] / Q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                Q[k][l] -= Q[k][i] * Q[i][l]
    return [Q[i][i] for i in range(n)], Q


def _int_range(center: Fraction, radius_sq: Fraction) -> range:
    # integers v with (v - center)^2 <= radius_sq, padded by one on each side
    s = isqrt(radius_sq.numerator // radius_sq.denominator) + 1
    lo = -((-(center - s).numerator) // (center - s).denominator)
    hi = (center + s).numerator // (center + s).denominator
    return range(lo, hi + 1)


def enumerate_coset(G: Sequence[Sequence[int]], bound, shift=None) -> Iterator[tuple[tuple[int, ...], Fraction]]:
    """Yield ``(v, norm)`` for all integer ``v`` with ``(v+shift)^T G (v+shift) <= bound``.

    ``G`` must be positive definite.  The enumeration is exhaustive.
    """
    n = len(G)
    bound = Fraction(bound)
    shift = [Fraction(0)] * n if shift is None else [Fraction(s) for s in shift]
    diag, mu = _ldl(G)
    y = [Fraction(0)] * n
    v = [0] * n

    def rec(i: int, remaining: Fraction) -> Iterator[tuple[tuple[int, ...], Fraction]]:
        if i < 0:
            yield tuple(v), bound - remaining
            return
        c = -shift[i] - sum((mu[i][j] * y[j] for j in range(i + 1, n)), Fraction(0))
        r2 = remaining / diag[i]
        for x in _int_range(c, r2):
            t = diag[i] * (x - c) ** 2
            if t <= remaining:
                v[i] = x
                y[i] = x + shift[i]
                yield from rec(i - 1, remaining - t)

    if bound < 0:
        return
    yield from rec(n - 1, bound)


def short_vectors(G: Sequence[Sequence[int]], bound) -> list[tuple[int, ...]]:
    """All nonzero integer vectors of norm ``<= bound`` (both signs listed)."""
    return [v for v, _ in enumerate_coset(G, bound) if any(v)]


def coset_min_norm_bruteforce(G: Sequence[Sequence[int]], offset, cap) -> Fraction | None:
    """Minimum norm over the coset ``offset + Z^n``, or ``None`` if it exceeds ``cap``."""
    best = None
    for _, norm in enumerate_coset(G, cap, offset):
        if best is None or norm < best:
            best = norm
    return best


def vec_norm(G: Sequence[Sequence], x: Sequence) -> Fraction:
    n = len(x)
    return sum((Fraction(x[i]) * G[i][j] * x[j] for i in range(n) for j in range(n)), Fraction(0))


def bilinear(G: Sequence[Sequence], x: Sequence, y: Sequence) -> Fraction:
    n = len(x)
    return sum((Fraction(x[i]) * G[i][j] * y[j] for i in range(n) for j in range(n)), Fraction(0))


def lcm(*xs: int) -> int:
    out = 1
    for x in xs:
        out = out * x // gcd(out, x)
    return out
