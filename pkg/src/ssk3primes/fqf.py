"""Finite quadratic forms on finite abelian groups.

A form is stored on a presentation ``D = Z/d_1 x ... x Z/d_k`` (the d_i need
not be invariant factors) by a symmetric rational matrix ``Q`` with
``Q[i][i] = q(g_i) mod 2`` and ``Q[i][j] = b(g_i, g_j) mod 1``.  Elements
are integer tuples reduced modulo the generator orders.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from math import gcd, prod
from typing import Iterable, Iterator, Sequence

from . import exactlin as el

Element = tuple[int, ...]


class IsomorphismUndecided(RuntimeError):
    """Raised when the isomorphism search exceeds its node budget."""


def prime_factors(n: int) -> list[int]:
    n = abs(n)
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def _split(n: int, p: int) -> tuple[int, int]:
    # n = p^a * m with p not dividing m; returns (p^a, m)
    pa = 1
    while n % p == 0:
        n //= p
        pa *= p
    return pa, n


def _mod2(x: Fraction) -> Fraction:
    return x - 2 * (x.numerator // (2 * x.denominator))


def _mod1(x: Fraction) -> Fraction:
    return x - x.numerator // x.denominator


class FiniteQuadraticForm:
    """A quadratic form ``q: D -> Q/2Z`` with bilinear form ``b[q]: D x D -> Q/Z``."""

    def __init__(self, orders: Sequence[int], qmat: Sequence[Sequence]):
        orders = tuple(int(d) for d in orders)
        if any(d < 2 for d in orders):
            raise ValueError("generator orders must be >= 2")
        k = len(orders)
        if len(qmat) != k or any(len(row) != k for row in qmat):
            raise ValueError("q-matrix shape does not match the group")
        Q = [[Fraction(x) for x in row] for row in qmat]
        for i in range(k):
            for j in range(i + 1, k):
                if _mod1(Q[i][j] - Q[j][i]) != 0:
                    raise ValueError("bilinear form is not symmetric")
        Q = [[_mod2(Q[i][i]) if i == j else _mod1(Q[min(i, j)][max(i, j)]) for j in range(k)]
             for i in range(k)]
        for i, d in enumerate(orders):
            if (d * d * Q[i][i]) % 2 != 0 or (d * Q[i][i]).denominator != 1:
                raise ValueError(f"q is not well defined on generator {i} of order {d}")
            for j in range(k):
                if j != i and (d * Q[i][j]).denominator != 1:
                    raise ValueError(f"b is not well defined on generators {i}, {j}")
        self.orders = orders
        self.qmat = tuple(tuple(row) for row in Q)
        self._e = el.lcm(*orders) if orders else 1
        self._qi = tuple(tuple(int(x * self._e) for x in row) for row in Q)

    # -- constructors -----------------------------------------------------

    @classmethod
    def trivial(cls) -> FiniteQuadraticForm:
        return cls((), ())

    @classmethod
    def diagonal(cls, orders: Sequence[int], qvalues: Sequence) -> FiniteQuadraticForm:
        k = len(orders)
        return cls(orders, [[qvalues[i] if i == j else 0 for j in range(k)] for i in range(k)])

    @classmethod
    def from_gram(cls, G: Sequence[Sequence[int]]) -> FiniteQuadraticForm:
        """Discriminant form of the even lattice with Gram matrix ``G``."""
        orders, gens = el.discriminant_group(G)
        Q = [[el.bilinear(G, x, y) for y in gens] for x in gens]
        return cls(orders, Q)

    # -- basic structure --------------------------------------------------

    def __repr__(self) -> str:
        return f"FiniteQuadraticForm(orders={list(self.orders)}, q={[[str(x) for x in r] for r in self.qmat]})"

    def __eq__(self, other) -> bool:
        return (isinstance(other, FiniteQuadraticForm) and self.orders == other.orders
                and self.qmat == other.qmat)

    def __hash__(self) -> int:
        return hash((self.orders, self.qmat))

    @property
    def rank(self) -> int:
        return len(self.orders)

    @property
    def order(self) -> int:
        return prod(self.orders)

    @property
    def exponent(self) -> int:
        return self._e

    def zero(self) -> Element:
        return (0,) * len(self.orders)

    def reduce(self, x: Iterable[int]) -> Element:
        return tuple(int(a) % d for a, d in zip(x, self.orders))

    def add(self, x: Element, y: Element) -> Element:
        return tuple((a + b) % d for a, b, d in zip(x, y, self.orders))

    def mul(self, n: int, x: Element) -> Element:
        return tuple((n * a) % d for a, d in zip(x, self.orders))

    def elements(self) -> Iterator[Element]:
        return product(*(range(d) for d in self.orders))

    def element_order(self, x: Element) -> int:
        return el.lcm(*(d // gcd(d, a) for a, d in zip(x, self.orders)))

    def qn(self, x: Element) -> int:
        """``q(x) * exponent`` as an integer mod ``2 * exponent``."""
        qi = self._qi
        k = len(x)
        s = 0
        for i in range(k):
            xi = x[i]
            if xi:
                row = qi[i]
                s += row[i] * xi * xi
                for j in range(i + 1, k):
                    if x[j]:
                        s += 2 * row[j] * xi * x[j]
        return s % (2 * self._e)

    def bn(self, x: Element, y: Element) -> int:
        """``b(x, y) * exponent`` as an integer mod ``exponent``."""
        qi = self._qi
        s = 0
        for i, xi in enumerate(x):
            if xi:
                row = qi[i]
                s += xi * sum(row[j] * yj for j, yj in enumerate(y) if yj)
        return s % self._e

    def q(self, x: Iterable[int]) -> Fraction:
        return Fraction(self.qn(self.reduce(x)), self._e)

    def b(self, x: Iterable[int], y: Iterable[int]) -> Fraction:
        return Fraction(self.bn(self.reduce(x), self.reduce(y)), self._e)

    # -- derived forms ----------------------------------------------------

    def scale(self, m: int) -> FiniteQuadraticForm:
        """The form ``m * q`` on the same group."""
        if gcd(m, self.order) != 1:
            raise ValueError("degenerate scaling")
        return FiniteQuadraticForm(self.orders, [[m * x for x in row] for row in self.qmat])

    def __neg__(self) -> FiniteQuadraticForm:
        return self.scale(-1)

    def direct_sum(self, other: FiniteQuadraticForm) -> FiniteQuadraticForm:
        k, l = self.rank, other.rank
        Q = [[Fraction(0)] * (k + l) for _ in range(k + l)]
        for i in range(k):
            for j in range(k):
                Q[i][j] = self.qmat[i][j]
        for i in range(l):
            for j in range(l):
                Q[k + i][k + j] = other.qmat[i][j]
        return FiniteQuadraticForm(self.orders + other.orders, Q)

    def sub_form(self, gens: Sequence[Element], orders: Sequence[int]) -> FiniteQuadraticForm:
        """Restriction of ``q`` to the subgroup freely presented by ``gens`` of the given orders."""
        Q = [[self.b(x, y) if i != j else self.q(x) for j, y in enumerate(gens)]
             for i, x in enumerate(gens)]
        return FiniteQuadraticForm(orders, Q)

    def _primary_presentation(self, p: int) -> tuple[list[int], list[Element]]:
        orders, gens = [], []
        for i, d in enumerate(self.orders):
            pa, m = _split(d, p)
            if pa > 1:
                g = [0] * self.rank
                g[i] = m
                orders.append(pa)
                gens.append(tuple(g))
        return orders, gens

    def primary_part(self, p: int) -> FiniteQuadraticForm:
        orders, gens = self._primary_presentation(p)
        return self.sub_form(gens, orders)

    def primes(self) -> list[int]:
        return prime_factors(self.order)

    def primary_decomposition(self) -> dict[int, FiniteQuadraticForm]:
        return {p: self.primary_part(p) for p in self.primes()}

    def invariant_factors(self) -> list[int]:
        """Invariant factors ``d_1 | d_2 | ...`` (all >= 2) of the underlying group."""
        by_prime = {}
        for p in self.primes():
            by_prime[p] = sorted((_split(d, p)[0] for d in self.orders if d % p == 0), reverse=True)
        length = max((len(v) for v in by_prime.values()), default=0)
        out = [1] * length
        for p, powers in by_prime.items():
            for i, pa in enumerate(powers):
                out[i] *= pa
        return sorted(out)

    def length(self) -> int:
        """Minimal number of generators of the group."""
        return max((sum(1 for d in self.orders if d % p == 0) for p in self.primes()), default=0)

    def p_rank(self, p: int) -> int:
        return sum(1 for d in self.orders if d % p == 0)

    def isotropic_vectors(self) -> list[Element]:
        return [x for x in self.elements() if self.qn(x) == 0]

    def fingerprint(self) -> Counter:
        """Multiset of ``(element order, q-value)`` over the whole group."""
        return Counter((self.element_order(x), self.qn(x)) for x in self.elements())

    def is_nondegenerate(self) -> bool:
        return self.orthogonal_complement(Subgroup.whole(self.orders)).order == 1

    # -- subgroups --------------------------------------------------------

    def subgroup(self, gens: Iterable[Iterable[int]]) -> Subgroup:
        return Subgroup(self.orders, gens)

    def is_isotropic(self, H: Subgroup) -> bool:
        gens = H.generators()
        return (all(self.qn(g) == 0 for g in gens)
                and all(self.bn(g, h) == 0 for i, g in enumerate(gens) for h in gens[i + 1:]))

    def orthogonal_complement(self, H: Subgroup) -> Subgroup:
        gens = H.generators()
        if not gens:
            return Subgroup.whole(self.orders)
        k, e = self.rank, self._e
        # x lies in H^perp iff sum_i x_i a_i = 0 mod e for each generator's row a
        A = [[sum(self._qi[i][j] * h[j] for j in range(k)) for i in range(k)] for h in gens]
        m = len(A)
        M = [A[r] + [-e if c == r else 0 for c in range(m)] for r in range(m)]
        ker = el.integer_kernel(M)
        cols = [[ker[r][c] for r in range(k)] for c in range(len(ker[0]))] if ker and ker[0] else []
        return Subgroup(self.orders, cols)

    def quotient(self, H: Subgroup) -> tuple[FiniteQuadraticForm, list[Element]]:
        """The form induced on ``H^perp / H`` and representatives of its generators."""
        if not self.is_isotropic(H):
            raise ValueError("subgroup is not isotropic")
        Hp = self.orthogonal_complement(H)
        B1 = Hp.lattice_basis()
        B0 = H.lattice_basis()
        C = el.matmul(el.inverse(B1), B0)
        Ci = [[int(x) for x in row] for row in C]
        D, U, _ = el.smith_normal_form(Ci)
        Uinv = el.inverse(U)
        k = self.rank
        P = el.matmul(B1, Uinv)
        orders, gens = [], []
        for i in range(k):
            d = D[i][i]
            if d >= 2:
                orders.append(d)
                gens.append(self.reduce(int(P[r][i]) for r in range(k)))
        return self.sub_form(gens, orders), gens

    def quotient_form(self, H: Subgroup) -> FiniteQuadraticForm:
        return self.quotient(H)[0]

    # -- isomorphism ------------------------------------------------------

    def is_isomorphic(self, other: FiniteQuadraticForm, max_nodes: int = 2_000_000) -> tuple[Element, ...] | None:
        """An isometry ``self -> other`` as images of the generators, or ``None``."""
        return find_isometry(self, other, max_nodes=max_nodes)


@dataclass(frozen=True)
class Subgroup:
    """Subgroup of ``Z/d_1 x ... x Z/d_k``, stored as the Hermite normal form
    of its preimage lattice in ``Z^k``."""

    orders: tuple[int, ...]
    hnf: tuple[tuple[int, ...], ...] = field(init=False)

    def __init__(self, orders: Sequence[int], gens: Iterable[Iterable[int]] = ()):
        orders = tuple(orders)
        rows = [list(map(int, g)) for g in gens]
        k = len(orders)
        rows += [[d if c == i else 0 for c in range(k)] for i, d in enumerate(orders)]
        object.__setattr__(self, "orders", orders)
        object.__setattr__(self, "hnf", _hnf_rows(rows, orders))

    @classmethod
    def whole(cls, orders: Sequence[int]) -> Subgroup:
        k = len(orders)
        return cls(orders, [[int(c == i) for c in range(k)] for i in range(k)])

    @cached_property
    def order(self) -> int:
        return prod(d // self.hnf[i][i] for i, d in enumerate(self.orders))

    def generators(self) -> list[Element]:
        out = []
        for i, d in enumerate(self.orders):
            if self.hnf[i][i] != d:
                out.append(tuple(x % m for x, m in zip(self.hnf[i], self.orders)))
        return out

    def lattice_basis(self) -> el.IntMatrix:
        """Basis of the preimage lattice, as columns."""
        return el.transpose(self.hnf) if self.hnf else []

    def elements(self) -> Iterator[Element]:
        k = len(self.orders)
        ranges = [range(d // self.hnf[i][i]) for i, d in enumerate(self.orders)]
        for coeffs in product(*ranges):
            x = [0] * k
            for c, row in zip(coeffs, self.hnf):
                if c:
                    for j in range(k):
                        x[j] += c * row[j]
            yield tuple(a % d for a, d in zip(x, self.orders))

    def __contains__(self, x) -> bool:
        x = [int(a) for a in x]
        for i, row in enumerate(self.hnf):
            c, r = divmod(x[i], row[i])
            if r:
                return False
            if c:
                x = [a - c * b for a, b in zip(x, row)]
        return True

    def __le__(self, other: Subgroup) -> bool:
        return all(g in other for g in self.generators())


def _hnf_rows(rows: list[list[int]], orders: Sequence[int]) -> tuple[tuple[int, ...], ...]:
    # upper-triangular row HNF of a full-rank lattice containing diag(orders)
    k = len(orders)
    rows = [r[:] for r in rows if any(r)]
    out = []
    for c in range(k):
        pivot_rows = [r for r in rows if r[c]]
        rest = [r for r in rows if not r[c]]
        while len(pivot_rows) > 1:
            pivot_rows.sort(key=lambda r: abs(r[c]))
            p = pivot_rows[0]
            nxt = [p]
            for r in pivot_rows[1:]:
                f = r[c] // p[c]
                r = [a - f * b for a, b in zip(r, p)]
                if r[c]:
                    nxt.append(r)
                elif any(r):
                    rest.append(r)
            pivot_rows = nxt
        p = pivot_rows[0]
        if p[c] < 0:
            p = [-a for a in p]
        out.append(p)
        rows = rest
    # reduce entries above the pivots into [0, pivot)
    for c in range(k):
        for r in range(c):
            f = out[r][c] // out[c][c]
            if f:
                out[r] = [a - f * b for a, b in zip(out[r], out[c])]
    return tuple(tuple(r) for r in out)


# -- isometry search ------------------------------------------------------


def _pgroup_isometry(A: FiniteQuadraticForm, B: FiniteQuadraticForm, p: int,
                     budget: list[int]) -> list[Element] | None:
    if sorted(A.orders) != sorted(B.orders):
        return None
    if A.fingerprint() != B.fingerprint():
        return None
    idx = sorted(range(A.rank), key=lambda i: -A.orders[i])
    gens = []
    for i in idx:
        g = [0] * A.rank
        g[i] = 1
        gens.append(tuple(g))
    by_key: dict[tuple[int, int], list[Element]] = {}
    for y in B.elements():
        by_key.setdefault((B.element_order(y), B.qn(y)), []).append(y)
    cands = [by_key.get((A.orders[i], A.qn(g)), []) for i, g in zip(idx, gens)]
    bA = [[A.bn(g, h) for h in gens] for g in gens]
    images: list[Element] = []
    span: set[Element] = {B.zero()}

    def rec(t: int, span: set[Element]) -> bool:
        if t == len(gens):
            return True
        o = A.orders[idx[t]]
        for y in cands[t]:
            budget[0] -= 1
            if budget[0] < 0:
                raise IsomorphismUndecided("isometry search exceeded its node budget")
            if any(B.bn(images[s], y) != bA[s][t] for s in range(t)):
                continue
            if B.mul(o // p, y) in span:
                continue
            new_span = set(span)
            mult = B.zero()
            for _ in range(o - 1):
                mult = B.add(mult, y)
                new_span.update(B.add(s, mult) for s in span)
            images.append(y)
            if rec(t + 1, new_span):
                return True
            images.pop()
        return False

    if not rec(0, span):
        return None
    out: list[Element] = [None] * A.rank  # type: ignore[list-item]
    for i, y in zip(idx, images):
        out[i] = y
    return out


def find_isometry(F1: FiniteQuadraticForm, F2: FiniteQuadraticForm,
                  max_nodes: int = 2_000_000) -> tuple[Element, ...] | None:
    """Images in ``F2`` of the generators of ``F1`` under an isometry, or ``None``."""
    if F1.order != F2.order or F1.invariant_factors() != F2.invariant_factors():
        return None
    budget = [max_nodes]
    k = F1.rank
    images = [[0] * F2.rank for _ in range(k)]
    for p in F1.primes():
        o1, g1 = F1._primary_presentation(p)
        o2, g2 = F2._primary_presentation(p)
        A = F1.sub_form(g1, o1)
        B = F2.sub_form(g2, o2)
        phi = _pgroup_isometry(A, B, p, budget)
        if phi is None:
            return None
        # F1 generator i splits by CRT into its p-parts; reassemble the image
        a_gens = iter(range(len(o1)))
        for i, d in enumerate(F1.orders):
            pa, m = _split(d, p)
            if pa == 1:
                continue
            j = next(a_gens)
            u = pow(m, -1, pa)
            y = phi[j]
            # image of m*g_i is sum_t y_t * g2_t; g_i's p-component is u*m*g_i
            for t, c in enumerate(y):
                if c:
                    for r in range(F2.rank):
                        images[i][r] += u * c * g2[t][r]
    return tuple(F2.reduce(v) for v in images)


def is_isometry(F1: FiniteQuadraticForm, F2: FiniteQuadraticForm, images: Sequence[Element],
                check_all: bool = True) -> bool:
    """Verify that generator images define an isometry ``F1 -> F2``."""
    if F1.order != F2.order or len(images) != F1.rank:
        return False
    for d, y in zip(F1.orders, images):
        if any(c for c in F2.mul(d, y)):
            return False

    def phi(x: Element) -> Element:
        out = [0] * F2.rank
        for c, y in zip(x, images):
            for r in range(F2.rank):
                out[r] += c * y[r]
        return F2.reduce(out)

    seen = set()
    for x in F1.elements():
        y = phi(x)
        if check_all and F2.q(y) != F1.q(x):
            return False
        seen.add(y)
    return len(seen) == F2.order
