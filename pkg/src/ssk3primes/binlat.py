"""Even indefinite lattices of rank 2 via indefinite binary quadratic forms.

The even lattice with Gram matrix ``[[2a, b], [b, 2c]]`` corresponds to the
form ``a x^2 + b xy + c y^2``; a lattice determinant ``-d`` corresponds to
form discriminant ``b^2 - 4ac = d``.  Classes are computed with the
classical reduction theory: reduced forms, their rho-cycles (proper
equivalence), then merging ``(a, b, c)`` with ``(a, -b, c)`` (improper).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import isqrt

from .fqf import FiniteQuadraticForm


def _is_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n


def _check_disc(d: int) -> None:
    if d <= 0 or _is_square(d):
        raise ValueError(f"discriminant {d} must be positive and non-square")


# exact comparisons k < sqrt(d) and k > sqrt(d) for integers k, non-square d
def _lt_sqrt(k: int, d: int) -> bool:
    return k < 0 or k * k < d


def _gt_sqrt(k: int, d: int) -> bool:
    return k > 0 and k * k > d


@dataclass(frozen=True, order=True)
class BinaryForm:
    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_reduced(self) -> bool:
        d = self.disc
        a2 = 2 * abs(self.a)
        # 0 < b < sqrt(d) and sqrt(d) - b < 2|a| < sqrt(d) + b
        return (self.b > 0 and _lt_sqrt(self.b, d)
                and _lt_sqrt(a2 - self.b, d) and _gt_sqrt(a2 + self.b, d))

    def rho(self) -> BinaryForm:
        """One proper neighbouring step ``(a, b, c) -> (c, r, (r^2 - d)/4c)``."""
        b, c = self.b, self.c
        d = self.disc
        m = 2 * abs(c)
        r0 = (-b) % m
        if _lt_sqrt(abs(c), d):
            # sqrt(d) - 2|c| < r < sqrt(d): take the largest such r
            s = isqrt(d)
            r = s - ((s - r0) % m)
        else:
            # -|c| < r <= |c|
            r = r0 if r0 <= abs(c) else r0 - m
        return BinaryForm(c, r, (r * r - d) // (4 * c))

    def to_lattice(self) -> BinaryEvenLattice:
        return BinaryEvenLattice(2 * self.a, self.b, 2 * self.c)

    def improper(self) -> BinaryForm:
        return BinaryForm(self.a, -self.b, self.c)

    def __str__(self) -> str:
        return f"({self.a}, {self.b}, {self.c})"


@dataclass(frozen=True)
class BinaryEvenLattice:
    """Even lattice with Gram matrix ``[[g11, g12], [g12, g22]]``."""

    g11: int
    g12: int
    g22: int

    def __post_init__(self):
        if self.g11 % 2 or self.g22 % 2:
            raise ValueError("Gram matrix must have even diagonal")
        _check_disc(-self.det)

    @classmethod
    def from_gram(cls, G) -> BinaryEvenLattice:
        if G[0][1] != G[1][0]:
            raise ValueError("Gram matrix must be symmetric")
        return cls(G[0][0], G[0][1], G[1][1])

    @property
    def gram(self) -> list[list[int]]:
        return [[self.g11, self.g12], [self.g12, self.g22]]

    @property
    def det(self) -> int:
        return self.g11 * self.g22 - self.g12 * self.g12

    @property
    def d(self) -> int:
        return -self.det

    def to_form(self) -> BinaryForm:
        return BinaryForm(self.g11 // 2, self.g12, self.g22 // 2)

    def disc_form(self) -> FiniteQuadraticForm:
        return FiniteQuadraticForm.from_gram(self.gram)

    def __str__(self) -> str:
        return f"[[{self.g11}, {self.g12}], [{self.g12}, {self.g22}]]"


def lattice_to_form(T: BinaryEvenLattice) -> BinaryForm:
    return T.to_form()


def form_to_lattice(f: BinaryForm) -> BinaryEvenLattice:
    return f.to_lattice()


def reduce(f: BinaryForm, max_steps: int = 100_000) -> BinaryForm:
    """A reduced form properly equivalent to ``f``."""
    _check_disc(f.disc)
    for _ in range(max_steps):
        if f.is_reduced():
            return f
        f = f.rho()
    raise RuntimeError("reduction did not terminate")


def cycle(f: BinaryForm) -> list[BinaryForm]:
    """The rho-cycle of reduced forms properly equivalent to ``f``."""
    start = reduce(f)
    out = [start]
    g = start.rho()
    while g != start:
        out.append(g)
        g = g.rho()
    return out


def reduced_forms(d: int) -> list[BinaryForm]:
    """All reduced forms of discriminant ``d`` (primitive or not)."""
    _check_disc(d)
    out = []
    s = isqrt(d)
    for b in range(1, s + 1):
        if (b * b - d) % 4:
            continue
        ac = (b * b - d) // 4
        n = -ac
        for a in range(1, n + 1):
            if n % a:
                continue
            for sa in (a, -a):
                f = BinaryForm(sa, b, ac // sa)
                if f.is_reduced():
                    out.append(f)
    return sorted(out)


@lru_cache(maxsize=None)
def _classes(d: int) -> tuple[tuple[BinaryForm, ...], ...]:
    remaining = set(reduced_forms(d))
    cycles = []
    while remaining:
        f = min(remaining)
        cyc = cycle(f)
        remaining.difference_update(cyc)
        cycles.append(frozenset(cyc))
    index = {f: i for i, cyc in enumerate(cycles) for f in cyc}
    # improper equivalence joins the cycle of f with the cycle of (a, -b, c)
    parent = list(range(len(cycles)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, cyc in enumerate(cycles):
        f = min(cyc)
        j = index[reduce(f.improper())]
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[BinaryForm]] = {}
    for i, cyc in enumerate(cycles):
        groups.setdefault(find(i), []).extend(cyc)
    return tuple(tuple(sorted(g)) for _, g in sorted(groups.items()))


def _representative(forms: tuple[BinaryForm, ...]) -> BinaryForm:
    # prefer small |a|, then positive a, then small b
    return min(forms, key=lambda f: (abs(f.a), f.a < 0, f.b, abs(f.c)))


def enumerate_classes(d: int) -> list[BinaryEvenLattice]:
    """One even lattice per isometry class of rank-2 even lattices of determinant ``-d``."""
    _check_disc(d)
    return [_representative(g).to_lattice() for g in _classes(d)]


def class_index(f: BinaryForm) -> int:
    """Index into ``enumerate_classes(disc)`` of the isometry class of ``f``."""
    g = reduce(f)
    for i, forms in enumerate(_classes(f.disc)):
        if g in forms:
            return i
    raise AssertionError("reduced form missing from class table")
