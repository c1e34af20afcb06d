"""ADE Dynkin types and the data of their negative-definite root lattices.

Glue coordinates follow the component order of the type: each ``A_l`` gets
one residue mod ``l+1``, ``D_m`` one residue mod 4 (m odd) or two residues
mod 2 (m even, the spinor classes ``s`` and ``c``), ``E_6`` one mod 3,
``E_7`` one mod 2, and ``E_8`` none.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import groupby
from math import prod
from typing import Iterator, Sequence

from . import exactlin as el
from .fqf import FiniteQuadraticForm

_FAMILY_ORDER = {"E": 0, "D": 1, "A": 2}
_TERM = re.compile(r"^\s*(\d*)\s*([ADE])\s*_?\s*\{?(\d+)\}?\s*$")


@dataclass(frozen=True, order=True)
class Component:
    family: str
    n: int

    def __post_init__(self):
        ok = {"A": self.n >= 1, "D": self.n >= 4, "E": self.n in (6, 7, 8)}.get(self.family, False)
        if not ok:
            raise ValueError(f"invalid Dynkin component {self.family}{self.n}")

    def __str__(self) -> str:
        return f"{self.family}{self.n}"

    @property
    def sort_key(self) -> tuple[int, int]:
        return (_FAMILY_ORDER[self.family], -self.n)

    @property
    def rank(self) -> int:
        return self.n

    @property
    def disc(self) -> int:
        f, n = self.family, self.n
        if f == "A":
            return n + 1
        if f == "D":
            return 4
        return {6: 3, 7: 2, 8: 1}[n]

    @property
    def root_count(self) -> int:
        f, n = self.family, self.n
        if f == "A":
            return n * (n + 1)
        if f == "D":
            return 2 * n * (n - 1)
        return {6: 72, 7: 126, 8: 240}[n]

    def edges(self) -> list[tuple[int, int]]:
        f, n = self.family, self.n
        if f == "A":
            return [(i, i + 1) for i in range(n - 1)]
        if f == "D":
            # chain 0 - ... - (n-2), fork node n-3 also joined to n-1
            return [(i, i + 1) for i in range(n - 2)] + [(n - 3, n - 1)]
        # Bourbaki labelling 1..n shifted to 0..n-1
        base = [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3)]
        return [(a, b) for a, b in base if a < n and b < n]

    def cartan(self) -> list[list[int]]:
        n = self.n
        C = [[2 * int(i == j) for j in range(n)] for i in range(n)]
        for a, b in self.edges():
            C[a][b] = C[b][a] = -1
        return C

    @property
    def moduli(self) -> tuple[int, ...]:
        """Orders of the glue coordinates of this component."""
        f, n = self.family, self.n
        if f == "A":
            return (n + 1,)
        if f == "D":
            return (4,) if n % 2 else (2, 2)
        return {6: (3,), 7: (2,), 8: ()}[n]

    @property
    def glue_nodes(self) -> tuple[int, ...]:
        """Nodes whose fundamental weights represent the glue generators."""
        f, n = self.family, self.n
        if f == "A":
            return (0,)
        if f == "D":
            return (n - 1,) if n % 2 else (n - 1, n - 2)
        return {6: (0,), 7: (6,), 8: ()}[n]

    def q_matrix(self) -> list[list[Fraction]]:
        f, n = self.family, self.n
        if f == "A":
            return [[Fraction(-n, n + 1)]]
        if f == "D":
            if n % 2:
                return [[Fraction(-n, 4)]]
            b = Fraction(n - 2, 4)
            return [[Fraction(-n, 4), b], [b, Fraction(-n, 4)]]
        return {6: [[Fraction(-4, 3)]], 7: [[Fraction(-3, 2)]], 8: []}[n]

    def glue_min_norm(self, residue: Sequence[int]) -> Fraction:
        """Minimal norm (positive-definite convention) in the glue class."""
        f, n = self.family, self.n
        if f == "A":
            j = residue[0] % (n + 1)
            return Fraction(j * (n + 1 - j), n + 1)
        if f == "D":
            if n % 2:
                j = residue[0] % 4
                return Fraction(0) if j == 0 else Fraction(1) if j == 2 else Fraction(n, 4)
            s, c = residue[0] % 2, residue[1] % 2
            if not (s or c):
                return Fraction(0)
            return Fraction(1) if (s and c) else Fraction(n, 4)
        if n == 8 or residue[0] % self.moduli[0] == 0:
            return Fraction(0)
        return Fraction(4, 3) if n == 6 else Fraction(3, 2)

    def glue_vector(self, residue: Sequence[int]) -> list[Fraction]:
        """A dual-lattice vector (in the simple-root basis) representing the glue class."""
        G = [[-x for x in row] for row in self.cartan()]
        Ginv = el.inverse(G)
        v = [Fraction(0)] * self.n
        for r, node in zip(residue, self.glue_nodes):
            for i in range(self.n):
                v[i] += r * Ginv[i][node]
        return v

    def local_automorphisms(self) -> list[list[list[int]]]:
        """Generators (as matrices on the glue coordinates) induced by isometries."""
        f, n = self.family, self.n
        if f in "AE" and self.moduli and self.moduli[0] > 2 or f == "D" and n % 2:
            return [[[-1]]]
        if f == "D":
            gens = [[[0, 1], [1, 0]]]
            if n == 4:
                # triality: s -> c -> s + c
                gens.append([[0, 1], [1, 1]])
            return gens
        return []


@dataclass(frozen=True)
class DynkinType:
    components: tuple[Component, ...]

    def __init__(self, components: Sequence[Component]):
        comps = tuple(sorted(components, key=lambda c: c.sort_key))
        if not comps:
            raise ValueError("empty Dynkin type")
        object.__setattr__(self, "components", comps)

    @classmethod
    def parse(cls, text: str) -> DynkinType:
        if not text or not text.strip():
            raise ValueError("empty Dynkin type")
        comps = []
        for term in text.split("+"):
            m = _TERM.match(term)
            if not m:
                raise ValueError(f"cannot parse Dynkin term {term!r}")
            mult = int(m.group(1)) if m.group(1) else 1
            if mult < 1:
                raise ValueError(f"multiplicity must be positive in {term!r}")
            comps += [Component(m.group(2), int(m.group(3)))] * mult
        return cls(comps)

    def __str__(self) -> str:
        parts = []
        for comp, grp in groupby(self.components):
            k = len(list(grp))
            parts.append(f"{k}{comp}" if k > 1 else str(comp))
        return "+".join(parts)

    def __repr__(self) -> str:
        return f"DynkinType({str(self)!r})"

    @property
    def rank(self) -> int:
        return sum(c.rank for c in self.components)

    @property
    def disc(self) -> int:
        return prod(c.disc for c in self.components)

    @property
    def root_count(self) -> int:
        return sum(c.root_count for c in self.components)

    def gram(self) -> list[list[int]]:
        return el.block_diagonal([[[-x for x in row] for row in c.cartan()] for c in self.components])

    @cached_property
    def slices(self) -> tuple[slice, ...]:
        """Glue-coordinate slice of each component."""
        out, off = [], 0
        for c in self.components:
            out.append(slice(off, off + len(c.moduli)))
            off += len(c.moduli)
        return tuple(out)

    @cached_property
    def moduli(self) -> tuple[int, ...]:
        return tuple(m for c in self.components for m in c.moduli)

    def disc_form(self) -> FiniteQuadraticForm:
        blocks = [c.q_matrix() for c in self.components]
        k = len(self.moduli)
        Q = [[Fraction(0)] * k for _ in range(k)]
        for sl, B in zip(self.slices, blocks):
            for i, row in enumerate(B):
                for j, x in enumerate(row):
                    Q[sl.start + i][sl.start + j] = x
        return FiniteQuadraticForm(self.moduli, Q)

    def glue_min_norm(self, g: Sequence[int]) -> Fraction:
        return sum((c.glue_min_norm(g[sl]) for c, sl in zip(self.components, self.slices)), Fraction(0))

    def glue_vector(self, g: Sequence[int]) -> list[Fraction]:
        """Dual-lattice vector (simple-root coordinates of ``L(R)``) for a glue element."""
        out = []
        for c, sl in zip(self.components, self.slices):
            out += c.glue_vector(g[sl]) if c.moduli else [Fraction(0)] * c.n
        return out

    def aut_generators(self) -> list[list[list[int]]]:
        """Matrices acting on glue coordinates, induced by isometries of ``L(R)``.

        Includes the local diagram/negation automorphisms of each component
        and the transpositions of adjacent identical components.
        """
        k = len(self.moduli)
        gens = []
        for c, sl in zip(self.components, self.slices):
            for A in c.local_automorphisms():
                M = el.identity(k)
                for i, row in enumerate(A):
                    for j, x in enumerate(row):
                        M[sl.start + i][sl.start + j] = x
                gens.append(M)
        for i in range(len(self.components) - 1):
            a, b = self.components[i], self.components[i + 1]
            if a == b and a.moduli:
                M = el.identity(k)
                sa, sb = self.slices[i], self.slices[i + 1]
                w = sa.stop - sa.start
                for t in range(w):
                    M[sa.start + t][sa.start + t] = 0
                    M[sb.start + t][sb.start + t] = 0
                    M[sa.start + t][sb.start + t] = 1
                    M[sb.start + t][sa.start + t] = 1
                gens.append(M)
        return gens


def parse(text: str) -> DynkinType:
    return DynkinType.parse(text)


def _component_kinds(rank: int) -> list[Component]:
    kinds = [Component("E", n) for n in (8, 7, 6) if n <= rank]
    kinds += [Component("D", m) for m in range(rank, 3, -1)]
    kinds += [Component("A", l) for l in range(rank, 0, -1)]
    return kinds


def enumerate_types(rank: int) -> list[DynkinType]:
    """All Dynkin types of the given rank, in a deterministic order."""
    if rank < 1:
        raise ValueError("rank must be positive")
    kinds = _component_kinds(rank)
    out: list[DynkinType] = []

    def rec(i: int, remaining: int, acc: list[Component]) -> None:
        if remaining == 0:
            out.append(DynkinType(acc))
            return
        if i == len(kinds):
            return
        k = kinds[i]
        for mult in range(remaining // k.rank, -1, -1):
            rec(i + 1, remaining - mult * k.rank, acc + [k] * mult)

    rec(0, rank, [])
    return out


def iter_types(max_rank: int) -> Iterator[DynkinType]:
    for r in range(1, max_rank + 1):
        yield from enumerate_types(r)
