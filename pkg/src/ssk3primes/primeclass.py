"""Residue-class invariants of primes and the sets S, Sigma_R built from them.

For the prime divisors ``l`` of ``disc(R)`` a prime ``p`` (odd, coprime to
``disc(R)``) has the class ``tau(p) = (tau_l(p))_l`` with ``tau_2(p) = p mod 8``
and ``tau_l(p)`` the Legendre symbol ``(p/l)`` for odd ``l``.  Whether
``(D, p q)`` is isomorphic to a fixed form depends only on ``tau(p)``, so a
single representative prime per class settles every class.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import gcd, isqrt, prod
from typing import Iterable, Sequence

from .fqf import FiniteQuadraticForm, find_isometry, prime_factors

TauClass = tuple[int, ...]


def legendre(a: int, l: int) -> int:
    """Legendre symbol ``(a / l)`` for an odd prime ``l``."""
    if l < 3 or l % 2 == 0:
        raise ValueError("l must be an odd prime")
    a %= l
    if a == 0:
        return 0
    return 1 if pow(a, (l - 1) // 2, l) == 1 else -1


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for f in range(3, isqrt(n) + 1, 2):
        if n % f == 0:
            return False
    return True


def primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i::i] = bytearray(len(range(i * i, n + 1, i)))
    return [i for i, v in enumerate(sieve) if v]


def tau_components(l: int) -> tuple[int, ...]:
    return (1, 3, 5, 7) if l == 2 else (1, -1)


def tau_of(u: int, primes: Sequence[int]) -> TauClass:
    """Class of an integer ``u`` coprime to the given primes (``u`` need not be prime)."""
    return tuple(u % 8 if l == 2 else legendre(u, l) for l in primes)


@dataclass(frozen=True)
class TauSpace:
    """The product ``T(R)`` over the sorted prime divisors of a discriminant."""

    primes: tuple[int, ...]

    @classmethod
    def for_disc(cls, disc: int) -> TauSpace:
        return cls(tuple(prime_factors(disc)))

    @property
    def modulus(self) -> int:
        """``b_R``: 8 times the odd primes if 2 is present, else their product."""
        odd = prod(l for l in self.primes if l != 2)
        return 8 * odd if 2 in self.primes else odd

    @property
    def size(self) -> int:
        return prod(len(tau_components(l)) for l in self.primes)

    def classes(self) -> list[TauClass]:
        return list(product(*(tau_components(l) for l in self.primes)))

    def tau(self, p: int) -> TauClass:
        if p % 2 == 0 or not is_prime(p) or any(p % l == 0 for l in self.primes):
            raise ValueError(f"{p} is not an odd prime coprime to {self.primes}")
        return tau_of(p, self.primes)


def tau(p: int, disc) -> TauClass:
    """``tau(p)`` relative to ``disc`` (an integer, or anything with a ``disc`` attribute)."""
    return TauSpace.for_disc(getattr(disc, "disc", disc)).tau(p)


@lru_cache(maxsize=None)
def _representatives(primes: tuple[int, ...], cap: int) -> dict[TauClass, int]:
    space = TauSpace(primes)
    want = set(space.classes())
    reps: dict[TauClass, int] = {}
    for p in primes_up_to(cap):
        if p == 2 or p in primes:
            continue
        t = tau_of(p, primes)
        if t not in reps:
            reps[t] = p
            if len(reps) == len(want):
                break
    if len(reps) != len(want):
        raise RuntimeError(f"representative prime search exceeded cap {cap}")
    return reps


def representative_primes(space: TauSpace, cap: int | None = None) -> dict[TauClass, int]:
    """The smallest prime in every class of ``space``."""
    if cap is None:
        cap = max(50 * space.modulus ** 2, 100)
    return dict(_representatives(space.primes, cap))


@dataclass(frozen=True)
class TauClassSet:
    space: TauSpace
    members: frozenset[TauClass]

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(sorted(self.members))

    def __contains__(self, t) -> bool:
        return tuple(t) in self.members

    def union(self, other: TauClassSet) -> TauClassSet:
        if other.space != self.space:
            raise ValueError("class sets live over different tau spaces")
        return TauClassSet(self.space, self.members | other.members)

    def density(self) -> Fraction:
        return Fraction(len(self.members), self.space.size)

    def factors(self) -> list[set[int]] | None:
        """The per-prime factor sets if this set is a product set, else ``None``."""
        if not self.members:
            return [set() for _ in self.space.primes]
        proj = [{t[i] for t in self.members} for i in range(len(self.space.primes))]
        if prod(len(s) for s in proj) != len(self.members):
            return None
        return proj

    def is_product(self) -> bool:
        return self.factors() is not None


def empty(space: TauSpace) -> TauClassSet:
    return TauClassSet(space, frozenset())


def full(space: TauSpace) -> TauClassSet:
    return TauClassSet(space, frozenset(space.classes()))


def union_S(space: TauSpace, parts: Iterable[TauClassSet]) -> TauClassSet:
    out = empty(space)
    for part in parts:
        out = out.union(part)
    return out


def _part_isomorphic(F: FiniteQuadraticForm, G: FiniteQuadraticForm, l: int) -> bool:
    return find_isometry(F.primary_part(l), G.primary_part(l)) is not None


def compute_S(target: FiniteQuadraticForm, lattice_form: FiniteQuadraticForm,
              space: TauSpace) -> TauClassSet:
    """Classes ``sigma`` with ``p * lattice_form ~= target`` for the primes ``p`` of class ``sigma``.

    ``target`` is ``(D_L, -q_L)`` of an overlattice and ``lattice_form`` the
    discriminant form of a rank-2 lattice with the same group order.
    """
    if (lattice_form.order != target.order
            or lattice_form.invariant_factors() != target.invariant_factors()):
        return empty(space)
    reps = representative_primes(space)
    verdict: dict[tuple[int, int], bool] = {}
    members = set()
    for cls, p in reps.items():
        ok = True
        scaled = None
        for i, l in enumerate(space.primes):
            if target.order % l:
                continue
            key = (i, cls[i])
            if key not in verdict:
                scaled = scaled or lattice_form.scale(p)
                verdict[key] = _part_isomorphic(scaled, target, l)
            if not verdict[key]:
                ok = False
                break
        if ok:
            members.add(cls)
    out = TauClassSet(space, frozenset(members))
    # primes of disc(R) not dividing the group order impose no condition
    facs = out.factors()
    assert facs is not None
    for i, l in enumerate(space.primes):
        if target.order % l and out.members:
            assert facs[i] == set(tau_components(l))
    return out


def compute_S_direct(target: FiniteQuadraticForm, lattice_form: FiniteQuadraticForm,
                     space: TauSpace) -> TauClassSet:
    """Same as :func:`compute_S`, testing whole forms class by class (slow reference)."""
    if lattice_form.order != target.order:
        return empty(space)
    members = {cls for cls, p in representative_primes(space).items()
               if find_isometry(lattice_form.scale(p), target) is not None}
    return TauClassSet(space, frozenset(members))


def sigma_R(S: TauClassSet) -> tuple[int, list[int]]:
    """``(b_R, Sigma_R)``: the modulus and the unit residues whose class lies in ``S``."""
    b = S.space.modulus
    if b == 1:
        return 1, ([0] if S.members else [])
    units = [u for u in range(1, b) if gcd(u, b) == 1]
    return b, [u for u in units if tau_of(u, S.space.primes) in S.members]


def is_ss_prime(p: int, sigma: Sequence[int], b: int) -> bool:
    return (p % b) in set(sigma)


def ss_primes_up_to(sigma: Sequence[int], b: int, n: int, disc: int) -> list[int]:
    """Odd primes ``p <= n`` coprime to ``disc`` with ``p mod b`` in ``sigma``."""
    allowed = set(sigma)
    return [p for p in primes_up_to(n) if p != 2 and disc % p and (p % b) in allowed]
