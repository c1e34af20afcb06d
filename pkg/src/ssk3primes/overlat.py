"""Even overlattices of ``L(R)`` that keep the root system and have a short
discriminant group.

Overlattices correspond to isotropic subgroups ``H`` of the discriminant
form of ``L(R)``; the overlattice has no new roots iff no nonzero ``h`` in
``H`` has glue norm 2.  Subgroups are searched depth first, one cyclic
extension at a time.  Orbits under the isometries of ``L(R)`` that act on
the glue group (sign changes, diagram symmetries, permutations of equal
components) are collapsed with canonical labelling of a coloured graph.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from math import isqrt

import numpy as np
import pynauty
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .dynkin import Component, DynkinType
from .fqf import Element, FiniteQuadraticForm, Subgroup, find_isometry

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10_000_000
DEFAULT_TIMEOUT = 60.0


@dataclass
class AdmissibleQuotient:
    H_generators: list[Element]
    H_order: int
    form: FiniteQuadraticForm
    d: int
    neg_form: FiniteQuadraticForm = field(init=False)

    def __post_init__(self):
        self.neg_form = -self.form


@dataclass
class SearchResult:
    quotients: list[AdmissibleQuotient]
    complete: bool
    nodes: int
    subgroups: int  # admissible subgroup orbits seen before deduplication

    @property
    def status(self) -> str:
        return "complete" if self.complete else "truncated"


def _is_square(n: int) -> bool:
    return isqrt(n) ** 2 == n


def root_preserving(R: DynkinType, H: Subgroup) -> bool:
    """True iff the overlattice of ``H`` has the same roots as ``L(R)``."""
    return all(R.glue_min_norm(h) != 2 for h in H.elements() if any(h))


def p_ranks(R: DynkinType) -> dict[int, int]:
    F = R.disc_form()
    return {p: F.p_rank(p) for p in F.primes()}


def quotient_order_bound(R: DynkinType) -> int:
    """Smallest possible ``|H|`` for which ``H^perp/H`` can have length <= 2."""
    out = 1
    for p, r in p_ranks(R).items():
        if r > 2:
            out *= p ** ((r - 1) // 2)  # ceil((r - 2) / 2)
    return out


class _Gadget:
    """Per-component value vertices, colours and residue encodings."""

    def __init__(self, comp: Component):
        self.comp = comp
        mods = comp.moduli
        self.size = int(np.prod(mods)) if mods else 1
        f, n = comp.family, comp.n
        if f == "D" and n % 2 == 0:
            # local index 2*s + c; classes: 0 | {s, c} | v, or 0 | {s, c, v} for D4
            self.colour = [0, 1, 1, 1 if n == 4 else 2]
            self.cycle = False
        else:
            m = self.size
            self.colour = [min(r, m - r) for r in range(m)]
            self.cycle = m >= 3

    def residues(self, local: int) -> tuple[int, ...]:
        if len(self.comp.moduli) == 2:
            return (local // 2, local % 2)
        return (local,)


class GlueSearch:
    """Element tables for the discriminant group of ``L(R)``."""

    def __init__(self, R: DynkinType):
        self.R = R
        self.form = R.disc_form()
        self.mods = np.array(R.moduli, dtype=np.int64)
        k = len(self.mods)
        self.k = k
        self.N = int(np.prod(self.mods)) if k else 1
        self.strides = np.ones(k, dtype=np.int64)
        for i in range(k - 2, -1, -1):
            self.strides[i] = self.strides[i + 1] * self.mods[i + 1]
        idx = np.arange(self.N, dtype=np.int64)
        self.elems = ((idx[:, None] // self.strides[None, :]) % self.mods[None, :]).astype(np.int8)

        self.e = self.form.exponent
        self.qi = np.array(self.form._qi, dtype=np.int64).reshape(k, k)
        qn = np.zeros(self.N, dtype=np.int64)
        norm = np.zeros(self.N, dtype=np.int64)
        self.glue_comps = [(c, sl) for c, sl in zip(R.components, R.slices) if c.moduli]
        self.gadgets = [_Gadget(c) for c, _ in self.glue_comps]
        self.local = np.zeros((self.N, len(self.glue_comps)), dtype=np.int8)
        self.contrib = []
        for t, ((c, sl), gad) in enumerate(zip(self.glue_comps, self.gadgets)):
            cols = self.elems[:, sl].astype(np.int64)
            loc = cols[:, 0] if cols.shape[1] == 1 else 2 * cols[:, 0] + cols[:, 1]
            self.local[:, t] = loc
            qtab = np.array([self.form.qn(self._embed(sl, gad.residues(r))) for r in range(gad.size)])
            ntab = np.array([int(c.glue_min_norm(gad.residues(r)) * self.e) for r in range(gad.size)])
            qn += qtab[loc]
            norm += ntab[loc]
            self.contrib.append(np.array([sum(int(v) * int(self.strides[sl.start + j])
                                              for j, v in enumerate(gad.residues(r)))
                                          for r in range(gad.size)], dtype=np.int64))
        self.qn = qn % (2 * self.e)
        self.norm = norm
        self.root_ok = norm != 2 * self.e
        self.candidates = np.nonzero((self.qn == 0) & self.root_ok & (idx != 0))[0]
        self._static_graph()

    def _embed(self, sl: slice, res: tuple[int, ...]) -> Element:
        x = [0] * self.k
        for j, v in enumerate(res):
            x[sl.start + j] = v
        return tuple(x)

    def index(self, x) -> int:
        return int(np.dot(np.asarray(x, dtype=np.int64) % self.mods, self.strides))

    def element(self, i: int) -> Element:
        return tuple(int(v) for v in self.elems[i])

    # -- coloured graph ---------------------------------------------------

    def _static_graph(self) -> None:
        adj: dict[int, list[int]] = {}
        colour_classes: dict[tuple, set[int]] = {}
        v = 0
        self.comp_vertex = []
        self.value_vertex = []
        for (c, _), gad in zip(self.glue_comps, self.gadgets):
            cv = v
            v += 1
            self.comp_vertex.append(cv)
            colour_classes.setdefault(("comp", str(c)), set()).add(cv)
            vals = list(range(v, v + gad.size))
            v += gad.size
            self.value_vertex.append(vals)
            adj[cv] = list(vals)
            for r, vv in enumerate(vals):
                colour_classes.setdefault(("val", str(c), gad.colour[r]), set()).add(vv)
                if gad.cycle:
                    adj.setdefault(vv, []).append(vals[(r + 1) % gad.size])
        self.n_static = v
        self.static_adj = adj
        self.static_colours = [colour_classes[key] for key in sorted(colour_classes)]
        self.vertex_owner = {}
        for t, vals in enumerate(self.value_vertex):
            for r, vv in enumerate(vals):
                self.vertex_owner[vv] = (t, r)
        self.value_base = np.array([vals[0] for vals in self.value_vertex], dtype=np.int64)

    def graph(self, H: np.ndarray) -> pynauty.Graph:
        n0 = self.n_static
        adj = {key: list(vals) for key, vals in self.static_adj.items()}
        if len(self.glue_comps):
            vv = self.local[H] + self.value_base[None, :]
            for j, row in enumerate(vv.tolist()):
                adj[n0 + j] = row
        colours = self.static_colours + [set(range(n0, n0 + len(H)))]
        return pynauty.Graph(n0 + len(H), directed=False, adjacency_dict=adj, vertex_coloring=colours)

    def certificate(self, H: np.ndarray) -> tuple[int, bytes]:
        return len(H), pynauty.certificate(self.graph(H))

    def stabiliser(self, H: np.ndarray) -> list[tuple[list[int], list[np.ndarray]]]:
        """Generators of the stabiliser of ``H``, as (component images, residue tables)."""
        gens, *_ = pynauty.autgrp(self.graph(H))
        out = []
        for perm in gens:
            images, tables = [], []
            for vals in self.value_vertex:
                # colours keep value vertices on value vertices of an equal component
                images.append(self.vertex_owner[perm[vals[0]]][0])
                tables.append(np.array([self.vertex_owner[perm[vv]][1] for vv in vals], dtype=np.int64))
            if any(images[t] != t for t in range(len(images))) or any(
                    (tab != np.arange(len(tab))).any() for tab in tables):
                out.append((images, tables))
        return out

    def apply(self, g: tuple[list[int], list[np.ndarray]], idx: np.ndarray) -> np.ndarray:
        images, tables = g
        loc = self.local[idx]
        out = np.zeros(idx.shape, dtype=np.int64)
        for t, (img, tab) in enumerate(zip(images, tables)):
            out += self.contrib[img][tab[loc[..., t]]]
        return out

    # -- group arithmetic on index arrays ---------------------------------

    def add(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        s = (self.elems[a].astype(np.int64) + self.elems[b].astype(np.int64)) % self.mods
        return s @ self.strides

    def mul(self, n: int, a: np.ndarray) -> np.ndarray:
        return ((n * self.elems[a].astype(np.int64)) % self.mods) @ self.strides

    def orthogonal(self, cands: np.ndarray, x: int) -> np.ndarray:
        g = self.elems[x].astype(np.int64)
        v = (self.elems[cands].astype(np.int64) @ (self.qi @ g)) % self.e
        return cands[v == 0]

    def order_of(self, idx: np.ndarray) -> np.ndarray:
        x = self.elems[idx].astype(np.int64)
        per = self.mods[None, :] // np.gcd(x, self.mods[None, :])
        return np.lcm.reduce(per, axis=1)

    def p_rank(self, H: np.ndarray, p: int) -> int:
        tors = ((p * self.elems[H].astype(np.int64)) % self.mods == 0).all(axis=1).sum()
        r = 0
        while p ** r < tors:
            r += 1
        return r


def _orbit_representatives(gs: GlueSearch, cands: np.ndarray, stab) -> np.ndarray:
    """One element of ``cands`` per orbit of the stabiliser (``cands`` is stable)."""
    if not stab or len(cands) < 2:
        return cands
    pos = np.full(gs.N, -1, dtype=np.int64)
    pos[cands] = np.arange(len(cands))
    rows, cols = [], []
    for g in stab:
        img = pos[gs.apply(g, cands)]
        assert (img >= 0).all(), "candidate set not stable under the stabiliser"
        rows.append(np.arange(len(cands)))
        cols.append(img)
    m = len(cands)
    graph = coo_matrix((np.ones(m * len(stab), dtype=np.int8), (np.concatenate(rows), np.concatenate(cols))),
                       shape=(m, m))
    _, labels = connected_components(graph, directed=True, connection="weak")
    _, first = np.unique(labels, return_index=True)
    return cands[np.sort(first)]


def _children(gs: GlueSearch, H: np.ndarray, xs: np.ndarray):
    """Valid one-step extensions ``<H, x>`` for ``x`` in ``xs``: yields (x, sorted elements)."""
    if len(xs) == 0:
        return []
    orders = gs.order_of(xs)
    o_max = int(orders.max())
    mults = [np.zeros(len(xs), dtype=np.int64)]
    for kk in range(1, o_max):
        mults.append(gs.mul(kk, xs))
    valid = np.ones(len(xs), dtype=bool)
    for kk in range(1, o_max):
        live = np.nonzero(valid & (kk < orders))[0]
        if len(live) == 0:
            break
        sums = gs.add(mults[kk][live][:, None], H[None, :])
        valid[live] &= gs.root_ok[sums].all(axis=1)
    out = []
    for i in np.nonzero(valid)[0]:
        o = int(orders[i])
        parts = [gs.add(np.full(len(H), mults[kk][i]), H) for kk in range(o)]
        out.append((int(xs[i]), np.unique(np.concatenate(parts))))
    return out


def enumerate_admissible(R: DynkinType, budget: int = DEFAULT_BUDGET, timeout: float | None = DEFAULT_TIMEOUT,
                         allow_square_disc: bool = False, dedupe: bool = True,
                         max_length: int = 2) -> SearchResult:
    """Isotropic, root-preserving subgroups with quotient length <= 2, up to symmetry.

    Returns the distinct isomorphism classes of the negated quotient forms
    (one representative subgroup each).  ``budget`` caps the number of
    expanded search nodes; ``timeout`` is in seconds.
    """
    if _is_square(R.disc) and not allow_square_disc:
        raise ValueError("disc(R) is a perfect square; caller must early-exit")
    start = time.monotonic()
    gs = GlueSearch(R)
    F = gs.form
    ranks = {p: F.p_rank(p) for p in F.primes()}

    root = np.zeros(1, dtype=np.int64)
    seen = {gs.certificate(root)}
    stack = [(root, [], gs.candidates)]
    found: list[AdmissibleQuotient] = []
    nodes = 0
    complete = True
    while stack:
        if nodes >= budget or (timeout is not None and time.monotonic() - start > timeout):
            complete = False
            break
        H, gens, cands = stack.pop()
        nodes += 1

        if all(r - 2 * gs.p_rank(H, p) <= max_length for p, r in ranks.items()):
            gen_elems = [gs.element(x) for x in gens]
            sub = F.subgroup(gen_elems)
            Q = F.quotient_form(sub)
            if Q.length() <= max_length:
                found.append(AdmissibleQuotient(gen_elems, sub.order, Q, Q.order))

        if len(cands) == 0:
            continue
        stab = gs.stabiliser(H)
        xs = _orbit_representatives(gs, cands, stab)
        seen_kids = set()
        for x, elems in _children(gs, H, xs):
            key = elems.tobytes()
            if key in seen_kids:
                continue
            seen_kids.add(key)
            cert = gs.certificate(elems)
            if cert in seen:
                continue
            seen.add(cert)
            sub_cands = gs.orthogonal(cands, x)
            sub_cands = sub_cands[~np.isin(sub_cands, elems)]
            stack.append((elems, gens + [x], sub_cands))

    subgroups = len(found)
    if dedupe:
        found = dedupe_quotients(found)
    log.debug("%s: %d nodes, %d admissible orbits, %d classes, complete=%s",
              R, nodes, subgroups, len(found), complete)
    return SearchResult(found, complete, nodes, subgroups)


def dedupe_quotients(quots: list[AdmissibleQuotient]) -> list[AdmissibleQuotient]:
    """Keep one quotient per isomorphism class of ``(D, -q)``."""
    out: list[AdmissibleQuotient] = []
    for aq in quots:
        if not any(o.d == aq.d and find_isometry(o.neg_form, aq.neg_form) is not None for o in out):
            out.append(aq)
    return out
