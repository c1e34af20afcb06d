"""End-to-end analysis of a Dynkin type and of whole catalogues.

Per type: perfect-square discriminant exits early with an empty answer;
otherwise admissible overlattice quotients are enumerated, every quotient
of order ``d`` is matched against the rank-2 even lattices of determinant
``-d``, and the resulting residue-class sets are united into ``S(R)``.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import os
import tempfile
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from multiprocessing import Pool
from pathlib import Path
from typing import Iterable

from . import binlat, overlat
from .dynkin import DynkinType, enumerate_types, parse
from .fqf import FiniteQuadraticForm
from .primeclass import (TauClassSet, TauSpace, compute_S, empty, sigma_R, ss_primes_up_to,
                         union_S)

log = logging.getLogger(__name__)

ALGORITHM_VERSION = "1"
STATUS_COMPLETE = "complete"
STATUS_TRUNCATED = "truncated"
STATUS_SQUARE = "square-disc-empty"
STATUS_ERROR = "error"


@dataclass(frozen=True)
class Options:
    budget: int = overlat.DEFAULT_BUDGET
    timeout: float | None = overlat.DEFAULT_TIMEOUT
    primes_up_to: int | None = None
    any_rank: bool = False


@dataclass
class Match:
    lattice: binlat.BinaryEvenLattice
    S: TauClassSet


@dataclass
class QuotientRecord:
    H_generators: list[tuple[int, ...]]
    d: int
    neg_form: FiniteQuadraticForm
    matches: list[Match]


@dataclass
class TypeReport:
    type: str
    rank: int
    disc: int
    square_disc: bool
    status: str
    space: TauSpace
    quotients: list[QuotientRecord] = field(default_factory=list)
    S_R: TauClassSet | None = None
    primes: list[int] | None = None
    error: str | None = None

    @property
    def b_R(self) -> int:
        return self.space.modulus

    @property
    def sigma(self) -> list[int]:
        if self.S_R is None or not self.S_R.members:
            return []
        return sigma_R(self.S_R)[1]

    @property
    def density(self) -> Fraction:
        return self.S_R.density() if self.S_R is not None else Fraction(0)

    @property
    def lower_bound(self) -> bool:
        """True when ``S_R`` may be incomplete (search truncated)."""
        return self.status == STATUS_TRUNCATED

    def to_json(self) -> dict:
        out = {
            "type": self.type,
            "rank": self.rank,
            "disc": self.disc,
            "square_disc": self.square_disc,
            "status": self.status,
            "tau_primes": list(self.space.primes),
            "quotients": [{
                "H_generators": [list(g) for g in q.H_generators],
                "d": q.d,
                "neg_q": form_to_json(q.neg_form),
                "matches": [{"gram": m.lattice.gram, "S": [list(t) for t in m.S]} for m in q.matches],
            } for q in self.quotients],
            "S_R": [list(t) for t in self.S_R] if self.S_R is not None else [],
            "S_R_is_product": self.S_R.is_product() if self.S_R is not None else True,
            "b_R": self.b_R,
            "Sigma_R": self.sigma,
            "density": f"{self.density.numerator}/{self.density.denominator}",
        }
        if self.primes is not None:
            out["primes"] = self.primes
        if self.error is not None:
            out["error"] = self.error
        return out

    @classmethod
    def from_json(cls, obj: dict) -> TypeReport:
        space = TauSpace(tuple(obj["tau_primes"]))
        quots = []
        for q in obj["quotients"]:
            matches = [Match(binlat.BinaryEvenLattice.from_gram(m["gram"]),
                             TauClassSet(space, frozenset(tuple(t) for t in m["S"])))
                       for m in q["matches"]]
            quots.append(QuotientRecord([tuple(g) for g in q["H_generators"]], q["d"],
                                        form_from_json(q["neg_q"]), matches))
        return cls(obj["type"], obj["rank"], obj["disc"], obj["square_disc"], obj["status"], space, quots,
                   TauClassSet(space, frozenset(tuple(t) for t in obj["S_R"])),
                   obj.get("primes"), obj.get("error"))

    def csv_row(self) -> list:
        return [self.type, self.disc, self.status, self.b_R, ";".join(map(str, self.sigma)),
                f"{self.density.numerator}/{self.density.denominator}"]

    def text(self) -> str:
        lines = [f"type      {self.type}", f"rank      {self.rank}", f"disc      {self.disc}",
                 f"status    {self.status}"]
        for q in self.quotients:
            lines.append(f"quotient  d={q.d}  H=<{', '.join(map(str, q.H_generators))}>")
            for m in q.matches:
                lines.append(f"  T'={m.lattice}  S={sorted(m.S.members)}")
        lines.append(f"b_R       {self.b_R}")
        lines.append(f"Sigma_R   {self.sigma}" + ("  (lower bound)" if self.lower_bound else ""))
        lines.append(f"density   {self.density}")
        if self.primes is not None:
            lines.append(f"primes    {self.primes}")
        return "\n".join(lines)


def form_to_json(F: FiniteQuadraticForm) -> dict:
    return {"orders": list(F.orders), "q": [[str(x) for x in row] for row in F.qmat]}


def form_from_json(obj: dict) -> FiniteQuadraticForm:
    return FiniteQuadraticForm(obj["orders"], [[Fraction(x) for x in row] for row in obj["q"]])


def _is_square(n: int) -> bool:
    return isqrt(n) ** 2 == n


def analyze(R: DynkinType | str, options: Options = Options()) -> TypeReport:
    if isinstance(R, str):
        R = parse(R)
    if R.rank != 20 and not options.any_rank:
        raise ValueError(f"rank {R.rank} != 20 (pass any_rank to override)")
    space = TauSpace.for_disc(R.disc)
    base = dict(type=str(R), rank=R.rank, disc=R.disc, space=space)
    if _is_square(R.disc):
        return TypeReport(square_disc=True, status=STATUS_SQUARE, S_R=empty(space),
                          primes=[] if options.primes_up_to is not None else None, **base)

    search = overlat.enumerate_admissible(R, budget=options.budget, timeout=options.timeout)
    records = []
    for aq in search.quotients:
        matches = []
        for T in binlat.enumerate_classes(aq.d):
            TF = T.disc_form()
            if TF.invariant_factors() != aq.neg_form.invariant_factors():
                continue
            matches.append(Match(T, compute_S(aq.neg_form, TF, space)))
        records.append(QuotientRecord(aq.H_generators, aq.d, aq.neg_form, matches))
    S = union_S(space, (m.S for q in records for m in q.matches))
    primes = None
    if options.primes_up_to is not None:
        b, sig = sigma_R(S) if S.members else (space.modulus, [])
        primes = ss_primes_up_to(sig, b, options.primes_up_to, R.disc)
    status = STATUS_COMPLETE if search.complete else STATUS_TRUNCATED
    return TypeReport(square_disc=False, status=status, quotients=records, S_R=S, primes=primes, **base)


# -- caching ----------------------------------------------------------------

class ReportCache:
    """One JSON file per (type, algorithm version, budget); writes are atomic."""

    def __init__(self, root: str | os.PathLike):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, R: str, options: Options) -> Path:
        key = json.dumps([R, ALGORITHM_VERSION, options.budget, options.timeout, options.primes_up_to])
        return self.root / (hashlib.sha256(key.encode()).hexdigest()[:32] + ".json")

    def get(self, R: str, options: Options) -> dict | None:
        p = self._path(R, options)
        try:
            return json.loads(p.read_text())
        except FileNotFoundError:
            return None

    def put(self, R: str, options: Options, obj: dict) -> None:
        p = self._path(R, options)
        fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            json.dump(obj, fh, sort_keys=True)
        os.replace(tmp, p)


def _run_one(args: tuple[str, Options, str | None]) -> dict:
    t, options, cache_dir = args
    cache = ReportCache(cache_dir) if cache_dir else None
    if cache is not None:
        hit = cache.get(t, options)
        if hit is not None:
            return hit
    try:
        obj = analyze(t, options).to_json()
    except Exception as exc:  # recorded per type, batch carries on
        log.exception("analysis of %s failed", t)
        R = parse(t)
        obj = TypeReport(t, R.rank, R.disc, _is_square(R.disc), STATUS_ERROR, TauSpace.for_disc(R.disc),
                         S_R=None, error=repr(exc)).to_json()
        return obj
    if cache is not None:
        cache.put(t, options, obj)
    return obj


def summarize(reports: Iterable[TypeReport]) -> dict:
    reports = list(reports)
    done = [r for r in reports if r.status in (STATUS_COMPLETE, STATUS_SQUARE)]
    dens = Counter(str(r.density) for r in reports if r.status == STATUS_COMPLETE)
    return {
        "total": len(reports),
        "non_square": sum(not r.square_disc for r in reports),
        "completed": len(done),
        "nonempty": sum(bool(r.S_R and r.S_R.members) for r in done),
        "non_product": sum(bool(r.S_R and r.S_R.members) and not r.S_R.is_product() for r in done),
        "truncated": sum(r.status == STATUS_TRUNCATED for r in reports),
        "errors": sum(r.status == STATUS_ERROR for r in reports),
        "densities": dict(sorted(dens.items())),
    }


def batch(rank: int = 20, options: Options = Options(), jobs: int = 1,
          cache_dir: str | os.PathLike | None = None,
          types: Iterable[DynkinType] | None = None) -> tuple[list[TypeReport], dict]:
    """Analyse every type of the given rank (or the given types), in catalogue order."""
    if types is None:
        types = enumerate_types(rank)
    if rank != 20:
        options = Options(options.budget, options.timeout, options.primes_up_to, any_rank=True)
    work = [(str(R), options, str(cache_dir) if cache_dir else None) for R in types]
    if jobs > 1:
        with Pool(jobs) as pool:
            objs = pool.map(_run_one, work, chunksize=4)
    else:
        objs = [_run_one(w) for w in work]
    reports = [TypeReport.from_json(o) for o in objs]
    return reports, summarize(reports)


def write_jsonl(reports: Iterable[TypeReport], path: str | os.PathLike) -> None:
    with open(path, "w") as fh:
        for r in reports:
            fh.write(json.dumps(r.to_json(), sort_keys=True) + "\n")


def write_csv(reports: Iterable[TypeReport], path: str | os.PathLike) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["type", "disc", "status", "b_R", "Sigma_R", "density"])
        for r in reports:
            w.writerow(r.csv_row())
