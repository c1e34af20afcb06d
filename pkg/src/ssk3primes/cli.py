"""Command line interface.

Exit codes: 0 success, 1 usage error, 2 internal error, 3 batch finished
with truncated searches.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import pipeline
from .dynkin import enumerate_types, parse

EXIT_OK, EXIT_USAGE, EXIT_INTERNAL, EXIT_TRUNCATED = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _options(args, primes_up_to=None) -> pipeline.Options:
    return pipeline.Options(budget=args.budget, timeout=args.timeout, primes_up_to=primes_up_to,
                            any_rank=args.any_rank)


def _add_budget(p: argparse.ArgumentParser) -> None:
    p.add_argument("--budget", type=int, default=pipeline.overlat.DEFAULT_BUDGET, help="search node cap")
    p.add_argument("--timeout", type=float, default=pipeline.overlat.DEFAULT_TIMEOUT, help="seconds per type")
    p.add_argument("--any-rank", action="store_true", help="allow types of rank other than 20")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="ssk3primes", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", help="analyse one Dynkin type")
    p.add_argument("type")
    p.add_argument("--primes-up-to", type=int, metavar="N")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json")
    fmt.add_argument("--text", dest="fmt", action="store_const", const="text")
    _add_budget(p)

    p = sub.add_parser("batch", help="analyse every type of a rank")
    p.add_argument("--rank", type=int, default=20)
    p.add_argument("--out", metavar="FILE.jsonl")
    p.add_argument("--csv", metavar="FILE.csv")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--cache", metavar="DIR", help="cache directory for per-type reports")
    _add_budget(p)

    p = sub.add_parser("list-types", help="list Dynkin types of a rank")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--count-only", action="store_true")

    p = sub.add_parser("primes", help="list supersingular primes of a type")
    p.add_argument("type")
    p.add_argument("--max", type=int, required=True, metavar="N")
    _add_budget(p)
    return ap


def _parse_type(text: str):
    try:
        return parse(text)
    except ValueError as exc:
        raise _UsageError(str(exc)) from exc


class _UsageError(Exception):
    pass


def _run(args) -> int:
    if args.cmd == "list-types":
        if args.rank < 1:
            raise _UsageError("rank must be positive")
        types = enumerate_types(args.rank)
        if args.count_only:
            print(len(types))
        else:
            for R in types:
                print(R)
        return EXIT_OK

    if args.cmd in ("analyze", "primes"):
        R = _parse_type(args.type)
        if R.rank != 20 and not args.any_rank:
            raise _UsageError(f"{R} has rank {R.rank}; use --any-rank for ranks other than 20")
        n = args.primes_up_to if args.cmd == "analyze" else args.max
        rep = pipeline.analyze(R, _options(args, n))
        if args.cmd == "primes":
            note = "  # lower bound: search truncated" if rep.lower_bound else ""
            print(" ".join(map(str, rep.primes)) + note)
        elif args.fmt == "json":
            print(json.dumps(rep.to_json(), sort_keys=True))
        else:
            print(rep.text())
        return EXIT_OK

    # batch
    if args.rank < 1 or args.jobs < 1:
        raise _UsageError("rank and jobs must be positive")
    opts = _options(args)
    reports, summary = pipeline.batch(args.rank, opts, jobs=args.jobs, cache_dir=args.cache)
    if args.out:
        pipeline.write_jsonl(reports, args.out)
    if args.csv:
        pipeline.write_csv(reports, args.csv)
    print(json.dumps(summary, sort_keys=True))
    return EXIT_TRUNCATED if summary["truncated"] else EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return _run(args)
    except _UsageError as exc:
        print(f"ssk3primes: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:
        logging.getLogger(__name__).debug("internal error", exc_info=True)
        print(f"ssk3primes: internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL
