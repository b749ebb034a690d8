"""Command-line front end: ``quaddyn poly-search | rat-search | verify``.

Exit codes: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import math
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import __version__, kernels
from .arith import DomainError
from .records import RunManifest, csv_text, parse, rational_to_str, serialize, to_row, verify_row

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
WORKERS_ENV = "QUADDYN_WORKERS"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_height_bound(text: str) -> float:
    """A natural-log height bound: a number, 'logN' or 'log(N)'."""
    s = text.strip().replace(" ", "")
    m = re.fullmatch(r"log\(?([0-9]+(?:\.[0-9]*)?)\)?", s)
    try:
        val = math.log(float(m.group(1))) if m else float(s)
    except (ValueError, OverflowError):
        raise argparse.ArgumentTypeError(f"bad height bound {text!r}") from None
    if not val > 0:
        raise argparse.ArgumentTypeError("height bound must be positive")
    return val


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from None
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def worker_count(flag: int | None) -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"{WORKERS_ENV} must be an integer") from None
    return flag or 1


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="quaddyn", description="Searches for small canonical heights of quadratic maps.")
    p.add_argument("--version", action="version", version=f"quaddyn {__version__} ({kernels.BACKEND} kernels)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--out", help="JSON-lines output file (default: standard output)")
        sp.add_argument("--csv", help="also write a CSV table to this file")
        sp.add_argument("--resume", action="store_true", help="skip partitions completed by an earlier run")
        sp.add_argument("--workers", type=_positive_int, default=None,
                        help=f"worker processes (env {WORKERS_ENV} overrides)")

    ps = sub.add_parser("poly-search", help="search pairs (x, c) for z^2 + c")
    ps.add_argument("--n-max", type=_positive_int, required=True, help="largest denominator of x")
    ps.add_argument("--N-max", dest="N_max", type=_positive_int, default=10, help="c >= -N_max")
    ps.add_argument("--ratio", type=_positive_float, default=0.02, help="height ratio threshold")
    ps.add_argument("--n-min", type=_positive_int, default=1)
    common(ps)

    rs = sub.add_parser("rat-search", help="search triples (x3, x4, x5) of bounded height")
    rs.add_argument("--height-bound", type=parse_height_bound, required=True,
                    help="natural-log bound B on each coordinate, e.g. 'log20' or 2.9957")
    rs.add_argument("--ratio", type=_positive_float, default=0.002, help="height ratio threshold")
    common(rs)

    vs = sub.add_parser("verify", help="run a verification suite")
    from .verify import TARGETS

    vs.add_argument("targets", nargs="+", choices=sorted(TARGETS), metavar="TARGET",
                    help="one or more of: " + ", ".join(sorted(TARGETS)))
    vs.add_argument("--out", help="also write result rows as JSON lines")
    return p


# --- partition workers (top-level so they pickle) ---------------------------


def _poly_partition(args):
    from .poly_search import PolySearchConfig, search_denominator

    cfg_dict, n = args
    recs, _ = search_denominator(PolySearchConfig(**cfg_dict), int(n))
    return str(n), [to_row(r) for r in recs]


def _rat_partition(args):
    from .rat_search import RatSearchConfig, rationals_up_to, search_x3

    cfg_dict, x3 = args
    cfg = RatSearchConfig(**cfg_dict)
    recs, _ = search_x3(cfg, Fraction(x3), rationals_up_to(cfg.max_height))
    return x3, [to_row(r) for r in recs]


def _run_partitioned(command, cfg_dict, keys, worker, sort_key, opts, out_stream) -> int:
    workers = worker_count(opts.workers)
    if opts.out:
        manifest = RunManifest.open(opts.out, command, cfg_dict, keys, __version__, opts.resume)
        pending = manifest.pending()
    else:
        if opts.resume:
            raise UsageError("--resume needs --out")
        manifest, pending = None, keys
    results: dict[str, list] = {}
    jobs = [(cfg_dict, k) for k in pending]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            it = pool.map(worker, jobs)
            for key, rows in it:
                _store(manifest, results, key, rows)
    else:
        for job in jobs:
            key, rows = worker(job)
            _store(manifest, results, key, rows)
    rows = []
    for k in keys:
        rows.extend(results[k] if k in results else manifest.partition_rows(k))
    rows.sort(key=sort_key)
    text = "".join(serialize(r) + "\n" for r in rows)
    if opts.out:
        with open(opts.out, "w") as fh:
            fh.write(text)
        counts = {}
        for r in rows:
            counts[r["kind"]] = counts.get(r["kind"], 0) + 1
        manifest.finish(counts)
    else:
        out_stream.write(text)
    if opts.csv:
        with open(opts.csv, "w") as fh:
            fh.write(csv_text(parse(r) for r in rows))
    return EXIT_OK


def _store(manifest, results, key, rows):
    results[key] = rows
    if manifest is not None:
        manifest.complete_partition(key, rows)


def cmd_poly_search(opts, out_stream) -> int:
    if opts.n_min > opts.n_max:
        raise UsageError("--n-min exceeds --n-max")
    cfg = {"n_max": opts.n_max, "N_max": opts.N_max, "ratio_threshold": opts.ratio, "n_min": opts.n_min}
    keys = [str(n) for n in range(opts.n_min, opts.n_max + 1)]

    def sort_key(r):
        return (r["n"], r["m"], r["k"], Fraction(r["x"]))

    return _run_partitioned("poly-search", cfg, keys, _poly_partition, sort_key, opts, out_stream)


def cmd_rat_search(opts, out_stream) -> int:
    from .rat_search import RatSearchConfig, TripleParam, rationals_up_to

    cfg = {"height_bound": opts.height_bound, "ratio_threshold": opts.ratio}
    H = RatSearchConfig(**cfg).max_height
    keys = [rational_to_str(v) for v in rationals_up_to(H)]

    def sort_key(r):
        return TripleParam(*(Fraction(v) for v in r["triple"])).sort_key()

    return _run_partitioned("rat-search", cfg, keys, _rat_partition, sort_key, opts, out_stream)


def cmd_verify(opts, out_stream) -> int:
    from .verify import run

    failed = 0
    rows = []
    for target in opts.targets:
        for check, passed, detail in run(target):
            failed += not passed
            out_stream.write(f"{'PASS' if passed else 'FAIL'}  {target}: {check}  [{detail}]\n")
            rows.append(verify_row(target, check, passed, detail))
    out_stream.write(f"{len(rows) - failed}/{len(rows)} checks passed\n")
    if opts.out:
        with open(opts.out, "w") as fh:
            fh.writelines(serialize(r) + "\n" for r in rows)
    return EXIT_FAIL if failed else EXIT_OK


COMMANDS = {"poly-search": cmd_poly_search, "rat-search": cmd_rat_search, "verify": cmd_verify}


def main(argv=None, out_stream=None) -> int:
    out_stream = out_stream or sys.stdout
    try:
        opts = build_parser().parse_args(argv)
        return COMMANDS[opts.command](opts, out_stream)
    except UsageError as exc:
        sys.stderr.write(f"quaddyn: usage error: {exc}\n")
        return EXIT_USAGE
    except DomainError as exc:
        sys.stderr.write(f"quaddyn: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
