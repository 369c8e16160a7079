"""Command-line front end: count, gen, census, modpoly, selftest.

Reports go to stdout, logs to stderr.  Exit codes: 0 success, 1 domain or
usage error, 2 validation failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import random
import sys
from dataclasses import dataclass

from . import census as census_mod
from .arith import DomainError
from .curve import ORACLE_CAP
from .modpoly import (DEFAULT_DB_DIR, ENV_DB_DIR, ModPolyDB, ModPolyError, _read_file,
                      validate_kronecker)

log = logging.getLogger("seacount")

EXIT_OK, EXIT_DOMAIN, EXIT_VALIDATION = 0, 1, 2


@dataclass(frozen=True)
class Config:
    db_path: str
    oracle_cap: int = ORACLE_CAP
    seed: int = 0
    json: bool = False
    jobs: int = 1

    def __post_init__(self):
        if self.oracle_cap < 1 << 10:
            raise DomainError("oracle cap must be at least 2^10")
        if self.jobs < 1:
            raise DomainError("job count must be at least 1")

    def db(self) -> ModPolyDB:
        return ModPolyDB(self.db_path)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _nus(text: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad --nu list {text!r}") from None
    if not vals or min(vals) < 1:
        raise argparse.ArgumentTypeError("--nu needs positive integers")
    return vals


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--json", action="store_true")
    common.add_argument("--db", default=None,
                        help=f"modular polynomial directory (default ${ENV_DB_DIR} or bundled)")
    common.add_argument("--cap", type=int, default=ORACLE_CAP, help="exhaustive-count cap")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = _Parser(prog="seacount", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("count", parents=[common], help="point count by Elkies primes")
    c.add_argument("--p", type=int, required=True)
    c.add_argument("--a", type=int, required=True)
    c.add_argument("--b", type=int, required=True)
    c.add_argument("--early-abort", action="store_true")

    g = sub.add_parser("gen", parents=[common], help="random curve of prime order")
    g.add_argument("--x", type=float, required=True)
    g.add_argument("--early-abort", action="store_true")

    s = sub.add_parser("census", parents=[common], help="Atkin/Elkies census over F_q")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--L", type=int, required=True)
    s.add_argument("--nu", type=_nus, default=(1, 2))
    s.add_argument("--out", default=None, help="CSV path, '-' for stdout")
    s.add_argument("--jobs", type=int, default=1)

    m = sub.add_parser("modpoly", parents=[common], help="inspect modular polynomial tables")
    m.add_argument("action", choices=("validate", "info"))
    m.add_argument("path", nargs="?", default=None)

    t = sub.add_parser("selftest", parents=[common], help="run the built-in invariant checks")
    t.add_argument("--quick", action="store_true")
    return parser


def _emit(obj: dict, as_json: bool, lines) -> None:
    if as_json:
        print(json.dumps({"schema_version": census_mod.SCHEMA_VERSION, **obj}, indent=2))
    else:
        for line in lines:
            print(line)


def cmd_count(args, cfg: Config) -> int:
    from .sea import SeaOptions, Status, sea_count

    opts = SeaOptions(early_abort=args.early_abort, db=cfg.db())
    res = sea_count(args.p, args.a, args.b, opts, random.Random(cfg.seed))
    lines = [f"status = {res.status.value}"]
    if res.status is Status.COUNTED:
        lines.insert(0, f"N = {res.N}")
        lines.append(f"trace = {res.trace}")
    _emit(res.as_dict(), cfg.json, lines)
    return EXIT_OK if res.status in (Status.COUNTED, Status.COMPOSITE_DETECTED,
                                     Status.ABORT_COMPOSITE_ORDER) else EXIT_DOMAIN


def cmd_gen(args, cfg: Config) -> int:
    from .curvegen import GenerationRefused, generate

    try:
        res = generate(args.x, random.Random(cfg.seed), early_abort=args.early_abort,
                       db=cfg.db())
    except GenerationRefused as exc:
        print(f"seacount: error: {exc}", file=sys.stderr)
        if cfg.json:
            _emit({"error": "refused", "max_x": exc.max_x}, True, [])
        return EXIT_DOMAIN
    c = res.counters
    _emit(res.as_dict(), cfg.json, [
        f"p = {res.p}", f"a = {res.a}", f"b = {res.b}", f"N = {res.N}",
        f"proposals = {c.proposals} (composite p {c.composite_p}, composite N "
        f"{c.composite_n}, singular {c.singular}, early aborts {c.early_aborts})",
    ])
    return EXIT_OK


def cmd_census(args, cfg: Config) -> int:
    report = census_mod.census_run(args.q, args.L, jobs=cfg.jobs)
    if args.out == "-":
        census_mod.write_csv(report, sys.stdout)
        if cfg.json:
            log.warning("--json ignored when the CSV goes to stdout")
        return EXIT_OK
    if args.out:
        with open(args.out, "w", newline="") as fh:
            census_mod.write_csv(report, fh)
        log.info("wrote %d rows to %s", report.classes, args.out)
    agg = census_mod.aggregates(report, args.nu)
    if cfg.json:
        print(json.dumps(agg, indent=2))
    else:
        print(f"q = {report.q}, L = {report.L}, window = {report.window}")
        print(f"classes = {report.classes}, pairs = {report.total_weight()}")
        print(f"mean N_e = {float(report.mean_elkies()):.4f} "
              f"(weighted {float(report.mean_elkies(weighted=True)):.4f}), "
              f"center {float(report.center)}")
        for nu in args.nu:
            print(f"moment nu={nu}: {float(census_mod.moment_statistic(report, nu)):.4f}")
    return EXIT_OK


def _modpoly_sources(path: str | None, cfg: Config) -> list[str]:
    path = path or cfg.db_path
    if os.path.isdir(path):
        names = [n for n in os.listdir(path) if n.startswith("phi_")]
        names.sort(key=lambda n: int("".join(ch for ch in n.split(".")[0] if ch.isdigit()) or 0))
        return [os.path.join(path, n) for n in names]
    if not os.path.exists(path):
        raise DomainError(f"{path} does not exist")
    return [path]


def cmd_modpoly(args, cfg: Config) -> int:
    rows, ok = [], True
    for src in _modpoly_sources(args.path, cfg):
        try:
            recs = _read_file(src)
        except ModPolyError as exc:
            rows.append({"file": src, "error": str(exc)})
            ok = False
            continue
        for phi in recs:
            row = {"file": src, "ell": phi.ell, "terms": len(phi.coeffs),
                   "max_bits": max(abs(c).bit_length() for c in phi.coeffs.values())}
            if args.action == "validate":
                row["kronecker"] = validate_kronecker(phi)
                ok &= row["kronecker"]
            rows.append(row)
    lines = []
    for r in rows:
        if "error" in r:
            lines.append(f"{r['file']}: ERROR {r['error']}")
            continue
        tail = f"  kronecker {'ok' if r['kronecker'] else 'FAIL'}" if "kronecker" in r else ""
        lines.append(f"ell {r['ell']:>3}  terms {r['terms']:>5}  max bits {r['max_bits']:>5}{tail}")
    _emit({"levels": rows, "ok": ok}, cfg.json, lines)
    return EXIT_OK if ok else EXIT_VALIDATION


def cmd_selftest(args, cfg: Config) -> int:
    from .selftest import run_checks

    results = run_checks(quick=args.quick, seed=cfg.seed, db=cfg.db())
    ok = all(passed for _, passed, _ in results)
    _emit({"checks": [{"name": n, "passed": p, "detail": d} for n, p, d in results],
           "ok": ok}, cfg.json,
          [f"{'PASS' if p else 'FAIL'}  {n}  {d}" for n, p, d in results])
    return EXIT_OK if ok else EXIT_VALIDATION


COMMANDS = {"count": cmd_count, "gen": cmd_gen, "census": cmd_census,
            "modpoly": cmd_modpoly, "selftest": cmd_selftest}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"seacount: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    logging.basicConfig(stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s",
                        level=logging.WARNING - 10 * min(args.verbose, 2))
    try:
        cfg = Config(db_path=args.db or os.environ.get(ENV_DB_DIR, DEFAULT_DB_DIR),
                     oracle_cap=args.cap, seed=args.seed, json=args.json,
                     jobs=getattr(args, "jobs", 1))
        return COMMANDS[args.command](args, cfg)
    except DomainError as exc:
        print(f"seacount: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ModPolyError as exc:
        print(f"seacount: modular polynomial error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def main() -> None:
    sys.exit(run())
