"""theta2 command line: series dumps, class tables, catalog checks, certificates
and the density harness.

Exit codes: 0 every check passed, 1 some check failed, 2 usage or config
error, 3 a precision, memory or pair budget was exceeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace

from . import golden
from .groebner import (
    DEFAULT_PAIR_BUDGET,
    GroebnerBudgetExceeded,
    IdealF2,
    PolyF2m,
    certificate,
    ideal_member,
    quintic_generators,
)
from .series import PrecisionError
from .theta import (
    CongruenceClass,
    basic_classes,
    check_modulus,
    density_count,
    normalize_index,
    theta_series,
    units,
    ustar_classes,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3
FORMATS = ("json", "csv", "text")
DENSITY_COLUMNS = ("l", "r", "residue", "modulus", "X", "count", "elapsed_ms")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    emax: int = 16 << 20
    memory: int = 4 << 30
    pair_budget: int = DEFAULT_PAIR_BUDGET
    workers: int | None = None
    format: str = "json"

    def __post_init__(self):
        if self.emax < 4096:
            raise UsageError(f"E_max must be at least 4096, got {self.emax}")
        for name in ("memory", "pair_budget"):
            if getattr(self, name) <= 0:
                raise UsageError(f"{name} must be positive")
        if self.workers is not None and self.workers <= 0:
            raise UsageError("workers must be positive")
        if self.format not in FORMATS:
            raise UsageError(f"format must be one of {', '.join(FORMATS)}")

    @classmethod
    def from_env(cls, text: str | None = None, **overrides) -> RunConfig:
        """Defaults, then THETA2_BUDGET ("emax=...,memory=...,pairs=...,workers=..."), then overrides."""
        text = os.environ.get("THETA2_BUDGET", "") if text is None else text
        fields = {}
        keys = {"emax": "emax", "memory": "memory", "pairs": "pair_budget", "pair_budget": "pair_budget", "workers": "workers"}
        for item in filter(None, (s.strip() for s in text.split(","))):
            key, sep, value = item.partition("=")
            if not sep or key.strip() not in keys:
                raise UsageError(f"bad THETA2_BUDGET item {item!r}")
            try:
                fields[keys[key.strip()]] = int(float(value))
            except ValueError:
                raise UsageError(f"bad THETA2_BUDGET value {item!r}") from None
        fields.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**fields)

    def pool_size(self, job_bytes: int) -> int:
        """Explicit worker count, else cores capped by how many jobs fit in memory."""
        if self.workers is not None:
            return self.workers
        return max(1, min(os.cpu_count() or 1, self.memory // max(job_bytes, 1)))


@dataclass(frozen=True)
class DensityResult:
    l: int
    r: int
    residue: int
    modulus: int
    X: int
    count: int
    elapsed_ms: float

    def row(self) -> list:
        return [getattr(self, c) for c in DENSITY_COLUMNS]


# a Newton inversion holds about this many series of the final length at once
_SERIES_COPIES = 8


def density_footprint(l: int, r: int, modulus: int, X: int) -> tuple[int, int]:
    """(precision, bytes) needed for one density count."""
    bits = (X + 2) * l * modulus + 3 * r * r
    return bits, _SERIES_COPIES * bits // 8


def _density_job(args) -> DensityResult:
    l, r, residue, modulus, X, emax = args
    t0 = time.perf_counter()
    count = density_count(l, r, CongruenceClass(residue, modulus), X, emax=emax)
    return DensityResult(l, r, residue, modulus, X, count, round((time.perf_counter() - t0) * 1000, 1))


# -- output ---------------------------------------------------------------------


def _emit_rows(rows: list[dict], fmt: str, columns=None, out=None):
    out = out or sys.stdout
    if not rows:
        return
    columns = list(columns or rows[0].keys())
    if fmt == "json":
        for row in rows:
            out.write(json.dumps({c: row[c] for c in columns}) + "\n")
    elif fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([row[c] for c in columns])
    else:
        widths = [max(len(str(c)), *(len(str(r[c])) for r in rows)) for c in columns]
        out.write("  ".join(str(c).rjust(w) for c, w in zip(columns, widths)) + "\n")
        for row in rows:
            out.write("  ".join(str(row[c]).rjust(w) for c, w in zip(columns, widths)) + "\n")


def _outcome_code(outcomes) -> int:
    outcomes = list(outcomes)
    if any(o == "fail" for o in outcomes):
        return EXIT_FAIL
    if any(o == "budget-exceeded" for o in outcomes):
        return EXIT_BUDGET
    return EXIT_OK


def _parse_window(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    try:
        if not sep:
            raise ValueError
        a, b = int(lo), int(hi)
    except ValueError:
        raise UsageError(f"window must look like -16..0, got {text!r}") from None
    if a > b:
        raise UsageError(f"empty window {text!r}")
    return a, b


def _modulus(l: int) -> int:
    try:
        check_modulus(l)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return l


# -- commands -------------------------------------------------------------------


def cmd_theta(args, cfg: RunConfig) -> int:
    l = _modulus(args.l)
    bound = args.E if args.E is not None else (args.max_exp + 1 if args.max_exp is not None else 256)
    if bound <= 0:
        raise UsageError("precision must be positive")
    if bound > cfg.emax:
        print(f"theta: precision {bound} exceeds E_max {cfg.emax}", file=sys.stderr)
        return EXIT_BUDGET
    sys.stdout.write(theta_series(l, normalize_index(l, args.i), bound).dump())
    return EXIT_OK


def cmd_inverse(args, cfg: RunConfig) -> int:
    l = _modulus(args.l)
    r = normalize_index(l, args.r)
    if r == 0:
        raise UsageError("[0] = 1 has the trivial inverse; pick r not divisible by l")
    lo, hi = _parse_window(args.window) if args.window else (-r * r, 64)
    # the reciprocal of a series known below E is known below E - 2 r^2
    bound = args.E if args.E is not None else hi + 1 + 2 * r * r
    if bound > cfg.emax:
        print(f"inverse: precision {bound} exceeds E_max {cfg.emax}", file=sys.stderr)
        return EXIT_BUDGET
    inv = theta_series(l, r, bound).inverse()
    if hi >= inv.bound:
        raise UsageError(f"window end {hi} needs E > {hi + 2 * r * r}, got E={bound}")
    body = " ".join(str(int(e)) for e in inv.window(lo, hi + 1))
    sys.stdout.write(f"v={inv.valuation} E={inv.bound}\n{body}\n")
    return EXIT_OK


def cmd_classes(args, cfg: RunConfig) -> int:
    l = _modulus(args.l)
    classes = basic_classes(l) if args.basic else ustar_classes(l)
    rows = [{"residue": c.residue, "modulus": c.modulus} for c in classes]
    fmt = args.format or "text"
    if fmt == "text":
        sys.stdout.write("\n".join(f"{c.residue} mod {c.modulus}" for c in classes) + "\n")
    else:
        _emit_rows(rows, fmt, ("residue", "modulus"))
    return EXIT_OK


def cmd_verify(args, cfg: RunConfig) -> int:
    from .verify.catalog import load_catalog, run_catalog, select

    entries = load_catalog()
    known = {e.id for e in entries}
    missing = [i for i in args.id or [] if i not in known]
    if missing:
        raise UsageError(f"unknown catalog id: {', '.join(missing)}")
    if args.l is not None:
        _modulus(args.l)
    chosen = select(entries, l=args.l, ids=args.id, include_opt_in=args.opt_in)
    if not chosen:
        raise UsageError("no catalog entries match the filters")
    if args.E is not None and args.E > cfg.emax:
        print(f"verify: precision {args.E} exceeds E_max {cfg.emax}", file=sys.stderr)
        return EXIT_BUDGET
    workers = cfg.pool_size(cfg.emax // 8)
    reports = run_catalog(chosen, bound=args.E, budget=cfg.pair_budget, workers=workers)
    fmt = args.format or "json"
    rows = [json.loads(r.to_json()) for r in reports]
    _emit_rows(rows, fmt, ("id", "method", "outcome", "witness", "ms"))
    return _outcome_code(r.outcome for r in reports)


def _ideal(text: str, nvars: int, l: int) -> list[PolyF2m]:
    """Generators from "N", "N+g1,g2" or "g1,g2"; N stands for the quintic relations."""
    items = [s.strip() for s in text.split(",") if s.strip()]
    if items and items[0].startswith("N+"):
        items[0:1] = ["N", items[0][2:]]
    gens = []
    for item in items:
        if item == "N":
            gens += quintic_generators(l)
        else:
            gens.append(PolyF2m.parse(item, nvars))
    if not gens:
        raise UsageError("empty ideal")
    return gens


def cmd_groebner(args, cfg: RunConfig) -> int:
    l = _modulus(args.l)
    nvars = (l - 1) // 2
    try:
        if args.member is not None:
            if args.u or args.v:
                raise UsageError("--member excludes --u/--v")
            p = PolyF2m.parse(args.member, nvars)
            I = IdealF2(_ideal(args.ideal, nvars, l), cfg.pair_budget)
            ok = ideal_member(p, I)
            stats = I.groebner().stats.as_dict()
            report = {"l": l, "member": ok, "basis_size": len(I.basis()), **stats}
        else:
            if not (args.u and args.v):
                raise UsageError("give --u and --v, or --member with --ideal")
            cert = certificate(PolyF2m.parse(args.u, nvars), PolyF2m.parse(args.v, nvars), l, cfg.pair_budget)
            ok = cert.equal
            report = {"l": l, "equal": ok, "remainder_lead": cert.remainder_lead, **cert.stats}
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    except GroebnerBudgetExceeded as exc:
        print(json.dumps({"l": l, "outcome": "budget-exceeded", "witness": str(exc), **exc.stats}))
        return EXIT_BUDGET
    print(json.dumps(report))
    return EXIT_OK if ok else EXIT_FAIL


def _density_jobs(args) -> list[tuple]:
    if args.all_paper:
        return [key for key in golden.DENSITY_COUNTS]
    l = _modulus(args.l)
    if args.cls is None or args.mod is None:
        raise UsageError("density needs --class and --mod, or --all-paper")
    if args.mod < 1 or args.mod & (args.mod - 1):
        raise UsageError(f"--mod must be a power of 2, got {args.mod}")
    if args.count <= 0:
        raise UsageError("--count must be positive")
    rs = [normalize_index(l, args.r)] if args.r is not None else [r for r in units(l) if r <= l // 2]
    for r in rs:
        if r == 0 or r not in units(l):
            raise UsageError(f"r={args.r} is not prime to l={l}")
    return [(l, r, args.cls % args.mod, args.mod, args.count) for r in rs]


def cmd_density(args, cfg: RunConfig) -> int:
    jobs = _density_jobs(args)
    peak = 0
    for l, r, j, q, X in jobs:
        bits, nbytes = density_footprint(l, r, q, X)
        if bits > cfg.emax or nbytes > cfg.memory:
            print(f"density: l={l} r={r} {j} mod {q} X={X} needs E={bits} ({nbytes} bytes); "
                  f"ceilings are E_max={cfg.emax}, memory={cfg.memory}", file=sys.stderr)
            return EXIT_BUDGET
        peak = max(peak, nbytes)
    payload = [job + (cfg.emax,) for job in jobs]
    workers = min(cfg.pool_size(peak), len(jobs))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_density_job, payload))
    else:
        results = [_density_job(p) for p in payload]

    fmt = args.format or "csv"
    rows = [asdict(res) for res in results]
    code = EXIT_OK
    if args.all_paper:
        for row, res in zip(rows, results):
            expected = golden.DENSITY_COUNTS[(res.l, res.r, res.residue, res.modulus, res.X)]
            row["expected"] = expected
            if res.count != expected:
                code = EXIT_FAIL
        _emit_rows(rows, fmt, DENSITY_COLUMNS + ("expected",))
        bad = sum(r["count"] != r["expected"] for r in rows)
        print(f"{len(rows) - bad}/{len(rows)} counts match the reference table", file=sys.stderr)
    else:
        _emit_rows(rows, fmt, DENSITY_COLUMNS)
    return code


def cmd_partition(args, cfg: RunConfig) -> int:
    from .verify.partition import partition_parity_check

    if args.kmax <= 0:
        raise UsageError("--kmax must be positive")
    if 24 * args.kmax + 2 > cfg.emax:
        print(f"partition: k_max={args.kmax} needs E={24 * args.kmax + 2} > E_max {cfg.emax}", file=sys.stderr)
        return EXIT_BUDGET
    rep = partition_parity_check(args.kmax)
    print(rep.to_json())
    return _outcome_code([rep.outcome])


def cmd_l3(args, cfg: RunConfig) -> int:
    from .verify.l3 import l3_suite

    if args.nmax < 16:
        raise UsageError("--nmax must be at least 16")
    reports = l3_suite(args.nmax, samples=args.samples, seed=args.seed)
    for rep in reports:
        print(rep.to_json())
        if args.detail:
            print(json.dumps({"id": rep.id, "detail": rep.detail}))
    return _outcome_code(r.outcome for r in reports)


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default=None)
    common.add_argument("--emax", type=int, default=None, help="precision ceiling (default 16*2^20)")
    common.add_argument("--memory", type=int, default=None, help="memory ceiling in bytes")
    common.add_argument("--pair-budget", type=int, default=None)
    common.add_argument("--workers", type=int, default=None)

    p = argparse.ArgumentParser(prog="theta2", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("theta", parents=[common], help="dump a theta series [i] for modulus l")
    s.add_argument("--l", type=int, required=True)
    s.add_argument("--i", type=int, required=True)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--max-exp", type=int)
    g.add_argument("--E", type=int)
    s.set_defaults(func=cmd_theta)

    s = sub.add_parser("inverse", parents=[common], help="exponents of 1/[r] inside a window")
    s.add_argument("--l", type=int, required=True)
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--E", type=int)
    s.add_argument("--window", help="inclusive range a..b")
    s.set_defaults(func=cmd_inverse)

    s = sub.add_parser("classes", parents=[common], help="U* or the basic classes for l")
    s.add_argument("--l", type=int, required=True)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--ustar", action="store_true")
    g.add_argument("--basic", action="store_true")
    s.set_defaults(func=cmd_classes)

    s = sub.add_parser("verify", parents=[common], help="run catalog identities")
    s.add_argument("--l", type=int)
    s.add_argument("--id", action="append")
    s.add_argument("--E", type=int, help="override every entry's precision")
    s.add_argument("--opt-in", action="store_true", help="include long-running entries")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("groebner", parents=[common], help="certify u/v or test ideal membership")
    s.add_argument("--l", type=int, required=True)
    s.add_argument("--u")
    s.add_argument("--v")
    s.add_argument("--member")
    s.add_argument("--ideal", default="N", help='"N", "N+g1,g2" or "g1,g2"')
    s.set_defaults(func=cmd_groebner)

    s = sub.add_parser("density", parents=[common], help="count members of B([r]) in a class")
    s.add_argument("--l", type=int)
    s.add_argument("--r", type=int)
    s.add_argument("--class", dest="cls", type=int)
    s.add_argument("--mod", type=int)
    s.add_argument("--count", type=int, default=1 << 17)
    s.add_argument("--all-paper", action="store_true", help="run the reference table and diff")
    s.set_defaults(func=cmd_density)

    s = sub.add_parser("partition", parents=[common], help="partition parity against 1/(a + a^4), l=3")
    s.add_argument("--kmax", type=int, default=20000)
    s.set_defaults(func=cmd_partition)

    s = sub.add_parser("l3", parents=[common], help="predicates on B([1]) for l=3")
    s.add_argument("--nmax", type=int, default=10**6)
    s.add_argument("--samples", type=int, default=200)
    s.add_argument("--seed", type=int, default=12345)
    s.add_argument("--detail", action="store_true")
    s.set_defaults(func=cmd_l3)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.command == "density" and not args.all_paper and args.l is None:
        print("density: --l is required unless --all-paper is given", file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg = RunConfig.from_env(
            emax=args.emax, memory=args.memory, pair_budget=args.pair_budget, workers=args.workers
        )
        if args.format:
            cfg = replace(cfg, format=args.format)
        return args.func(args, cfg)
    except UsageError as exc:
        print(f"theta2 {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (MemoryError, PrecisionError) as exc:
        print(f"theta2 {args.command}: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
