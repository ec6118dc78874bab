"""Catalog of identities and certificates, and the runner that checks them."""

from __future__ import annotations

import itertools
import json
import operator
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from typing import Any

import yaml

from ..groebner import (
    DEFAULT_PAIR_BUDGET,
    GroebnerBudgetExceeded,
    IdealF2,
    PolyF2m,
    certificate,
    from_spoly,
    ideal_member,
    phi_r,
    quintic_generators,
)
from ..theta import check_modulus, units
from .expr import Context, evaluate, parse, symbolic
from .ladder import LadderError, quotient_ladder

MIN_WEIGHT = 64
SOUNDNESS_BOUND = 2048

_WHERE = re.compile(r"^\s*(\w+)\s*(>=|<=|!=|==|>|<)\s*(\w+)\s*$")
_OPS = {">": operator.gt, "<": operator.lt, ">=": operator.ge, "<=": operator.le, "!=": operator.ne, "==": operator.eq}


@dataclass
class CheckReport:
    id: str
    method: str
    outcome: str  # pass | fail | budget-exceeded | skipped
    witness: str | None = None
    ms: float = 0.0
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.outcome == "pass"

    def to_json(self) -> str:
        return json.dumps(
            {"id": self.id, "method": self.method, "outcome": self.outcome, "witness": self.witness, "ms": round(self.ms, 1)}
        )


@dataclass
class IdentityEntry:
    id: str
    moduli: list[int]
    anchor: str
    lhs: str | None = None
    rhs: str | None = None
    bound: Any = None  # int or {l: int}
    variables: dict = field(default_factory=dict)
    where: str | None = None
    aliases: dict = field(default_factory=dict)
    groebner: list = field(default_factory=list)
    member: list = field(default_factory=list)
    ladder: list = field(default_factory=list)
    ladder_structure: list = field(default_factory=list)
    opt_in: bool = False

    @property
    def methods(self) -> list[str]:
        out = []
        if self.lhs is not None:
            out.append("numeric")
        if self.groebner:
            out.append("groebner")
        if self.member:
            out.append("member")
        if self.ladder:
            out.append("ladder")
        if self.ladder_structure:
            out.append("ladder-structure")
        return out

    def bound_for(self, l: int) -> int:
        if isinstance(self.bound, dict):
            return int(self.bound[l])
        return int(self.bound)

    def instances(self, l: int):
        """Every variable binding for modulus l."""
        m = check_modulus(l)
        names = list(self.variables)
        ranges = []
        for name in names:
            spec = self.variables[name]
            if spec == "units":
                ranges.append(units(l))
            elif spec == "all":
                ranges.append(list(range(1, m + 1)))
            elif isinstance(spec, list):
                ranges.append([int(x) for x in spec])
            else:
                raise ValueError(f"{self.id}: unknown range {spec!r} for {name}")
        for combo in itertools.product(*ranges):
            env = dict(zip(names, combo))
            if self.where:
                mt = _WHERE.match(self.where)
                if not mt:
                    raise ValueError(f"{self.id}: cannot read condition {self.where!r}")
                lhs, op, rhs = mt.groups()
                val = lambda t: env[t] if t in env else int(t)  # noqa: E731
                if not _OPS[op](val(lhs), val(rhs)):
                    continue
            yield env

    def context(self, l: int, env: dict) -> Context:
        return Context(l, env, self.aliases)

    def r_of(self, env: dict) -> int:
        return env.get("r", 1)


_KNOWN = {
    "id", "l", "anchor", "lhs", "rhs", "E", "vars", "where", "let",
    "groebner", "member", "ladder", "ladder_structure", "opt_in",
}


def _entry(rec: dict) -> IdentityEntry:
    unknown = set(rec) - _KNOWN
    if unknown:
        raise ValueError(f"{rec.get('id')}: unknown fields {sorted(unknown)}")
    moduli = rec["l"] if isinstance(rec["l"], list) else [rec["l"]]
    e = IdentityEntry(
        id=rec["id"],
        moduli=[int(x) for x in moduli],
        anchor=rec.get("anchor", ""),
        lhs=rec.get("lhs"),
        rhs=rec.get("rhs"),
        bound=rec.get("E"),
        variables=rec.get("vars") or {},
        where=rec.get("where"),
        aliases=rec.get("let") or {},
        groebner=rec.get("groebner") or [],
        member=rec.get("member") or [],
        ladder=[tuple(x) for x in rec.get("ladder") or []],
        ladder_structure=[tuple(x) for x in rec.get("ladder_structure") or []],
        opt_in=bool(rec.get("opt_in", False)),
    )
    if not e.methods:
        raise ValueError(f"{e.id}: entry has no verification method")
    if (e.lhs is None) != (e.rhs is None):
        raise ValueError(f"{e.id}: numeric entries need both lhs and rhs")
    if e.lhs is not None and e.bound is None:
        raise ValueError(f"{e.id}: numeric entries need a bound E")
    return e


def load_catalog(path=None) -> list[IdentityEntry]:
    if path is None:
        text = resources.files("theta2.verify").joinpath("catalog.yaml").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    entries = [_entry(rec) for rec in yaml.safe_load(text)]
    ids = [e.id for e in entries]
    dup = {i for i in ids if ids.count(i) > 1}
    if dup:
        raise ValueError(f"duplicate catalog ids: {sorted(dup)}")
    return entries


# ---------------------------------------------------------------------------
# checks


def _sides(entry: IdentityEntry, l: int, env: dict, bound: int):
    ctx = entry.context(l, env)
    lhs = evaluate(parse(entry.lhs), ctx, bound)
    rhs = evaluate(parse(entry.rhs), ctx, bound)
    top = min(lhs.bound, rhs.bound)
    return lhs.truncate(top), rhs.truncate(top)


def _fmt_env(l: int, env: dict) -> str:
    return " ".join([f"l={l}"] + [f"{k}={v}" for k, v in env.items()])


def numeric_check(entry: IdentityEntry, bound: int | None = None, min_weight: int | None = None):
    """(ok, witness, detail) for the series identity lhs == rhs."""
    if min_weight is None:
        min_weight = MIN_WEIGHT if bound is None else 0
    count = 0
    weakest = None
    for l in entry.moduli:
        E = bound if bound is not None else entry.bound_for(l)
        for env in entry.instances(l):
            lhs, rhs = _sides(entry, l, env, E)
            count += 1
            bad = lhs.first_mismatch(rhs)
            if bad is not None:
                return False, f"{_fmt_env(l, env)} E={E}: sides differ at x^{bad}", {"instances": count}
            w = min(lhs.weight(), rhs.weight())
            weakest = w if weakest is None else min(weakest, w)
            if w < min_weight:
                return (
                    False,
                    f"{_fmt_env(l, env)} E={E}: only {w} nonzero coefficients compared (< {min_weight})",
                    {"instances": count},
                )
    if count == 0:
        return False, "no instances", {}
    return True, None, {"instances": count, "min_weight": weakest}


def minimal_bound(entry: IdentityEntry, l: int, min_weight: int = MIN_WEIGHT, start: int = 256, limit: int = 1 << 24) -> int:
    """Smallest power-of-2 E at which every instance compares >= min_weight coefficients per side."""
    E = start
    while E <= limit:
        ok = True
        for env in entry.instances(l):
            lhs, rhs = _sides(entry, l, env, E)
            if min(lhs.weight(), rhs.weight()) < min_weight:
                ok = False
                break
        if ok:
            return E
        E *= 2
    raise ValueError(f"{entry.id}: fewer than {min_weight} coefficients even at E={limit}")


def _poly(text: str, l: int) -> PolyF2m:
    return PolyF2m.parse(text, check_modulus(l))


def _pair(entry: IdentityEntry, spec: dict, l: int) -> tuple[PolyF2m, PolyF2m]:
    """u, v from explicit x-polynomials or from S-expressions ("su", "sv")."""
    if "u" in spec:
        return _poly(spec["u"], l), _poly(spec["v"], l)
    env = next(iter(entry.instances(l)))
    ctx = entry.context(l, env)
    r = entry.r_of(env)
    u = from_spoly(symbolic(parse(spec["su"]), ctx), r)
    v = from_spoly(symbolic(parse(spec["sv"]), ctx), r)
    return u, v


def groebner_check(entry: IdentityEntry, budget: int = DEFAULT_PAIR_BUDGET):
    stats = []
    for l in entry.moduli:
        for spec in entry.groebner:
            u, v = _pair(entry, spec, l)
            expect = bool(spec.get("expect", True))
            cert = certificate(u, v, l, budget)
            stats.append(cert.stats)
            if cert.equal != expect:
                wit = f"l={l} u={u} v={v}: "
                if cert.equal:
                    wit += "certified although expected to fail"
                else:
                    wit += f"normal form has leading monomial {cert.remainder_lead}"
                return False, wit, {"certificates": stats}
            if not expect:
                continue
            # a certified quotient must be a power series for every r
            for r in units(l):
                q = phi_r(u, l, r, SOUNDNESS_BOUND) / phi_r(v, l, r, SOUNDNESS_BOUND)
                if not q.is_power_series():
                    return False, f"l={l} r={r}: certified quotient has valuation {q.valuation}", {}
            if "equals" in spec:
                for env in entry.instances(l):
                    r = entry.r_of(env)
                    E = entry.bound_for(l) if entry.bound is not None else SOUNDNESS_BOUND
                    got = phi_r(u, l, r, E) / phi_r(v, l, r, E)
                    want = evaluate(parse(spec["equals"]), entry.context(l, env), E)
                    bad = got.first_mismatch(want)
                    if bad is not None:
                        return False, f"{_fmt_env(l, env)}: phi(u)/phi(v) differs from {spec['equals']} at x^{bad}", {}
    return True, None, {"certificates": len(stats)}


def member_check(entry: IdentityEntry, budget: int = DEFAULT_PAIR_BUDGET):
    for l in entry.moduli:
        for spec in entry.member:
            p = _poly(spec["p"], l)
            extra = [_poly(g, l) for g in spec.get("with", [])]
            I = IdealF2(quintic_generators(l) + extra, budget)
            expect = bool(spec.get("expect", True))
            if ideal_member(p, I) != expect:
                rem = I.reduce(p)
                lead = str(PolyF2m._raw(rem.ring, [rem.lead])) if rem else "0"
                return False, f"l={l}: membership of {p} is {not expect}; remainder leads with {lead}", {}
            if expect:
                for r in units(l):
                    s = phi_r(p, l, r, SOUNDNESS_BOUND)
                    if not s.is_zero:
                        return False, f"l={l} r={r}: member of N does not vanish, x^{s.valuation}", {}
    return True, None, {}


def ladder_check(entry: IdentityEntry, budget: int = DEFAULT_PAIR_BUDGET, certify: bool = True):
    pairs = entry.ladder if certify else entry.ladder_structure
    done = []
    for l in entry.moduli:
        for q, j in pairs:
            try:
                if certify:
                    lad = quotient_ladder(l, 1, q, j)
                    cert = certificate(lad.root_u, lad.root_v, l, budget)
                    if not cert.equal:
                        return False, f"l={l} p_{{{q},{j}}}: normal form leads with {cert.remainder_lead}", {}
                else:
                    for r in units(l):
                        quotient_ladder(l, r, q, j)
            except LadderError as exc:
                return False, f"l={l} p_{{{q},{j}}}: {exc}", {}
            except AssertionError as exc:
                return False, str(exc), {}
            done.append((l, q, j))
    return True, None, {"projections": len(done)}


def run_identity(
    entry: IdentityEntry,
    bound: int | None = None,
    budget: int = DEFAULT_PAIR_BUDGET,
) -> list[CheckReport]:
    """One report per verification method of the entry."""
    reports = []
    runners = {
        "numeric": lambda: numeric_check(entry, bound),
        "groebner": lambda: groebner_check(entry, budget),
        "member": lambda: member_check(entry, budget),
        "ladder": lambda: ladder_check(entry, budget, certify=True),
        "ladder-structure": lambda: ladder_check(entry, budget, certify=False),
    }
    for method in entry.methods:
        t0 = time.perf_counter()
        try:
            ok, witness, detail = runners[method]()
            outcome = "pass" if ok else "fail"
        except GroebnerBudgetExceeded as exc:
            outcome, witness, detail = "budget-exceeded", str(exc), dict(exc.stats)
        except MemoryError as exc:
            outcome, witness, detail = "budget-exceeded", str(exc), {}
        ms = (time.perf_counter() - t0) * 1000
        reports.append(CheckReport(entry.id, method, outcome, witness, ms, detail))
    return reports


def select(entries: list[IdentityEntry], l: int | None = None, ids: list[str] | None = None, include_opt_in: bool = False):
    out = []
    for e in entries:
        if ids and e.id not in ids:
            continue
        if l is not None and l not in e.moduli:
            continue
        if e.opt_in and not include_opt_in and not ids:
            continue
        out.append(e)
    return out


def _run_one(args):
    entry, bound, budget = args
    return run_identity(entry, bound, budget)


def run_catalog(
    entries: list[IdentityEntry],
    bound: int | None = None,
    budget: int = DEFAULT_PAIR_BUDGET,
    workers: int = 1,
) -> list[CheckReport]:
    """Run entries, in a process pool when workers > 1; reports come back sorted by id."""
    jobs = [(e, bound, budget) for e in entries]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]
    reports = [r for batch in results for r in batch]
    order = {m: i for i, m in enumerate(["numeric", "groebner", "member", "ladder", "ladder-structure"])}
    reports.sort(key=lambda r: (r.id, order.get(r.method, 99)))
    return reports
