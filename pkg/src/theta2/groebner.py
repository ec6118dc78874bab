"""Polynomials over GF(2) in x_1..x_m, Buchberger's algorithm, and ideal tests.

Monomials are packed into a single Python int whose natural order is the
graded reverse lexicographic order with x_1 > x_2 > ... > x_m.  With W bits
per variable and S = W*m the key is

    key = deg << S | (MASK - sum(e_k << W*(k-1)))

so comparing keys compares degrees first and then prefers the smaller
exponent of the last variable, which is grevlex.  Multiplying monomials is
``k1 + k2 - MASK``.  The top bit of every field is a guard: exponents are
limited to ``2^(W-1) - 1`` and any product reaching the guard raises
:class:`OverflowError` instead of corrupting a neighbouring field.

Since every coefficient is 1, a polynomial is just a set of keys and the
S-polynomial of f, g is (L/lt f) f + (L/lt g) g.
"""

from __future__ import annotations

import heapq
import math
import re
import time
from dataclasses import dataclass, field
from functools import lru_cache

from .theta import SPoly, check_modulus, eval_spoly, normalize_index

DEFAULT_PAIR_BUDGET = 10_000_000


class GroebnerBudgetExceeded(RuntimeError):
    def __init__(self, message: str, stats: dict):
        super().__init__(f"{message} ({stats})")
        self.stats = stats


class Ring:
    """GF(2)[x_1..x_m] with grevlex order and W-bit exponent fields."""

    def __init__(self, nvars: int, width: int = 16):
        if nvars < 1:
            raise ValueError("need at least one variable")
        self.nvars = nvars
        self.width = width
        self.shift = width * nvars
        self.mask = (1 << self.shift) - 1
        self.guard = sum(1 << (width * k + width - 1) for k in range(nvars))
        self.max_exp = (1 << (width - 1)) - 1

    def __repr__(self) -> str:
        return f"Ring(nvars={self.nvars}, width={self.width})"

    def encode(self, exps) -> int:
        if len(exps) != self.nvars:
            raise ValueError(f"expected {self.nvars} exponents, got {len(exps)}")
        mono = 0
        for k, e in enumerate(exps):
            if e < 0 or e > self.max_exp:
                raise OverflowError(f"exponent {e} does not fit in {self.width}-bit field")
            mono |= e << (self.width * k)
        return (sum(exps) << self.shift) | (self.mask - mono)

    def mono(self, key: int) -> int:
        return self.mask - (key & self.mask)

    def decode(self, key: int) -> tuple:
        m = self.mono(key)
        f = (1 << self.width) - 1
        return tuple((m >> (self.width * k)) & f for k in range(self.nvars))

    def degree(self, key: int) -> int:
        return key >> self.shift

    def mul(self, a: int, b: int) -> int:
        k = a + b - self.mask
        if self.mono(k) & self.guard:
            raise OverflowError("monomial exponent overflow")
        return k

    def divides(self, a: int, b: int) -> bool:
        g = self.guard
        return ((self.mono(b) | g) - self.mono(a)) & g == g

    def quotient(self, b: int, a: int) -> int:
        """b / a, assuming a divides b."""
        return b - a + self.mask

    def lcm(self, a: int, b: int) -> int:
        return self.encode([max(x, y) for x, y in zip(self.decode(a), self.decode(b))])

    def coprime(self, a: int, b: int) -> bool:
        return all(x == 0 or y == 0 for x, y in zip(self.decode(a), self.decode(b)))

    def support(self, key: int) -> int:
        """Bit k set iff x_{k+1} occurs; a cheap divisibility pre-filter."""
        m = self.mono(key)
        f = (1 << self.width) - 1
        return sum(1 << k for k in range(self.nvars) if (m >> (self.width * k)) & f)

    def one(self) -> int:
        return self.mask


@lru_cache(maxsize=None)
def ring(nvars: int, width: int = 16) -> Ring:
    return Ring(nvars, width)


class PolyF2m:
    """Immutable polynomial over GF(2); terms are keys sorted in descending order."""

    __slots__ = ("ring", "terms")

    def __init__(self, R: Ring, terms=()):
        acc: set = set()
        for t in terms:
            acc ^= {t}
        self.ring = R
        self.terms = tuple(sorted(acc, reverse=True))

    @classmethod
    def _raw(cls, R: Ring, sorted_terms) -> PolyF2m:
        p = cls.__new__(cls)
        p.ring = R
        p.terms = tuple(sorted_terms)
        return p

    @classmethod
    def from_exponents(cls, R: Ring, monomials) -> PolyF2m:
        return cls(R, [R.encode(tuple(e)) for e in monomials])

    @classmethod
    def var(cls, R: Ring, k: int, e: int = 1) -> PolyF2m:
        exps = [0] * R.nvars
        exps[k - 1] = e
        return cls.from_exponents(R, [exps])

    @classmethod
    def one(cls, R: Ring) -> PolyF2m:
        return cls(R, [R.one()])

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    @property
    def lead(self) -> int:
        return self.terms[0]

    def monomials(self) -> list[tuple]:
        return [self.ring.decode(t) for t in self.terms]

    def degree(self) -> int:
        return self.ring.degree(self.terms[0]) if self.terms else -1

    def __add__(self, other: PolyF2m) -> PolyF2m:
        return PolyF2m._raw(self.ring, sorted(set(self.terms) ^ set(other.terms), reverse=True))

    __sub__ = __add__

    def __mul__(self, other: PolyF2m) -> PolyF2m:
        R = self.ring
        acc: set = set()
        for a in self.terms:
            for b in other.terms:
                acc ^= {R.mul(a, b)}
        return PolyF2m._raw(R, sorted(acc, reverse=True))

    def __pow__(self, e: int) -> PolyF2m:
        result = PolyF2m.one(self.ring)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def mul_term(self, key: int) -> PolyF2m:
        R = self.ring
        return PolyF2m._raw(R, [R.mul(t, key) for t in self.terms])

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyF2m):
            return NotImplemented
        return self.ring is other.ring and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.ring.nvars, self.terms))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exps in self.monomials():
            s = "*".join(f"x{k}" + (f"^{e}" if e > 1 else "") for k, e in enumerate(exps, 1) if e)
            parts.append(s or "1")
        return "+".join(parts)

    def __repr__(self) -> str:
        return f"PolyF2m({self})"

    @classmethod
    def parse(cls, text: str, nvars: int) -> PolyF2m:
        return _Parser(text, ring(nvars)).parse()


class _Parser:
    """Recursive descent for ``x2^2*(x1+x2^4)``; juxtaposition multiplies."""

    TOKEN = re.compile(r"\s*(?:(x\d+)|(\d+)|([-+*^()]))")

    def __init__(self, text: str, R: Ring):
        self.R = R
        self.tokens = []
        pos = 0
        text = text.strip()
        while pos < len(text):
            m = self.TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise ValueError(f"unexpected input at {text[pos:]!r}")
            self.tokens.append(m.group(1) or m.group(2) or m.group(3))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def parse(self) -> PolyF2m:
        p = self.expr()
        if self.peek() is not None:
            raise ValueError(f"trailing input {self.peek()!r}")
        return p

    def expr(self) -> PolyF2m:
        p = self.term()
        while self.peek() in ("+", "-"):
            self.take()
            p = p + self.term()
        return p

    def term(self) -> PolyF2m:
        p = self.factor()
        while True:
            tok = self.peek()
            if tok == "*":
                self.take()
                p = p * self.factor()
            elif tok is not None and (tok == "(" or tok.startswith("x") or tok.isdigit()):
                p = p * self.factor()
            else:
                return p

    def factor(self) -> PolyF2m:
        p = self.atom()
        while self.peek() == "^":
            self.take()
            tok = self.take()
            if tok is None or not tok.isdigit():
                raise ValueError("exponent must be a nonnegative integer")
            p = p ** int(tok)
        return p

    def atom(self) -> PolyF2m:
        tok = self.take()
        if tok is None:
            raise ValueError("unexpected end of polynomial")
        if tok == "(":
            p = self.expr()
            if self.take() != ")":
                raise ValueError("missing ')'")
            return p
        if tok.startswith("x"):
            k = int(tok[1:])
            if not 1 <= k <= self.R.nvars:
                raise ValueError(f"variable {tok} outside x1..x{self.R.nvars}")
            return PolyF2m.var(self.R, k)
        if tok.isdigit():
            return PolyF2m.one(self.R) if int(tok) % 2 else PolyF2m(self.R)
        raise ValueError(f"unexpected token {tok!r}")


# ---------------------------------------------------------------------------
# reduction


class _Basis:
    """Leading-term index used by the reducer."""

    def __init__(self, R: Ring):
        self.R = R
        self.items: list[tuple[int, int, tuple]] = []  # (lead, support, tail)

    def add(self, terms: tuple) -> None:
        self.items.append((terms[0], self.R.support(terms[0]), terms[1:]))

    def find(self, key: int):
        R = self.R
        sup = R.support(key)
        for lead, s, tail in self.items:
            if s & ~sup == 0 and R.divides(lead, key):
                return lead, tail
        return None


def _reduce(R: Ring, terms, basis: _Basis, full: bool = True) -> list[int]:
    """Remainder of ``terms`` modulo ``basis``, descending; top-reduction only if not full."""
    mask = R.mask
    guard = R.guard
    work = set(terms)
    heap = [-t for t in work]
    heapq.heapify(heap)
    rem: list[int] = []
    while heap:
        k = -heapq.heappop(heap)
        if k not in work:
            continue
        hit = basis.find(k)
        if hit is None:
            if not full:
                rest = sorted(work, reverse=True)
                return rest
            work.discard(k)
            rem.append(k)
            continue
        lead, tail = hit
        q = k - lead + mask
        work.discard(k)
        for t in tail:
            u = t + q - mask
            if (mask - (u & mask)) & guard:
                raise OverflowError("monomial exponent overflow during reduction")
            if u in work:
                work.remove(u)
            else:
                work.add(u)
                heapq.heappush(heap, -u)
    return rem


def normal_form(p: PolyF2m, basis: list[PolyF2m]) -> PolyF2m:
    """Full remainder of p under leading-term reduction by ``basis``."""
    R = p.ring
    B = _Basis(R)
    for g in basis:
        if g:
            B.add(g.terms)
    return PolyF2m._raw(R, _reduce(R, p.terms, B))


# ---------------------------------------------------------------------------
# Buchberger


@dataclass
class GroebnerStats:
    pairs: int = 0
    reductions_to_zero: int = 0
    basis_size: int = 0
    max_terms: int = 0
    seconds: float = 0.0

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class GroebnerBasis:
    polys: list[PolyF2m]
    stats: GroebnerStats = field(default_factory=GroebnerStats)

    def leads(self) -> list[int]:
        return [g.lead for g in self.polys]


def buchberger(
    gens: list[PolyF2m],
    pair_budget: int = DEFAULT_PAIR_BUDGET,
    term_budget: int | None = None,
) -> GroebnerBasis:
    """Reduced Groebner basis of (gens) under grevlex.

    Pairs are chosen by the normal strategy (smallest lcm first) and pruned
    with the Gebauer-Moeller update, which includes the coprime-leading-term
    criterion.
    """
    gens = [g for g in gens if g]
    if not gens:
        raise ValueError("buchberger needs at least one nonzero generator")
    R = gens[0].ring
    t0 = time.perf_counter()
    stats = GroebnerStats()
    polys: list[tuple] = []
    active: list[int] = []
    pairs: dict[tuple[int, int], int] = {}
    heap: list[tuple[int, int, int]] = []
    basis = _Basis(R)

    def rebuild_basis():
        basis.items.clear()
        for i in active:
            basis.add(polys[i])

    def update(h: int) -> None:
        lh = polys[h][0]
        lcms = {g: R.lcm(lh, polys[g][0]) for g in active}
        C = list(active)
        D: list[int] = []
        while C:
            g1 = C.pop()
            L1 = lcms[g1]
            if R.coprime(lh, polys[g1][0]) or not any(
                R.divides(lcms[g2], L1) for g2 in C + D
            ):
                D.append(g1)
        E = [g for g in D if not R.coprime(lh, polys[g][0])]
        for (g1, g2), L in list(pairs.items()):
            if (
                R.divides(lh, L)
                and R.lcm(polys[g1][0], lh) != L
                and R.lcm(polys[g2][0], lh) != L
            ):
                del pairs[(g1, g2)]
        for g in E:
            pairs[(g, h)] = lcms[g]
            heapq.heappush(heap, (lcms[g], g, h))
        active[:] = [g for g in active if not R.divides(lh, polys[g][0])] + [h]
        rebuild_basis()

    def add(terms: list[int]) -> None:
        polys.append(tuple(terms))
        stats.max_terms = max(stats.max_terms, len(terms))
        if term_budget is not None and sum(len(polys[i]) for i in active) > term_budget:
            stats.seconds = time.perf_counter() - t0
            raise GroebnerBudgetExceeded("term budget exceeded", stats.as_dict())
        update(len(polys) - 1)

    for g in sorted(gens, key=lambda g: g.lead):
        h = _reduce(R, g.terms, basis)
        if h:
            add(h)

    while heap:
        L, i, j = heapq.heappop(heap)
        if pairs.get((i, j)) != L:
            continue
        del pairs[(i, j)]
        stats.pairs += 1
        if stats.pairs > pair_budget:
            stats.basis_size = len(active)
            stats.seconds = time.perf_counter() - t0
            raise GroebnerBudgetExceeded("S-pair budget exceeded", stats.as_dict())
        f, g = polys[i], polys[j]
        qf = R.quotient(L, f[0])
        qg = R.quotient(L, g[0])
        s = set(R.mul(t, qf) for t in f[1:])
        s ^= set(R.mul(t, qg) for t in g[1:])
        h = _reduce(R, s, basis)
        if h:
            add(h)
        else:
            stats.reductions_to_zero += 1

    # interreduce the minimal basis
    final = [polys[i] for i in active]
    reduced = []
    for idx, f in enumerate(final):
        others = _Basis(R)
        for jdx, g in enumerate(final):
            if jdx != idx:
                others.add(g)
        reduced.append(PolyF2m._raw(R, [f[0]] + _reduce(R, f[1:], others)))
    reduced.sort(key=lambda p: p.lead)
    stats.basis_size = len(reduced)
    stats.seconds = time.perf_counter() - t0
    return GroebnerBasis(reduced, stats)


def s_polynomial(f: PolyF2m, g: PolyF2m) -> PolyF2m:
    R = f.ring
    L = R.lcm(f.lead, g.lead)
    return f.mul_term(R.quotient(L, f.lead)) + g.mul_term(R.quotient(L, g.lead))


def is_groebner(basis: list[PolyF2m]) -> bool:
    """Buchberger's criterion: every S-polynomial reduces to zero."""
    for a in range(len(basis)):
        for b in range(a + 1, len(basis)):
            if normal_form(s_polynomial(basis[a], basis[b]), basis):
                return False
    return True


# ---------------------------------------------------------------------------
# ideals


_basis_cache: dict = {}


class IdealF2:
    """An ideal given by generators; its reduced basis is computed once and shared."""

    def __init__(self, gens: list[PolyF2m], pair_budget: int = DEFAULT_PAIR_BUDGET):
        gens = [g for g in gens if g]
        self.gens = gens
        self.pair_budget = pair_budget
        self._basis: GroebnerBasis | None = None

    @property
    def ring(self) -> Ring:
        return self.gens[0].ring

    def _key(self):
        return (self.ring.nvars, frozenset(g.terms for g in self.gens))

    def groebner(self) -> GroebnerBasis:
        if self._basis is None:
            key = self._key()
            if key not in _basis_cache:
                _basis_cache[key] = buchberger(self.gens, self.pair_budget)
            self._basis = _basis_cache[key]
        return self._basis

    def basis(self) -> list[PolyF2m]:
        return self.groebner().polys

    def reduce(self, p: PolyF2m) -> PolyF2m:
        if not self.gens:
            return p
        return normal_form(p, self.basis())

    def __contains__(self, p: PolyF2m) -> bool:
        return ideal_member(p, self)

    def extend(self, *polys: PolyF2m) -> IdealF2:
        return IdealF2(self.gens + [p for p in polys if p], self.pair_budget)


def ideal_member(p: PolyF2m, I: IdealF2) -> bool:
    if not p:
        return True
    if not I.gens:
        return False
    return not I.reduce(p)


def ideal_equal(I: IdealF2, J: IdealF2) -> bool:
    """Equality by mutual membership of generators."""
    return all(ideal_member(g, J) for g in I.gens) and all(ideal_member(g, I) for g in J.gens)


def clear_cache() -> None:
    _basis_cache.clear()


# ---------------------------------------------------------------------------
# the quintic relations and the evaluation maps


def _folded(l: int, k: int) -> int:
    """Index of x_k after identifying x_{l-k} with x_k."""
    kk = normalize_index(l, k)
    if kk == 0:
        raise AssertionError(f"index {k} folds to x_0 for l={l}")
    return kk


def quintic_relation(l: int, i: int, j: int) -> PolyF2m:
    """x_i^4 x_2j + x_j^4 x_2i + x_2i x_2j + x_{i+j}^2 x_{i-j}^2 with folded indices."""
    m = check_modulus(l)
    R = ring(m)
    x = lambda k, e=1: PolyF2m.var(R, _folded(l, k), e)  # noqa: E731
    return x(i, 4) * x(2 * j) + x(j, 4) * x(2 * i) + x(2 * i) * x(2 * j) + x(i + j, 2) * x(i - j, 2)


def quintic_generators(l: int) -> list[PolyF2m]:
    m = check_modulus(l)
    return [quintic_relation(l, i, j) for i in range(2, m + 1) for j in range(1, i)]


def quintic_ideal(l: int) -> IdealF2:
    return IdealF2(quintic_generators(l))


def to_spoly(p: PolyF2m, l: int, r: int) -> SPoly:
    """The image of p under x_k -> [r k]."""
    out = SPoly.zero(l)
    for exps in p.monomials():
        mono = SPoly.one(l)
        for k, e in enumerate(exps, start=1):
            if e:
                mono = mono * SPoly.gen(l, r * k, e)
        out = out + mono
    return out


def from_spoly(s: SPoly, r: int) -> PolyF2m:
    """A preimage of s under x_k -> [r k] ([k] becomes x_{k r^-1})."""
    l = s.l
    m = check_modulus(l)
    R = ring(m)
    rinv = pow(r, -1, l)
    out = PolyF2m(R)
    for t in s.terms:
        mono = PolyF2m.one(R)
        for k, e in enumerate(t, start=1):
            if e:
                mono = mono * PolyF2m.var(R, normalize_index(l, k * rinv), e)
        out = out + mono
    return out


def phi_r(p: PolyF2m, l: int, r: int, bound: int):
    """Evaluate p at x_k = [r k] as a series below ``bound``."""
    if math.gcd(r, l) != 1:
        raise ValueError(f"r={r} is not prime to l={l}")
    return eval_spoly(to_spoly(p, l, r), bound)


@dataclass
class Certificate:
    """Outcome of testing u in (N, v), i.e. (N, v) == (N, u, v)."""

    equal: bool
    remainder_lead: str | None
    stats: dict


def certificate(u: PolyF2m, v: PolyF2m, l: int, pair_budget: int = DEFAULT_PAIR_BUDGET) -> Certificate:
    I = IdealF2(quintic_generators(l) + [v], pair_budget)
    gb = I.groebner()
    rem = normal_form(u, gb.polys)
    lead = None
    if rem:
        lead = str(PolyF2m._raw(rem.ring, [rem.lead]))
    return Certificate(not rem, lead, gb.stats.as_dict())


def certify_quotient(u: PolyF2m, v: PolyF2m, l: int, pair_budget: int = DEFAULT_PAIR_BUDGET) -> bool:
    """True certifies phi_r(u)/phi_r(v) lies in S for every r prime to l.

    (N, v) is always contained in (N, u, v), so equality is u in (N, v).
    """
    return certificate(u, v, l, pair_budget).equal
