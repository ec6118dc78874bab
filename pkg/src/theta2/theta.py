"""Theta series [i] mod 2, the ring S they generate, and the sets B(g).

For an odd modulus ``l = 2m + 1`` the theta series ``[i]`` is the sum of
``x^(n^2)`` over all integers ``n = i (mod l)``.  Indices are normalized to
``0..m`` using ``[i] = [-i]``; ``[0]`` is the constant 1.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from .series import LaurentSeriesF2, PrecisionError

Monomial = tuple  # exponent of [k] stored at position k - 1


def check_modulus(l: int) -> int:
    if l < 3 or l % 2 == 0:
        raise ValueError(f"modulus l must be odd and >= 3, got {l}")
    return (l - 1) // 2


def normalize_index(l: int, i: int) -> int:
    i %= l
    return min(i, l - i)


def half_index(l: int, i: int) -> int:
    """Normalized h with 2h = i (mod l), so that the even part of [i] is [h]^4."""
    return normalize_index(l, i * (l + 1) // 2)


def units(l: int) -> list[int]:
    """Normalized indices 1..m prime to l."""
    m = check_modulus(l)
    return [r for r in range(1, m + 1) if math.gcd(r, l) == 1]


@lru_cache(maxsize=256)
def _theta_exponents(l: int, i: int, bound: int) -> tuple[int, ...]:
    R = math.isqrt(max(bound - 1, 0)) + 1
    n = np.arange(-R, R + 1, dtype=np.int64)
    n = n[(n - i) % l == 0]
    return tuple(int(e) for e in n * n if e < bound)


def theta_series(l: int, i: int, bound: int) -> LaurentSeriesF2:
    """[i] for modulus l, known exactly below ``bound``."""
    check_modulus(l)
    if bound < 1:
        raise ValueError("bound must be >= 1")
    # n and -n land on the same exponent; from_exponents cancels such pairs,
    # which is what leaves [0] = 1.
    return LaurentSeriesF2.from_exponents(_theta_exponents(l, i % l, bound), bound)


def theta_power(l: int, i: int, e: int, bound: int) -> LaurentSeriesF2:
    """[i]^e below ``bound``, built from Frobenius twists of sparse theta series."""
    result = LaurentSeriesF2.one(bound)
    s = 0
    while e:
        if e & 1:
            q = 1 << s
            t = theta_series(l, i, -(-bound // q)).frobenius(q).truncate(bound)
            result = (result * t).truncate(bound)
        e >>= 1
        s += 1
    return result


# ---------------------------------------------------------------------------
# the ring S


class SPoly:
    """Formal polynomial over GF(2) in the generators [1], ..., [m].

    Evaluation can make distinct SPolys equal as series (the generators obey
    relations); equality here is equality of formal expressions.
    """

    __slots__ = ("l", "terms")

    def __init__(self, l: int, terms=()):
        self.l = l
        acc: set = set()
        for t in terms:
            acc ^= {tuple(t)}
        self.terms = frozenset(acc)

    @property
    def m(self) -> int:
        return (self.l - 1) // 2

    @classmethod
    def zero(cls, l: int) -> SPoly:
        return cls(l)

    @classmethod
    def one(cls, l: int) -> SPoly:
        return cls(l, [(0,) * ((l - 1) // 2)])

    @classmethod
    def gen(cls, l: int, k: int, e: int = 1) -> SPoly:
        """The monomial [k]^e, with k normalized mod +-l."""
        m = check_modulus(l)
        k = normalize_index(l, k)
        exps = [0] * m
        if k:
            exps[k - 1] = e
        return cls(l, [tuple(exps)])

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def _same(self, other: SPoly) -> None:
        if other.l != self.l:
            raise ValueError(f"modulus mismatch: {self.l} vs {other.l}")

    def __add__(self, other: SPoly) -> SPoly:
        self._same(other)
        out = SPoly(self.l)
        out.terms = self.terms ^ other.terms
        return out

    __sub__ = __add__

    def __mul__(self, other: SPoly) -> SPoly:
        self._same(other)
        acc: set = set()
        for a in self.terms:
            for b in other.terms:
                acc ^= {tuple(x + y for x, y in zip(a, b))}
        out = SPoly(self.l)
        out.terms = frozenset(acc)
        return out

    def __pow__(self, e: int) -> SPoly:
        if e < 0:
            raise ValueError("negative powers are not elements of S")
        result = SPoly.one(self.l)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base.frobenius(2)
        return result

    def frobenius(self, q: int) -> SPoly:
        """p^q for q a power of 2 (exponents scale, cross terms vanish)."""
        out = SPoly(self.l)
        out.terms = frozenset(tuple(q * x for x in t) for t in self.terms)
        return out

    def scaled(self, s: int) -> SPoly:
        """Substitute [k] -> [s k] in every generator."""
        out = SPoly.zero(self.l)
        for t in self.terms:
            mono = SPoly.one(self.l)
            for k, e in enumerate(t, start=1):
                if e:
                    mono = mono * SPoly.gen(self.l, s * k, e)
            out = out + mono
        return out

    def valuation_bound(self) -> int:
        """Lower bound on the valuation of the evaluated series ([k] starts at x^(k^2))."""
        if not self.terms:
            return 0
        return min(sum(e * k * k for k, e in enumerate(t, start=1)) for t in self.terms)

    def degree(self) -> int:
        return max((sum(t) for t in self.terms), default=0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SPoly):
            return NotImplemented
        return self.l == other.l and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.l, self.terms))

    def sorted_terms(self) -> list[tuple]:
        return sorted(self.terms, key=lambda t: (-sum(t), tuple(-x for x in t)))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for t in self.sorted_terms():
            s = "".join(
                f"[{k}]" + (f"^{e}" if e > 1 else "") for k, e in enumerate(t, start=1) if e
            )
            parts.append(s or "1")
        return "+".join(parts)

    def __repr__(self) -> str:
        return f"SPoly(l={self.l}, {self})"

    @classmethod
    def parse(cls, text: str, l: int) -> SPoly:
        """Parse ``[1]^5+[2]^5+[1][2]+[1]^2[2]^2``; indices fold mod +-l."""
        src = re.sub(r"\s+", "", text)
        if not src:
            raise ValueError("empty SPoly expression")
        out = cls.zero(l)
        for term in src.split("+"):
            if term in ("1", "0"):
                if term == "1":
                    out = out + cls.one(l)
                continue
            pos = 0
            mono = cls.one(l)
            factor = re.compile(r"\*?\[(-?\d+)\](?:\^(\d+))?")
            while pos < len(term):
                m = factor.match(term, pos)
                if not m:
                    raise ValueError(f"cannot parse SPoly term {term!r} at {term[pos:]!r}")
                mono = mono * cls.gen(l, int(m.group(1)), int(m.group(2) or 1))
                pos = m.end()
            out = out + mono
        return out


def eval_spoly(p: SPoly, bound: int) -> LaurentSeriesF2:
    """The series of p below ``bound``."""
    out = LaurentSeriesF2.zero(bound)
    cache: dict = {}
    for t in p.sorted_terms():
        val = LaurentSeriesF2.one(bound)
        for k, e in enumerate(t, start=1):
            if e:
                key = (k, e)
                if key not in cache:
                    cache[key] = theta_power(p.l, k, e, bound)
                val = (val * cache[key]).truncate(bound)
        out = out + val
    return out.truncate(bound)


# ---------------------------------------------------------------------------
# B(g), exceptional integers, congruence classes


def b_set(g, n_max: int) -> list[int]:
    """Sorted exponents n < n_max whose coefficient in 1/g is 1.

    ``g`` is a power series (LaurentSeriesF2) or an SPoly.
    """
    if isinstance(g, SPoly):
        v = g.valuation_bound()
        while True:
            series = eval_spoly(g, n_max + 2 * v + 1)
            if series.is_zero:
                raise ZeroDivisionError("division by zero series")
            if series.valuation == v:
                break
            v = series.valuation
    else:
        series = g
        if series.is_zero:
            raise ZeroDivisionError("division by zero series")
    inv = series.inverse()
    if inv.bound < n_max:
        need = n_max + 2 * series.valuation
        raise PrecisionError(f"B(g) below {n_max} needs g known to E={need}, have E={series.bound}")
    return [int(n) for n in inv.window(inv.valuation, n_max)]


def exceptional_set(l: int) -> list[int]:
    """Negative k lying in some B([r]) with r prime to l."""
    out: set[int] = set()
    for r in units(l):
        # 1/[r] = x^(-r^2) * (...); its negative part is settled by [r] mod x^(2 r^2)
        inv = theta_series(l, r, 2 * r * r).inverse()
        out.update(int(k) for k in inv.window(inv.valuation, 0))
    return sorted(out)


@dataclass(frozen=True, order=True)
class CongruenceClass:
    residue: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError("modulus must be positive")
        object.__setattr__(self, "residue", self.residue % self.modulus)

    def contains(self, n: int) -> bool:
        return n % self.modulus == self.residue

    def __str__(self) -> str:
        return f"{self.residue} mod {self.modulus}"


def two_part(k: int) -> int:
    """Largest power of 2 dividing k (k != 0)."""
    k = abs(k)
    return k & -k


def basic_classes(l: int) -> list[CongruenceClass]:
    out = {CongruenceClass(k, 8 * two_part(k)) for k in exceptional_set(l)}
    return sorted(out, key=lambda c: (c.modulus, c.residue))


def _u_residues(l: int) -> tuple[int, np.ndarray]:
    basic = basic_classes(l)
    M = max(c.modulus for c in basic)
    if M > 1 << 30:
        raise ValueError(f"basic modulus {M} too large")
    in_u = np.zeros(M, dtype=bool)
    for c in basic:
        in_u[c.residue :: c.modulus] = True
    return M, in_u


def u_residue_count(l: int) -> tuple[int, int]:
    """(number of residues mod M lying in U, M)."""
    M, in_u = _u_residues(l)
    return int(in_u.sum()), M


def ustar_classes(l: int) -> list[CongruenceClass]:
    """Complement of U as the coarsest dyadic classes, sorted by modulus then residue."""
    M, in_u = _u_residues(l)
    covered = np.zeros(M, dtype=bool)
    out = []
    q = 1
    while q <= M:
        for j in range(q):
            if covered[j::q].any() or in_u[j::q].any():
                continue
            out.append(CongruenceClass(j, q))
            covered[j::q] = True
        q *= 2
    return out


# ---------------------------------------------------------------------------
# symbolic projections


def _pow2_log(q: int) -> int:
    if q < 1 or q & (q - 1):
        raise ValueError(f"q must be a power of 2, got {q}")
    return q.bit_length() - 1


@lru_cache(maxsize=None)
def _gen_projections(l: int, k: int, q: int) -> tuple[SPoly, ...]:
    """p_{q,j}([k]) for j = 0..q-1, q in {1, 2, 4, 8}.

    With n = 2^e u (u odd), n^2 = 4^e u^2 and u^2 = 1 mod 8: the odd-n part of
    [k] sits at exponents 1 mod 8, the n = 2 (mod 4) part at 4 mod 32, the rest
    at 0 mod 16.  The odd-n part of [k] is [k] + [h(k)]^4.
    """
    h1 = half_index(l, k)
    h2 = half_index(l, h1)
    g = SPoly.gen(l, k)
    b4 = SPoly.gen(l, h1, 4)
    c16 = SPoly.gen(l, h2, 16)
    z = SPoly.zero(l)
    if q == 1:
        return (g,)
    if q in (2, 4):
        out = [z] * q
        out[0] = b4
        out[1] = g + b4
        return tuple(out)
    if q == 8:
        out = [z] * 8
        out[0] = c16
        out[1] = g + b4
        out[4] = b4 + c16
        return tuple(out)
    raise ValueError("use quotient ladder: generator projections exist only for q <= 8")


def _convolve(A: list[SPoly], B: list[SPoly], q: int) -> list[SPoly]:
    out = [SPoly.zero(A[0].l)] * q
    for a, fa in enumerate(A):
        if not fa:
            continue
        for b, fb in enumerate(B):
            if fb:
                out[(a + b) % q] = out[(a + b) % q] + fa * fb
    return out


@lru_cache(maxsize=None)
def _power_projections(l: int, k: int, s: int, q: int) -> tuple[SPoly, ...]:
    """p_{q,j}([k]^(2^s)) for all j."""
    t = 1 << s
    if t >= q:
        out = [SPoly.zero(l)] * q
        out[0] = SPoly.gen(l, k, t)
        return tuple(out)
    inner = _gen_projections(l, k, q // t)
    out = [SPoly.zero(l)] * q
    for j, f in enumerate(inner):
        out[j * t] = f.frobenius(t)
    return tuple(out)


@lru_cache(maxsize=4096)
def _monomial_projections(l: int, mono: tuple, q: int) -> tuple[SPoly, ...]:
    acc = [SPoly.zero(l)] * q
    acc[0] = SPoly.one(l)
    for k, e in enumerate(mono, start=1):
        s = 0
        while e:
            if e & 1:
                acc = _convolve(acc, list(_power_projections(l, k, s, q)), q)
            e >>= 1
            s += 1
    return tuple(acc)


def project_all(p: SPoly, q: int) -> list[SPoly]:
    """[p_{q,0}(p), ..., p_{q,q-1}(p)] as SPolys, q in {1, 2, 4, 8}."""
    _pow2_log(q)
    if q > 8:
        raise ValueError("use quotient ladder: S is only stable under p_{q,j} for q <= 8")
    out = [SPoly.zero(p.l)] * q
    for t in p.terms:
        for j, f in enumerate(_monomial_projections(p.l, t, q)):
            if f:
                out[j] = out[j] + f
    return out


def symbolic_project(p: SPoly, q: int, j: int) -> SPoly:
    if not 0 <= j < q:
        raise ValueError(f"residue j={j} must lie in [0, {q})")
    return project_all(p, q)[j]


def _pair_root(l: int, alpha: int, beta: int) -> SPoly:
    """Square root of p_{2,1}([alpha]) p_{2,1}([beta]).

    With alpha = 2i, beta = 2j this product is [i+j]^2[i-j]^2 + [i]^4[j]^4.
    """
    i, j = half_index(l, alpha), half_index(l, beta)
    # i, j are only defined up to sign; the product is symmetric in that choice
    return SPoly.gen(l, i + j) * SPoly.gen(l, i - j) + SPoly.gen(l, i, 2) * SPoly.gen(l, j, 2)


def sqrt_even_part(w: SPoly) -> SPoly:
    """G with G^2 = p_{2,0}(w), built monomial by monomial.

    A monomial is A^2 times a product of distinct generators; p_{2,0} of the
    latter is a sum over even-size subsets T of products of odd parts (for T)
    and even parts (off T).  Odd parts are paired off, each pair being a
    square, so every summand has an explicit square root.
    """
    l = w.l
    out = SPoly.zero(l)
    for t in w.terms:
        half = SPoly(l, [tuple(e // 2 for e in t)])
        odd = [k for k, e in enumerate(t, start=1) if e % 2]
        acc = SPoly.zero(l)
        for size in range(0, len(odd) + 1, 2):
            for T in combinations(odd, size):
                root = SPoly.one(l)
                for a, b in zip(T[0::2], T[1::2]):
                    root = root * _pair_root(l, a, b)
                for k in odd:
                    if k not in T:
                        root = root * SPoly.gen(l, half_index(l, k), 2)
                acc = acc + root
        out = out + half * acc
    return out


def _termwise_root(p: SPoly) -> SPoly:
    if any(e % 2 for t in p.terms for e in t):
        raise ValueError("not a certified square")
    out = SPoly(p.l)
    out.terms = frozenset(tuple(e // 2 for e in t) for t in p.terms)
    return out


def half_square_root(p: SPoly, source: SPoly | None = None, max_steps: int = 100_000) -> SPoly:
    """G with eval(G)^2 = eval(p), for p an expansion of p_{2,0}.

    When ``source`` is given, p must equal ``symbolic_project(source, 2, 0)`` and
    the root is assembled from the structure of ``source``.  Otherwise monomials
    with two or more odd exponents are rewritten with the quintic relation
    [2i][2j] = [i]^4[2j] + [j]^4[2i] + [i+j]^2[i-j]^2 until every exponent is
    even.
    """
    l = p.l
    if source is not None:
        if symbolic_project(source, 2, 0) != p:
            raise ValueError("not a certified square: p is not p_{2,0}(source)")
        return sqrt_even_part(source)
    work = set(p.terms)
    steps = 0
    while True:
        target = None
        for t in sorted(work):
            odd = [k for k, e in enumerate(t, start=1) if e % 2]
            if len(odd) >= 2:
                target = (t, odd[0], odd[1])
                break
        if target is None:
            break
        steps += 1
        if steps > max_steps:
            raise ValueError("not a certified square: rewriting did not terminate")
        t, alpha, beta = target
        rest = list(t)
        rest[alpha - 1] -= 1
        rest[beta - 1] -= 1
        i, j = half_index(l, alpha), half_index(l, beta)
        repl = (
            SPoly.gen(l, i, 4) * SPoly.gen(l, beta)
            + SPoly.gen(l, j, 4) * SPoly.gen(l, alpha)
            + SPoly.gen(l, i + j, 2) * SPoly.gen(l, i - j, 2)
        ) * SPoly(l, [tuple(rest)])
        work ^= {t}
        work ^= set(repl.terms)
    return _termwise_root(SPoly(l, work))


# ---------------------------------------------------------------------------
# density counts


def progression_start(l: int, r: int, cls: CongruenceClass) -> int:
    """Smallest n >= -r^2 with n = -r^2 (mod l) and n in ``cls``."""
    M = cls.modulus
    t = ((cls.residue + r * r) * pow(l, -1, M)) % M if M > 1 else 0
    return -r * r + t * l


def density_count(
    l: int, r: int, cls: CongruenceClass, X: int, emax: int | None = None
) -> int:
    """How many of the first X admissible n in ``cls`` lie in B([r])."""
    if math.gcd(r, l) != 1:
        raise ValueError(f"r={r} is not prime to l={l}")
    _pow2_log(cls.modulus)
    r = normalize_index(l, r)
    step = l * cls.modulus
    n0 = progression_start(l, r, cls)
    n_last = n0 + (X - 1) * step
    need = n_last + 1 + 2 * r * r
    if emax is not None and need > emax:
        raise MemoryError(f"density count needs precision E={need}, ceiling is {emax}")
    inv = theta_series(l, r, need).inverse()
    bits = inv.bits()
    start = n0 - inv.valuation
    return int(bits[start : start + (X - 1) * step + 1 : step].sum(dtype=np.int64))
