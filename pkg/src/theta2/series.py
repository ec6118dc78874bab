"""Laurent series over GF(2) with an explicit precision window.

A :class:`LaurentSeriesF2` stores the coefficients of ``x^valuation`` up to
(but excluding) ``x^bound``.  Everything below ``valuation`` is known to be
zero; nothing at or above ``bound`` is known.  Every operation propagates the
window so that a result never claims more precision than its inputs justify.
"""

from __future__ import annotations

import re
from typing import Iterable

import numpy as np

from . import _kernels as K


class PrecisionError(ValueError):
    """A coefficient was requested outside the known window."""


def _is_pow2(q: int) -> bool:
    return q >= 1 and q & (q - 1) == 0


class LaurentSeriesF2:
    """Immutable bit-packed Laurent series over GF(2).

    For a nonzero series bit 0 of the packed words is the coefficient of
    ``x^valuation`` and is always 1.  The zero series has no words and
    ``valuation == bound``.
    """

    __slots__ = ("valuation", "bound", "_words")

    def __init__(self, valuation: int, bound: int, words: np.ndarray):
        self.valuation = int(valuation)
        self.bound = int(bound)
        words.setflags(write=False)
        self._words = words

    # -- construction -----------------------------------------------------

    @classmethod
    def zero(cls, bound: int) -> LaurentSeriesF2:
        return cls(bound, bound, np.zeros(0, dtype=K.U64))

    @classmethod
    def one(cls, bound: int) -> LaurentSeriesF2:
        return cls.monomial(0, bound)

    @classmethod
    def monomial(cls, k: int, bound: int) -> LaurentSeriesF2:
        if k >= bound:
            return cls.zero(bound)
        w = K.zeros(bound - k)
        w[0] = 1
        return cls(k, bound, w)

    @classmethod
    def from_exponents(cls, exponents: Iterable[int], bound: int) -> LaurentSeriesF2:
        """Sum of ``x^e``; repeated exponents cancel in pairs."""
        exps = np.fromiter((int(e) for e in exponents), dtype=np.int64)
        exps = exps[exps < bound]
        if exps.size == 0:
            return cls.zero(bound)
        lo = int(exps.min())
        words = K.from_positions(exps - lo, bound - lo)
        return cls._normalized(lo, bound, words)

    @classmethod
    def from_bits(cls, bits, valuation: int, bound: int) -> LaurentSeriesF2:
        """Series whose coefficient of ``x^(valuation+t)`` is ``bits[t]``."""
        bits = np.asarray(bits, dtype=np.uint8)
        n = bound - valuation
        if bits.size != n:
            raise ValueError(f"expected {n} bits, got {bits.size}")
        return cls._normalized(valuation, bound, K.from_bits(bits))

    @classmethod
    def _normalized(cls, offset: int, bound: int, words: np.ndarray) -> LaurentSeriesF2:
        """Series for ``words`` read from exponent ``offset``; renormalizes the valuation."""
        if bound <= offset:
            return cls.zero(bound)
        nbits = bound - offset
        t0 = K.lowest_bit(words)
        if t0 < 0 or t0 >= nbits:
            return cls.zero(bound)
        if t0 == 0:
            return cls(offset, bound, K.truncate(words, nbits))
        return cls(offset + t0, bound, K.shift_down(words, t0, nbits - t0))

    # -- basic properties ------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self._words.size == 0

    @property
    def nbits(self) -> int:
        return self.bound - self.valuation

    @property
    def words(self) -> np.ndarray:
        return self._words

    def bits(self) -> np.ndarray:
        return K.to_bits(self._words, self.nbits)

    def weight(self) -> int:
        """Number of nonzero coefficients inside the window."""
        return K.popcount(self._words)

    def exponents(self) -> np.ndarray:
        if self.is_zero:
            return np.zeros(0, dtype=np.int64)
        return K.positions(self._words, self.nbits) + self.valuation

    def coeff(self, n: int) -> int:
        if n >= self.bound:
            raise PrecisionError(
                f"coefficient of x^{n} is outside precision window (bound {self.bound})"
            )
        if n < self.valuation:
            return 0
        t = n - self.valuation
        return int((int(self._words[t >> 6]) >> (t & 63)) & 1)

    def window(self, lo: int, hi: int) -> np.ndarray:
        """Exponents in ``[lo, hi)`` with coefficient 1."""
        if hi > self.bound:
            raise PrecisionError(
                f"window end {hi} is outside precision window (bound {self.bound})"
            )
        e = self.exponents()
        return e[(e >= lo) & (e < hi)]

    def is_power_series(self) -> bool:
        return self.is_zero or self.valuation >= 0

    # -- arithmetic -------------------------------------------------------------

    def _aligned(self, lo: int, bound: int) -> np.ndarray:
        """Words of self read from exponent ``lo`` over ``[lo, bound)``."""
        n = bound - lo
        if self.is_zero or self.valuation >= bound:
            return K.zeros(n)
        return K.shift_up(self._words, self.valuation - lo, n)

    def __add__(self, other: LaurentSeriesF2) -> LaurentSeriesF2:
        if not isinstance(other, LaurentSeriesF2):
            return NotImplemented
        bound = min(self.bound, other.bound)
        lo = min(self.valuation, other.valuation)
        if lo >= bound:
            return LaurentSeriesF2.zero(bound)
        words = self._aligned(lo, bound) ^ other._aligned(lo, bound)
        return LaurentSeriesF2._normalized(lo, bound, words)

    __sub__ = __add__

    def __mul__(self, other: LaurentSeriesF2) -> LaurentSeriesF2:
        if not isinstance(other, LaurentSeriesF2):
            return NotImplemented
        if self.is_zero or other.is_zero:
            # a zero factor is known to vanish below its bound
            return LaurentSeriesF2.zero(self.valuation + other.valuation)
        v = self.valuation + other.valuation
        bound = min(self.bound + other.valuation, other.bound + self.valuation)
        n = bound - v
        return LaurentSeriesF2(v, bound, K.mul(self._words, other._words, n))

    def square(self) -> LaurentSeriesF2:
        if self.is_zero:
            return LaurentSeriesF2.zero(2 * self.bound)
        n = 2 * self.nbits
        return LaurentSeriesF2(2 * self.valuation, 2 * self.bound, K.truncate(K.spread(self._words), n))

    def frobenius(self, q: int) -> LaurentSeriesF2:
        """The q-th power, i.e. ``x -> x^q`` applied to every exponent (q a power of 2)."""
        if not _is_pow2(q):
            raise ValueError(f"q must be a power of 2, got {q}")
        if self.is_zero:
            return LaurentSeriesF2.zero(q * self.bound)
        return LaurentSeriesF2(q * self.valuation, q * self.bound, K.stretch(self._words, self.nbits, q))

    def inverse(self) -> LaurentSeriesF2:
        """Reciprocal by Newton iteration ``g <- f g^2`` (valid in characteristic 2)."""
        if self.is_zero:
            raise ZeroDivisionError("division by zero series")
        n = self.nbits
        f = self._words
        g = np.ones(1, dtype=K.U64)
        k = 1
        while k < n:
            k2 = min(2 * k, n)
            g2 = K.truncate(K.spread(g), k2)
            g = K.mul(K.truncate(f, k2), g2, k2)
            k = k2
        g = K.truncate(g, n)
        return LaurentSeriesF2(-self.valuation, self.bound - 2 * self.valuation, g)

    def __truediv__(self, other: LaurentSeriesF2) -> LaurentSeriesF2:
        if not isinstance(other, LaurentSeriesF2):
            return NotImplemented
        return self * other.inverse()

    def __pow__(self, e: int) -> LaurentSeriesF2:
        e = int(e)
        if e < 0:
            return self.inverse() ** (-e)
        if e == 0:
            if self.is_zero:
                raise ZeroDivisionError("0^0 is undefined")
            return LaurentSeriesF2.one(self.nbits)
        result = None
        base = self
        while e:
            if e & 1:
                result = base if result is None else result * base
            e >>= 1
            if e:
                base = base.square()
        return result

    def shift(self, k: int) -> LaurentSeriesF2:
        """Multiply by ``x^k``."""
        if self.is_zero:
            return LaurentSeriesF2.zero(self.bound + k)
        return LaurentSeriesF2(self.valuation + k, self.bound + k, self._words.copy())

    def truncate(self, bound: int) -> LaurentSeriesF2:
        if bound >= self.bound:
            return self
        if self.is_zero or bound <= self.valuation:
            return LaurentSeriesF2.zero(bound)
        return LaurentSeriesF2._normalized(self.valuation, bound, K.truncate(self._words, bound - self.valuation))

    def project(self, q: int, j: int) -> LaurentSeriesF2:
        """Keep only the coefficients at exponents congruent to ``j`` mod ``q``."""
        if not _is_pow2(q):
            raise ValueError(f"q must be a power of 2, got {q}")
        if not 0 <= j < q:
            raise ValueError(f"residue j={j} must lie in [0, {q})")
        if self.is_zero:
            return self
        mask = K.residue_mask(self.nbits, self.valuation, q, j)
        return LaurentSeriesF2._normalized(self.valuation, self.bound, self._words & mask)

    # -- comparison -------------------------------------------------------------

    def first_mismatch(self, other: LaurentSeriesF2) -> int | None:
        """Smallest exponent where the two series differ on their common window."""
        diff = self + other
        return None if diff.is_zero else diff.valuation

    def agrees(self, other: LaurentSeriesF2) -> bool:
        return self.first_mismatch(other) is None

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentSeriesF2):
            return NotImplemented
        return (
            self.valuation == other.valuation
            and self.bound == other.bound
            and np.array_equal(self._words, other._words)
        )

    def __hash__(self) -> int:
        return hash((self.valuation, self.bound, self._words.tobytes()))

    def __repr__(self) -> str:
        if self.is_zero:
            return f"LaurentSeriesF2(0, bound={self.bound})"
        e = self.exponents()
        head = " + ".join(f"x^{int(k)}" for k in e[:6])
        more = " + ..." if e.size > 6 else ""
        return f"LaurentSeriesF2({head}{more}, bound={self.bound})"

    # -- text dump ------------------------------------------------------------

    def dump(self) -> str:
        """Header ``v=<valuation> E=<bound>`` then the nonzero exponents."""
        body = " ".join(str(int(e)) for e in self.exponents())
        return f"v={self.valuation} E={self.bound}\n{body}\n"

    @classmethod
    def parse_dump(cls, text: str) -> LaurentSeriesF2:
        lines = text.strip("\n").split("\n")
        m = re.fullmatch(r"v=(-?\d+) E=(-?\d+)", lines[0].strip())
        if not m:
            raise ValueError(f"bad series header: {lines[0]!r}")
        v, bound = int(m.group(1)), int(m.group(2))
        exps = [int(t) for t in " ".join(lines[1:]).split()]
        s = cls.from_exponents(exps, bound)
        if not s.is_zero and s.valuation != v:
            raise ValueError(f"header valuation {v} does not match first exponent {s.valuation}")
        return s


def add(f: LaurentSeriesF2, g: LaurentSeriesF2) -> LaurentSeriesF2:
    return f + g


def mul(f: LaurentSeriesF2, g: LaurentSeriesF2) -> LaurentSeriesF2:
    return f * g


def square(f: LaurentSeriesF2) -> LaurentSeriesF2:
    return f.square()


def inverse(f: LaurentSeriesF2) -> LaurentSeriesF2:
    return f.inverse()


def project(f: LaurentSeriesF2, q: int, j: int) -> LaurentSeriesF2:
    return f.project(q, j)


def coeff_at(f: LaurentSeriesF2, n: int) -> int:
    return f.coeff(n)


def reference_mul(f: LaurentSeriesF2, g: LaurentSeriesF2) -> LaurentSeriesF2:
    """Product through the quadratic reference multiplier, for cross-checks."""
    if f.is_zero or g.is_zero:
        return f * g
    v = f.valuation + g.valuation
    bound = min(f.bound + g.valuation, g.bound + f.valuation)
    return LaurentSeriesF2(v, bound, K.reference_mul(f.words, g.words, bound - v))
