"""Write p_{q,j}(1/[r]) as a quotient of polynomials in the theta generators.

With a = [r] we keep p_{q,j}(1/a) = (w/a)^P evaluated through projections.
While q > 8 and j is even, p_{q,j}(w/a) = p_{q,j}(p_{2,0}(w a)/a^2) and
p_{2,0}(w a) = G^2 with G = sqrt_even_part(w a), so the problem becomes
p_{q/2,j/2}(G/a) squared.  Once q <= 8, p_{q,j}(w/a) = p_{q,j}(w a^(q-1))/a^q
and the numerator is an explicit element of S.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..groebner import PolyF2m, from_spoly
from ..series import LaurentSeriesF2
from ..theta import SPoly, eval_spoly, normalize_index, sqrt_even_part, symbolic_project, theta_series

CROSS_CHECK_BOUND = 2048


class LadderError(ValueError):
    pass


@dataclass(frozen=True)
class Ladder:
    """p_{q,j}(1/[r]) = phi_r(u)/phi_r(v), where u = root_u^power, v = root_v^power.

    Unpacks as ``u, v``.  Certifying root_u/root_v is enough, since S is closed
    under powers.
    """

    l: int
    r: int
    q: int
    j: int
    root_u: PolyF2m
    root_v: PolyF2m
    power: int
    num: SPoly
    den: SPoly

    @property
    def u(self) -> PolyF2m:
        return self.root_u**self.power

    @property
    def v(self) -> PolyF2m:
        return self.root_v**self.power

    def __iter__(self):
        return iter((self.u, self.v))

    def series(self, bound: int) -> LaurentSeriesF2:
        """The quotient evaluated from generator series known below ``bound``."""
        base = eval_spoly(self.num, bound) / eval_spoly(self.den, bound)
        return base.frobenius(self.power) if self.power > 1 else base


def direct_projection(l: int, r: int, q: int, j: int, bound: int) -> LaurentSeriesF2:
    return theta_series(l, r, bound).inverse().project(q, j)


def ladder_spolys(l: int, r: int, q: int, j: int) -> tuple[SPoly, SPoly, int]:
    """(num, den, power) with p_{q,j}(1/[r]) = (num/den)^power."""
    if math.gcd(r, l) != 1:
        raise ValueError(f"r={r} is not prime to l={l}")
    if q < 1 or q & (q - 1):
        raise ValueError(f"q must be a power of 2, got {q}")
    if not 0 <= j < q:
        raise ValueError(f"residue j={j} must lie in [0, {q})")
    a = SPoly.gen(l, r)
    w = SPoly.one(l)
    power = 1
    while q > 8:
        if j % 2:
            raise LadderError("no S-level ladder; not attempted")
        w = sqrt_even_part(w * a)
        q //= 2
        j //= 2
        power *= 2
    num = symbolic_project(w * a ** (q - 1), q, j)
    return num, a**q, power


def quotient_ladder(l: int, r: int, q: int, j: int, check_bound: int = CROSS_CHECK_BOUND) -> Ladder:
    num, den, power = ladder_spolys(l, r, q, j)
    r = normalize_index(l, r)
    lad = Ladder(l, r, q, j, from_spoly(num, r), from_spoly(den, r), power, num, den)
    got = lad.series(check_bound)
    want = direct_projection(l, r, q, j, check_bound)
    bad = got.first_mismatch(want)
    if bad is not None:
        raise AssertionError(f"ladder for p_{{{q},{j}}}(1/[{r}]) mod {l} disagrees at x^{bad}")
    return lad
