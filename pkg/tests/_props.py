"""Random series and the series-level properties shared by unit and acceptance tests."""

import numpy as np

from theta2 import _kernels as K
from theta2.series import LaurentSeriesF2, reference_mul


def random_series(rng, width=1024, vmin=-40, vmax=40, density=0.5, nonzero=True):
    v = int(rng.integers(vmin, vmax + 1))
    bits = (rng.random(width) < density).astype(np.uint8)
    if nonzero:
        bits[0] = 1
    return LaurentSeriesF2.from_bits(bits, v, v + width)


def random_q(rng, qmax=16):
    q = 1 << int(rng.integers(0, qmax.bit_length()))
    return q, int(rng.integers(0, q))


def ring_laws(f, g, h):
    return (
        (f * g).agrees(g * f)
        and ((f * g) * h).agrees(f * (g * h))
        and (f * (g + h)).agrees(f * g + f * h)
        and (f + g).agrees(g + f)
        and (f + f).is_zero
    )


def newton_contract(f):
    g = f.inverse()
    if g.valuation != -f.valuation or g.bound != f.bound - 2 * f.valuation:
        return False
    one = f * g
    return one.bound == f.bound - f.valuation and one.agrees(LaurentSeriesF2.one(one.bound))


def projection_rules(f, q, j):
    p = f.project(q, j)
    if p.project(q, j) != p:
        return False
    total = LaurentSeriesF2.zero(f.bound)
    for k in range(q):
        total = total + f.project(q, k)
    if not total.agrees(f) or total.bound != f.bound:
        return False
    for jj in range(2 * q):
        finer = p.project(2 * q, jj)
        want = f.project(2 * q, jj) if jj % q == j else LaurentSeriesF2.zero(f.bound)
        if not finer.agrees(want):
            return False
    return True


def product_rule(f, g, q, j):
    lhs = (f * g).project(q, j)
    fp = [f.project(q, a) for a in range(q)]
    gp = [g.project(q, b) for b in range(q)]
    rhs = None
    for a in range(q):
        term = fp[a] * gp[(j - a) % q]
        rhs = term if rhs is None else rhs + term
    return lhs.agrees(rhs)


def frobenius_rule(f, q, j):
    return f.square().project(2 * q, 2 * j).agrees(f.project(q, j).square())


def multiplier_agrees(f, g):
    fast = f * g
    slow = reference_mul(f, g)
    return fast == slow


def random_pair_words(rng, nbits):
    a = K.mask_tail(rng.integers(0, 2**63, K.nwords(nbits), dtype=np.uint64), nbits)
    b = K.mask_tail(rng.integers(0, 2**63, K.nwords(nbits), dtype=np.uint64), nbits)
    return a, b
