import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from theta2 import golden
from theta2.series import LaurentSeriesF2, PrecisionError
from theta2.theta import (
    CongruenceClass,
    SPoly,
    b_set,
    basic_classes,
    density_count,
    eval_spoly,
    exceptional_set,
    half_index,
    half_square_root,
    normalize_index,
    progression_start,
    sqrt_even_part,
    symbolic_project,
    theta_power,
    theta_series,
    u_residue_count,
    units,
    ustar_classes,
)

MODULI = (3, 5, 7, 9, 11, 13, 15)


def squares_in_class(l, i, bound):
    """Exponents of [i] below bound: n and -n cancel unless exactly one lies in the class."""
    out = [0] if i % l == 0 else []
    for k in range(1, math.isqrt(bound - 1) + 1):
        if ((k - i) % l == 0) != ((-k - i) % l == 0):
            out.append(k * k)
    return out


def test_theta_examples():
    assert theta_series(3, 0, 100) == LaurentSeriesF2.one(100)
    assert theta_series(3, 1, 30).exponents().tolist() == [1, 4, 16, 25]
    assert theta_series(9, 4, 120).exponents().tolist() == [16, 25]
    assert theta_series(9, 13, 500) == theta_series(9, 4, 500)


@pytest.mark.parametrize("l", MODULI)
def test_theta_against_enumeration(l):
    for i in range(l):
        expect = squares_in_class(l, i, 3000)
        assert theta_series(l, i, 3000).exponents().tolist() == expect


def test_normalize_and_half_index():
    assert normalize_index(9, 13) == 4 and normalize_index(9, -2) == 2 and normalize_index(9, 9) == 0
    assert half_index(3, 1) == 1 and half_index(5, 1) == 2 and half_index(11, 0) == 0
    for l in MODULI:
        for i in range(l):
            assert (2 * half_index(l, i) - i) % l == 0 or (2 * half_index(l, i) + i) % l == 0


def test_theta_power_matches_repeated_product():
    f = theta_series(7, 2, 3000)
    for e in (1, 2, 3, 5, 8, 13):
        assert theta_power(7, 2, e, 3000).agrees(f**e)


def test_spoly_parse_and_cancellation():
    p = SPoly.parse("[1]^5+[2]^5+[1][2]+[1]^2[2]^2", 5)
    assert len(p.terms) == 4
    assert SPoly.parse("[1][7] + [6][-2]", 5) == SPoly.zero(5)
    assert SPoly.parse("[5]^3", 5) == SPoly.one(5)
    assert str(SPoly.parse("[2] + [1]^2", 5)) == "[1]^2+[2]"
    with pytest.raises(ValueError):
        SPoly.parse("[1", 5)


def test_eval_spoly_examples():
    E = 4096
    a = theta_series(5, 1, E)
    assert eval_spoly(SPoly.gen(5, 1, 4), E).agrees(a.square().square())
    assert eval_spoly(SPoly.parse("[1]^5+[2]^5+[1][2]+[1]^2[2]^2", 5), E).is_zero
    assert eval_spoly(SPoly.zero(5), E).is_zero


def test_b_set_examples():
    assert all(n % 3 == 2 for n in b_set(theta_series(3, 1, 3000), 2990))
    assert min(b_set(theta_series(9, 2, 400), 300)) == -4
    assert b_set(LaurentSeriesF2.from_exponents([0, 1], 10), 10) == list(range(10))
    assert b_set(SPoly.gen(3, 1), 100) == b_set(theta_series(3, 1, 200), 100)


def test_b_set_precision_error_names_bound():
    with pytest.raises(PrecisionError, match="E="):
        b_set(theta_series(3, 1, 50), 100)


@pytest.mark.parametrize("l", MODULI)
def test_b_set_congruence_and_minimum(l):
    for r in units(l):
        members = b_set(theta_series(l, r, 6000), 5000)
        assert all((n + r * r) % l == 0 for n in members)
        assert min(members) >= -r * r


def test_exceptional_sets():
    assert exceptional_set(3) == [-1]
    assert exceptional_set(9) == [-16, -7, -4, -1]
    assert {-1, -4} <= set(exceptional_set(5))


def test_basic_classes_examples():
    assert basic_classes(3) == [CongruenceClass(7, 8)]
    assert set(basic_classes(9)) == {CongruenceClass(*c) for c in golden.BASIC_CLASSES_9}
    for l in MODULI:
        for c in basic_classes(l):
            assert any(k % c.modulus == c.residue for k in exceptional_set(l))


@pytest.mark.parametrize("l", MODULI)
def test_ustar_table(l):
    got = {}
    for c in ustar_classes(l):
        got.setdefault(c.modulus, []).append(c.residue)
    assert {q: tuple(sorted(v)) for q, v in got.items()} == golden.USTAR_TABLE[l]


@pytest.mark.parametrize("l", MODULI)
def test_basic_and_ustar_partition(l):
    basic, ustar = basic_classes(l), ustar_classes(l)
    M = max(c.modulus for c in basic + ustar)
    for n in range(2 * M + 1):
        inside = sum(c.contains(n) for c in basic)
        outside = sum(c.contains(n) for c in ustar)
        assert (inside > 0) != (outside > 0)
        assert outside <= 1


def test_u_count_for_9():
    assert u_residue_count(9) == (golden.U_RESIDUES_9_MOD_128, 128)


def test_inverse_leading_terms():
    for (l, r), exps in golden.INVERSE_NEGATIVE_EXPONENTS.items():
        inv = theta_series(l, r, 4 * r * r + 4).inverse()
        assert inv.window(inv.valuation, 0).tolist() == list(exps)


# -- symbolic projection -----------------------------------------------------------


def test_symbolic_project_examples():
    for l in (5, 7, 9, 11):
        for i in range(1, (l - 1) // 2 + 1):
            two, four = SPoly.gen(l, 2 * i), SPoly.gen(l, 4 * i)
            assert symbolic_project(two, 8, 1) == two + SPoly.gen(l, i, 4)
            assert symbolic_project(four, 8, 0) == SPoly.gen(l, i, 16)
            assert symbolic_project(four, 8, 4) == SPoly.gen(l, 2 * i, 4) + SPoly.gen(l, i, 16)


def test_symbolic_project_rejects_fine_moduli():
    with pytest.raises(ValueError, match="quotient ladder"):
        symbolic_project(SPoly.gen(5, 1), 16, 0)


def random_spoly(rng, l, terms=3, max_exp=3):
    m = (l - 1) // 2
    monos = [tuple(int(x) for x in rng.integers(0, max_exp + 1, m)) for _ in range(terms)]
    return SPoly(l, monos)


@settings(max_examples=60)
@given(st.integers(0, 2**32 - 1))
def test_symbolic_projection_matches_series(seed):
    rng = np.random.default_rng(seed)
    l = int(rng.choice([5, 7, 9, 11]))
    p = random_spoly(rng, l)
    q = int(rng.choice([2, 4, 8]))
    E = 1024
    series = eval_spoly(p, E)
    for j in range(q):
        assert eval_spoly(symbolic_project(p, q, j), E).agrees(series.project(q, j))


@pytest.mark.parametrize("l", MODULI)
def test_even_index_projects_to_fourth_power(l):
    for i in range(l):
        assert theta_series(l, 2 * i, 2048).project(2, 0).agrees(theta_power(l, i, 4, 2048))


@pytest.mark.parametrize("l", MODULI)
def test_product_projection_and_quintic_relation(l):
    E = 2048
    t = lambda k: theta_series(l, k, E)  # noqa: E731
    for i, j in itertools.product(range(l), repeat=2):
        pair = (t(i + j) * t(i - j)).square()
        assert (t(2 * i) * t(2 * j)).project(2, 0).agrees(pair)
        rel = t(i).square().square() * t(2 * j) + t(j).square().square() * t(2 * i) + t(2 * i) * t(2 * j) + pair
        assert rel.is_zero


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1))
def test_half_square_root_of_monomial_products(seed):
    rng = np.random.default_rng(seed)
    l = int(rng.choice([5, 7, 9, 11, 13]))
    w = random_spoly(rng, l, terms=1, max_exp=4)
    p = symbolic_project(w, 2, 0)
    E = 2048
    target = eval_spoly(p, E)
    for root in (half_square_root(p), half_square_root(p, source=w), sqrt_even_part(w)):
        assert eval_spoly(root, E // 2).square().agrees(target)


def test_half_square_root_examples():
    l = 11
    for i, j in [(1, 2), (2, 5), (3, 4)]:
        assert half_square_root(SPoly.gen(l, i, 4) * SPoly.gen(l, j, 4)) == SPoly.gen(l, i, 2) * SPoly.gen(l, j, 2)
        p = symbolic_project(SPoly.gen(l, 2 * i) * SPoly.gen(l, 2 * j), 2, 0)
        root = half_square_root(p)
        E = 2048
        assert eval_spoly(root, E).agrees(eval_spoly(SPoly.gen(l, i + j) * SPoly.gen(l, i - j), E))


def test_half_square_root_rejects_non_squares():
    with pytest.raises(ValueError, match="not a certified square"):
        half_square_root(SPoly.gen(5, 1))
    with pytest.raises(ValueError, match="not a certified square"):
        half_square_root(SPoly.gen(5, 1, 2), source=SPoly.gen(5, 2))


# -- density -------------------------------------------------------------------------


def test_progression_start():
    for l, r, cls in [(3, 1, CongruenceClass(7, 8)), (9, 4, CongruenceClass(2, 4)), (7, 3, CongruenceClass(14, 16))]:
        n0 = progression_start(l, r, cls)
        assert -r * r <= n0 < -r * r + l * cls.modulus
        assert (n0 + r * r) % l == 0 and cls.contains(n0)


def brute_density(l, r, cls, X):
    inv = theta_series(l, r, 40 * X * l * cls.modulus).inverse()
    hits = 0
    n, seen = -r * r, 0
    while seen < X:
        if (n + r * r) % l == 0 and cls.contains(n):
            hits += inv.coeff(n)
            seen += 1
        n += 1
    return hits


def test_density_small_against_scan():
    for l, r, cls in [(3, 1, CongruenceClass(7, 8)), (7, 2, CongruenceClass(14, 16)), (9, 4, CongruenceClass(2, 4))]:
        assert density_count(l, r, cls, 300) == brute_density(l, r, cls, 300)


def test_density_examples():
    assert density_count(3, 1, CongruenceClass(7, 8), 131072) == 65411
    assert density_count(7, 3, CongruenceClass(14, 16), 65536) == 32981


def test_density_errors():
    with pytest.raises(ValueError):
        density_count(9, 3, CongruenceClass(1, 8), 10)
    with pytest.raises(MemoryError, match="E="):
        density_count(9, 1, CongruenceClass(1, 8), 10**6, emax=10**5)
