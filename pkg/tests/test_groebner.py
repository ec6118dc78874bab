import random

import pytest
import sympy

from theta2.groebner import (
    GroebnerBudgetExceeded,
    IdealF2,
    PolyF2m,
    buchberger,
    certificate,
    certify_quotient,
    from_spoly,
    ideal_equal,
    ideal_member,
    is_groebner,
    normal_form,
    phi_r,
    quintic_generators,
    quintic_ideal,
    quintic_relation,
    ring,
    s_polynomial,
    to_spoly,
)
from theta2.theta import SPoly, theta_series, units

MODULI = (5, 7, 9, 11, 13, 15)


def P(text, m):
    return PolyF2m.parse(text, m)


# -- monomials and parsing ---------------------------------------------------------


def test_grevlex_order():
    R = ring(3)
    # degree first, then the smaller exponent on the last variable wins
    seq = [(0, 0, 2), (0, 1, 1), (1, 0, 1), (0, 2, 0), (1, 1, 0), (2, 0, 0), (0, 0, 3)]
    keys = [R.encode(e) for e in seq]
    assert keys == sorted(keys)
    assert R.decode(R.mul(R.encode((1, 2, 3)), R.encode((3, 0, 1)))) == (4, 2, 4)


def test_exponent_overflow_is_detected():
    R = ring(2)
    big = R.encode((R.max_exp, 0))
    with pytest.raises(OverflowError):
        R.mul(big, big)
    with pytest.raises(OverflowError):
        R.encode((R.max_exp + 1, 0))


def test_parse_and_print():
    p = P("x2^2*(x1+x2^4)", 2)
    assert str(p) == "x2^6+x1*x2^2"
    assert P("x1 x2 + x2 x1 + 1 + 3", 2).is_zero()
    assert P("(x1+x2)^2", 2) == P("x1^2+x2^2", 2)
    with pytest.raises(ValueError):
        P("x3", 2)
    with pytest.raises(ValueError):
        P("x1+", 2)


# -- reduction and bases ------------------------------------------------------------


def test_normal_form_examples():
    p = P("x1^3 + x1 x2 + x2^5", 2)
    assert normal_form(p, [p]).is_zero()
    assert normal_form(P("x1^2", 2), [P("x1", 2)]).is_zero()
    gb = quintic_ideal(5).basis()
    r21 = quintic_relation(5, 2, 1)
    x1, x2 = P("x1", 2), P("x2", 2)
    assert normal_form(r21 * x1 + x2, gb) == normal_form(x2, gb)


def test_buchberger_examples():
    assert buchberger([P("x1", 2)]).polys == [P("x1", 2)]
    assert buchberger([P("x1 x2 + x2", 2), P("x2", 2)]).polys == [P("x2", 2)]
    gb = quintic_ideal(5).basis()
    assert normal_form(quintic_relation(5, 2, 1), gb).is_zero()


def test_quintic_generators_listed():
    assert quintic_generators(5) == [P("x1^5+x2^5+x1x2+x1^2x2^2", 2)]
    assert P("x1^5+x3^4x2+x1x2+x2^2x3^2", 3) in quintic_generators(7)
    assert len(quintic_generators(7)) == 3 and len(quintic_generators(9)) == 6
    assert len(quintic_generators(15)) == 21


@pytest.mark.parametrize("l", MODULI)
def test_quintic_relations_vanish(l):
    for g in quintic_generators(l):
        for r in units(l):
            assert phi_r(g, l, r, 2048).is_zero


def random_poly(rnd, m, terms=4, deg=4):
    R = ring(m)
    monos = [tuple(rnd.randint(0, deg) for _ in range(m)) for _ in range(terms)]
    return PolyF2m.from_exponents(R, monos)


@pytest.mark.parametrize("seed", range(8))
def test_basis_is_groebner_reduced_and_canonical(seed):
    rnd = random.Random(seed)
    m = rnd.choice([2, 3])
    gens = [random_poly(rnd, m) for _ in range(3)]
    gens = [g for g in gens if g]
    gb = buchberger(gens).polys
    assert is_groebner(gb)
    R = gb[0].ring
    leads = [g.lead for g in gb]
    for g in gb:
        for t in g.terms:
            assert not any(R.divides(ld, t) for ld in leads if ld != g.lead)
    shuffled = gens[:]
    rnd.shuffle(shuffled)
    assert buchberger(shuffled).polys == gb
    for g in gens:
        assert ideal_member(g, IdealF2(gb))


@pytest.mark.parametrize("seed", range(5))
def test_normal_form_properties(seed):
    rnd = random.Random(100 + seed)
    m = 3
    gens = [random_poly(rnd, m, terms=3, deg=3) for _ in range(2)]
    I = IdealF2(gens)
    gb = I.basis()
    p = random_poly(rnd, m, terms=6, deg=6)
    nf = normal_form(p, gb)
    assert normal_form(nf, gb) == nf
    assert ideal_member(p + nf, I)
    leads = [g.lead for g in gb]
    assert not any(gb[0].ring.divides(ld, t) for ld in leads for t in nf.terms)


def test_s_polynomial_cancels_leads():
    f, g = P("x1^2 x2 + x2^3", 2), P("x1 x2^2 + x1", 2)
    s = s_polynomial(f, g)
    R = f.ring
    assert all(t != R.lcm(f.lead, g.lead) for t in s.terms)


def test_budget_raises_with_stats():
    with pytest.raises(GroebnerBudgetExceeded) as info:
        buchberger(quintic_generators(11), pair_budget=3)
    assert info.value.stats["pairs"] >= 3 and "basis_size" in info.value.stats


# -- sympy as an independent oracle ----------------------------------------------


def to_sympy(p, xs):
    return sum((sympy.prod([x**e for x, e in zip(xs, mono)]) for mono in p.monomials()), sympy.Integer(0))


def monomial_sets(polys, xs):
    out = set()
    for p in polys:
        poly = sympy.Poly(p, *xs, modulus=2)
        out.add(frozenset(m for m, c in poly.terms() if c % 2))
    return out


@pytest.mark.parametrize("l,extra", [(5, None), (7, None), (5, "x1^8"), (7, "x1^8"), (9, "x1^8")])
def test_reduced_basis_matches_sympy(l, extra):
    m = (l - 1) // 2
    xs = sympy.symbols(f"x1:{m + 1}")
    gens = quintic_generators(l) + ([P(extra, m)] if extra else [])
    ours = buchberger(gens).polys
    theirs = sympy.groebner([to_sympy(g, xs) for g in gens], *xs, modulus=2, order="grevlex")
    assert {frozenset(p.monomials()) for p in ours} == monomial_sets(theirs.exprs, xs)


# -- ideals and certificates ------------------------------------------------------------


def test_ideal_membership_examples():
    N5 = quintic_ideal(5)
    assert ideal_member(quintic_relation(5, 2, 1), N5)
    u, v = P("x2^2*(x1+x2^4)", 2), P("x1^2", 2)
    assert ideal_member(u, N5.extend(v))
    u9 = P("(x1*x4*x2*x3+x1*x4^3*x2^2+x2^3*x3^3)+x3^2*(x1^2*x4^4+x4^2*x2^4+x2^2*x1^4)", 4)
    assert ideal_member(u9, quintic_ideal(9))


def test_ideal_equal_examples():
    N5 = quintic_ideal(5)
    u, v = P("x2^2*(x1+x2^4)", 2), P("x1^2", 2)
    assert ideal_equal(N5.extend(v), N5.extend(u, v))
    u9 = P("(x1*x4*x2*x3+x1*x4^3*x2^2+x2^3*x3^3)+x3^2*(x1^2*x4^4+x4^2*x2^4+x2^2*x1^4)", 4)
    N9 = quintic_ideal(9)
    assert ideal_equal(N9, N9.extend(u9))
    assert ideal_equal(N9, N9)
    assert not ideal_equal(N5, N5.extend(P("x1", 2)))


@pytest.mark.parametrize(
    "l,u,v",
    [
        (5, "x2^2*(x1+x2^4)", "x1^2"),
        (5, "x2^8*(x1+x2^4)", "x1^4"),
        (7, "x3^16*(x1+x3^4)*(x1^2*x3^2+x1^4*x2^4)", "x1^8"),
    ],
)
def test_certify_quotient_examples(l, u, v):
    m = (l - 1) // 2
    assert certify_quotient(P(u, m), P(v, m), l)


@pytest.mark.parametrize("l,u,v", [(5, "x1", "x2"), (5, "1", "x1"), (7, "x2", "x1^8"), (9, "x2^3", "x1^4")])
def test_certify_quotient_negative(l, u, v):
    m = (l - 1) // 2
    cert = certificate(P(u, m), P(v, m), l)
    assert not cert.equal and cert.remainder_lead


@pytest.mark.parametrize("l,u,v", [(5, "x2^2*(x1+x2^4)", "x1^2"), (7, "x3^16*(x1+x3^4)*(x1^2*x3^2+x1^4*x2^4)", "x1^8")])
def test_certified_quotients_are_power_series(l, u, v):
    m = (l - 1) // 2
    for r in units(l):
        q = phi_r(P(u, m), l, r, 2048) / phi_r(P(v, m), l, r, 2048)
        assert q.is_power_series()


def test_phi_examples():
    x1 = P("x1", 2)
    assert phi_r(x1, 5, 1, 500) == theta_series(5, 1, 500)
    assert phi_r(x1, 5, 2, 500) == theta_series(5, 2, 500)
    with pytest.raises(ValueError):
        phi_r(x1, 9, 3, 100)


def test_spoly_bridge_roundtrip():
    l = 11
    s = SPoly.parse("[1]^3[4] + [2][5]^2 + [3]", l)
    for r in units(l):
        p = from_spoly(s, r)
        assert to_spoly(p, l, r) == s
