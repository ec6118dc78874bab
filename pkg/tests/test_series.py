import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import _props as P
from theta2 import _kernels as K
from theta2.series import LaurentSeriesF2, PrecisionError, coeff_at, inverse, project
from theta2.theta import theta_series

S = LaurentSeriesF2
seeds = st.integers(0, 2**32 - 1)


def poly(*exps, bound=64):
    return S.from_exponents(exps, bound)


# -- representation -------------------------------------------------------------


def test_normalized_valuation_and_canonical_zero():
    f = S.from_bits([0, 0, 1, 1, 0], -3, 2)
    assert f.valuation == -1 and f.bound == 2
    assert f.exponents().tolist() == [-1, 0]
    z = poly(3) + poly(3)
    assert z.is_zero and z.valuation == z.bound == 64
    assert z == S.zero(64)


def test_dump_roundtrip():
    f = theta_series(9, 4, 200).inverse()
    text = f.dump()
    assert text.startswith("v=-16 E=168\n-16 -7 ")
    assert S.parse_dump(text) == f


def test_parse_dump_rejects_bad_header():
    with pytest.raises(ValueError):
        S.parse_dump("E=3\n1 2")
    with pytest.raises(ValueError):
        S.parse_dump("v=0 E=10\n1 2")


# -- arithmetic examples ---------------------------------------------------------


def test_add_examples():
    assert poly(1, 2) + poly(2, 3) == poly(1, 3)
    f = poly(-2, 5, 9)
    assert (f + f).is_zero
    assert (theta_series(5, 1, 30) + theta_series(5, 2, 30)).exponents().tolist() == [1, 4, 9, 16]


def test_add_takes_smaller_bound():
    assert (poly(1, bound=10) + poly(2, bound=7)).bound == 7


def test_mul_examples():
    assert poly(0, 1) * poly(0, 1) == poly(0, 2, bound=64)
    assert (poly(-1, bound=10) * poly(1, bound=10)).exponents().tolist() == [0]
    a, b = theta_series(5, 1, 2048), theta_series(5, 2, 2048)
    assert a * b == P.reference_mul(a, b)


def test_mul_bound_rule():
    f, g = poly(-3, 0, bound=20), poly(2, 4, bound=11)
    h = f * g
    assert h.valuation == -1
    assert h.bound == min(20 + 2, 11 - 3)


def test_square_examples():
    assert poly(0, 1).square() == poly(0, 2, bound=128)
    assert poly(-1, bound=4).square().exponents().tolist() == [-2]
    rng = np.random.default_rng(3)
    f = P.random_series(rng, width=4096)
    assert f.square().agrees(f * f)
    assert f.square().bound == 2 * f.bound


def test_inverse_examples():
    g = poly(0, 1, bound=50).inverse()
    assert g.exponents().tolist() == list(range(50))
    assert theta_series(3, 1, 100).inverse().valuation == -1
    assert theta_series(9, 4, 100).inverse().window(-16, 0).tolist() == [-16, -7]


def test_inverse_of_zero():
    with pytest.raises(ZeroDivisionError, match="division by zero series"):
        S.zero(10).inverse()


def test_project_examples():
    for i in (1, 2):
        lhs = theta_series(5, 2 * i, 2048).project(2, 0)
        rhs = theta_series(5, i, 2048) ** 4
        assert lhs.agrees(rhs)
    for i in range(1, 5):
        f = theta_series(9, i, 2048)
        for j in (2, 3, 5, 6, 7):
            assert f.project(8, j).is_zero
    assert S.zero(40).project(8, 3).is_zero


@pytest.mark.parametrize("q,j", [(3, 0), (8, 8), (8, -1), (0, 0)])
def test_project_usage_errors(q, j):
    with pytest.raises(ValueError):
        poly(1, 2).project(q, j)


def test_coeff_at():
    assert coeff_at(poly(0, 1), 1) == 1
    assert coeff_at(theta_series(9, 4, 100).inverse(), -7) == 1
    assert coeff_at(theta_series(3, 1, 100).inverse(), -1) == 1
    f = poly(2, 5, bound=10)
    assert f.coeff(-50) == 0
    with pytest.raises(PrecisionError, match="outside precision window"):
        f.coeff(10)


def test_module_functions_match_methods():
    f = theta_series(7, 2, 500)
    assert inverse(f) == f.inverse()
    assert project(f, 4, 1) == f.project(4, 1)


def test_frobenius_and_shift():
    f = poly(-1, 3, bound=9)
    assert f.frobenius(4).exponents().tolist() == [-4, 12]
    assert f.frobenius(4).bound == 36
    assert f.shift(5).exponents().tolist() == [4, 8]
    with pytest.raises(ValueError):
        f.frobenius(3)


def test_pow():
    f = theta_series(5, 1, 500)
    assert (f**5).agrees(f * f * f * f * f)
    assert (f**-2).agrees((f * f).inverse())


# -- properties ------------------------------------------------------------------


@given(seeds)
def test_ring_laws(seed):
    rng = np.random.default_rng(seed)
    f, g, h = (P.random_series(rng, width=1024, nonzero=False) for _ in range(3))
    assert P.ring_laws(f, g, h)


@given(seeds)
def test_newton_contract(seed):
    rng = np.random.default_rng(seed)
    f = P.random_series(rng, width=int(rng.integers(1, 1500)))
    assert P.newton_contract(f)


@given(seeds)
def test_projection_rules(seed):
    rng = np.random.default_rng(seed)
    f = P.random_series(rng, width=700, nonzero=False)
    q, j = P.random_q(rng, 32)
    assert P.projection_rules(f, q, j)


@given(seeds)
def test_product_rule(seed):
    rng = np.random.default_rng(seed)
    f, g = P.random_series(rng, width=600), P.random_series(rng, width=600)
    q, j = P.random_q(rng, 16)
    assert P.product_rule(f, g, q, j)


@given(seeds)
def test_frobenius_rule(seed):
    rng = np.random.default_rng(seed)
    f = P.random_series(rng, width=800, nonzero=False)
    q, j = P.random_q(rng, 32)
    assert P.frobenius_rule(f, q, j)


@given(seeds, st.sampled_from(["numba", "numpy"]))
def test_multiplier_matches_reference(seed, backend):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5000))
    a, b = P.random_pair_words(rng, n)
    out = int(rng.integers(1, 2 * n))
    assert np.array_equal(K.mul(a, b, out, backend=backend), K.reference_mul(a, b, out))


@pytest.mark.parametrize("density", [0.001, 0.02, 0.5])
def test_sparse_and_dense_paths_agree(density):
    rng = np.random.default_rng(11)
    for _ in range(5):
        f = P.random_series(rng, width=20000, density=density)
        g = P.random_series(rng, width=20000)
        assert P.multiplier_agrees(f, g)


def test_backends_switch_and_agree():
    f = theta_series(7, 3, 30000)
    results = []
    prev = K.get_backend()
    try:
        for name in K.BACKENDS:
            K.set_backend(name)
            results.append(f.inverse())
    finally:
        K.set_backend(prev)
    assert all(r == results[0] for r in results)
    with pytest.raises(ValueError):
        K.set_backend("fortran")


def test_large_pair_against_reference():
    rng = np.random.default_rng(5)
    a, b = P.random_pair_words(rng, 1 << 16)
    assert np.array_equal(K.mul(a, b, 1 << 17), K.reference_mul(a, b, 1 << 17))


def test_immutable():
    f = poly(1, 2)
    with pytest.raises(ValueError):
        f.words[0] = 0
