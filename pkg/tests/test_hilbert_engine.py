"""Tests for Hilbert series, Hilbert polynomials and mixed multiplicities. """
import itertools

import pytest

from helpers.errors import TypeTooSmall, WrongDegree
from helpers.exact_algebra import NEG_INF, GradedRing, Polynomial
from helpers.graded_module import cyclic_quotient, direct_sum, free_module, graded_piece_dim, zero_module
from helpers.hilbert_engine import (
    difference_formula_check,
    dim_supp_pp,
    hilbert_polynomial,
    hilbert_series,
    mixed_multiplicity,
    mixed_multiplicity_table,
    module_polynomial,
    series_coefficient,
)
from random_modules import random_module, random_piece_degree


def bigraded():
    ring = GradedRing(0, (2, 2))
    return ring, [ring.variable(v) for v in range(ring.nvars)]


def product_module():
    ring, (a, b, c, d) = bigraded()
    return cyclic_quotient(ring, [a * c])


def test_free_module_series_and_polynomial():
    ring, _ = bigraded()
    hs = hilbert_series(free_module(ring))
    assert hs.to_report() == [[[0, 0], 1]]
    assert series_coefficient(hs, (2, 3)) == 12
    hp = hilbert_polynomial(hs)
    assert hp.total_degree == 2
    assert hp.evaluate((2, 3)) == 12
    assert hp.threshold == (0, 0)
    assert hp.difference((1, 1)).evaluate((5, 7)) == 1


def test_product_relation_numerator():
    M = product_module()
    hs = hilbert_series(M)
    assert hs.as_dict() == {(0, 0): 1, (1, 1): -1}
    assert series_coefficient(hs, (2, 3)) == 6
    hp = hilbert_polynomial(hs)
    assert hp.total_degree == 1
    assert hp.threshold == (1, 1)
    assert hp.evaluate((4, 9)) == 14


def test_series_matches_graded_pieces():
    M = product_module()
    hs = hilbert_series(M)
    for n in itertools.product(range(4), repeat=2):
        assert series_coefficient(hs, n) == graded_piece_dim(M, n)


def test_polynomial_differs_from_function_near_the_axes():
    ring = GradedRing(0, (1, 2))
    M = cyclic_quotient(ring, [ring.variable(0) * ring.variable(1)])
    hs = hilbert_series(M)
    assert series_coefficient(hs, (0, 4)) == 5
    assert series_coefficient(hs, (3, 4)) == 1
    assert str(module_polynomial(M)) == "1"
    assert dim_supp_pp(M) == 0
    assert mixed_multiplicity(M, (0, 0)).value == 1


@pytest.mark.parametrize("k, value, extended", [((1, 1), 1, False), ((2, 0), 0, False), ((0, 2), 0, False), ((2, 1), 0, True)])
def test_free_module_multiplicities(k, value, extended):
    ring, _ = bigraded()
    result = mixed_multiplicity(free_module(ring), k)
    assert result.value == value
    assert result.extended is extended


def test_product_relation_multiplicities():
    M = product_module()
    assert mixed_multiplicity(M, (1, 0)).value == 1
    assert mixed_multiplicity(M, (0, 1)).value == 1
    assert mixed_multiplicity(M, (1, 1)).extended
    assert mixed_multiplicity_table(M) == {(1, 0): 1, (0, 1): 1}


def test_type_checks():
    M = product_module()
    with pytest.raises(TypeTooSmall):
        mixed_multiplicity(M, (0, 0))
    with pytest.raises(WrongDegree):
        mixed_multiplicity(M, (1, 0, 0))


def test_direct_sum_table():
    ring, (a, b, c, d) = bigraded()
    M = direct_sum(cyclic_quotient(ring, [a]), cyclic_quotient(ring, [c]))
    assert series_coefficient(hilbert_series(M), (1, 1)) == 4
    assert mixed_multiplicity_table(M) == {(1, 0): 1, (0, 1): 1}


def test_zero_module_has_empty_support():
    ring, _ = bigraded()
    Z = zero_module(ring)
    assert hilbert_series(Z).is_zero()
    assert dim_supp_pp(Z) == NEG_INF
    assert mixed_multiplicity_table(Z) == {}
    assert mixed_multiplicity(Z, (0, 0)).extended


def test_module_killed_by_a_block_has_empty_support():
    ring, (a, b, c, d) = bigraded()
    M = cyclic_quotient(ring, [a, b])
    assert graded_piece_dim(M, (0, 5)) == 6
    assert dim_supp_pp(M) == NEG_INF


def test_difference_formula():
    ring, (a, b, c, d) = bigraded()
    M = product_module()
    report = difference_formula_check(M, b)
    assert report["holds"]
    assert report["block"] == 1
    report = difference_formula_check(M, a)
    assert report["holds"]
    report = difference_formula_check(M, c - 2 * d)
    assert report["holds"]
    assert report["block"] == 2


def test_difference_formula_with_zero_element():
    ring, _ = bigraded()
    M = product_module()
    zero = Polynomial.zero(M.ring)
    assert difference_formula_check(M, zero, block=0)["holds"]
    with pytest.raises(WrongDegree):
        difference_formula_check(M, zero)


@pytest.mark.parametrize("seed", range(50))
def test_series_matches_graded_pieces_on_random_modules(seed):
    rng, M = random_module(seed)
    hs = hilbert_series(M)
    for _ in range(200):
        n = random_piece_degree(M.ring, rng)
        assert series_coefficient(hs, n) == graded_piece_dim(M, n)


@pytest.mark.parametrize("seed", range(50))
def test_polynomial_matches_lengths_above_threshold(seed):
    _, M = random_module(seed)
    hp = module_polynomial(M)
    for n in itertools.product(*(range(t, t + 5) for t in hp.threshold)):
        assert hp.evaluate(n) == graded_piece_dim(M, n)


@pytest.mark.parametrize("seed", range(20))
def test_top_multiplicities_are_nonnegative_on_random_modules(seed):
    _, M = random_module(seed)
    table = mixed_multiplicity_table(M)
    assert all(v >= 0 for v in table.values())
    if table:
        assert sum(next(iter(table))) == dim_supp_pp(M)
