"""Tests for module presentations, graded pieces and short exact sequences. """
import itertools

import pytest

from helpers.errors import NonHomogeneous, RingMismatch, WrongDegree
from helpers.exact_algebra import GradedRing
from helpers.graded_module import (
    build_ses,
    cyclic_quotient,
    direct_sum,
    free_module,
    graded_piece_dim,
    quotient_by_elements,
    quotient_by_ideal,
    standard_basis,
    submodule_element,
    zero_module,
)
from random_modules import SMALL_SHAPES, random_form, random_module, random_relation_degree


def bigraded():
    ring = GradedRing(0, (2, 2))
    return ring, [ring.variable(v) for v in range(ring.nvars)]


@pytest.mark.parametrize("n, expected", [((0, 0), 1), ((1, 0), 2), ((2, 3), 12), ((0, -1), 0)])
def test_free_module_pieces(n, expected):
    ring, _ = bigraded()
    assert graded_piece_dim(free_module(ring), n) == expected


def test_shifted_free_module():
    ring, _ = bigraded()
    F = free_module(ring, 2, [(0, 0), (1, 0)])
    assert graded_piece_dim(F, (0, 0)) == 1
    assert graded_piece_dim(F, (1, 0)) == 3
    assert graded_piece_dim(F, (1, 1)) == 6


def test_cyclic_quotient_pieces():
    ring, (a, b, c, d) = bigraded()
    M = cyclic_quotient(ring, [a * c])
    assert graded_piece_dim(M, (2, 3)) == 6
    assert graded_piece_dim(M, (1, 1)) == 3
    basis = standard_basis(M, (1, 1))
    assert ((1, 0, 1, 0), 0) not in basis
    assert len(basis) == 3


def test_quotient_by_elements_needs_linear_forms():
    ring, (a, b, c, d) = bigraded()
    M = free_module(ring)
    assert graded_piece_dim(quotient_by_elements(M, [a, c]), (2, 2)) == 1
    assert quotient_by_elements(M, [a - a]) is M
    with pytest.raises(WrongDegree):
        quotient_by_elements(M, [a * c])


def test_quotient_by_ideal_kills_every_coordinate():
    ring, (a, b, c, d) = bigraded()
    M = quotient_by_ideal(free_module(ring, 2), [a, b])
    assert graded_piece_dim(M, (1, 2)) == 0
    assert graded_piece_dim(M, (0, 2)) == 6


def test_direct_sum_adds_dimensions():
    ring, (a, b, c, d) = bigraded()
    M = cyclic_quotient(ring, [a])
    N = cyclic_quotient(ring, [c])
    total = direct_sum(M, N)
    assert total.rank == 2
    for n in itertools.product(range(3), repeat=2):
        assert graded_piece_dim(total, n) == graded_piece_dim(M, n) + graded_piece_dim(N, n)
    assert graded_piece_dim(total, (1, 1)) == 4


def test_direct_sum_over_different_rings_fails():
    ring, _ = bigraded()
    with pytest.raises(RingMismatch):
        direct_sum(free_module(ring), free_module(GradedRing(0, (1, 1))))


def test_non_homogeneous_relation_is_rejected():
    ring, (a, b, c, d) = bigraded()
    with pytest.raises(NonHomogeneous):
        cyclic_quotient(ring, [a + c])


def test_zero_module():
    ring, _ = bigraded()
    Z = zero_module(ring)
    assert Z.is_zero()
    assert graded_piece_dim(Z, (3, 3)) == 0
    assert cyclic_quotient(ring, [ring.variable(0) ** 0]).is_zero()


def test_short_exact_sequence_is_additive():
    ring, (a, b, c, d) = bigraded()
    M = free_module(ring)
    sub, same, quot = build_ses(M, [submodule_element(M, [a])])
    assert same is M
    for n in itertools.product(range(3), repeat=2):
        assert graded_piece_dim(sub, n) + graded_piece_dim(quot, n) == graded_piece_dim(M, n)
    assert graded_piece_dim(sub, (1, 1)) == 2


def test_short_exact_sequence_inside_a_quotient():
    ring, (a, b, c, d) = bigraded()
    M = cyclic_quotient(ring, [a * c])
    sub, _, quot = build_ses(M, [submodule_element(M, [a])])
    for n in itertools.product(range(3), repeat=2):
        assert graded_piece_dim(sub, n) + graded_piece_dim(quot, n) == graded_piece_dim(M, n)


def test_submodule_vector_must_be_homogeneous():
    ring, (a, b, c, d) = bigraded()
    M = free_module(ring)
    with pytest.raises(NonHomogeneous):
        build_ses(M, [submodule_element(M, [a + c])])


@pytest.mark.parametrize("seed", range(15))
def test_short_exact_sequence_on_random_modules(seed):
    rng, M = random_module(seed, SMALL_SHAPES, most=2)
    ring = M.ring
    u = random_form(ring, rng, random_relation_degree(ring, rng), 2)
    sub, _, quot = build_ses(M, [submodule_element(M, [u])])
    for n in itertools.product(range(3), repeat=ring.d):
        assert graded_piece_dim(sub, n) + graded_piece_dim(quot, n) == graded_piece_dim(M, n)
