"""Tests for sliced Koszul complexes and the Euler characteristic. """
import itertools

import pytest

from helpers.errors import NotMMSystem
from helpers.exact_algebra import GradedRing
from helpers.graded_module import cyclic_quotient, free_module, submodule_element
from helpers.hilbert_engine import difference_formula_check, dim_supp_pp, mixed_multiplicity
from helpers.koszul_euler import (
    euler_characteristic,
    euler_identity,
    homology_lengths,
    is_mm_system,
    koszul_slice,
    verify_chi_lemmas,
)
from helpers.mixed_systems import ElementSequence, build_filter_regular_sequence
from random_modules import (
    BIGRADED_SHAPES,
    random_form,
    random_linear_form,
    random_module,
    random_relation_degree,
    random_type,
)

RANDOM_SHAPES = BIGRADED_SHAPES + [(3,), (1, 1, 1)]


def bigraded():
    ring = GradedRing(0, (2, 2))
    return ring, [ring.variable(v) for v in range(ring.nvars)]


def test_slice_dimensions_of_free_module():
    ring, (a, b, c, d) = bigraded()
    s = koszul_slice(free_module(ring), [a, c], (1, 1))
    assert s.chain_dims == (4, 4, 1)
    assert s.homology() == (1, 0, 0)


def test_regular_sequence_has_no_higher_homology():
    ring, (a, b, c, d) = bigraded()
    M = free_module(ring)
    for n in itertools.product(range(1, 4), repeat=2):
        assert homology_lengths(M, [a, c], n) == (1, 0, 0)


def test_homology_sum_matches_euler_identity():
    ring, (a, b, c, d) = bigraded()
    M = cyclic_quotient(ring, [a * c])
    for x in ([a], [b], [a, b], [b, d], [a, c]):
        for n in itertools.product(range(3), repeat=2):
            h = homology_lengths(M, x, n)
            assert sum((-1) ** i * v for i, v in enumerate(h)) == euler_identity(M, x, n)


def test_colon_shows_up_in_top_homology():
    ring, (a, b, c, d) = bigraded()
    M = cyclic_quotient(ring, [a * c])
    # 0 :_M a is generated by c in degree (0, 1), so H_1 lives in degree (1, 1)
    assert homology_lengths(M, [a], (1, 1))[1] == 1


@pytest.mark.parametrize("x, value", [("b", 1), ("d", 1), ("ac", 1), ("ab", 0)])
def test_euler_characteristic_values(x, value):
    ring, (a, b, c, d) = bigraded()
    names = {"a": a, "b": b, "c": c, "d": d}
    M = free_module(ring) if len(x) == 2 else cyclic_quotient(ring, [a * c])
    chi = euler_characteristic(M, [names[v] for v in x])
    assert chi.value == value
    assert chi.stable


def test_euler_characteristic_agrees_with_multiplicity():
    ring, (a, b, c, d) = bigraded()
    M = cyclic_quotient(ring, [a * c])
    x = ElementSequence.of(ring, [b + 3 * a])
    assert euler_characteristic(M, x).value == mixed_multiplicity(M, (1, 0)).value


def test_euler_characteristic_with_jobs():
    ring, (a, b, c, d) = bigraded()
    M = free_module(ring)
    serial = euler_characteristic(M, [a, c], window=2)
    threaded = euler_characteristic(M, [a, c], window=2, jobs=3)
    assert serial == threaded
    assert serial.to_report()["homology_lengths"] == [1, 0, 0]


def test_not_a_system():
    ring, (a, b, c, d) = bigraded()
    M = cyclic_quotient(ring, [a * c])
    assert not is_mm_system(M, [a])
    with pytest.raises(NotMMSystem):
        euler_characteristic(M, [a])


def test_zero_elements_need_blocks():
    ring, (a, b, c, d) = bigraded()
    M = cyclic_quotient(ring, [a, b])
    x = ElementSequence.of(ring, [a - a], blocks=[0])
    assert euler_characteristic(M, x).value == 0


def test_chi_lemmas_on_product_relation():
    ring, (a, b, c, d) = bigraded()
    M = cyclic_quotient(ring, [a * c])
    report = verify_chi_lemmas(M, [b], U=[submodule_element(M, [a])])
    assert report["chi"] == 1
    assert report["additivity"] == "pass"
    assert report["annihilator"] == "skipped"
    assert report["regular"] == "pass"
    assert report["recursion"] == "pass"
    assert report["filter_regular"] == "pass"


def test_chi_lemmas_for_nilpotent_element():
    ring, (a, b, c, d) = bigraded()
    M = cyclic_quotient(ring, [a * a, a * b, b * b])
    report = verify_chi_lemmas(M, [a])
    assert report["chi"] == 0
    assert report["annihilator"] == "pass"
    assert report["additivity"] == "skipped"
    assert "fail" not in report.values()


@pytest.mark.parametrize("seed", range(100))
def test_difference_formula_and_chi_lemmas_on_random_triples(seed):
    rng, M = random_module(seed, RANDOM_SHAPES, most=2)
    ring = M.ring
    a = random_linear_form(ring, rng, rng.randrange(ring.d))
    assert difference_formula_check(M, a)["holds"]
    k = random_type(ring, rng, max(dim_supp_pp(M), 0) + rng.randint(0, 1))
    x = build_filter_regular_sequence(M, k, seed=rng)
    u = random_form(ring, rng, random_relation_degree(ring, rng), 2)
    report = verify_chi_lemmas(M, x, U=[submodule_element(M, [u])], window=1)
    assert "fail" not in report.values()


@pytest.mark.parametrize("module_seed", range(6))
def test_chi_depends_only_on_the_type(module_seed):
    rng, M = random_module(200 + module_seed, BIGRADED_SHAPES, most=2)
    k = random_type(M.ring, rng, max(dim_supp_pp(M), 0))
    values = {euler_characteristic(M, build_filter_regular_sequence(M, k, seed=s), window=1).value for s in (0, 1, 2)}
    assert values == {mixed_multiplicity(M, k).value}
