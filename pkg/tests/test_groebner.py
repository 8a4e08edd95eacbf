"""Tests for Groebner bases of submodules and the operations built on them. """
import itertools
import random

import pytest
from sympy import QQ, Poly, symbols
from sympy import groebner as sympy_groebner

from helpers.errors import NonHomogeneous, RingMismatch
from helpers.exact_algebra import NEG_INF, GradedRing, Polynomial, enumerate_monomials
from helpers.graded_module import cyclic_quotient, free_module
from helpers.groebner import (
    FreeModuleSpec,
    ModuleElement,
    buchberger,
    colon_generators,
    colon_submodule,
    combine,
    ideal_basis,
    intersect,
    krull_dim,
    normal_form,
    saturate,
    saturate_submodule,
    syzygies,
)
from random_modules import (
    SMALL_SHAPES,
    random_coefficient,
    random_linear_form,
    random_relations,
    random_ring,
)


def plane():
    ring = GradedRing(0, (2,), ("x", "y"))
    return ring, ring.variable(0), ring.variable(1)


def element(ring, *polys):
    return ModuleElement.from_polynomials(FreeModuleSpec.free(ring, len(polys)), list(polys))


def test_groebner_basis_adds_s_polynomial():
    ring, x, y = plane()
    gb = ideal_basis(ring, [x**2 - y**2, x * y])
    assert set(gb.leading_ideals()[0]) == {(2, 0), (1, 1), (0, 3)}
    assert gb.contains(element(ring, y**3))
    assert gb.contains(element(ring, x**3))
    assert not gb.contains(element(ring, x**2))


def test_reduced_basis_is_canonical():
    ring, x, y = plane()
    one = ideal_basis(ring, [x**2 - y**2, x * y])
    two = ideal_basis(ring, [x * y, x**2 - y**2, y**3 + x**2 * y])
    assert one == two
    assert all(g.terms[next(iter(g.terms))] == ring.scalar(1) for g in one)


def test_normal_form_of_member_is_zero():
    ring, x, y = plane()
    gb = ideal_basis(ring, [x**2 - y**2, x * y])
    f = element(ring, (x + y) * (x**2 - y**2) + y * (x * y))
    assert normal_form(f, gb).is_zero()
    assert normal_form(element(ring, x**2), gb) == element(ring, y**2)


def test_monomial_generators_skip_buchberger():
    ring, x, y = plane()
    gb = ideal_basis(ring, [x**2, x * y, x**3])
    assert gb.is_monomial()
    assert len(gb) == 2


def test_non_homogeneous_generator_is_rejected():
    ring, x, y = plane()
    with pytest.raises(NonHomogeneous):
        ideal_basis(ring, [x**2 + y])


def test_module_basis_in_rank_two():
    ring, x, y = plane()
    spec = FreeModuleSpec.free(ring, 2)
    v1 = ModuleElement.from_polynomials(spec, [x, y])
    v2 = ModuleElement.from_polynomials(spec, [y, Polynomial.zero(ring)])
    gb = buchberger([v1, v2], spec)
    assert gb.contains(v1.mul_poly(x) + v2.mul_poly(y))
    assert gb.contains(ModuleElement.from_polynomials(spec, [Polynomial.zero(ring), y * y]))
    assert not gb.contains(ModuleElement.basis(spec, 0))


def test_syzygies_annihilate_the_generators():
    ring, x, y = plane()
    spec = FreeModuleSpec.free(ring)
    gens = [element(ring, x), element(ring, y)]
    syz = syzygies(gens, spec)
    assert syz
    for s in syz:
        assert combine(s, gens, spec).is_zero()


def test_colon_by_a_variable():
    ring, x, y = plane()
    gb = ideal_basis(ring, [x * y])
    assert colon_generators(gb, x).leading_ideals() == [[(0, 1)]]
    gb = ideal_basis(ring, [x**2 - y**2, x * y])
    colon = colon_generators(gb, x)
    assert colon.contains(element(ring, y))
    assert colon.contains(element(ring, x**2))


def test_colon_by_zero_is_everything():
    ring, x, y = plane()
    gb = ideal_basis(ring, [x])
    assert colon_generators(gb, Polynomial.zero(ring)).contains(element(ring, Polynomial.constant(ring)))


def test_intersection_of_ideals():
    ring, x, y = plane()
    meet = intersect(ideal_basis(ring, [x]), ideal_basis(ring, [y]))
    assert meet.leading_ideals() == [[(1, 1)]]
    meet = intersect(ideal_basis(ring, [x + y]), ideal_basis(ring, [x - y]))
    assert meet == ideal_basis(ring, [x**2 - y**2])


def test_intersection_needs_one_free_module():
    ring, x, y = plane()
    other = GradedRing(0, (1, 1))
    with pytest.raises(RingMismatch):
        intersect(ideal_basis(ring, [x]), ideal_basis(other, [other.variable(0)]))


def test_saturation_removes_embedded_component():
    ring, x, y = plane()
    sat = saturate_submodule(ideal_basis(ring, [x**2, x * y]), [x, y])
    assert sat == ideal_basis(ring, [x])


def test_saturation_of_primary_ideal_is_everything():
    ring, x, y = plane()
    sat = saturate_submodule(ideal_basis(ring, [x**2, y**3]), [x, y])
    assert sat.contains(element(ring, Polynomial.constant(ring)))


def test_colon_and_saturation_as_modules():
    ring = GradedRing(0, (2, 2))
    a, b, c, d = (ring.variable(v) for v in range(4))
    M = cyclic_quotient(ring, [a * c])
    assert colon_submodule(M, b).is_zero()
    assert not colon_submodule(M, a).is_zero()
    assert saturate(cyclic_quotient(ring, [a]), [c]).is_zero()
    assert not saturate(cyclic_quotient(ring, [a]), [a]).is_zero()
    with pytest.raises(NonHomogeneous):
        colon_submodule(M, a + c)


@pytest.mark.parametrize("gens, expected", [("free", 2), ("x", 1), ("xy", 1), ("x2y3", 0), ("one", NEG_INF)])
def test_krull_dim(gens, expected):
    ring, x, y = plane()
    table = {
        "x": [x],
        "xy": [x * y],
        "x2y3": [x**2, y**3],
        "one": [Polynomial.constant(ring)],
    }
    M = cyclic_quotient(ring, table.get(gens, []))
    assert krull_dim(M) == expected


def test_krull_dim_of_free_module():
    ring = GradedRing(0, (2, 2))
    assert krull_dim(free_module(ring, 2)) == 4


def as_sympy(f, gens):
    rep = {m: f.ring.domain.to_sympy(c) for m, c in f.terms.items()}
    return Poly.from_dict(rep, *gens, domain=QQ)


@pytest.mark.parametrize("seed", range(30))
def test_leading_monomials_agree_with_sympy(seed):
    rng = random.Random(seed)
    ring = random_ring(rng)
    gens = random_relations(ring, rng)
    gb = ideal_basis(ring, gens)
    xs = symbols(f"v0:{ring.nvars}")
    reference = sympy_groebner([as_sympy(f, xs).as_expr() for f in gens], *xs, order="grevlex")
    expected = {Poly(g, *xs).monoms(order="grevlex")[0] for g in reference.exprs}
    assert set(gb.leading_ideals()[0]) == expected


@pytest.mark.parametrize("seed", range(12))
def test_saturation_is_idempotent(seed):
    rng = random.Random(seed)
    ring = random_ring(rng, SMALL_SHAPES)
    gb = ideal_basis(ring, random_relations(ring, rng, 3))
    block = rng.randrange(ring.d)
    b = [ring.variable(v) for v in ring.block_variables(block)]
    sat = saturate_submodule(gb, b)
    assert saturate_submodule(sat, b) == sat
    assert all(sat.contains(g) for g in gb.generators)


@pytest.mark.parametrize("seed", range(12))
def test_intersection_is_commutative(seed):
    rng = random.Random(seed)
    ring = random_ring(rng, SMALL_SHAPES)
    U = ideal_basis(ring, random_relations(ring, rng, 2))
    V = ideal_basis(ring, random_relations(ring, rng, 2))
    meet = intersect(U, V)
    assert meet == intersect(V, U)
    assert all(U.contains(g) and V.contains(g) for g in meet.generators)
    for f in U.generators:
        for g in V.generators:
            product = element(ring, f.coordinates()[0] * g.coordinates()[0])
            assert meet.contains(product)


@pytest.mark.parametrize("seed", range(12))
def test_colon_degree_by_degree(seed):
    rng = random.Random(seed)
    ring = random_ring(rng, SMALL_SHAPES)
    gb = ideal_basis(ring, random_relations(ring, rng, 3))
    a = random_linear_form(ring, rng, rng.randrange(ring.d))
    colon = colon_generators(gb, a)
    for n in itertools.product(range(3), repeat=ring.d):
        monomials = enumerate_monomials(ring, n)
        candidates = [Polynomial.monomial(ring, m) for m in monomials]
        for _ in range(3):
            picked = rng.sample(monomials, min(2, len(monomials)))
            candidates.append(Polynomial(ring, {m: random_coefficient(rng) for m in picked}))
        for v in candidates:
            assert colon.contains(element(ring, v)) == gb.contains(element(ring, a * v))
