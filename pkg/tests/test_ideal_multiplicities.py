"""Tests for mixed multiplicities of ideal families. """
import itertools

import pytest

from helpers.errors import (
    HypothesisFailed,
    NotPrimary,
    PreconditionFailed,
    StabilizationUncertain,
    ZeroLeadingForm,
)
from helpers.exact_algebra import NEG_INF, GradedRing
from helpers.graded_module import cyclic_quotient, free_module
from helpers.ideal_multiplicities import (
    GridSettings,
    IdealFamily,
    associated_length,
    associated_length_grid,
    build_weak_fc_sequence,
    certify_ideal_mm_system,
    check_leading_form,
    fit_grid_polynomial,
    grid_euler_characteristic,
    ideal_mixed_multiplicity,
    ideal_mixed_multiplicity_table,
    ideal_products,
    is_rees_superficial,
    is_weak_fc,
    lattice_oracle,
    module_dimension,
    samuel_multiplicity,
    saturation_dimension,
    verify_fc_length_route,
    verify_ideal_decomposition,
    verify_ideal_main_theorem,
    verify_primary_case,
)
from helpers.problem_parser import parse_problem

SETTINGS = GridSettings(window=1, superficial_span=1)


def plane():
    ring = GradedRing(0, (2,), ("x", "y"))
    return ring, ring.variable(0), ring.variable(1)


def family(*I):
    ring, x, y = plane()
    table = {"x": [x], "x2y": [x**2, y], "m": [x, y]}
    return IdealFamily(ring, (x, y), tuple(tuple(table[name]) for name in I), free_module(ring))


def test_family_needs_one_block():
    ring = GradedRing(0, (1, 1))
    a = ring.variable(0)
    with pytest.raises(PreconditionFailed):
        IdealFamily(ring, (a,), ((a,),), free_module(ring))


def test_family_needs_primary_j():
    ring, x, y = plane()
    with pytest.raises(NotPrimary):
        IdealFamily(ring, (x,), ((x, y),), free_module(ring))


def test_primary_power():
    ring, x, y = plane()
    assert family("x").primary_power == 1
    assert IdealFamily(ring, (x**2, y), ((x,),), free_module(ring)).primary_power == 2


def test_products_reject_negative_exponents():
    with pytest.raises(PreconditionFailed):
        ideal_products(family("x"), -1, (0,))


@pytest.mark.parametrize("n0, n, value", [(0, (0,), 1), (2, (3,), 3), (4, (1,), 5)])
def test_associated_length_for_principal_ideal(n0, n, value):
    fam = family("x")
    assert associated_length(fam, n0, n) == value
    assert lattice_oracle(fam, n0, n) == value


@pytest.mark.parametrize("n0, n", [(0, (0,)), (1, (2,)), (2, (1,)), (3, (3,))])
def test_lengths_agree_with_lattice_count(n0, n):
    fam = family("x2y")
    assert associated_length(fam, n0, n) == lattice_oracle(fam, n0, n) == n0 + n[0] + 1


def test_samuel_family_lattice_value():
    ring, x, y = plane()
    fam = IdealFamily(ring, (x**2, y), ((x, y),), free_module(ring))
    assert associated_length(fam, 1, (1,)) == lattice_oracle(fam, 1, (1,)) == 5


def test_grid_evaluation_with_threads():
    fam = family("x")
    window = [range(0, 2), range(0, 2)]
    serial = associated_length_grid(fam, window)
    threaded = associated_length_grid(fam, window, jobs=2)
    assert serial.values == threaded.values == {(0, 0): 1, (0, 1): 1, (1, 0): 2, (1, 1): 2}


def test_grid_fit_recovers_newton_coefficients():
    fit = fit_grid_polynomial(lambda c: c[0] * c[1] + 3, 2, 2, offset=1, margin=1)
    assert fit.status == "pass"
    assert fit.coefficient((1, 1)) == 1
    assert fit.coefficient((2, 0)) == 0
    assert fit.fitted_degree == 2


def test_grid_fit_without_margin_is_uncertain():
    fit = fit_grid_polynomial(lambda c: c[0] + 1, 1, 1, margin=0)
    assert fit.status == "uncertain"
    assert fit.coefficient((1,)) == 1


def test_grid_fit_of_wrong_degree_gives_up():
    with pytest.raises(StabilizationUncertain):
        fit_grid_polynomial(lambda c: c[0] ** 3, 1, 1, margin=2, attempts=2)


def test_dimensions():
    fam = family("x")
    assert saturation_dimension(fam) == 2
    assert module_dimension(fam.N) == 2
    ring = fam.ring
    assert saturation_dimension(fam, cyclic_quotient(ring, [ring.variable(0)])) == NEG_INF


@pytest.mark.parametrize("I, k0, k, value", [("x", 1, (0,), 1), ("x", 0, (1,), 0), ("x2y", 0, (1,), 1), ("x2y", 1, (0,), 1)])
def test_ideal_mixed_multiplicities(I, k0, k, value):
    result = ideal_mixed_multiplicity(family(I), k0, k, SETTINGS)
    assert result.value == value
    assert result.status == "pass"
    assert result.to_report()["dim"] == 2


def test_ideal_multiplicity_above_dimension_is_zero():
    result = ideal_mixed_multiplicity(family("x2y"), 1, (1,), SETTINGS)
    assert result.extended
    assert result.value == 0


def test_ideal_multiplicity_table():
    assert ideal_mixed_multiplicity_table(family("x2y"), SETTINGS) == {(1, 0): 1, (0, 1): 1}


def test_zero_window_is_never_a_pass():
    result = ideal_mixed_multiplicity(family("x2y"), 0, (1,), GridSettings(window=0))
    assert result.status == "uncertain"


@pytest.mark.parametrize("J, value", [("m", 1), ("x2y", 2)])
def test_samuel_multiplicity(J, value):
    ring, x, y = plane()
    gens = {"m": [x, y], "x2y": [x**2, y]}[J]
    assert samuel_multiplicity(ring, gens, free_module(ring), SETTINGS) == value


def test_samuel_multiplicity_of_finite_length_module():
    ring, x, y = plane()
    N = cyclic_quotient(ring, [x**2, y])
    assert samuel_multiplicity(ring, [x, y], N, SETTINGS) == 2


def test_leading_form_checks():
    ring, x, y = plane()
    fam = family("x2y")
    check_leading_form(fam, y, 1)
    with pytest.raises(ZeroLeadingForm):
        check_leading_form(fam, x**3, 1)
    with pytest.raises(PreconditionFailed):
        check_leading_form(fam, x, 1)


def test_superficial_and_weak_fc_elements():
    ring, x, y = plane()
    fam = family("x")
    assert is_rees_superficial(fam, x, 1, SETTINGS)
    assert is_weak_fc(fam, x, 1, SETTINGS)
    assert not is_weak_fc(fam, y, 1, SETTINGS)


def test_weak_fc_sequence_and_certificate():
    fam = family("x2y")
    x = build_weak_fc_sequence(fam, 0, (1,), seed=0, settings=SETTINGS)
    assert x.type == (0, 1)
    cert = certify_ideal_mm_system(fam, x, SETTINGS)
    assert cert.is_mm_system
    assert cert.superficial_flags == (True,)
    assert cert.to_report()["type"] == [0, 1]


def test_grid_euler_characteristic():
    assert grid_euler_characteristic(family("x"), 1, (0,), (5, 5)) == 1
    assert grid_euler_characteristic(family("x"), 0, (1,), (5, 5)) == 0


def test_main_theorem_on_principal_family():
    report = verify_ideal_main_theorem(family("x"), 1, (0,), seed=0, settings=SETTINGS)
    assert report["holds"]
    assert report["status"] == "pass"
    assert report["e"] == report["chi"] == report["symbol"] == 1


def test_main_theorem_on_primary_family():
    report = verify_ideal_main_theorem(family("x2y"), 0, (1,), seed=0, settings=SETTINGS)
    assert report["holds"]
    assert report["e"] == 1


def test_main_theorem_needs_top_type():
    with pytest.raises(PreconditionFailed):
        verify_ideal_main_theorem(family("x"), 1, (1,), settings=SETTINGS)


def test_length_route_with_vanishing_multiplicity():
    report = verify_fc_length_route(family("x"), 0, (1,), settings=SETTINGS)
    assert report["holds"]
    assert report["e"] == report["E_quotient"] == 0
    assert report["dim_after"] == "-inf"
    assert report["nonvanishing_criterion"]
    assert "samuel" not in report


def test_length_route_with_samuel_multiplicity():
    report = verify_fc_length_route(family("x2y"), 0, (1,), settings=SETTINGS)
    assert report["holds"]
    assert report["e"] == report["E_quotient"] == report["samuel"] == 1
    assert report["dim_after"] == 1


def test_decomposition_on_primary_family():
    report = verify_ideal_decomposition(family("x2y"), 0, (1,), settings=SETTINGS)
    assert report["holds"]
    assert report["samuel"] == 1
    assert report["corrections"] == [0]
    assert report["prefix_dims"] == [2, 1]


def test_decomposition_needs_nonzero_multiplicity():
    with pytest.raises(HypothesisFailed):
        verify_ideal_decomposition(family("x"), 0, (1,), settings=SETTINGS)


def test_primary_case():
    report = verify_primary_case(family("x2y"), 0, (1,), settings=SETTINGS)
    assert report["holds"]
    assert report["parameter_part"]
    assert report["e"] == 1
    with pytest.raises(PreconditionFailed):
        verify_primary_case(family("x"), 0, (1,), settings=SETTINGS)


def test_grid_settings_from_config():
    settings = GridSettings.from_settings({"window": 2, "seed": 9, "log_level": "INFO", "jobs": 4})
    assert settings.window == 2
    assert settings.jobs == 4
    assert settings.grid_offset == 2


MONOMIAL_FAMILIES = [
    "ideals vars=(x,y) J=[x,y] I1=[x^2,y]",
    "ideals vars=(x,y) J=[x^2,y] I1=[x,y]",
    "ideals vars=(x,y) J=[x,y] I1=[x^2,y^2]",
    "ideals vars=(x,y) J=[x,y] I1=[x] I2=[y]",
    "ideals vars=(x,y) J=[x,y] I1=[x] N=quotient[]+quotient[x]",
    "ideals vars=(x,y,z) J=[x,y,z] I1=[x,y]",
    "ideals vars=(x,y,z) J=[x,y,z] I1=[x^2,y*z]",
    "ideals vars=(x,y,z) J=[x^2,y,z] I1=[x,y] I2=[y,z]",
    "ideals vars=(x,y,z) J=[x,y,z] I1=[x*y,z^2] N=quotient[x*z]",
]


def parsed_family(line):
    return parse_problem(f"ring char=0\n{line}\n").family


@pytest.mark.parametrize("line", MONOMIAL_FAMILIES)
def test_lengths_agree_with_lattice_count_on_full_window(line):
    fam = parsed_family(line)
    for cell in itertools.product(range(3), repeat=fam.d + 1):
        assert associated_length(fam, cell[0], cell[1:]) == lattice_oracle(fam, cell[0], cell[1:]), cell


@pytest.mark.parametrize("n0, n", list(itertools.product(range(4), repeat=2)))
def test_three_variable_lengths_match_closed_form(n0, n):
    fam = parsed_family("ideals vars=(x,y,z) J=[x,y,z] I1=[x,y]")
    assert associated_length(fam, n0, (n,)) == (n0 + 1) * (n + 1) + n0 * (n0 + 1) // 2


@pytest.mark.parametrize("k0, k, value", [(2, (0,), 1), (1, (1,), 1), (0, (2,), 0)])
def test_three_variable_multiplicities(k0, k, value):
    fam = parsed_family("ideals vars=(x,y,z) J=[x,y,z] I1=[x,y]")
    result = ideal_mixed_multiplicity(fam, k0, k, SETTINGS)
    assert result.value == value
    assert result.status == "pass"
    assert grid_euler_characteristic(fam, k0, k, (5, 5)) == value


def test_multiplicities_of_two_ideals():
    fam = parsed_family("ideals vars=(x,y) J=[x,y] I1=[x,y] I2=[x^2,x*y,y^2]")
    assert ideal_mixed_multiplicity_table(fam, SETTINGS) == {(1, 0, 0): 1, (0, 1, 0): 1, (0, 0, 1): 2}


def test_main_theorem_reports_the_euler_identity_route():
    report = verify_ideal_main_theorem(family("x2y"), 1, (0,), seed=0, settings=SETTINGS)
    assert report["chi_route"] == "euler_identity"
    assert report["chi"] == report["e"]
