"""Multigraded Hilbert series, Hilbert polynomials and mixed multiplicities.

The series numerator of S/L for a monomial ideal L is computed by the pivot
recursion N(L) = N(L + (x)) + t^deg(x) N(L : x); the Hilbert polynomial is
read off the numerator exactly, so no degree is ever guessed.
"""
import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Dict, List, Tuple

from sympy import Integer, Poly, QQ, symbols

from helpers.errors import InternalInconsistency, NonIntegralMultiplicity, TypeTooSmall, WrongDegree
from helpers.exact_algebra import (
    NEG_INF,
    GradedRing,
    Monomial,
    MultiDegree,
    Polynomial,
    add_degrees,
    minimalize,
    mono_div,
    mono_gcd,
    unit_degree,
)
from helpers.graded_module import GradedModulePresentation, quotient_by_elements

logger = logging.getLogger(__name__)

Numerator = Dict[MultiDegree, int]


def _clean(p: Numerator) -> Numerator:
    return {k: v for k, v in p.items() if v}


def _add(p: Numerator, q: Numerator, sign: int = 1) -> Numerator:
    out = dict(p)
    for k, v in q.items():
        out[k] = out.get(k, 0) + sign * v
    return _clean(out)


def _mul(p: Numerator, q: Numerator) -> Numerator:
    out: Numerator = {}
    for k1, v1 in p.items():
        for k2, v2 in q.items():
            k = add_degrees(k1, k2)
            out[k] = out.get(k, 0) + v1 * v2
    return _clean(out)


def _shift(p: Numerator, deg: MultiDegree) -> Numerator:
    return {add_degrees(k, deg): v for k, v in p.items()}


def _one_minus(ring: GradedRing, mon: Monomial) -> Numerator:
    return _add({ring.zero_degree(): 1}, {ring.degree(mon): 1}, -1)


def _product(ring: GradedRing, monomials) -> Numerator:
    out = {ring.zero_degree(): 1}
    for m in monomials:
        out = _mul(out, _one_minus(ring, m))
    return out


@lru_cache(maxsize=8192)
def monomial_numerator(ring: GradedRing, gens: Tuple[Monomial, ...]) -> Numerator:
    """Numerator of the Hilbert series of S/(gens) over prod (1 - t_i)^{m_i}."""
    if not gens:
        return {ring.zero_degree(): 1}
    if any(sum(g) == 0 for g in gens):
        return {}
    nonpure = [g for g in gens if sum(1 for e in g if e) > 1]
    if len(nonpure) <= 1:
        pure = [g for g in gens if g not in nonpure]
        base = _product(ring, pure)
        if not nonpure:
            return base
        m = nonpure[0]
        colon = minimalize(mono_div(p, mono_gcd(p, m)) for p in pure)
        return _add(base, _shift(_product(ring, colon), ring.degree(m)), -1)
    counts = [sum(1 for g in nonpure if g[v]) for v in range(ring.nvars)]
    pivot = max(range(ring.nvars), key=lambda v: (counts[v], -v))
    x = tuple(1 if v == pivot else 0 for v in range(ring.nvars))
    plus = tuple(minimalize(gens + (x,)))
    colon = tuple(minimalize(mono_div(g, mono_gcd(g, x)) for g in gens))
    return _add(monomial_numerator(ring, plus), _shift(monomial_numerator(ring, colon), ring.degree(x)))


@dataclass(frozen=True)
class HilbertSeriesDatum:
    numerator: Tuple[Tuple[MultiDegree, int], ...]
    block_sizes: Tuple[int, ...]

    def as_dict(self) -> Numerator:
        return dict(self.numerator)

    def is_zero(self) -> bool:
        return not self.numerator

    def to_report(self) -> list:
        return [[list(k), v] for k, v in self.numerator]


@dataclass(frozen=True)
class HilbertPolynomialDatum:
    poly: Poly
    threshold: MultiDegree

    @property
    def gens(self):
        return self.poly.gens

    def is_zero(self) -> bool:
        return self.poly.is_zero

    @property
    def total_degree(self):
        return NEG_INF if self.poly.is_zero else self.poly.total_degree()

    def coefficients(self) -> dict:
        return {monom: QQ.to_sympy(c) for monom, c in self.poly.terms()} if not self.poly.is_zero else {}

    def evaluate(self, n: MultiDegree):
        return self.poly.as_expr().subs(dict(zip(self.gens, n)))

    def shifted(self, i: int, amount: int = 1) -> "HilbertPolynomialDatum":
        """The polynomial n -> P(n - amount * e_i)."""
        expr = self.poly.as_expr().subs(self.gens[i], self.gens[i] - amount)
        return HilbertPolynomialDatum(Poly(expr, *self.gens, domain=QQ), self.threshold)

    def difference(self, k: MultiDegree) -> "HilbertPolynomialDatum":
        out = self.poly
        for i, times in enumerate(k):
            for _ in range(times):
                out = backward_difference(out, i)
        return HilbertPolynomialDatum(out, self.threshold)

    def __sub__(self, other: "HilbertPolynomialDatum") -> "HilbertPolynomialDatum":
        return HilbertPolynomialDatum(self.poly - other.poly, self.threshold)

    def __str__(self):
        return str(self.poly.as_expr())


def polynomial_symbols(d: int):
    return symbols(f"n1:{d + 1}")


def backward_difference(poly: Poly, i: int) -> Poly:
    expr = poly.as_expr()
    g = poly.gens[i]
    return Poly(expr - expr.subs(g, g - 1), *poly.gens, domain=QQ)


def hilbert_series(M: GradedModulePresentation) -> HilbertSeriesDatum:
    ring = M.ring
    total: Numerator = {}
    for lead, shift in zip(M.relations.leading_ideals(), M.spec.shifts):
        part = monomial_numerator(ring, tuple(lead))
        total = _add(total, _shift(part, shift))
    return HilbertSeriesDatum(tuple(sorted(total.items())), ring.block_sizes)


def series_coefficient(hs: HilbertSeriesDatum, n: MultiDegree) -> int:
    out = 0
    for a, c in hs.numerator:
        term = c
        for ni, ai, mi in zip(n, a, hs.block_sizes):
            if ni < ai:
                term = 0
                break
            term *= comb(ni - ai + mi - 1, mi - 1)
        out += term
    return out


def hilbert_polynomial(hs: HilbertSeriesDatum) -> HilbertPolynomialDatum:
    d = len(hs.block_sizes)
    gens = polynomial_symbols(d)
    total = Poly(0, *gens, domain=QQ)
    for a, c in hs.numerator:
        term = Poly(c, *gens, domain=QQ)
        for i, m in enumerate(hs.block_sizes):
            for j in range(1, m):
                term = term * Poly((gens[i] - a[i] + j) / Integer(j), *gens, domain=QQ)
        total = total + term
    if hs.numerator:
        threshold = tuple(max(a[i] for a, _ in hs.numerator) for i in range(d))
    else:
        threshold = (0,) * d
    return HilbertPolynomialDatum(total, threshold)


def module_polynomial(M: GradedModulePresentation) -> HilbertPolynomialDatum:
    return hilbert_polynomial(hilbert_series(M))


def dim_supp_pp(M: GradedModulePresentation):
    return module_polynomial(M).total_degree


@dataclass(frozen=True)
class MixedMultiplicityValue:
    k: MultiDegree
    value: int
    extended: bool


def constant_value(datum: HilbertPolynomialDatum) -> int:
    """Integer value of a constant polynomial."""
    if datum.total_degree not in (NEG_INF, 0):
        raise InternalInconsistency(f"expected a constant, got {datum}")
    value = datum.evaluate((0,) * len(datum.gens))
    if not value.is_integer:
        raise NonIntegralMultiplicity(f"non-integral value {value}")
    return int(value)


def multiplicity_from_polynomial(hp: HilbertPolynomialDatum, k: MultiDegree) -> MixedMultiplicityValue:
    k = tuple(k)
    if len(k) != len(hp.gens):
        raise WrongDegree(f"type {k} does not match {len(hp.gens)} blocks")
    s = hp.total_degree
    if sum(k) < s:
        raise TypeTooSmall(f"|k| = {sum(k)} is below dim Supp++ = {s}")
    if sum(k) > s:
        return MixedMultiplicityValue(k, 0, True)
    value = constant_value(hp.difference(k))
    if value < 0:
        raise InternalInconsistency(f"negative mixed multiplicity {value} for k = {k}")
    return MixedMultiplicityValue(k, value, False)


def mixed_multiplicity(M: GradedModulePresentation, k: MultiDegree) -> MixedMultiplicityValue:
    return multiplicity_from_polynomial(module_polynomial(M), k)


def types_of_total(d: int, total: int) -> List[MultiDegree]:
    return [k for k in itertools.product(range(total + 1), repeat=d) if sum(k) == total]


def mixed_multiplicity_table(M: GradedModulePresentation) -> Dict[MultiDegree, int]:
    hp = module_polynomial(M)
    s = hp.total_degree
    if s == NEG_INF:
        return {}
    table = {k: multiplicity_from_polynomial(hp, k).value for k in types_of_total(M.ring.d, s)}
    if not any(table.values()):
        raise InternalInconsistency("all top mixed multiplicities vanish")
    return table


def difference_formula_check(M: GradedModulePresentation, a: Polynomial, block: int = None) -> dict:
    """Delta^{e_i} P_M(n) against P_{M/aM}(n) - P_{0_M:a}(n - e_i)."""
    from helpers.groebner import colon_submodule
    if a.is_zero() and block is None:
        raise WrongDegree("the zero element needs an explicit block")
    i = a.block_of_linear() if block is None else block
    p_m = module_polynomial(M)
    p_quot = module_polynomial(quotient_by_elements(M, [a]))
    p_colon = module_polynomial(colon_submodule(M, a))
    lhs = p_m.difference(unit_degree(M.ring.d, i))
    rhs = p_quot - p_colon.shifted(i)
    holds = (lhs - rhs).is_zero()
    logger.debug(f"Difference formula for a = {a}: holds={holds}")
    return {
        "holds": holds,
        "block": i + 1,
        "difference": str(lhs),
        "quotient": str(p_quot),
        "colon": str(p_colon),
    }
