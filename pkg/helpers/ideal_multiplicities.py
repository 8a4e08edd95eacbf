"""Mixed multiplicities of a module N with respect to ideals J, I_1, ..., I_d.

Everything lives in a standard graded ring R = k[y_1, ..., y_m] with
homogeneous ideals, so lengths are total dimensions of finite-length graded
quotients. The lengths l(J^n0 I^n N / J^(n0+1) I^n N) form the grid of the
associated module; its polynomial is recovered by Newton differences and
checked on a surrounding box before any value is reported.
"""
import copy
import itertools
import logging
import random
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field, replace
from functools import lru_cache
from math import comb
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from helpers.errors import (
    HypothesisFailed,
    InfiniteLength,
    InternalInconsistency,
    NotMMSystem,
    NotPrimary,
    NotSuperficialSequence,
    PreconditionFailed,
    RingMismatch,
    StabilizationUncertain,
    TypeTooSmall,
    ZeroLeadingForm,
)
from helpers.exact_algebra import (
    NEG_INF,
    GradedRing,
    Polynomial,
    enumerate_monomials,
    format_dimension,
    minimalize,
    mono_divides,
    mono_mul,
)
from helpers.graded_module import GradedModulePresentation, quotient_by_ideal
from helpers.groebner import (
    GroebnerBasis,
    ModuleElement,
    buchberger,
    colon_generators,
    colon_submodule,
    ideal_basis,
    intersect,
    krull_dim_of_basis,
    saturate_submodule,
)
from helpers.hilbert_engine import hilbert_series
from helpers.mixed_systems import ElementSequence

logger = logging.getLogger(__name__)

LATTICE_BOX_LIMIT = 200000


@dataclass(frozen=True)
class GridSettings:
    window: int = 3
    grid_offset: int = 2
    grid_attempts: int = 3
    superficial_offset_factor: int = 3
    superficial_span: int = 3
    retries: int = 32
    coefficient_bound: int = 1000
    jobs: int = 1

    @classmethod
    def from_settings(cls, settings: dict) -> "GridSettings":
        names = cls.__dataclass_fields__.keys()
        return cls(**{k: int(v) for k, v in settings.items() if k in names})


# ---------------------------------------------------------------- ideals

def _generators(gb: GroebnerBasis) -> Tuple[Polynomial, ...]:
    return tuple(g.coordinates()[0] for g in gb.generators)


@lru_cache(maxsize=4096)
def ideal_product(ring: GradedRing, a: Tuple[Polynomial, ...], b: Tuple[Polynomial, ...]) -> Tuple[Polynomial, ...]:
    return _generators(ideal_basis(ring, [f * g for f in a for g in b]))


@lru_cache(maxsize=4096)
def ideal_power(ring: GradedRing, gens: Tuple[Polynomial, ...], n: int) -> Tuple[Polynomial, ...]:
    if n == 0:
        return (Polynomial.constant(ring),)
    if n == 1:
        return _generators(ideal_basis(ring, gens))
    return ideal_product(ring, ideal_power(ring, gens, n - 1), ideal_power(ring, gens, 1))


def ideal_contains(ring: GradedRing, gens: Sequence[Polynomial], f: Polynomial) -> bool:
    gb = ideal_basis(ring, gens)
    spec = gb.spec
    return gb.contains(ModuleElement.from_polynomials(spec, [f]))


@dataclass
class IdealFamily:
    """J (primary to the irrelevant ideal), I_1..I_d and a graded module N over one-block R."""

    ring: GradedRing
    J: Tuple[Polynomial, ...]
    I: Tuple[Tuple[Polynomial, ...], ...]
    N: GradedModulePresentation
    primary_power: int = field(default=0, init=False)

    def __post_init__(self):
        if self.ring.d != 1:
            raise PreconditionFailed("ideal families live in a ring with a single block")
        if self.N.ring != self.ring:
            raise RingMismatch("N lives over another ring")
        self.J = tuple(self.J)
        self.I = tuple(tuple(gens) for gens in self.I)
        for g in self.J + tuple(f for gens in self.I for f in gens):
            if not g.is_homogeneous():
                raise PreconditionFailed(f"ideal generator {g} is not homogeneous")
        self.primary_power = _primary_power(self.ring, self.J)

    @property
    def d(self) -> int:
        return len(self.I)

    def ideal(self, i: int) -> Tuple[Polynomial, ...]:
        """I_0 = J, then I_1..I_d."""
        return self.J if i == 0 else self.I[i - 1]

    def with_module(self, N: GradedModulePresentation) -> "IdealFamily":
        out = copy.copy(self)
        out.N = N
        return out

    def product_ideal(self) -> Tuple[Polynomial, ...]:
        out = self.J
        for gens in self.I:
            out = ideal_product(self.ring, out, gens)
        return out


def _primary_power(ring: GradedRing, J: Sequence[Polynomial]) -> int:
    """Smallest t with (y_1..y_m)^t inside J."""
    gb = ideal_basis(ring, J)
    if krull_dim_of_basis(gb) != 0:
        raise NotPrimary("J is not primary to the maximal homogeneous ideal")
    numerator = dict(hilbert_series(GradedModulePresentation(gb.spec, gb.generators)).numerator)
    coefficients = _series_polynomial(numerator, ring.nvars)
    t = len(coefficients)
    while t > 0 and coefficients[t - 1] == 0:
        t -= 1
    return t


def ideal_products(fam: IdealFamily, n0: int, n: Sequence[int]) -> Tuple[Polynomial, ...]:
    """Generators of J^n0 * I_1^n_1 * ... * I_d^n_d."""
    if n0 < 0 or any(e < 0 for e in n):
        raise PreconditionFailed("exponents must be non-negative")
    out = ideal_power(fam.ring, fam.J, n0)
    for gens, e in zip(fam.I, n):
        out = ideal_product(fam.ring, out, ideal_power(fam.ring, gens, e))
    return out


# ---------------------------------------------------------------- lengths

def _series_polynomial(numerator: Dict[tuple, int], nvars: int) -> List[int]:
    """Coefficients of numerator / (1 - t)^nvars, which must be a polynomial."""
    if not numerator:
        return []
    top = max(k[0] for k in numerator)
    coefficients = [0] * (top + 1)
    for (deg,), c in numerator.items():
        coefficients[deg] += c
    for _ in range(nvars):
        if sum(coefficients) != 0:
            raise InfiniteLength("the quotient does not have finite length")
        coefficients = list(itertools.accumulate(coefficients))[:-1]
    return coefficients


def _numerator(M: GradedModulePresentation) -> Dict[tuple, int]:
    return dict(hilbert_series(M).numerator)


def finite_length(M: GradedModulePresentation) -> int:
    return sum(_series_polynomial(_numerator(M), M.ring.nvars))


def _length_difference(small: GradedModulePresentation, large: GradedModulePresentation) -> int:
    """l(large) - l(small) for quotients of one free module whose difference has finite length."""
    diff = dict(_numerator(large))
    for k, v in _numerator(small).items():
        diff[k] = diff.get(k, 0) - v
    return sum(_series_polynomial({k: v for k, v in diff.items() if v}, small.ring.nvars))


def associated_length(fam: IdealFamily, n0: int, n: Sequence[int]) -> int:
    """l(J^n0 I^n N / J^(n0+1) I^n N)."""
    P = ideal_products(fam, n0, n)
    JP = ideal_product(fam.ring, fam.J, P)
    # l(PN/JPN) = l(N/JPN) - l(N/PN)
    value = _length_difference(quotient_by_ideal(fam.N, P), quotient_by_ideal(fam.N, JP))
    if value < 0:
        raise InternalInconsistency(f"negative length {value} at {(n0, tuple(n))}")
    logger.debug(f"associated length at {(n0, tuple(n))} = {value}")
    return value


@dataclass(frozen=True)
class AssociatedLengthGrid:
    window: Tuple[range, ...]
    values: Dict[tuple, int]

    def to_report(self) -> list:
        return [[list(k), v] for k, v in sorted(self.values.items())]


def _evaluate_cells(fn: Callable[[tuple], int], cells: Sequence[tuple], jobs: int) -> Dict[tuple, int]:
    if jobs <= 1:
        return {c: fn(c) for c in cells}
    values = {}
    with ThreadPoolExecutor(max_workers=jobs) as executor:
        futures = {executor.submit(fn, c): c for c in cells}
        for future in as_completed(futures):
            values[futures[future]] = future.result()
    return values


def associated_length_grid(fam: IdealFamily, window: Sequence[range], jobs: int = 1) -> AssociatedLengthGrid:
    cells = list(itertools.product(*window))
    values = _evaluate_cells(lambda c: associated_length(fam, c[0], c[1:]), cells, jobs)
    return AssociatedLengthGrid(tuple(window), values)


def _monomial_ideal(gens: Sequence[Polynomial]) -> List[tuple]:
    if not all(g.is_monomial() for g in gens):
        raise PreconditionFailed("the lattice oracle needs monomial ideals")
    return [g.leading_monomial() for g in gens]


def _monomial_product(a: List[tuple], b: List[tuple]) -> List[tuple]:
    return minimalize(mono_mul(x, y) for x in a for y in b)


def lattice_oracle(fam: IdealFamily, n0: int, n: Sequence[int]) -> int:
    """Count monomials of J^n0 I^n N outside J^(n0+1) I^n N by divisibility scans alone."""
    ring = fam.ring
    one = ring.one_monomial()
    J = _monomial_ideal(fam.J)
    P = [one]
    for _ in range(n0):
        P = _monomial_product(P, J)
    for gens, e in zip(fam.I, n):
        mons = _monomial_ideal(gens)
        for _ in range(e):
            P = _monomial_product(P, mons)
    JP = _monomial_product(P, J)
    relations: List[List[tuple]] = [[] for _ in range(fam.N.rank)]
    for g in fam.N.relation_gens:
        if not g.is_monomial():
            raise PreconditionFailed("the lattice oracle needs a monomial presentation of N")
        (m, pos), = g.terms.keys()
        relations[pos].append(m)
    bound = max(sum(p) for p in P) + fam.primary_power
    if comb(bound + ring.nvars, ring.nvars) * max(fam.N.rank, 1) > LATTICE_BOX_LIMIT:
        raise PreconditionFailed(f"lattice box of degree {bound} is too large")
    count = 0
    for total in range(bound + 1):
        for u in enumerate_monomials(ring, (total,)):
            for rel in relations:
                if any(mono_divides(r, u) for r in rel):
                    continue
                if any(mono_divides(p, u) for p in P) and not any(mono_divides(q, u) for q in JP):
                    count += 1
    return count


# ---------------------------------------------------------------- grid fits

@dataclass(frozen=True)
class GridFit:
    base: tuple
    degree: int
    newton: Dict[tuple, int]
    status: str
    checked: int
    attempts: int

    def coefficient(self, k: tuple) -> int:
        return self.newton.get(tuple(k), 0)

    def predict(self, offset: tuple) -> int:
        total = 0
        for a, c in self.newton.items():
            term = c
            for j, ai in zip(offset, a):
                term *= comb(j, ai)
            total += term
        return total

    @property
    def fitted_degree(self):
        degrees = [sum(a) for a, c in self.newton.items() if c]
        return max(degrees) if degrees else NEG_INF

    def to_report(self) -> dict:
        return {
            "base": list(self.base),
            "degree": self.degree,
            "status": self.status,
            "checked_points": self.checked,
            "attempts": self.attempts,
        }


def fit_grid_polynomial(
    fn: Callable[[tuple], int],
    nvars: int,
    degree: int,
    offset: int = 2,
    margin: int = 3,
    attempts: int = 3,
    jobs: int = 1,
) -> GridFit:
    """Newton forward differences on the simplex |j| <= degree at a base point, validated on a box.

    A fit with margin < 1 is returned with status "uncertain"; a mismatch on
    every attempted base raises StabilizationUncertain.
    """
    simplex = [a for a in itertools.product(range(degree + 1), repeat=nvars) if sum(a) <= degree]
    box = list(itertools.product(range(degree + max(margin, 0) + 1), repeat=nvars))
    step = degree + max(margin, 0) + 1
    for attempt in range(attempts):
        base = tuple(offset + attempt * step for _ in range(nvars))
        cells = sorted({tuple(b + j for b, j in zip(base, p)) for p in box})
        values = _evaluate_cells(fn, cells, jobs)
        newton = {}
        for a in simplex:
            total = 0
            for b in itertools.product(*(range(ai + 1) for ai in a)):
                sign = -1 if (sum(a) - sum(b)) % 2 else 1
                weight = 1
                for ai, bi in zip(a, b):
                    weight *= comb(ai, bi)
                total += sign * weight * values[tuple(x + y for x, y in zip(base, b))]
            newton[a] = total
        fit = GridFit(base, degree, newton, "pass", len(box), attempt + 1)
        mismatch = [p for p in box if fit.predict(p) != values[tuple(x + y for x, y in zip(base, p))]]
        if not mismatch:
            if margin < 1:
                logger.warning(f"Grid fit at {base} has no validation margin; marking it uncertain")
                return replace(fit, status="uncertain")
            return fit
        logger.warning(f"Grid fit of degree {degree} at {base} fails at {len(mismatch)} of {len(box)} points")
    raise StabilizationUncertain(f"no stable polynomial of degree {degree} after {attempts} bases")


# ---------------------------------------------------------------- saturation and dimensions

def _saturate_by_family(fam: IdealFamily, gb: GroebnerBasis) -> GroebnerBasis:
    """U : I^inf for I = J I_1 ... I_d, one factor at a time."""
    current = saturate_submodule(gb, list(fam.J))
    for gens in fam.I:
        current = saturate_submodule(current, list(gens))
    return current


def saturated_module(fam: IdealFamily, N: Optional[GradedModulePresentation] = None) -> GradedModulePresentation:
    """N / (0_N : I^inf)."""
    N = fam.N if N is None else N
    sat = _saturate_by_family(fam, N.relations)
    return GradedModulePresentation(N.spec, sat.generators)


def saturation_dimension(fam: IdealFamily, N: Optional[GradedModulePresentation] = None):
    N = fam.N if N is None else N
    return krull_dim_of_basis(_saturate_by_family(fam, N.relations))


def module_dimension(N: GradedModulePresentation):
    return krull_dim_of_basis(N.relations)


# ---------------------------------------------------------------- multiplicities

@dataclass(frozen=True)
class IdealMixedMultiplicity:
    k0: int
    k: Tuple[int, ...]
    value: int
    extended: bool
    status: str = "pass"
    fit: Optional[GridFit] = None
    dim: object = None

    def to_report(self) -> dict:
        out = {
            "k0": self.k0,
            "k": list(self.k),
            "value": self.value,
            "extended": self.extended,
            "status": self.status,
            "dim": format_dimension(self.dim),
        }
        if self.fit is not None:
            out["fit"] = self.fit.to_report()
        return out


def ideal_mixed_multiplicity(fam: IdealFamily, k0: int, k: Sequence[int], settings: GridSettings = GridSettings()) -> IdealMixedMultiplicity:
    k = tuple(k)
    if len(k) != fam.d:
        raise PreconditionFailed(f"k has {len(k)} entries for {fam.d} ideals")
    dim = saturation_dimension(fam)
    s = dim - 1
    if k0 + sum(k) < s:
        raise TypeTooSmall(f"k0 + |k| = {k0 + sum(k)} is below {s}")
    if k0 + sum(k) > s:
        return IdealMixedMultiplicity(k0, k, 0, True, "pass", None, dim)
    fit = fit_grid_polynomial(
        lambda c: associated_length(fam, c[0], c[1:]),
        fam.d + 1,
        s,
        settings.grid_offset,
        settings.window,
        settings.grid_attempts,
        settings.jobs,
    )
    if fit.fitted_degree != s:
        raise InternalInconsistency(f"grid polynomial has degree {fit.fitted_degree}, expected {s}")
    value = fit.coefficient((k0,) + k)
    return IdealMixedMultiplicity(k0, k, value, False, fit.status, fit, dim)


def ideal_mixed_multiplicity_table(fam: IdealFamily, settings: GridSettings = GridSettings()) -> Dict[tuple, int]:
    dim = saturation_dimension(fam)
    s = dim - 1
    if s < 0:
        return {}
    table = {}
    for kk in itertools.product(range(s + 1), repeat=fam.d + 1):
        if sum(kk) == s:
            table[kk] = ideal_mixed_multiplicity(fam, kk[0], kk[1:], settings).value
    return table


def samuel_multiplicity(ring: GradedRing, J: Sequence[Polynomial], N: GradedModulePresentation, settings: GridSettings = GridSettings()) -> int:
    """e(J; N) from the fitted Hilbert-Samuel function l(N / J^(n+1) N)."""
    if N.is_zero():
        return 0
    dim = module_dimension(N)
    if dim == NEG_INF:
        return 0
    if dim == 0:
        return finite_length(N)
    gens = tuple(J)

    def length(c):
        return finite_length(quotient_by_ideal(N, ideal_power(ring, gens, c[0] + 1)))

    fit = fit_grid_polynomial(length, 1, dim, settings.grid_offset, settings.window, settings.grid_attempts, settings.jobs)
    if fit.status != "pass":
        raise StabilizationUncertain("Hilbert-Samuel fit has no validation margin")
    return fit.coefficient((dim,))


# ---------------------------------------------------------------- superficial and weak-(FC) elements

def check_leading_form(fam: IdealFamily, a: Polynomial, i: int):
    """a must lie in I_i and have a nonzero image in the degree-e_i part of the associated module."""
    ring = fam.ring
    if not ideal_contains(ring, fam.ideal(i), a):
        raise PreconditionFailed(f"{a} is not in ideal {i}")
    deeper = ideal_product(ring, fam.J, fam.ideal(i))
    if ideal_contains(ring, deeper, a):
        raise ZeroLeadingForm(f"{a} has zero image in the associated graded module")


def _free_submodule(N: GradedModulePresentation, gens: Sequence[Polynomial], extra: Sequence[ModuleElement] = ()) -> GroebnerBasis:
    vecs = [ModuleElement.basis(N.spec, e).mul_poly(g) for g in gens for e in range(N.rank)]
    return buchberger([v for v in vecs if not v.is_zero()] + list(extra), N.spec)


def superficial_window(fam: IdealFamily, settings: GridSettings) -> List[tuple]:
    degrees = [max(sum(m) for m in g.terms) for g in fam.J + tuple(f for gens in fam.I for f in gens)]
    w0 = settings.superficial_offset_factor * max(degrees)
    side = range(w0, w0 + settings.superficial_span + 1)
    return list(itertools.product(side, repeat=fam.d + 1))


def is_rees_superficial(fam: IdealFamily, a: Polynomial, i: int, settings: GridSettings = GridSettings()) -> bool:
    """aN meets J^n0 I^n I_i N exactly in a J^n0 I^n N on the configured grid window."""
    N = fam.N
    relations = list(N.relations.generators)
    a_part = _free_submodule(N, [a], relations)

    def holds(cell) -> bool:
        P = ideal_products(fam, cell[0], cell[1:])
        deeper = _free_submodule(N, ideal_product(fam.ring, P, fam.ideal(i)), relations)
        target = _free_submodule(N, [a * p for p in P], relations)
        return all(target.contains(v) for v in intersect(a_part, deeper).generators)

    cells = superficial_window(fam, settings)
    verdicts = _evaluate_cells(holds, cells, settings.jobs)
    ok = all(verdicts.values())
    logger.debug(f"{a} superficial for ideal {i} on {len(cells)} grid cells: {ok}")
    return ok


def is_filter_regular_for_family(fam: IdealFamily, a: Polynomial) -> bool:
    """0_N : a inside 0_N : I^inf."""
    sat = _saturate_by_family(fam, fam.N.relations)
    return all(sat.contains(v) for v in colon_generators(fam.N.relations, a).generators)


def is_weak_fc(fam: IdealFamily, a: Polynomial, i: int, settings: GridSettings = GridSettings()) -> bool:
    if not ideal_contains(fam.ring, fam.ideal(i), a):
        return False
    return is_filter_regular_for_family(fam, a) and is_rees_superficial(fam, a, i, settings)


def _generic_form(ring: GradedRing, degree: int, rng: random.Random, bound: int) -> Polynomial:
    terms = {m: _coefficient(ring, rng, bound) for m in enumerate_monomials(ring, (degree,))}
    return Polynomial(ring, terms)


def _coefficient(ring: GradedRing, rng: random.Random, bound: int) -> int:
    if ring.characteristic:
        return rng.randrange(1, ring.characteristic)
    c = 0
    while c == 0:
        c = rng.randint(-bound, bound)
    return c


def sample_ideal_element(fam: IdealFamily, i: int, rng: random.Random, degree: int, bound: int = 1000) -> Polynomial:
    """Generic homogeneous element of degree ``degree`` in ideal i."""
    ring = fam.ring
    out = Polynomial.zero(ring)
    for g in fam.ideal(i):
        dg = sum(next(iter(g.terms)))
        if dg == degree:
            out = out + g.scale(_coefficient(ring, rng, bound))
        elif dg < degree:
            out = out + _generic_form(ring, degree - dg, rng, bound) * g
    return out


def build_weak_fc_sequence(fam: IdealFamily, k0: int, k: Sequence[int], seed=0, settings: GridSettings = GridSettings(), superficial_only: bool = False) -> ElementSequence:
    """k0 elements of J followed by k_i elements of I_i, each weak-(FC) for the running quotient."""
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    counts = (k0,) + tuple(k)
    current = fam
    elements, blocks = [], []
    for i, count in enumerate(counts):
        degrees = sorted({sum(next(iter(g.terms))) for g in fam.ideal(i)})
        for _ in range(count):
            for attempt in range(settings.retries):
                a = sample_ideal_element(fam, i, rng, degrees[attempt % len(degrees)], settings.coefficient_bound)
                try:
                    check_leading_form(fam, a, i)
                except ZeroLeadingForm:
                    logger.warning(f"Sampled {a} has zero leading form, resampling")
                    continue
                ok = is_rees_superficial(current, a, i, settings)
                if ok and not superficial_only:
                    ok = is_filter_regular_for_family(current, a)
                if ok:
                    break
                logger.warning(f"Sampled {a} is not weak-(FC) for ideal {i} (attempt {attempt + 1}/{settings.retries})")
            else:
                raise NotSuperficialSequence(f"no suitable element of ideal {i} after {settings.retries} samples")
            elements.append(a)
            blocks.append(i)
            current = current.with_module(quotient_by_ideal(current.N, [a]))
    return ElementSequence(tuple(elements), tuple(blocks), fam.d + 1)


@dataclass(frozen=True)
class IdealSystemCertificate:
    is_mm_system: bool
    dim_after: object
    superficial_flags: Tuple[bool, ...]
    type: Tuple[int, ...]

    def to_report(self) -> dict:
        return {
            "is_mm_system": self.is_mm_system,
            "dim_after": format_dimension(self.dim_after),
            "superficial_flags": list(self.superficial_flags),
            "type": list(self.type),
            "associated_system": self.is_mm_system,
        }


def certify_ideal_mm_system(fam: IdealFamily, x: ElementSequence, settings: GridSettings = GridSettings()) -> IdealSystemCertificate:
    current = fam
    flags = []
    for a, i in zip(x.elements, x.blocks):
        ok = is_rees_superficial(current, a, i, settings)
        flags.append(ok)
        if not ok:
            raise NotSuperficialSequence(f"{a} is not superficial for ideal {i} on the running quotient")
        current = current.with_module(quotient_by_ideal(current.N, [a]))
    dim_after = saturation_dimension(current)
    return IdealSystemCertificate(dim_after <= 1, dim_after, tuple(flags), x.type)


# ---------------------------------------------------------------- module-level recursions

def extended_multiplicity(fam: IdealFamily, N: GradedModulePresentation, k0: int, k: Sequence[int], settings: GridSettings) -> IdealMixedMultiplicity:
    """E(J^[k0+1], I^[k]; N), zero above the dimension, for another module over the same ideals."""
    if k0 < 0 or any(e < 0 for e in k):
        raise PreconditionFailed("negative type in a correction term")
    return ideal_mixed_multiplicity(fam.with_module(N), k0, k, settings)


def _ideal_symbol(fam: IdealFamily, x: ElementSequence, settings: GridSettings, memo: Dict) -> int:
    N = fam.N
    key = (N.cache_key(), x.elements)
    if key in memo:
        return memo[key]
    after = saturation_dimension(fam, quotient_by_ideal(N, list(x.elements)))
    if after > 1:
        raise NotMMSystem(f"dim N/(xN : I^inf) = {format_dimension(after)} exceeds 1")
    if len(x) == 0:
        dim = saturation_dimension(fam)
        value = samuel_multiplicity(fam.ring, fam.J, saturated_module(fam), settings) if dim == 1 else 0
    else:
        a, rest = x[0], x[1:]
        value = (
            _ideal_symbol(fam.with_module(quotient_by_ideal(N, [a])), rest, settings, memo)
            - _ideal_symbol(fam.with_module(colon_submodule(N, a)), rest, settings, memo)
        )
    memo[key] = value
    return value


def ideal_symbol(fam: IdealFamily, x: ElementSequence, settings: GridSettings = GridSettings()) -> int:
    return _ideal_symbol(fam, x, settings, {})


def grid_euler_characteristic(fam: IdealFamily, k0: int, k: Sequence[int], base: tuple) -> int:
    """Euler characteristic of a top-type system, taken from the grid.

    For a mixed multiplicity system of type ``(k0, k)`` the alternating sum of
    Koszul homology lengths equals this alternating sum of grid lengths over
    the faces of the type box ending at ``base``, so the value depends only on
    the type and the elements themselves are never read. Homology over the
    associated graded module is not computed here.
    """
    counts = (k0,) + tuple(k)
    total = 0
    for choice in itertools.product(*(range(c + 1) for c in counts)):
        sign = -1 if sum(choice) % 2 else 1
        weight = 1
        for c, j in zip(counts, choice):
            weight *= comb(c, j)
        cell = tuple(b - j for b, j in zip(base, choice))
        total += sign * weight * associated_length(fam, cell[0], cell[1:])
    return total


def _check_top_type(fam: IdealFamily, k0: int, k: Sequence[int]):
    dim = saturation_dimension(fam)
    if len(k) != fam.d:
        raise PreconditionFailed(f"k has {len(k)} entries for {fam.d} ideals")
    # when I is inside the radical of Ann N every type is allowed and all values vanish
    if dim >= 1 and k0 + sum(k) != dim - 1:
        raise PreconditionFailed(f"k0 + |k| = {k0 + sum(k)} differs from dim N/(0:I^inf) - 1 = {format_dimension(dim - 1)}")
    return dim


def _verdict_status(*values: IdealMixedMultiplicity) -> str:
    return "uncertain" if any(v.status != "pass" for v in values) else "pass"


def verify_ideal_main_theorem(fam: IdealFamily, k0: int, k: Sequence[int], seed=0, settings: GridSettings = GridSettings()) -> dict:
    """Grid-fit multiplicity, grid Euler characteristic and the module symbol of a generic system."""
    k = tuple(k)
    dim = _check_top_type(fam, k0, k)
    e_value = ideal_mixed_multiplicity(fam, k0, k, settings)
    x = build_weak_fc_sequence(fam, k0, k, seed, settings)
    cert = certify_ideal_mm_system(fam, x, settings)
    if not cert.is_mm_system:
        raise InternalInconsistency("a weak-(FC) sequence of top type is not a mixed multiplicity system")
    base = e_value.fit.base if e_value.fit else (settings.grid_offset,) * (fam.d + 1)
    shift = settings.window + max(k0 + sum(k), 0) + 1
    chi = grid_euler_characteristic(fam, k0, k, tuple(b + shift for b in base))
    symbol = ideal_symbol(fam, x, settings)
    return {
        "holds": e_value.value == chi == symbol,
        "status": _verdict_status(e_value),
        "dim": format_dimension(dim),
        "e": e_value.value,
        "chi": chi,
        "chi_route": "euler_identity",
        "symbol": symbol,
        "sequence": x.to_report(),
        "certificate": cert.to_report(),
        "fit": e_value.to_report(),
    }


def verify_fc_length_route(fam: IdealFamily, k0: int, k: Sequence[int], seed=0, settings: GridSettings = GridSettings()) -> dict:
    """e against E(J^[1], I^[0]; N/xN), the nonvanishing criterion, and e(J; N/(xN : I^inf))."""
    k = tuple(k)
    dim = _check_top_type(fam, k0, k)
    e_value = ideal_mixed_multiplicity(fam, k0, k, settings)
    x = build_weak_fc_sequence(fam, k0, k, seed, settings)
    quotient = quotient_by_ideal(fam.N, list(x.elements))
    reduced = extended_multiplicity(fam, quotient, 0, (0,) * fam.d, settings)
    dim_after = saturation_dimension(fam, quotient)
    criterion = (e_value.value != 0) == (dim_after == 1)
    report = {
        "holds": e_value.value == reduced.value and criterion,
        "status": _verdict_status(e_value, reduced),
        "dim": format_dimension(dim),
        "e": e_value.value,
        "E_quotient": reduced.value,
        "dim_after": format_dimension(dim_after),
        "nonvanishing_criterion": criterion,
        "sequence": x.to_report(),
    }
    if dim_after == 1:
        samuel = samuel_multiplicity(fam.ring, fam.J, saturated_module(fam, quotient), settings)
        report["samuel"] = samuel
        report["holds"] = report["holds"] and samuel == e_value.value
    return report


def _corrections(fam: IdealFamily, x: ElementSequence, k0: int, k: tuple, settings: GridSettings):
    """Correction terms E(J^[k0-m_i+1], I^[k-h_i]; N_i) and the running quotients."""
    corrections = []
    quotients = [fam.N]
    current = fam.N
    for i, a in enumerate(x):
        colon = colon_submodule(current, a)
        prefix = x.prefix_type(i + 1)
        remaining = tuple(c - p for c, p in zip((k0,) + k, prefix))
        corrections.append(extended_multiplicity(fam, colon, remaining[0], remaining[1:], settings))
        current = quotient_by_ideal(current, [a])
        quotients.append(current)
    return corrections, quotients


def verify_ideal_decomposition(fam: IdealFamily, k0: int, k: Sequence[int], seed=0, settings: GridSettings = GridSettings()) -> dict:
    k = tuple(k)
    dim = _check_top_type(fam, k0, k)
    e_value = ideal_mixed_multiplicity(fam, k0, k, settings)
    if e_value.value == 0:
        raise HypothesisFailed(f"e(J^[{k0 + 1}], I^[{k}]; N) = 0")
    x = build_weak_fc_sequence(fam, k0, k, seed, settings)
    corrections, quotients = _corrections(fam, x, k0, k, settings)
    prefix_dims = [saturation_dimension(fam, q) for q in quotients]
    dims_drop = all(v == dim - i for i, v in enumerate(prefix_dims))
    samuel = samuel_multiplicity(fam.ring, fam.J, saturated_module(fam, quotients[-1]), settings)
    formula = e_value.value == samuel - sum(c.value for c in corrections)
    return {
        "holds": dims_drop and formula,
        "status": _verdict_status(e_value, *corrections),
        "e": e_value.value,
        "samuel": samuel,
        "corrections": [c.value for c in corrections],
        "prefix_dims": [format_dimension(v) for v in prefix_dims],
        "dims_drop": dims_drop,
        "sequence": x.to_report(),
    }


def verify_primary_case(fam: IdealFamily, k0: int, k: Sequence[int], seed=0, settings: GridSettings = GridSettings()) -> dict:
    """All ideals primary: x is part of a system of parameters and e = e(J; N/xN) - corrections."""
    k = tuple(k)
    for gens in fam.I:
        if krull_dim_of_basis(ideal_basis(fam.ring, gens)) != 0:
            raise PreconditionFailed("every I_i must be primary to the maximal homogeneous ideal")
    n_dim = module_dimension(fam.N)
    if n_dim <= 0:
        raise PreconditionFailed("dim N must be positive")
    _check_top_type(fam, k0, k)
    e_value = ideal_mixed_multiplicity(fam, k0, k, settings)
    x = build_weak_fc_sequence(fam, k0, k, seed, settings)
    corrections, quotients = _corrections(fam, x, k0, k, settings)
    prefix_dims = [module_dimension(q) for q in quotients]
    parameters = all(v == n_dim - i for i, v in enumerate(prefix_dims))
    samuel = samuel_multiplicity(fam.ring, fam.J, quotients[-1], settings)
    formula = e_value.value == samuel - sum(c.value for c in corrections)
    return {
        "holds": parameters and formula,
        "status": _verdict_status(e_value, *corrections),
        "e": e_value.value,
        "samuel": samuel,
        "corrections": [c.value for c in corrections],
        "prefix_dims": [format_dimension(v) for v in prefix_dims],
        "parameter_part": parameters,
        "sequence": x.to_report(),
    }
