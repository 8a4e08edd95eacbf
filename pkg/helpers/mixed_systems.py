"""Filter-regular sequences, mixed multiplicity systems and the symbol recursion.

The verifiers at the bottom build a generic system for a module, compute the
same multiplicity along several independent routes (Hilbert polynomial,
Koszul homology, symbol recursion, lengths of quotients) and report whether
they agree.
"""
import itertools
import logging
import random
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

from helpers.errors import (
    DimDropFails,
    GenericityExhausted,
    HypothesisFailed,
    InternalInconsistency,
    NotMMSystem,
    PreconditionFailed,
    TypeTooSmall,
)
from helpers.exact_algebra import NEG_INF, GradedRing, MultiDegree, Polynomial, format_dimension, sub_degrees, unit_degree
from helpers.graded_module import GradedModulePresentation, quotient_by_elements
from helpers.groebner import colon_generators, colon_submodule, saturate_submodule
from helpers.hilbert_engine import (
    constant_value,
    dim_supp_pp,
    mixed_multiplicity,
    module_polynomial,
    multiplicity_from_polynomial,
)
from helpers.koszul_euler import euler_characteristic

logger = logging.getLogger(__name__)

DEFAULT_RETRIES = 32
DEFAULT_BOUND = 1000


@dataclass(frozen=True)
class ElementSequence:
    """Elements x_t of degree e_{blocks[t]}; blocks are 0-based."""

    elements: Tuple[Polynomial, ...]
    blocks: Tuple[int, ...]
    d: int

    @classmethod
    def of(cls, ring: GradedRing, elements: Sequence[Polynomial], blocks: Optional[Sequence[int]] = None) -> "ElementSequence":
        elements = tuple(elements)
        if blocks is None:
            blocks = tuple(a.block_of_linear() for a in elements)
        else:
            blocks = tuple(blocks)
            for a, b in zip(elements, blocks):
                if not a.is_zero() and a.block_of_linear() != b:
                    raise PreconditionFailed(f"{a} is not of degree e_{b + 1}")
        if len(blocks) != len(elements):
            raise PreconditionFailed("every element needs a block")
        return cls(elements, blocks, ring.d)

    @property
    def type(self) -> MultiDegree:
        return tuple(self.blocks.count(i) for i in range(self.d))

    def prefix_type(self, i: int) -> MultiDegree:
        return tuple(self.blocks[:i].count(b) for b in range(self.d))

    def permuted(self, order: Sequence[int]) -> "ElementSequence":
        return ElementSequence(tuple(self.elements[j] for j in order), tuple(self.blocks[j] for j in order), self.d)

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)

    def __getitem__(self, idx: Union[int, slice]):
        if isinstance(idx, slice):
            return ElementSequence(self.elements[idx], self.blocks[idx], self.d)
        return self.elements[idx]

    def to_report(self) -> List[str]:
        return [str(a) for a in self.elements]


@dataclass(frozen=True)
class SystemCertificate:
    is_mm_system: bool
    dim_after: object
    filter_regular_flags: Tuple[bool, ...]

    def to_report(self) -> dict:
        return {
            "is_mm_system": self.is_mm_system,
            "dim_after": format_dimension(self.dim_after),
            "filter_regular_flags": list(self.filter_regular_flags),
        }


def _rng(seed) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def sample_generic(ring: GradedRing, block: int, seed=0, bound: int = DEFAULT_BOUND) -> Polynomial:
    """Random linear form in the variables of a 0-based block, all coefficients nonzero."""
    rng = _rng(seed)
    terms = {}
    for v in ring.block_variables(block):
        if ring.characteristic == 0:
            c = 0
            while c == 0:
                c = rng.randint(-bound, bound)
        else:
            c = rng.randrange(1, ring.characteristic)
        terms[tuple(1 if u == v else 0 for u in range(ring.nvars))] = c
    return Polynomial(ring, terms)


def s_plus_plus_generators(ring: GradedRing) -> List[Polynomial]:
    """Products of one variable from every block."""
    out = []
    for choice in itertools.product(*(ring.block_variables(i) for i in range(ring.d))):
        mon = [0] * ring.nvars
        for v in choice:
            mon[v] += 1
        out.append(Polynomial.monomial(ring, tuple(mon)))
    return out


def is_filter_regular(M: GradedModulePresentation, a: Polynomial) -> bool:
    colon = colon_submodule(M, a)
    by_polynomial = module_polynomial(colon).is_zero()
    saturated = saturate_submodule(M.relations, s_plus_plus_generators(M.ring))
    by_saturation = all(saturated.contains(g) for g in colon_generators(M.relations, a).generators)
    if by_polynomial != by_saturation:
        raise InternalInconsistency(
            f"filter-regularity of {a}: polynomial test says {by_polynomial}, saturation test says {by_saturation}"
        )
    return by_polynomial


def filter_regular_report(M: GradedModulePresentation, a: Polynomial) -> dict:
    """is_filter_regular plus a flag for modules with empty ++ support, where every element qualifies."""
    return {
        "filter_regular": is_filter_regular(M, a),
        "vacuous": dim_supp_pp(M) == NEG_INF,
    }


def build_filter_regular_sequence(
    M: GradedModulePresentation,
    k: MultiDegree,
    seed=0,
    retries: int = DEFAULT_RETRIES,
    bound: int = DEFAULT_BOUND,
) -> ElementSequence:
    ring = M.ring
    if len(k) != ring.d:
        raise PreconditionFailed(f"type {k} does not match {ring.d} blocks")
    rng = _rng(seed)
    current = M
    elements, blocks = [], []
    for i, count in enumerate(k):
        for _ in range(count):
            for attempt in range(retries):
                a = sample_generic(ring, i, rng, bound)
                if is_filter_regular(current, a):
                    break
                logger.warning(f"Sampled {a} is not filter-regular (attempt {attempt + 1}/{retries})")
            else:
                raise GenericityExhausted(f"no filter-regular element of block {i + 1} after {retries} samples")
            elements.append(a)
            blocks.append(i)
            current = quotient_by_elements(current, [a])
    logger.debug(f"Built filter-regular sequence of type {tuple(k)}")
    return ElementSequence(tuple(elements), tuple(blocks), ring.d)


def certify_mm_system(M: GradedModulePresentation, x: ElementSequence) -> SystemCertificate:
    flags = []
    current = M
    for a in x:
        flags.append(is_filter_regular(current, a))
        current = quotient_by_elements(current, [a])
    dim_after = dim_supp_pp(current)
    return SystemCertificate(dim_after <= 0, dim_after, tuple(flags))


def _symbol(M: GradedModulePresentation, x: ElementSequence, memo: Dict) -> int:
    key = (M.cache_key(), x.elements, x.blocks)
    if key in memo:
        return memo[key]
    if dim_supp_pp(quotient_by_elements(M, x)) > 0:
        raise NotMMSystem(f"{x.to_report()} is not a mixed multiplicity system")
    if len(x) == 0:
        value = constant_value(module_polynomial(M))
    else:
        a, rest = x[0], x[1:]
        value = _symbol(quotient_by_elements(M, [a]), rest, memo) - _symbol(colon_submodule(M, a), rest, memo)
    memo[key] = value
    return value


def multiplicity_symbol(M: GradedModulePresentation, x: ElementSequence) -> int:
    return _symbol(M, x, {})


def symbol_order_check(M: GradedModulePresentation, x: ElementSequence, trials: int = 10, seed=0) -> dict:
    rng = _rng(seed)
    reference = multiplicity_symbol(M, x)
    values = []
    for _ in range(trials):
        order = list(range(len(x)))
        rng.shuffle(order)
        values.append(multiplicity_symbol(M, x.permuted(order)))
    return {"symbol": reference, "permuted": values, "holds": all(v == reference for v in values)}


def _check_type(M: GradedModulePresentation, k: MultiDegree) -> int:
    k = tuple(k)
    if len(k) != M.ring.d:
        raise PreconditionFailed(f"type {k} does not match {M.ring.d} blocks")
    s = dim_supp_pp(M)
    if sum(k) < s:
        raise TypeTooSmall(f"|k| = {sum(k)} is below dim Supp++ = {format_dimension(s)}")
    return s


def verify_equality_theorem(
    M: GradedModulePresentation,
    k: MultiDegree,
    seed=0,
    retries: int = DEFAULT_RETRIES,
    bound: int = DEFAULT_BOUND,
    window: int = 3,
) -> dict:
    """E(M;k), chi(x, M) and the symbol of a generic system x of type k."""
    s = _check_type(M, k)
    x = build_filter_regular_sequence(M, k, seed, retries, bound)
    cert = certify_mm_system(M, x)
    if not cert.is_mm_system:
        raise InternalInconsistency("a filter-regular sequence of large enough type is not a mixed multiplicity system")
    e_value = mixed_multiplicity(M, k)
    chi = euler_characteristic(M, x, window)
    symbol = multiplicity_symbol(M, x)
    holds = e_value.value == chi.value == symbol
    logger.info(f"E = {e_value.value}, chi = {chi.value}, symbol = {symbol} for k = {tuple(k)}")
    return {
        "holds": holds,
        "dim": format_dimension(s),
        "top_degree": sum(k) == s,
        "E": e_value.value,
        "chi": chi.value,
        "symbol": symbol,
        "sequence": x.to_report(),
        "certificate": cert.to_report(),
        "chi_detail": chi.to_report(),
    }


def filter_regular_length_formula(
    M: GradedModulePresentation,
    k: MultiDegree,
    seed=0,
    retries: int = DEFAULT_RETRIES,
    bound: int = DEFAULT_BOUND,
    window: int = 3,
    with_chi: bool = False,
) -> dict:
    """E(M;k) against the eventual length of (M/xM)_n for a filter-regular x of type k."""
    s = _check_type(M, k)
    x = build_filter_regular_sequence(M, k, seed, retries, bound)
    hp_quot = module_polynomial(quotient_by_elements(M, x))
    dim_after = hp_quot.total_degree
    if dim_after > 0:
        raise InternalInconsistency(f"quotient by a filter-regular sequence has dim {dim_after}")
    length = constant_value(hp_quot)
    e_value = mixed_multiplicity(M, k).value
    criterion = (e_value != 0) == (dim_after == 0)
    report = {
        "holds": e_value == length and criterion,
        "dim": format_dimension(s),
        "E": e_value,
        "length": length,
        "dim_after": format_dimension(dim_after),
        "positivity_criterion": criterion,
        "sequence": x.to_report(),
    }
    if with_chi:
        chi = euler_characteristic(M, x, window).value
        symbol = multiplicity_symbol(M, x)
        report["chi"] = chi
        report["symbol"] = symbol
        report["holds"] = report["holds"] and chi == symbol == e_value
    return report


def reduction_formula_check(M: GradedModulePresentation, a: Polynomial, k: MultiDegree) -> dict:
    """E(M;k) = E(M/aM; k - e_i) - E(0_M:a; k - e_i) when a drops the dimension."""
    i = a.block_of_linear()
    k = tuple(k)
    s = _check_type(M, k)
    if k[i] == 0:
        raise PreconditionFailed(f"k has no entry in block {i + 1}")
    quotient = quotient_by_elements(M, [a])
    colon = colon_submodule(M, a)
    hp_quot = module_polynomial(quotient)
    if hp_quot.total_degree > s - 1:
        raise DimDropFails(f"dim Supp++(M/aM) = {format_dimension(hp_quot.total_degree)} does not drop below {format_dimension(s)}")
    k1 = sub_degrees(k, unit_degree(M.ring.d, i))
    e_m = mixed_multiplicity(M, k).value
    e_quot = multiplicity_from_polynomial(hp_quot, k1).value
    e_colon = multiplicity_from_polynomial(module_polynomial(colon), k1).value
    report = {
        "holds": e_m == e_quot - e_colon,
        "E": e_m,
        "E_quotient": e_quot,
        "E_colon": e_colon,
        "filter_regular": is_filter_regular(M, a),
    }
    if report["filter_regular"]:
        report["filter_regular_branch"] = e_m == e_quot
        report["holds"] = report["holds"] and e_m == e_quot
    return report


def decomposition_formula_check(M: GradedModulePresentation, x: ElementSequence, k: MultiDegree) -> dict:
    """e(M;k) = e(M/xM; 0) - sum of E(colon_i; k - h_i) with prefix dimensions dropping by one."""
    k = tuple(k)
    s = _check_type(M, k)
    if sum(k) != s:
        raise HypothesisFailed(f"|k| = {sum(k)} differs from dim Supp++ = {format_dimension(s)}")
    e_m = mixed_multiplicity(M, k).value
    if e_m == 0:
        raise HypothesisFailed(f"e(M;{k}) = 0")
    if x.type != k:
        raise PreconditionFailed(f"sequence has type {x.type}, expected {k}")
    prefix_dims = []
    corrections = []
    current = M
    for i, a in enumerate(x):
        prefix_dims.append(dim_supp_pp(current))
        colon = colon_submodule(current, a)
        remaining = sub_degrees(k, x.prefix_type(i + 1))
        corrections.append(multiplicity_from_polynomial(module_polynomial(colon), remaining).value)
        current = quotient_by_elements(current, [a])
    hp_last = module_polynomial(current)
    prefix_dims.append(hp_last.total_degree)
    if hp_last.total_degree > 0:
        raise NotMMSystem("the sequence is not a mixed multiplicity system")
    last = constant_value(hp_last)
    dims_drop = all(dim == s - i for i, dim in enumerate(prefix_dims))
    formula = e_m == last - sum(corrections)
    return {
        "holds": dims_drop and formula,
        "E": e_m,
        "quotient_length": last,
        "corrections": corrections,
        "prefix_dims": [format_dimension(v) for v in prefix_dims],
        "dims_drop": dims_drop,
    }
