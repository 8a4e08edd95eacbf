"""Finitely presented N^d-graded modules F/U and the constructions on them."""
import logging
import threading
from typing import Iterable, List, Optional, Sequence, Tuple

from helpers.errors import NonHomogeneous, RingMismatch, WrongDegree
from helpers.exact_algebra import (
    GradedRing,
    Monomial,
    MultiDegree,
    Polynomial,
    enumerate_monomials,
    mono_divides,
    sub_degrees,
)
from helpers.groebner import (
    FreeModuleSpec,
    GroebnerBasis,
    ModuleElement,
    buchberger,
    syzygies,
    top_key,
)

logger = logging.getLogger(__name__)


class GradedModulePresentation:
    """Cokernel of the relation generators inside a shifted free module.

    The Gröbner basis of the relations is computed on first use and then
    shared; the lock makes the first computation win when several tasks ask
    at once.
    """

    def __init__(self, spec: FreeModuleSpec, relation_gens: Iterable[ModuleElement] = ()):
        gens = tuple(g for g in relation_gens if not g.is_zero())
        for g in gens:
            if g.spec != spec:
                raise RingMismatch("relation lives in another free module")
            if not g.is_homogeneous():
                raise NonHomogeneous(f"relation {g} is not homogeneous")
        self.spec = spec
        self.relation_gens = gens
        self._relations: Optional[GroebnerBasis] = None
        self._lock = threading.Lock()

    @property
    def ring(self) -> GradedRing:
        return self.spec.ring

    @property
    def rank(self) -> int:
        return self.spec.rank

    @property
    def relations(self) -> GroebnerBasis:
        if self._relations is None:
            with self._lock:
                if self._relations is None:
                    self._relations = buchberger(self.relation_gens, self.spec)
        return self._relations

    def cache_key(self) -> tuple:
        return (self.spec, self.relations.canonical())

    def is_zero(self) -> bool:
        return all(self.relations.contains(ModuleElement.basis(self.spec, e)) for e in range(self.rank))

    def __repr__(self):
        return f"GradedModulePresentation(rank={self.rank}, relations={len(self.relation_gens)})"


def free_module(ring: GradedRing, rank: int = 1, shifts: Optional[Sequence[MultiDegree]] = None) -> GradedModulePresentation:
    if shifts is None:
        spec = FreeModuleSpec.free(ring, rank)
    else:
        spec = FreeModuleSpec(ring, tuple(shifts))
    return GradedModulePresentation(spec)


def zero_module(ring: GradedRing) -> GradedModulePresentation:
    return GradedModulePresentation(FreeModuleSpec(ring, ()))


def cyclic_quotient(ring: GradedRing, ideal_gens: Sequence[Polynomial]) -> GradedModulePresentation:
    """S/I with the generator in degree 0."""
    spec = FreeModuleSpec.free(ring)
    rels = []
    for g in ideal_gens:
        if g.ring != ring:
            raise RingMismatch("ideal generator from another ring")
        if not g.is_homogeneous():
            raise NonHomogeneous(f"ideal generator {g} is not homogeneous")
        rels.append(ModuleElement.from_polynomials(spec, [g]))
    return GradedModulePresentation(spec, rels)


def quotient_by_ideal(M: GradedModulePresentation, gens: Sequence[Polynomial]) -> GradedModulePresentation:
    """M / bM for homogeneous generators of an ideal b."""
    extra = []
    for g in gens:
        if g.ring != M.ring:
            raise RingMismatch("element from another ring")
        if g.is_zero():
            continue
        if not g.is_homogeneous():
            raise NonHomogeneous(f"{g} is not homogeneous")
        extra.extend(ModuleElement.basis(M.spec, e).mul_poly(g) for e in range(M.rank))
    if not extra:
        return M
    return GradedModulePresentation(M.spec, M.relation_gens + tuple(extra))


def quotient_by_elements(M: GradedModulePresentation, x: Iterable[Polynomial]) -> GradedModulePresentation:
    """M/xM for elements of degree e_i; zero elements are allowed and change nothing."""
    elements = list(x)
    for a in elements:
        if not a.is_zero():
            a.block_of_linear()
    return quotient_by_ideal(M, elements)


def direct_sum(M: GradedModulePresentation, N: GradedModulePresentation) -> GradedModulePresentation:
    if M.ring != N.ring:
        raise RingMismatch("direct sum of modules over different rings")
    spec = FreeModuleSpec(M.ring, M.spec.shifts + N.spec.shifts)
    offset = M.rank
    rels = [ModuleElement(spec, dict(g.terms)) for g in M.relation_gens]
    rels += [ModuleElement(spec, {(m, p + offset): c for (m, p), c in g.terms.items()}) for g in N.relation_gens]
    return GradedModulePresentation(spec, rels)


def standard_basis(M: GradedModulePresentation, n: MultiDegree) -> List[Tuple[Monomial, int]]:
    """Terms of degree n not in the leading module of the relations; a basis of M_n."""
    leads = M.relations.leading_ideals()
    out = []
    for pos, shift in enumerate(M.spec.shifts):
        lead = leads[pos]
        for m in enumerate_monomials(M.ring, sub_degrees(tuple(n), shift)):
            if not any(mono_divides(l, m) for l in lead):
                out.append((m, pos))
    return out


def graded_piece_dim(M: GradedModulePresentation, n: MultiDegree) -> int:
    return len(standard_basis(M, n))


def _minimal_generators(M: GradedModulePresentation, candidates: Sequence[ModuleElement]) -> List[ModuleElement]:
    reduced = [M.relations.reduce(v) for v in candidates]
    reduced = [v for v in reduced if not v.is_zero()]
    reduced.sort(key=lambda v: (sum(v.multidegree()), top_key(next(iter(v.terms)))))
    kept: List[ModuleElement] = []
    for v in reduced:
        span = buchberger(list(M.relation_gens) + kept, M.spec)
        if not span.contains(v):
            kept.append(v)
    return kept


def submodule_as_module(M: GradedModulePresentation, W: GroebnerBasis) -> GradedModulePresentation:
    """Presentation of (W + U)/U, the submodule of M = F/U generated by W."""
    gens = _minimal_generators(M, list(W.generators))
    if not gens:
        return zero_module(M.ring)
    spec = FreeModuleSpec(M.ring, tuple(g.multidegree() for g in gens))
    t = len(gens)
    rels = []
    for syz in syzygies(gens + list(M.relations.generators), M.spec):
        head = {(m, i): c for (m, i), c in syz.items() if i < t}
        if head:
            rels.append(ModuleElement(spec, head))
    logger.debug(f"Submodule presented with {t} generators and {len(rels)} relations")
    return GradedModulePresentation(spec, rels)


def build_ses(M: GradedModulePresentation, U: Sequence[ModuleElement]):
    """(U as a module, M, M/U) for a homogeneous submodule U of M given by ambient vectors."""
    for u in U:
        if u.spec != M.spec:
            raise RingMismatch("submodule vector from another free module")
        if not u.is_homogeneous():
            raise NonHomogeneous(f"{u} is not homogeneous")
    image = buchberger(list(U) + list(M.relation_gens), M.spec)
    sub = submodule_as_module(M, image)
    quotient = GradedModulePresentation(M.spec, M.relation_gens + tuple(U))
    return sub, M, quotient


def submodule_element(M: GradedModulePresentation, polys: Sequence[Polynomial]) -> ModuleElement:
    return ModuleElement.from_polynomials(M.spec, polys)
