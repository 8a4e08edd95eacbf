"""Gröbner bases of homogeneous submodules of shifted free modules.

Vectors are stored as dictionaries keyed by module terms ``(monomial,
position)``. The module order is term-over-position on top of grevlex.
Syzygies come from a tracked Buchberger run: every generator g_i is carried
as (g_i, e_i) in F + R^k under an order where any F-term beats any trace
term, so basis elements with an empty F-part are exactly the syzygies.
"""
import heapq
import itertools
import logging
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Sequence, Tuple

from helpers.errors import NonHomogeneous, RingMismatch
from helpers.exact_algebra import (
    NEG_INF,
    GradedRing,
    Monomial,
    MultiDegree,
    Polynomial,
    add_degrees,
    grevlex_key,
    minimalize,
    mono_div,
    mono_divides,
    mono_gcd,
    mono_lcm,
    mono_mul,
)

logger = logging.getLogger(__name__)

ModTerm = Tuple[Monomial, int]
Vec = Dict[ModTerm, object]


def top_key(term: ModTerm) -> tuple:
    return (grevlex_key(term[0]), -term[1])


def _tracked_key(split: int) -> Callable[[ModTerm], tuple]:
    def key(term: ModTerm) -> tuple:
        return (1 if term[1] < split else 0, grevlex_key(term[0]), -term[1])
    return key


@dataclass(frozen=True)
class FreeModuleSpec:
    ring: GradedRing
    shifts: Tuple[MultiDegree, ...]

    def __post_init__(self):
        object.__setattr__(self, "shifts", tuple(tuple(s) for s in self.shifts))
        if any(len(s) != self.ring.d for s in self.shifts):
            raise ValueError("every shift needs one entry per block")

    @classmethod
    def free(cls, ring: GradedRing, rank: int = 1) -> "FreeModuleSpec":
        return cls(ring, (ring.zero_degree(),) * rank)

    @property
    def rank(self) -> int:
        return len(self.shifts)

    def term_degree(self, term: ModTerm) -> MultiDegree:
        return add_degrees(self.ring.degree(term[0]), self.shifts[term[1]])


class ModuleElement:
    __slots__ = ("spec", "terms")

    def __init__(self, spec: FreeModuleSpec, terms: Vec):
        dom = spec.ring.domain
        cleaned = {t: dom.convert(c) for t, c in terms.items() if c}
        self.spec = spec
        self.terms = dict(sorted(((t, c) for t, c in cleaned.items() if c), key=lambda tc: top_key(tc[0]), reverse=True))

    @classmethod
    def from_polynomials(cls, spec: FreeModuleSpec, polys: Sequence[Polynomial]) -> "ModuleElement":
        if len(polys) != spec.rank:
            raise ValueError(f"expected {spec.rank} coordinates, got {len(polys)}")
        terms = {}
        for pos, p in enumerate(polys):
            if p.ring != spec.ring:
                raise RingMismatch("coordinate from another ring")
            for m, c in p.terms.items():
                terms[(m, pos)] = c
        return cls(spec, terms)

    @classmethod
    def basis(cls, spec: FreeModuleSpec, pos: int) -> "ModuleElement":
        return cls(spec, {(spec.ring.one_monomial(), pos): 1})

    def coordinates(self) -> Tuple[Polynomial, ...]:
        per = [dict() for _ in range(self.spec.rank)]
        for (m, p), c in self.terms.items():
            per[p][m] = c
        return tuple(Polynomial(self.spec.ring, d) for d in per)

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> set:
        return {self.spec.term_degree(t) for t in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def multidegree(self) -> MultiDegree:
        degs = self.degrees()
        if len(degs) != 1:
            raise NonHomogeneous("module element has no single multidegree")
        return next(iter(degs))

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def mul_poly(self, f: Polynomial) -> "ModuleElement":
        out: Vec = {}
        for (m, p), c in self.terms.items():
            for fm, fc in f.terms.items():
                key = (mono_mul(m, fm), p)
                out[key] = out.get(key, 0) + c * fc
        return ModuleElement(self.spec, out)

    def __add__(self, other: "ModuleElement") -> "ModuleElement":
        out = dict(self.terms)
        for t, c in other.terms.items():
            out[t] = out.get(t, 0) + c
        return ModuleElement(self.spec, out)

    def __neg__(self) -> "ModuleElement":
        return ModuleElement(self.spec, {t: -c for t, c in self.terms.items()})

    def __sub__(self, other: "ModuleElement") -> "ModuleElement":
        return self + (-other)

    def __eq__(self, other):
        return isinstance(other, ModuleElement) and self.spec == other.spec and self.terms == other.terms

    def __hash__(self):
        return hash((self.spec, tuple(self.terms.items())))

    def __repr__(self):
        return "(" + ", ".join(str(p) for p in self.coordinates()) + ")"


def _sub_multiple(target: Vec, c, mon: Monomial, vec: Vec):
    """target -= c * mon * vec, in place."""
    for (m, p), v in vec.items():
        k = (mono_mul(m, mon), p)
        cur = target.get(k)
        val = -c * v if cur is None else cur - c * v
        if val:
            target[k] = val
        else:
            target.pop(k, None)


def _reduce(vec: Vec, basis, key) -> Vec:
    """Full reduction of vec by monic basis entries (lead_mon, lead_pos, vec)."""
    rest = dict(vec)
    out: Vec = {}
    while rest:
        t = max(rest, key=key)
        c = rest[t]
        m, p = t
        for bm, bp, bvec in basis:
            if bp == p and mono_divides(bm, m):
                _sub_multiple(rest, c, mono_div(m, bm), bvec)
                break
        else:
            out[t] = c
            del rest[t]
    return out


def _monic(vec: Vec, key, domain) -> Tuple[Monomial, int, Vec]:
    t = max(vec, key=key)
    lc = vec[t]
    return t[0], t[1], {s: domain.quo(c, lc) for s, c in vec.items()}


def _interreduce(basis, key, domain) -> List[Vec]:
    ordered = sorted(basis, key=lambda b: key((b[0], b[1])))
    minimal = []
    for m, p, v in ordered:
        if any(bp == p and mono_divides(bm, m) for bm, bp, _ in minimal):
            continue
        minimal.append((m, p, v))
    out = []
    for idx, (m, p, v) in enumerate(minimal):
        others = minimal[:idx] + minimal[idx + 1:]
        out.append(_monic(_reduce(v, others, key), key, domain)[2])
    return out


def _buchberger(vecs: Iterable[Vec], key, domain, product_criterion: bool = False) -> List[Vec]:
    basis: List[Tuple[Monomial, int, Vec]] = []
    queue: List[tuple] = []
    pending = set()

    def add(vec: Vec):
        m, p, v = _monic(vec, key, domain)
        j = len(basis)
        basis.append((m, p, v))
        for i, (om, op, _) in enumerate(basis[:-1]):
            if op != p:
                continue
            lcm = mono_lcm(om, m)
            if product_criterion and mono_gcd(om, m) == tuple(0 for _ in m):
                continue
            heapq.heappush(queue, (sum(lcm), i, j))
            pending.add((i, j))

    for vec in vecs:
        r = _reduce(vec, basis, key)
        if r:
            add(r)

    processed = 0
    while queue:
        _, i, j = heapq.heappop(queue)
        pending.discard((i, j))
        mi, p, vi = basis[i]
        mj, _, vj = basis[j]
        lcm = mono_lcm(mi, mj)
        if _chain_skip(i, j, p, lcm, basis, pending):
            continue
        s: Vec = {}
        _sub_multiple(s, -1, mono_div(lcm, mi), vi)
        _sub_multiple(s, 1, mono_div(lcm, mj), vj)
        r = _reduce(s, basis, key)
        processed += 1
        if r:
            add(r)
    logger.debug(f"Buchberger finished: {len(basis)} elements, {processed} pairs reduced")
    return _interreduce(basis, key, domain)


def _chain_skip(i, j, pos, lcm, basis, pending) -> bool:
    for k, (mk, pk, _) in enumerate(basis):
        if k in (i, j) or pk != pos or not mono_divides(mk, lcm):
            continue
        if (min(i, k), max(i, k)) not in pending and (min(j, k), max(j, k)) not in pending:
            return True
    return False


class GroebnerBasis:
    """Reduced Gröbner basis, term-over-position with grevlex on terms."""

    order = "top-grevlex"
    reduced = True

    def __init__(self, spec: FreeModuleSpec, vecs: Iterable[Vec]):
        self.spec = spec
        self.generators = [ModuleElement(spec, v) for v in vecs]
        self.generators.sort(key=lambda g: top_key(next(iter(g.terms))))
        self._entries = [(next(iter(g.terms))[0], next(iter(g.terms))[1], g.terms) for g in self.generators]

    def __len__(self):
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    @property
    def leading_terms(self) -> List[ModTerm]:
        return [(m, p) for m, p, _ in self._entries]

    def leading_ideals(self) -> List[List[Monomial]]:
        """Minimal leading monomials, one list per ambient position."""
        per = [[] for _ in range(self.spec.rank)]
        for m, p, _ in self._entries:
            per[p].append(m)
        return [minimalize(ms) for ms in per]

    def reduce(self, v: ModuleElement) -> ModuleElement:
        return ModuleElement(self.spec, _reduce(v.terms, self._entries, top_key))

    def contains(self, v: ModuleElement) -> bool:
        return not _reduce(v.terms, self._entries, top_key)

    def is_monomial(self) -> bool:
        return all(g.is_monomial() for g in self.generators)

    def canonical(self) -> tuple:
        return tuple(tuple(g.terms.items()) for g in self.generators)

    def __eq__(self, other):
        return isinstance(other, GroebnerBasis) and self.spec == other.spec and self.canonical() == other.canonical()

    def __hash__(self):
        return hash((self.spec, self.canonical()))

    def __repr__(self):
        return f"GroebnerBasis({self.generators})"


def _check_homogeneous(gens: Sequence[ModuleElement]):
    for g in gens:
        if not g.is_homogeneous():
            raise NonHomogeneous(f"generator {g} is not homogeneous")


def buchberger(gens: Sequence[ModuleElement], spec: FreeModuleSpec) -> GroebnerBasis:
    _check_homogeneous(gens)
    vecs = [g.terms for g in gens if not g.is_zero()]
    domain = spec.ring.domain
    if all(len(v) == 1 for v in vecs):
        per = {}
        for v in vecs:
            (m, p), = v.keys()
            per.setdefault(p, []).append(m)
        return GroebnerBasis(spec, [{(m, p): domain.one} for p, ms in per.items() for m in minimalize(ms)])
    return GroebnerBasis(spec, _buchberger(vecs, top_key, domain, product_criterion=spec.rank == 1))


def ideal_basis(ring: GradedRing, polys: Sequence[Polynomial]) -> GroebnerBasis:
    spec = FreeModuleSpec.free(ring)
    return buchberger([ModuleElement.from_polynomials(spec, [p]) for p in polys], spec)


def normal_form(v: ModuleElement, gb: GroebnerBasis) -> ModuleElement:
    return gb.reduce(v)


def syzygies(gens: Sequence[ModuleElement], spec: FreeModuleSpec) -> List[Vec]:
    """Generators of the syzygy module of gens, as vectors over positions 0..k-1."""
    r = spec.rank
    one = spec.ring.one_monomial()
    domain = spec.ring.domain
    vecs = []
    for idx, g in enumerate(gens):
        v = dict(g.terms)
        v[(one, r + idx)] = domain.one
        vecs.append(v)
    key = _tracked_key(r)
    out = []
    for b in _buchberger(vecs, key, domain):
        if all(p >= r for _, p in b):
            out.append({(m, p - r): c for (m, p), c in b.items()})
    logger.debug(f"Syzygy module of {len(gens)} generators has {len(out)} generators")
    return out


def combine(coeffs: Vec, gens: Sequence[ModuleElement], spec: FreeModuleSpec) -> ModuleElement:
    """Sum of c * m * gens[i] over the terms (m, i) of a syzygy-style vector."""
    out: Vec = {}
    for (m, i), c in coeffs.items():
        _sub_multiple(out, -c, m, gens[i].terms)
    return ModuleElement(spec, out)


def _monomial_colon(gb: GroebnerBasis, a: Polynomial) -> GroebnerBasis:
    (am, _), = a.terms.items()
    vecs = [{(mono_div(m, mono_gcd(m, am)), p): 1} for m, p in gb.leading_terms]
    return buchberger([ModuleElement(gb.spec, v) for v in vecs], gb.spec)


def colon_generators(gb: GroebnerBasis, a: Polynomial) -> GroebnerBasis:
    """{v in F : a*v in W} for the submodule W with basis gb."""
    spec = gb.spec
    if a.is_zero():
        return buchberger([ModuleElement.basis(spec, e) for e in range(spec.rank)], spec)
    if a.is_monomial() and gb.is_monomial():
        return _monomial_colon(gb, a)
    multiplied = [ModuleElement.basis(spec, e).mul_poly(a) for e in range(spec.rank)]
    gens = multiplied + list(gb.generators)
    found = []
    for syz in syzygies(gens, spec):
        head = {(m, i): c for (m, i), c in syz.items() if i < spec.rank}
        v = ModuleElement(spec, {(m, i): c for (m, i), c in head.items()})
        if not v.is_zero():
            found.append(v)
    return buchberger(found + list(gb.generators), spec)


def intersect(u: GroebnerBasis, v: GroebnerBasis) -> GroebnerBasis:
    if u.spec != v.spec:
        raise RingMismatch("intersection of submodules of different free modules")
    spec = u.spec
    if u.is_monomial() and v.is_monomial():
        vecs = [{(mono_lcm(m1, m2), p1): 1}
                for m1, p1 in u.leading_terms for m2, p2 in v.leading_terms if p1 == p2]
        return buchberger([ModuleElement(spec, x) for x in vecs], spec)
    gens = list(u.generators) + list(v.generators)
    k = len(u.generators)
    found = []
    for syz in syzygies(gens, spec):
        head = {(m, i): c for (m, i), c in syz.items() if i < k}
        w = combine(head, gens, spec)
        if not w.is_zero():
            found.append(w)
    return buchberger(found, spec)


def saturate_submodule(gb: GroebnerBasis, ideal_gens: Sequence[Polynomial]) -> GroebnerBasis:
    """W : b^inf as the intersection over generators g of b of the stable chains W : g^j."""
    result = None
    for g in ideal_gens:
        if g.is_zero():
            continue
        current = gb
        steps = 0
        while True:
            nxt = colon_generators(current, g)
            steps += 1
            if nxt == current:
                break
            current = nxt
        logger.debug(f"Saturation by {g} stabilized after {steps} colon steps")
        result = current if result is None else intersect(result, current)
    if result is None:
        spec = gb.spec
        return buchberger([ModuleElement.basis(spec, e) for e in range(spec.rank)], spec)
    return result


def colon_submodule(M, a: Polynomial):
    """Presentation of 0_M : a."""
    from helpers.graded_module import submodule_as_module
    if a.ring != M.ring:
        raise RingMismatch("colon by an element of another ring")
    if not a.is_homogeneous():
        raise NonHomogeneous(f"{a} is not homogeneous")
    return submodule_as_module(M, colon_generators(M.relations, a))


def saturate(M, ideal_gens: Sequence[Polynomial]):
    """Presentation of 0_M : b^inf."""
    from helpers.graded_module import submodule_as_module
    for g in ideal_gens:
        if not g.is_homogeneous():
            raise NonHomogeneous(f"{g} is not homogeneous")
    return submodule_as_module(M, saturate_submodule(M.relations, ideal_gens))


def _independent_dimension(ring: GradedRing, monomials: List[Monomial]) -> int:
    supports = [frozenset(v for v, e in enumerate(m) if e) for m in monomials]
    for size in range(ring.nvars, -1, -1):
        for subset in itertools.combinations(range(ring.nvars), size):
            chosen = frozenset(subset)
            if not any(s <= chosen for s in supports):
                return size
    return NEG_INF


def krull_dim_of_basis(gb: GroebnerBasis):
    best = NEG_INF
    one = gb.spec.ring.one_monomial()
    for lead in gb.leading_ideals():
        if one in lead:
            continue
        best = max(best, _independent_dimension(gb.spec.ring, lead))
    return best


def krull_dim(M):
    """Krull dimension of the quotient F/W read off the leading-term modules; -inf for zero."""
    gb = M.relations if hasattr(M, "relations") else M
    return krull_dim_of_basis(gb)
