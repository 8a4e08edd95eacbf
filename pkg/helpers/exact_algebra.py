"""Exact scalars, monomials and multigraded polynomials.

A ring context is a :class:`GradedRing`: variables x{i}_{j} grouped in d
blocks, variable x{i}_{j} of multidegree e_i. Coefficients are sympy domain
elements of QQ or GF(p), so arithmetic is exact in both characteristics.
"""
import logging
import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, List, Tuple

from sympy import isprime
from sympy.polys.domains import GF, QQ

from helpers.errors import NonHomogeneous, RingMismatch, WrongDegree

logger = logging.getLogger(__name__)

Monomial = Tuple[int, ...]
MultiDegree = Tuple[int, ...]

# dimension of an empty support; compares below every integer
NEG_INF = float("-inf")


def grevlex_key(mon: Monomial) -> tuple:
    """Sort key: larger key means larger monomial in graded reverse lex."""
    return (sum(mon), tuple(-e for e in reversed(mon)))


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def mono_div(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x - y for x, y in zip(a, b))


def mono_divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def mono_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


def mono_gcd(a: Monomial, b: Monomial) -> Monomial:
    return tuple(min(x, y) for x, y in zip(a, b))


def minimalize(monomials: Iterable[Monomial]) -> List[Monomial]:
    """Minimal generators of a monomial ideal, in a deterministic order."""
    unique = sorted(set(monomials), key=lambda m: (sum(m), m))
    kept: List[Monomial] = []
    for m in unique:
        if not any(mono_divides(k, m) for k in kept):
            kept.append(m)
    return kept


def add_degrees(a: MultiDegree, b: MultiDegree) -> MultiDegree:
    return tuple(x + y for x, y in zip(a, b))


def sub_degrees(a: MultiDegree, b: MultiDegree) -> MultiDegree:
    return tuple(x - y for x, y in zip(a, b))


def unit_degree(d: int, i: int) -> MultiDegree:
    """e_i with a 0-based block index."""
    return tuple(1 if j == i else 0 for j in range(d))


def format_dimension(value) -> object:
    return "-inf" if value == NEG_INF else int(value)


@dataclass(frozen=True)
class GradedRing:
    characteristic: int
    block_sizes: Tuple[int, ...]
    names: Tuple[str, ...] = ()

    def __post_init__(self):
        sizes = tuple(int(m) for m in self.block_sizes)
        if not sizes or any(m < 1 for m in sizes):
            raise ValueError(f"block sizes must be positive, got {self.block_sizes}")
        if self.characteristic != 0 and not isprime(self.characteristic):
            raise ValueError(f"characteristic must be 0 or a prime, got {self.characteristic}")
        object.__setattr__(self, "block_sizes", sizes)
        names = tuple(self.names)
        if not names:
            names = tuple(f"x{i + 1}_{j + 1}" for i, m in enumerate(sizes) for j in range(m))
        if len(names) != sum(sizes) or len(set(names)) != len(names):
            raise ValueError(f"need {sum(sizes)} distinct variable names, got {names}")
        object.__setattr__(self, "names", names)

    @property
    def d(self) -> int:
        return len(self.block_sizes)

    @property
    def nvars(self) -> int:
        return sum(self.block_sizes)

    @cached_property
    def domain(self):
        if self.characteristic == 0:
            return QQ
        return GF(self.characteristic, symmetric=False)

    @cached_property
    def block_of(self) -> Tuple[int, ...]:
        return tuple(i for i, m in enumerate(self.block_sizes) for _ in range(m))

    @cached_property
    def block_offsets(self) -> Tuple[int, ...]:
        return tuple(itertools.accumulate((0,) + self.block_sizes[:-1]))

    def zero_degree(self) -> MultiDegree:
        return (0,) * self.d

    def one_monomial(self) -> Monomial:
        return (0,) * self.nvars

    def degree(self, mon: Monomial) -> MultiDegree:
        out = [0] * self.d
        for v, e in enumerate(mon):
            out[self.block_of[v]] += e
        return tuple(out)

    def var_index(self, block: int, j: int) -> int:
        """Position of x{block}_{j}, both indices 1-based."""
        return self.block_offsets[block - 1] + j - 1

    def block_variables(self, block: int) -> List[int]:
        """0-based variable positions of a 0-based block."""
        start = self.block_offsets[block]
        return list(range(start, start + self.block_sizes[block]))

    def scalar(self, c):
        return self.domain.convert(c)

    def variable(self, position: int) -> "Polynomial":
        mon = tuple(1 if v == position else 0 for v in range(self.nvars))
        return Polynomial.monomial(self, mon)

    def format_monomial(self, mon: Monomial) -> str:
        parts = []
        for name, e in zip(self.names, mon):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        return "*".join(parts) if parts else "1"

    def format_scalar(self, c) -> str:
        return str(self.domain.to_sympy(c))


class Polynomial:
    """Immutable polynomial; ``terms`` is ordered from the leading term down."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: GradedRing, terms: Dict[Monomial, object]):
        dom = ring.domain
        cleaned = {m: dom.convert(c) for m, c in terms.items() if c}
        cleaned = {m: c for m, c in cleaned.items() if c}
        self.ring = ring
        self.terms = dict(sorted(cleaned.items(), key=lambda t: grevlex_key(t[0]), reverse=True))

    @classmethod
    def zero(cls, ring: GradedRing) -> "Polynomial":
        return cls(ring, {})

    @classmethod
    def constant(cls, ring: GradedRing, c=1) -> "Polynomial":
        return cls(ring, {ring.one_monomial(): c})

    @classmethod
    def monomial(cls, ring: GradedRing, mon: Monomial, c=1) -> "Polynomial":
        return cls(ring, {tuple(mon): c})

    def is_zero(self) -> bool:
        return not self.terms

    def leading_monomial(self) -> Monomial:
        return next(iter(self.terms))

    def leading_coefficient(self):
        return next(iter(self.terms.values()))

    def degrees(self) -> set:
        return {self.ring.degree(m) for m in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def multidegree(self) -> MultiDegree:
        degs = self.degrees()
        if len(degs) != 1:
            raise NonHomogeneous(f"{self} has no single multidegree")
        return next(iter(degs))

    def block_of_linear(self) -> int:
        """0-based block i when the polynomial is homogeneous of degree e_i."""
        deg = self.multidegree()
        if sum(deg) != 1:
            raise WrongDegree(f"{self} is not of degree e_i")
        return deg.index(1)

    def _check(self, other: "Polynomial"):
        if self.ring != other.ring:
            raise RingMismatch("polynomials live in different rings")

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.ring, other)
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, self.ring.domain.zero) + c
        return Polynomial(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.ring, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Polynomial":
        c = self.ring.scalar(c)
        return Polynomial(self.ring, {m: c * v for m, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return self.scale(other)
        self._check(other)
        out: Dict[Monomial, object] = {}
        zero = self.ring.domain.zero
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                out[m] = out.get(m, zero) + c1 * c2
        return Polynomial(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result = Polynomial.constant(self.ring)
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self.terms == other.terms
        if other == 0:
            return self.is_zero()
        return NotImplemented

    def __hash__(self):
        return hash((self.ring, tuple(self.terms.items())))

    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for m, c in self.terms.items():
            coeff = self.ring.format_scalar(c)
            mono = self.ring.format_monomial(m)
            if mono == "1":
                pieces.append(coeff)
            elif coeff == "1":
                pieces.append(mono)
            elif coeff == "-1":
                pieces.append(f"-{mono}")
            else:
                pieces.append(f"{coeff}*{mono}")
        return " + ".join(pieces).replace("+ -", "- ")

    __repr__ = __str__


def poly_arith(op: str, f: Polynomial, g) -> Polynomial:
    if isinstance(g, Polynomial) and f.ring != g.ring:
        raise RingMismatch("poly_arith on different rings")
    if op == "add":
        return f + g
    if op == "mul":
        return f * g
    if op == "scale":
        return f.scale(g)
    raise ValueError(f"unknown polynomial operation {op!r}")


def homogeneous_component(f: Polynomial, n: MultiDegree) -> Polynomial:
    n = tuple(n)
    return Polynomial(f.ring, {m: c for m, c in f.terms.items() if f.ring.degree(m) == n})


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_monomials(ring: GradedRing, n: MultiDegree) -> List[Monomial]:
    """All monomials of multidegree n, largest first; empty for negative n."""
    if len(n) != ring.d:
        raise WrongDegree(f"degree {n} does not match {ring.d} blocks")
    if any(x < 0 for x in n):
        return []
    per_block = [list(_compositions(x, m)) for x, m in zip(n, ring.block_sizes)]
    monos = [sum(choice, ()) for choice in itertools.product(*per_block)]
    return sorted(monos, key=grevlex_key, reverse=True)
