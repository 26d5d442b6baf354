"""
The exterior square ∧²G in normal form ⊕_{i<j} ℤ/n_j, wedge products, images of subgroups and the span/index
linear algebra behind Tate's criterion.
"""
import logging
from dataclasses import dataclass
from functools import cached_property, lru_cache
from math import gcd, prod

from hnpcount.groups import FinAbGroup, GroupElement, Subgroup, cokernel_orders

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExtSquare:
    ambient: FinAbGroup

    @cached_property
    def basis_moduli(self) -> tuple:
        """(i, j, m_ij) for i < j with m_ij = n_j."""
        factors = self.ambient.invariant_factors
        return tuple((i, j, factors[j]) for i in range(len(factors)) for j in range(i + 1, len(factors)))

    @cached_property
    def moduli(self) -> tuple:
        return tuple(m for _, _, m in self.basis_moduli)

    @cached_property
    def order(self) -> int:
        return prod(self.moduli)

    @property
    def exponent(self) -> int:
        return max(self.moduli, default=1)

    @property
    def is_trivial(self) -> bool:
        return not self.moduli

    @property
    def zero(self) -> 'ExtElement':
        return ExtElement(self, (0,) * len(self.moduli))

    def element(self, coords) -> 'ExtElement':
        return ExtElement(self, tuple(coords))

    def whole(self) -> 'ExtSubgroup':
        return ExtSubgroup(self, tuple(ExtElement(self, tuple(int(k == t) for k in range(len(self.moduli))))
                                       for t in range(len(self.moduli))))


@dataclass(frozen=True)
class ExtElement:
    square: ExtSquare
    coords: tuple

    def __post_init__(self):
        if len(self.coords) != len(self.square.moduli):
            raise ValueError(f'Invalid exterior coordinates: {tuple(self.coords)}')
        object.__setattr__(self, 'coords', tuple(int(c) % m for c, m in zip(self.coords, self.square.moduli)))

    def __add__(self, other):
        if other.square != self.square:
            raise ValueError('Invalid operand: exterior elements of different groups')
        return ExtElement(self.square, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        return ExtElement(self.square, tuple(-a for a in self.coords))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, k: int):
        return ExtElement(self.square, tuple(k * a for a in self.coords))

    __rmul__ = __mul__

    @property
    def is_zero(self) -> bool:
        return not any(self.coords)

    @property
    def order(self) -> int:
        m = 1
        for c, n in zip(self.coords, self.square.moduli):
            component = n // gcd(c, n)
            m = m * component // gcd(m, component)
        return m

    def __str__(self):
        terms = [f'{c} mod {m} @ e{i + 1}^e{j + 1}'
                 for c, (i, j, m) in zip(self.coords, self.square.basis_moduli)]
        return '[' + '; '.join(terms) + ']'


@lru_cache(maxsize=None)
def _span_order_of_rows(moduli: tuple, rows: frozenset) -> int:
    if not rows:
        return 1
    k = len(moduli)
    relations = [tuple(m if t == s else 0 for t in range(k)) for s, m in enumerate(moduli)]
    relations.extend(sorted(rows))
    return prod(moduli) // prod(cokernel_orders(tuple(relations), k))


def _span_order(moduli: tuple, generator_coords) -> int:
    return _span_order_of_rows(moduli, frozenset(tuple(c) for c in generator_coords if any(c)))


@dataclass(frozen=True, eq=False)
class ExtSubgroup:
    ambient: ExtSquare
    generators: tuple = ()

    def __post_init__(self):
        gens = tuple(self.generators)
        if any(g.square != self.ambient for g in gens):
            raise ValueError('Invalid generator: not in the given exterior square')
        object.__setattr__(self, 'generators', gens)

    @cached_property
    def order(self) -> int:
        return _span_order(self.ambient.moduli, [g.coords for g in self.generators])

    @property
    def is_trivial(self) -> bool:
        return self.order == 1

    def __contains__(self, x: ExtElement) -> bool:
        return _span_order(self.ambient.moduli, [g.coords for g in self.generators] + [x.coords]) == self.order

    @cached_property
    def quotient_structure(self) -> FinAbGroup:
        """∧²G / V as invariant factors."""
        k = len(self.ambient.moduli)
        relations = [tuple(m if t == s else 0 for t in range(k)) for s, m in enumerate(self.ambient.moduli)]
        relations.extend(sorted({g.coords for g in self.generators}))
        return FinAbGroup.from_cyclic_orders(cokernel_orders(tuple(relations), k))


@lru_cache(maxsize=None)
def exterior_square(group: FinAbGroup) -> ExtSquare:
    return ExtSquare(group)


def wedge(x: GroupElement, y: GroupElement) -> ExtElement:
    """x ∧ y with coordinates (x_i y_j − x_j y_i) mod n_j."""
    if x.group != y.group:
        raise ValueError(f'Invalid wedge: elements of different groups {x.group} and {y.group}')
    square = exterior_square(x.group)
    return ExtElement(square, tuple(x.coords[i] * y.coords[j] - x.coords[j] * y.coords[i]
                                    for i, j, _ in square.basis_moduli))


def subgroup_wedge_image(subgroup: Subgroup) -> ExtSubgroup:
    """The image of ∧²D in ∧²G, spanned by wedges of pairs of generators of D."""
    square = exterior_square(subgroup.ambient)
    gens = [g for g in subgroup.generators if not g.is_zero]
    wedges = [wedge(gens[a], gens[b]) for a in range(len(gens)) for b in range(a + 1, len(gens))]
    return ExtSubgroup(square, tuple(w for w in wedges if not w.is_zero))


def span_sum(parts) -> ExtSubgroup:
    parts = list(parts)
    if not parts:
        raise ValueError('Invalid span sum: no parts given')
    square = parts[0].ambient
    if any(part.ambient != square for part in parts):
        raise ValueError('Invalid span sum: parts live in different exterior squares')
    return ExtSubgroup(square, tuple(g for part in parts for g in part.generators))


def index_in_ambient(span: ExtSubgroup) -> int:
    return span.ambient.order // span.order


def exterior_order_from_tensor(group: FinAbGroup) -> int:
    """
    |G⊗G / ⟨x⊗x⟩| by Smith normal form over the symbols e_i⊗e_j.
    """
    factors = group.invariant_factors
    l = len(factors)
    if l < 2:
        return 1
    size = l * l

    def symbol(i, j):
        return i * l + j

    relations = []
    for i in range(l):
        for j in range(l):
            row = [0] * size
            row[symbol(i, j)] = gcd(factors[i], factors[j])
            relations.append(tuple(row))
    for i in range(l):
        row = [0] * size
        row[symbol(i, i)] = 1
        relations.append(tuple(row))
        for j in range(i + 1, l):
            row = [0] * size
            row[symbol(i, j)] = 1
            row[symbol(j, i)] = 1
            relations.append(tuple(row))
    return prod(cokernel_orders(tuple(relations), size))
