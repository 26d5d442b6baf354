"""
Finite abelian groups in invariant-factor form: elements, characters, subgroups and the Möbius/Delsarte
machinery used to isolate surjective homomorphisms.
"""
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import product
from math import gcd, prod

import numpy as np
from sympy import ZZ, Matrix, divisors, factorint, multiplicity, primefactors
from sympy.matrices.normalforms import invariant_factors as snf_invariant_factors

logger = logging.getLogger(__name__)

SUBGROUP_BOUND = 10 ** 6


class SubgroupBoundError(ValueError):
    """Raised when a group is too large to enumerate its subgroups."""


@lru_cache(maxsize=None)
def cokernel_orders(rows: tuple, ncols: int) -> tuple:
    """
    Orders of the cyclic factors of ℤ^ncols modulo the span of ``rows``, via Smith normal form.
    The row span must have full rank; factors equal to 1 are dropped. The returned orders need not form a
    divisibility chain.
    """
    if ncols == 0:
        return ()
    assert all(len(row) == ncols for row in rows), "Invalid relation matrix."
    orders = [abs(int(d)) for d in snf_invariant_factors(Matrix([list(row) for row in rows]), domain=ZZ)]
    if len(orders) < ncols or 0 in orders:
        raise ValueError(f'Invalid relations: rank below {ncols}')
    return tuple(d for d in orders if d != 1)


@dataclass(frozen=True)
class FinAbGroup:
    """ℤ/n_1 ⊕ ... ⊕ ℤ/n_l with n_{j+1} | n_j. The trivial group has no factors."""
    invariant_factors: tuple = ()

    def __post_init__(self):
        factors = tuple(int(n) for n in self.invariant_factors)
        if any(n <= 1 for n in factors):
            raise ValueError(f'Invalid invariant factors: {factors}')
        if any(factors[j] % factors[j + 1] for j in range(len(factors) - 1)):
            raise ValueError(f'Invalid invariant factors: {factors} is not a divisibility chain')
        object.__setattr__(self, 'invariant_factors', factors)

    @classmethod
    def from_cyclic_orders(cls, orders):
        """
        Build the group ⊕ ℤ/m for arbitrary orders m by regrouping elementary divisors.

        :param orders: iterable of positive integers; 1 contributes nothing.
        :return: the canonical FinAbGroup.
        """
        powers = defaultdict(list)
        for m in orders:
            if m < 1:
                raise ValueError(f'Invalid cyclic order: {m}')
            for p, e in factorint(m).items():
                powers[p].append(e)
        length = max((len(exps) for exps in powers.values()), default=0)
        factors = [1] * length
        for p, exps in powers.items():
            for j, e in enumerate(sorted(exps, reverse=True)):
                factors[j] *= p ** e
        return cls(tuple(factors))

    @classmethod
    def from_relations(cls, rows, ngens):
        """The quotient ℤ^ngens / ⟨rows⟩; the relations must have finite cokernel."""
        return cls.from_cyclic_orders(cokernel_orders(tuple(tuple(int(x) for x in r) for r in rows), ngens))

    @classmethod
    def parse(cls, literal: str):
        """Parse the "4,2" literal. The empty literal is the trivial group."""
        literal = literal.strip()
        if not literal:
            return cls(())
        try:
            factors = tuple(int(part) for part in literal.split(','))
        except ValueError:
            raise ValueError(f'Invalid group literal: {literal!r}') from None
        return cls(factors)

    def __str__(self):
        return ','.join(str(n) for n in self.invariant_factors)

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    @cached_property
    def order(self) -> int:
        return prod(self.invariant_factors)

    @property
    def exponent(self) -> int:
        return self.invariant_factors[0] if self.invariant_factors else 1

    @property
    def is_trivial(self) -> bool:
        return not self.invariant_factors

    @property
    def is_cyclic(self) -> bool:
        return self.rank <= 1

    @cached_property
    def smallest_prime(self) -> int:
        if self.is_trivial:
            raise ValueError('Invalid group: invariants undefined for the trivial group')
        return primefactors(self.order)[0]

    @cached_property
    def _weights(self) -> tuple:
        # Mixed radix with the first coordinate most significant, so index order is lexicographic order.
        weights = []
        w = 1
        for n in reversed(self.invariant_factors):
            weights.append(w)
            w *= n
        return tuple(reversed(weights))

    def index_of(self, coords) -> int:
        return sum(c * w for c, w in zip(coords, self._weights))

    def coords_at(self, index: int) -> tuple:
        return tuple((index // w) % n for w, n in zip(self._weights, self.invariant_factors))

    def element(self, coords) -> 'GroupElement':
        return GroupElement(self, tuple(coords))

    def element_at(self, index: int) -> 'GroupElement':
        return GroupElement(self, self.coords_at(index))

    @property
    def zero(self) -> 'GroupElement':
        return GroupElement(self, (0,) * self.rank)

    def basis(self) -> list:
        return [GroupElement(self, tuple(int(k == j) for k in range(self.rank))) for j in range(self.rank)]

    def elements(self):
        for coords in product(*(range(n) for n in self.invariant_factors)):
            yield GroupElement(self, coords)

    @cached_property
    def coordinate_array(self) -> np.ndarray:
        """All elements as rows of coordinates, in index order."""
        if self.is_trivial:
            return np.zeros((1, 0), dtype=np.int64)
        grids = np.indices(self.invariant_factors, dtype=np.int64)
        return grids.reshape(self.rank, -1).T.copy()

    def encode(self, coords: np.ndarray) -> np.ndarray:
        """Vectorized index_of for an array of coordinate rows."""
        if self.is_trivial:
            return np.zeros(coords.shape[0], dtype=np.int64)
        moduli = np.array(self.invariant_factors, dtype=np.int64)
        return (np.mod(coords, moduli) * np.array(self._weights, dtype=np.int64)).sum(axis=1)

    def characters(self):
        for coords in product(*(range(n) for n in self.invariant_factors)):
            yield Character(self, coords)

    def torsion_count(self, m: int) -> int:
        """|G[m]|, the number of elements killed by m."""
        return prod(gcd(n, m) for n in self.invariant_factors)

    def sylow(self, p: int) -> 'FinAbGroup':
        return FinAbGroup.from_cyclic_orders(p ** multiplicity(p, n) for n in self.invariant_factors)


@dataclass(frozen=True)
class GroupElement:
    group: FinAbGroup
    coords: tuple

    def __post_init__(self):
        if len(self.coords) != self.group.rank:
            raise ValueError(f'Invalid element coordinates: {tuple(self.coords)} for group {self.group}')
        object.__setattr__(self, 'coords',
                           tuple(int(c) % n for c, n in zip(self.coords, self.group.invariant_factors)))

    def _check(self, other):
        if not isinstance(other, GroupElement):
            raise ValueError(f'Invalid operand: {other!r} is not a group element')
        if other.group != self.group:
            raise ValueError(f'Invalid operand: elements of different groups {self.group} and {other.group}')

    def __add__(self, other):
        self._check(other)
        return GroupElement(self.group, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        self._check(other)
        return GroupElement(self.group, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        return GroupElement(self.group, tuple(-a for a in self.coords))

    def __mul__(self, k: int):
        return GroupElement(self.group, tuple(k * a for a in self.coords))

    __rmul__ = __mul__

    def __str__(self):
        return '(' + ','.join(str(c) for c in self.coords) + ')'

    @property
    def index(self) -> int:
        return self.group.index_of(self.coords)

    @property
    def is_zero(self) -> bool:
        return not any(self.coords)

    @property
    def order(self) -> int:
        m = 1
        for c, n in zip(self.coords, self.group.invariant_factors):
            component = n // gcd(c, n)
            m = m * component // gcd(m, component)
        return m


@dataclass(frozen=True)
class Character:
    """The character g ↦ Σ coords[j]·g_j/n_j mod 1 of G, valued in ℚ/ℤ."""
    group: FinAbGroup
    coords: tuple

    def __post_init__(self):
        if len(self.coords) != self.group.rank:
            raise ValueError(f'Invalid character coordinates: {tuple(self.coords)} for group {self.group}')
        object.__setattr__(self, 'coords',
                           tuple(int(c) % n for c, n in zip(self.coords, self.group.invariant_factors)))

    def __call__(self, g: GroupElement) -> Fraction:
        if g.group != self.group:
            raise ValueError(f'Invalid argument: element of {g.group} for a character of {self.group}')
        n1 = self.group.exponent
        numerator = sum(c * x * (n1 // n) for c, x, n in zip(self.coords, g.coords, self.group.invariant_factors))
        return Fraction(numerator % n1, n1)

    def __add__(self, other):
        return Character(self.group, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __mul__(self, k: int):
        return Character(self.group, tuple(k * a for a in self.coords))

    __rmul__ = __mul__

    @property
    def is_trivial(self) -> bool:
        return not any(self.coords)

    @property
    def order(self) -> int:
        return GroupElement(self.group, self.coords).order


def _canonical_generators(generators) -> tuple:
    return tuple(sorted({g.coords for g in generators if not g.is_zero}))


@lru_cache(maxsize=None)
def _quotient_orders(factors: tuple, generator_coords: tuple) -> tuple:
    ncols = len(factors)
    rows = [tuple(n if k == j else 0 for k in range(ncols)) for j, n in enumerate(factors)]
    rows.extend(generator_coords)
    return cokernel_orders(tuple(rows), ncols)


def span_order(group: FinAbGroup, generators) -> int:
    """Order of the subgroup generated by ``generators``."""
    return group.order // prod(_quotient_orders(group.invariant_factors, _canonical_generators(generators)))


@dataclass(frozen=True, eq=False)
class Subgroup:
    """
    The subgroup of ``ambient`` generated by ``generators``. Equality is equality of subgroups, not of
    generating sets.
    """
    ambient: FinAbGroup
    generators: tuple = ()
    known_elements: frozenset = field(default=None, repr=False)

    def __post_init__(self):
        gens = tuple(self.generators)
        for g in gens:
            if g.group != self.ambient:
                raise ValueError(f'Invalid generator {g} for a subgroup of {self.ambient}')
        object.__setattr__(self, 'generators', gens)

    @classmethod
    def whole(cls, group: FinAbGroup):
        return cls(group, tuple(group.basis()))

    @classmethod
    def trivial(cls, group: FinAbGroup):
        return cls(group, ())

    @cached_property
    def quotient(self) -> FinAbGroup:
        """G/H as invariant factors."""
        return FinAbGroup.from_cyclic_orders(
            _quotient_orders(self.ambient.invariant_factors, _canonical_generators(self.generators)))

    @cached_property
    def order(self) -> int:
        return self.ambient.order // self.quotient.order

    @cached_property
    def basis(self) -> tuple:
        """A reduced generating set: generators that enlarge the span, largest order first."""
        kept = []
        current = 1
        for g in sorted(self.generators, key=lambda x: (-x.order, x.coords)):
            enlarged = span_order(self.ambient, kept + [g])
            if enlarged > current:
                kept.append(g)
                current = enlarged
        return tuple(kept)

    @cached_property
    def structure(self) -> FinAbGroup:
        """
        The isomorphism type of H, from |H[p^k]| = |H|·|G[p^k]| / |H + G[p^k]|.
        """
        cyclic_orders = []
        for p in primefactors(self.order):
            ranks = []
            previous = 1
            k = 1
            while True:
                torsion = self.ambient_torsion_generators(p ** k)
                size = self.order * self.ambient.torsion_count(p ** k) // span_order(
                    self.ambient, list(self.generators) + torsion)
                if size == previous:
                    break
                ranks.append(multiplicity(p, size // previous))
                previous = size
                k += 1
            ranks.append(0)
            for k in range(1, len(ranks)):
                cyclic_orders += [p ** k] * (ranks[k - 1] - ranks[k])
        return FinAbGroup.from_cyclic_orders(cyclic_orders)

    def ambient_torsion_generators(self, m: int) -> list:
        return [GroupElement(self.ambient, tuple((n // gcd(n, m)) * int(k == j) for k in range(self.ambient.rank)))
                for j, n in enumerate(self.ambient.invariant_factors)]

    @property
    def is_cyclic(self) -> bool:
        return self.structure.is_cyclic

    @property
    def is_whole(self) -> bool:
        return self.order == self.ambient.order

    @cached_property
    def element_indices(self) -> frozenset:
        if self.known_elements is not None:
            return self.known_elements
        return closure_indices(self.ambient, [g.coords for g in self.generators])

    def __contains__(self, g: GroupElement) -> bool:
        if g.group != self.ambient:
            return False
        if self.known_elements is not None or 'element_indices' in self.__dict__:
            return g.index in self.element_indices
        return span_order(self.ambient, list(self.generators) + [g]) == self.order

    def contains(self, other: 'Subgroup') -> bool:
        return other.ambient == self.ambient and all(g in self for g in other.generators)

    def __eq__(self, other):
        if not isinstance(other, Subgroup):
            return NotImplemented
        return (self.ambient == other.ambient and self.order == other.order
                and all(g in self for g in other.generators))

    def __hash__(self):
        return hash((self.ambient, self.order))

    def __str__(self):
        return '<' + ', '.join(str(g) for g in self.basis) + f'> of order {self.order} in {self.ambient}'


def closure_indices(group: FinAbGroup, generator_coords) -> frozenset:
    """Element indices of the subgroup generated by the given coordinate tuples."""
    members = np.zeros((1, group.rank), dtype=np.int64)
    for coords in generator_coords:
        g = np.array(coords, dtype=np.int64)
        order = GroupElement(group, coords).order
        multiples = np.arange(order, dtype=np.int64)[:, None] * g[None, :]
        members = (members[:, None, :] + multiples[None, :, :]).reshape(-1, group.rank)
        members = group.coordinate_array[np.unique(group.encode(members))]
    return frozenset(int(i) for i in group.encode(members))


def _primary_subgroups(group: FinAbGroup, p: int) -> list:
    """All subgroups of the p-primary part, as (generator coords, element index set) pairs."""
    coords = group.coordinate_array
    moduli = np.array(group.invariant_factors, dtype=np.int64)
    p_part = np.array([p ** multiplicity(p, n) for n in group.invariant_factors], dtype=np.int64)
    # Elements of the p-primary part have coordinates divisible by n_j / p^{e_j}
    mask = np.all(coords % (moduli // p_part) == 0, axis=1)
    primary = coords[mask]

    cyclic = {}
    for row in primary:
        if not row.any():
            continue
        members = closure_indices(group, [tuple(int(c) for c in row)])
        cyclic.setdefault(members, tuple(int(c) for c in row))
    cyclic_items = list(cyclic.items())

    trivial = frozenset([0])
    found = {trivial: ()}
    frontier = [trivial]
    while frontier:
        next_frontier = []
        for members in frontier:
            member_rows = coords[sorted(members)]
            for cyclic_members, generator in cyclic_items:
                if cyclic_members <= members:
                    continue
                cyclic_rows = coords[sorted(cyclic_members)]
                joined = (member_rows[:, None, :] + cyclic_rows[None, :, :]).reshape(-1, group.rank)
                join = frozenset(int(i) for i in group.encode(joined))
                if join not in found:
                    found[join] = found[members] + (generator,)
                    next_frontier.append(join)
        frontier = next_frontier
    return [(gens, members) for members, gens in found.items()]


def subgroups(group: FinAbGroup, bound: int = SUBGROUP_BOUND) -> list:
    """
    All subgroups of ``group``, each exactly once. Enumerated per primary component and combined by sums.

    :param group: the ambient group.
    :param bound: largest group order accepted.
    :return: list of Subgroup, trivial subgroup first.
    """
    if group.order > bound:
        raise SubgroupBoundError(f'Invalid group for subgroup enumeration: |G| = {group.order} exceeds {bound}')
    if group.is_trivial:
        return [Subgroup(group, (), frozenset([0]))]

    per_prime = [_primary_subgroups(group, p) for p in primefactors(group.order)]
    result = []
    for choice in product(*per_prime):
        generator_coords = [g for gens, _ in choice for g in gens]
        members = choice[0][1]
        for _, other in choice[1:]:
            members = _sum_of_index_sets(group, members, other)
        result.append(Subgroup(group, tuple(GroupElement(group, c) for c in generator_coords), members))
    logger.debug('Enumerated %d subgroups of %s', len(result), group)
    return result


def _sum_of_index_sets(group: FinAbGroup, left: frozenset, right: frozenset) -> frozenset:
    coords = group.coordinate_array
    joined = (coords[sorted(left)][:, None, :] + coords[sorted(right)][None, :, :]).reshape(-1, group.rank)
    return frozenset(int(i) for i in group.encode(joined))


def quotient(group: FinAbGroup, subgroup: Subgroup) -> FinAbGroup:
    if subgroup.ambient != group:
        raise ValueError(f'Invalid subgroup: not contained in {group}')
    return subgroup.quotient


def mobius(group: FinAbGroup) -> int:
    """
    Möbius function on isomorphism classes: 0 if some p-part has a factor p^2, otherwise the product over primes
    of (-1)^r p^{r(r-1)/2} where r is the p-rank.
    """
    value = 1
    for p in primefactors(group.order):
        exponents = [multiplicity(p, n) for n in group.invariant_factors]
        if any(e >= 2 for e in exponents):
            return 0
        r = sum(1 for e in exponents if e == 1)
        value *= (-1) ** r * p ** (r * (r - 1) // 2)
    return value


def count_homomorphisms(source: FinAbGroup, target: FinAbGroup) -> int:
    return prod(gcd(a, h) for a in source.invariant_factors for h in target.invariant_factors)


def count_surjections(source: FinAbGroup, target: FinAbGroup, bound: int = SUBGROUP_BOUND) -> int:
    """
    Number of surjective homomorphisms ``source`` → ``target`` by Delsarte inversion:
    Σ_{H ⊆ G} μ(G/H)·|Hom(A, H)|.
    """
    total = 0
    for h in subgroups(target, bound):
        mu = mobius(h.quotient)
        if mu:
            total += mu * count_homomorphisms(source, h.structure)
    return total


def abelian_groups(max_order: int) -> list:
    """Every finite abelian group of order at most ``max_order``, the trivial group first."""
    found = []

    def extend(factors, order):
        found.append(FinAbGroup(factors))
        candidates = divisors(factors[-1])[1:] if factors else range(2, max_order + 1)
        for n in candidates:
            if order * n <= max_order:
                extend(factors + (n,), order * n)

    extend((), 1)
    return sorted(found, key=lambda g: (g.order, g.invariant_factors))


@dataclass(frozen=True)
class GroupInvariants:
    Q: int
    phi_Q: int
    alpha: int
    beta: int
    nu_over_Q: int


def group_invariants(group: FinAbGroup) -> GroupInvariants:
    if group.is_trivial:
        raise ValueError('Invalid group: invariants undefined for the trivial group')
    q = group.smallest_prime
    phi_q = group.torsion_count(q) - 1
    beta = multiplicity(q, phi_q + 1)
    assert q ** beta == phi_q + 1, "phi_Q + 1 is not a power of Q."
    assert phi_q % (q - 1) == 0, "nu over Q is not an integer."
    return GroupInvariants(Q=q, phi_Q=phi_q, alpha=group.order * (q - 1) // q, beta=beta, nu_over_Q=phi_q // (q - 1))


def is_excluded_form(group: FinAbGroup) -> bool:
    """True iff G ≅ ℤ/n ⊕ (ℤ/Q)^r, i.e. l ≤ 1 or n_2 = Q."""
    q = group.smallest_prime
    return group.rank <= 1 or group.invariant_factors[1] == q


def bicyclic_family(group: FinAbGroup) -> list:
    """The coordinate subgroups ⟨e_i, e_j⟩ for i < j, whose exterior squares decompose ∧²G."""
    if group.is_cyclic:
        raise ValueError(f'Invalid group {group}: no bicyclic decomposition for a cyclic group')
    basis = group.basis()
    return [Subgroup(group, (basis[i], basis[j])) for i in range(group.rank) for j in range(i + 1, group.rank)]


def elementary_bicyclic_family(group: FinAbGroup) -> list:
    """
    Subgroups ⟨(n_i/Q)e_i, (n_j/Q)e_j⟩ ≅ (ℤ/Q)^2 whose exterior squares decompose ∧²G. Exists exactly when
    G ≅ ℤ/n ⊕ (ℤ/Q)^r with Q^2 ∤ n, r ≥ 1.
    """
    if group.is_cyclic:
        raise ValueError(f'Invalid group {group}: no bicyclic decomposition for a cyclic group')
    if not is_excluded_form(group):
        raise ValueError(f'Invalid group {group}: exterior square exponent does not divide Q')
    q = group.smallest_prime
    factors = group.invariant_factors
    if any(((factors[i] // q) * (factors[j] // q)) % factors[j] == 0
           for i in range(group.rank) for j in range(i + 1, group.rank)):
        raise ValueError(f'Invalid group {group}: its (ℤ/{q})^2 subgroups do not decompose the exterior square')
    basis = group.basis()
    scaled = [(n // q) * e for n, e in zip(factors, basis)]
    return [Subgroup(group, (scaled[i], scaled[j])) for i in range(group.rank) for j in range(i + 1, group.rank)]
