"""
Local data over ℚ_p: characters of the p-adic unit group with values in G, their conductor and discriminant
exponents, inertia subgroups and evaluation at units.

For odd p the unit group is generated by a fixed g, the least primitive root mod p and mod p^2. For p = 2 the
generators are -1 and 5.
"""
import logging
from dataclasses import dataclass
from functools import cached_property, lru_cache
from math import prod

from sympy import discrete_log, is_primitive_root, isprime, multiplicity, primitive_root

from hnpcount.groups import Character, FinAbGroup, GroupElement, Subgroup

logger = logging.getLogger(__name__)


@lru_cache(maxsize=None)
def unit_generator(p: int) -> int:
    """The least positive integer that is a primitive root mod p and mod p^2 (odd p)."""
    if p == 2:
        raise ValueError('Invalid prime: the unit group at 2 is generated by -1 and 5')
    g = int(primitive_root(p))
    while g % p == 0 or not is_primitive_root(g, p * p):
        g += 1
    return g


@lru_cache(maxsize=None)
def _root_table(p: int, m: int) -> dict:
    # u^{(p-1)/m} mod p  ->  dlog_g(u) mod m
    g = unit_generator(p)
    step = pow(g, (p - 1) // m, p)
    table = {}
    value = 1
    for k in range(m):
        table[value] = k
        value = value * step % p
    return table


@lru_cache(maxsize=65536)
def _discrete_log(modulus: int, u: int, base: int) -> int:
    return int(discrete_log(modulus, u, base))


def unit_log(p: int, a: int, u: int, m: int) -> int:
    """
    dlog_g(u) mod m for odd p, where m divides (p-1)p^{a-1}.

    :param p: odd prime.
    :param a: level; u is read mod p^a.
    :param u: unit mod p.
    :param m: the modulus of interest (order of the image).
    """
    if m == 1:
        return 0
    if m % p:
        return _root_table(p, m)[pow(u, (p - 1) // m, p)]
    modulus = p ** a
    return _discrete_log(modulus, u % modulus, unit_generator(p)) % m


def two_adic_log(a: int, u: int) -> tuple:
    """(e0, e1) with u ≡ (-1)^{e0}·5^{e1} mod 2^a; e1 is taken mod 2^{a-2}."""
    if a < 2:
        return 0, 0
    modulus = 2 ** a
    u %= modulus
    e0 = 0 if u % 4 == 1 else 1
    v = u if e0 == 0 else (-u) % modulus
    e1 = 0 if a == 2 else _discrete_log(modulus, v, 5)
    return e0, e1


@dataclass(frozen=True)
class LocalComponent:
    """
    A character of ℤ_p^* with values in G: the image gamma of g (odd p), or the images eps of -1 and w of 5
    (p = 2).
    """
    p: int
    gamma: GroupElement = None
    eps: GroupElement = None
    w: GroupElement = None

    def __post_init__(self):
        if self.p == 2:
            if self.eps is None or self.w is None or self.gamma is not None:
                raise ValueError('Invalid component at 2: eps and w are required')
            if self.eps.group != self.w.group:
                raise ValueError('Invalid component at 2: eps and w live in different groups')
            if self.eps.order > 2:
                raise ValueError(f'Invalid component at 2: eps = {self.eps} has order {self.eps.order}')
            if self.w.order & (self.w.order - 1):
                raise ValueError(f'Invalid component at 2: w = {self.w} has order {self.w.order}')
        else:
            if self.gamma is None or self.eps is not None or self.w is not None:
                raise ValueError(f'Invalid component at {self.p}: gamma is required')
            order = self.gamma.order
            tame = order // self.p ** multiplicity(self.p, order)
            if (self.p - 1) % tame:
                raise ValueError(f'Invalid component at {self.p}: gamma = {self.gamma} has order {order}')

    @property
    def group(self) -> FinAbGroup:
        return self.w.group if self.p == 2 else self.gamma.group

    @property
    def images(self) -> tuple:
        return (self.eps, self.w) if self.p == 2 else (self.gamma,)

    @property
    def is_trivial(self) -> bool:
        return all(g.is_zero for g in self.images)

    @cached_property
    def level(self) -> int:
        """The conductor exponent of the component itself."""
        if self.p == 2:
            if self.w.order >= 2:
                return multiplicity(2, self.w.order) + 2
            return 2 if not self.eps.is_zero else 0
        if self.gamma.is_zero:
            return 0
        return 1 + multiplicity(self.p, self.gamma.order)

    @cached_property
    def inertia(self) -> Subgroup:
        return Subgroup(self.group, tuple(g for g in self.images if not g.is_zero))

    @cached_property
    def sort_key(self) -> tuple:
        return (self.p,) + tuple(c for g in self.images for c in g.coords)

    def to_record(self) -> dict:
        if self.p == 2:
            return {'p': 2, 'eps': list(self.eps.coords), 'w': list(self.w.coords)}
        return {'p': self.p, 'gamma': list(self.gamma.coords)}

    @classmethod
    def from_record(cls, record: dict, group: FinAbGroup):
        """Decode {"p": p, "gamma": [...]} or {"p": 2, "eps": [...], "w": [...]}; coordinates must be reduced."""
        if not isinstance(record, dict) or not isinstance(record.get('p'), int):
            raise ValueError(f'Invalid component record: {record}')
        p = record['p']
        if not isprime(p):
            raise ValueError(f'Invalid component record: {p} is not prime')
        keys = ('eps', 'w') if p == 2 else ('gamma',)
        if set(record) != {'p', *keys}:
            raise ValueError(f'Invalid component record at {p}: expected keys p, {", ".join(keys)}')
        images = []
        for key in keys:
            coords = record[key]
            if (not isinstance(coords, list) or len(coords) != group.rank
                    or not all(isinstance(c, int) and 0 <= c < n for c, n in zip(coords, group.invariant_factors))):
                raise ValueError(f'Invalid component record at {p}: {key} = {coords} for group {group}')
            images.append(GroupElement(group, tuple(coords)))
        if p == 2:
            return cls(2, eps=images[0], w=images[1])
        return cls(p, gamma=images[0])


def trivial_component(group: FinAbGroup, p: int) -> LocalComponent:
    if p == 2:
        return LocalComponent(2, eps=group.zero, w=group.zero)
    return LocalComponent(p, gamma=group.zero)


def enumerate_local_components(group: FinAbGroup, p: int) -> list:
    """
    All characters ℤ_p^* → G, trivial one first, then ordered by coordinates.

    :param group: target group.
    :param p: prime.
    :return: list of LocalComponent with |G[p-1]|·|Syl_p(G)| entries (|G[2]|·|Syl_2(G)| at 2).
    """
    if p == 2:
        two_torsion = [g for g in group.elements() if g.order <= 2]
        two_power = [g for g in group.elements() if not g.order & (g.order - 1)]
        return [LocalComponent(2, eps=e, w=w) for e in two_torsion for w in two_power]
    components = []
    for g in group.elements():
        order = g.order
        if (p - 1) % (order // p ** multiplicity(p, order)) == 0:
            components.append(LocalComponent(p, gamma=g))
    return components


def conductor_exponent(psi: Character, component: LocalComponent) -> int:
    """Least c such that ψ∘φ_p is trivial on 1 + p^c ℤ_p (c ≥ 2 at p = 2 when ramified)."""
    p = component.p
    if p == 2:
        w_order = psi(component.w).denominator
        if w_order > 1:
            return multiplicity(2, w_order) + 2
        return 2 if psi(component.eps) != 0 else 0
    order = psi(component.gamma).denominator
    if order == 1:
        return 0
    j = multiplicity(p, order)
    return 1 if j == 0 else j + 1


@lru_cache(maxsize=None)
def local_disc_exponent(group: FinAbGroup, component: LocalComponent) -> int:
    """w_p = Σ_{ψ ∈ Ĝ} conductor_exponent(ψ, φ_p)."""
    if component.group != group:
        raise ValueError(f'Invalid component: values in {component.group}, expected {group}')
    return sum(conductor_exponent(psi, component) for psi in group.characters())


def phi_G_local(group: FinAbGroup, component: LocalComponent, frob_image: GroupElement) -> int:
    """
    Π_{ψ ∈ Ĝ} p^{c(ψ∘χ)} for the local character χ with unit part ``component`` and χ(p) = ``frob_image``.
    """
    assert frob_image.group == group, "Frobenius image lives in another group."
    exponent = sum(conductor_exponent(psi, component) for psi in group.characters())
    # Twisting by an unramified character leaves every conductor unchanged.
    assert exponent == local_disc_exponent(group, component), "Conductor depends on the Frobenius image."
    return component.p ** exponent


def evaluate_coords(component: LocalComponent, u: int) -> tuple:
    """Coordinates of φ_p(u); used on hot paths to avoid building elements."""
    p = component.p
    if u % p == 0:
        raise ValueError(f'Invalid unit: {u} is divisible by {p}')
    group = component.group
    if component.is_trivial:
        return (0,) * group.rank
    if p == 2:
        e0, e1 = two_adic_log(component.level, u)
        return tuple((e0 * a + e1 * b) % n
                     for a, b, n in zip(component.eps.coords, component.w.coords, group.invariant_factors))
    k = unit_log(p, component.level, u, component.gamma.order)
    return tuple(k * c % n for c, n in zip(component.gamma.coords, group.invariant_factors))


def evaluate(component: LocalComponent, u: int) -> GroupElement:
    """φ_p(u mod p^a) for a unit u."""
    return GroupElement(component.group, evaluate_coords(component, u))


def minimal_exponent(group: FinAbGroup, components) -> int:
    """Least local discriminant exponent over the nontrivial components given, or 0 if there are none."""
    exponents = [local_disc_exponent(group, c) for c in components if not c.is_trivial]
    return min(exponents, default=0)


def tame_exponent(group: FinAbGroup, inertia_order: int) -> int:
    """|G|(1 - 1/m) for tame inertia of order m."""
    return group.order - group.order // inertia_order


def count_local_components(p: int, group: FinAbGroup) -> int:
    """|Hom(ℤ_p^*, G)|."""
    if p == 2:
        return group.torsion_count(2) * prod(2 ** multiplicity(2, n) for n in group.invariant_factors)
    return group.torsion_count(p - 1) * prod(p ** multiplicity(p, n) for n in group.invariant_factors)


def sign_of_unit(component: LocalComponent) -> GroupElement:
    """φ_p(-1)."""
    return evaluate(component, -1)
