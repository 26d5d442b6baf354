"""
G-extensions of ℚ as tuples of local components, with the Frobenius and decomposition data derived from them.
"""
import logging
from dataclasses import dataclass
from functools import cached_property
from math import prod

from hnpcount.groups import FinAbGroup, GroupElement, Subgroup
from hnpcount.localdata import LocalComponent, evaluate, local_disc_exponent

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GExtensionQ:
    """
    An abelian G-extension of ℚ given by its nontrivial local components, ordered by prime.
    """
    group: FinAbGroup
    components: tuple = ()

    def __post_init__(self):
        components = tuple(sorted((c for c in self.components if not c.is_trivial), key=lambda c: c.p))
        primes = [c.p for c in components]
        if len(set(primes)) != len(primes):
            raise ValueError(f'Invalid extension: more than one component at a prime in {primes}')
        for c in components:
            if c.group != self.group:
                raise ValueError(f'Invalid component at {c.p}: values in {c.group}, expected {self.group}')
        object.__setattr__(self, 'components', components)

    @classmethod
    def from_components(cls, group: FinAbGroup, components):
        if isinstance(components, dict):
            components = components.values()
        return cls(group, tuple(components))

    @cached_property
    def component_map(self) -> dict:
        return {c.p: c for c in self.components}

    @property
    def primes(self) -> list:
        return [c.p for c in self.components]

    @cached_property
    def discriminant(self) -> int:
        return prod(c.p ** local_disc_exponent(self.group, c) for c in self.components)

    @cached_property
    def conductor(self) -> int:
        return prod(c.p ** c.level for c in self.components)

    @cached_property
    def image(self) -> Subgroup:
        return Subgroup(self.group, tuple(g for c in self.components for g in c.images if not g.is_zero))

    @property
    def surjective(self) -> bool:
        return self.image.is_whole

    @cached_property
    def sign(self) -> GroupElement:
        """The image of complex conjugation, Σ_p φ_p(-1)."""
        total = self.group.zero
        for c in self.components:
            total = total + evaluate(c, -1)
        return total

    @property
    def is_totally_real(self) -> bool:
        return self.sign.is_zero

    @cached_property
    def sort_key(self) -> tuple:
        return self.discriminant, tuple(c.sort_key for c in self.components)

    def to_record(self) -> dict:
        return {'disc': str(self.discriminant),
                'components': [c.to_record() for c in self.components],
                'surjective': self.surjective}

    @classmethod
    def from_record(cls, record: dict, group: FinAbGroup, require_surjective: bool = True):
        """
        Decode {"components": [...]} (a "disc" or "surjective" entry, if present, is recomputed and checked).
        """
        if not isinstance(record, dict) or not isinstance(record.get('components'), list):
            raise ValueError('Invalid extension record: expected an object with a "components" list')
        ext = cls(group, tuple(LocalComponent.from_record(c, group) for c in record['components']))
        if 'disc' in record and str(record['disc']) != str(ext.discriminant):
            raise ValueError(f'Invalid extension record: disc {record["disc"]} but components give {ext.discriminant}')
        if require_surjective and not ext.surjective:
            raise ValueError(f'Invalid extension: not surjective onto {group} (image of order {ext.image.order})')
        return ext

    def __str__(self):
        parts = ', '.join(f'{c.p}:' + '/'.join(str(g) for g in c.images) for c in self.components)
        return f'G-extension of disc {self.discriminant} [{parts}]'


@dataclass(frozen=True)
class DecompositionData:
    inertia: dict
    frobenius: dict
    decomposition: dict
    archimedean: Subgroup

    @property
    def places(self) -> list:
        """Decomposition groups at the ramified primes and at infinity."""
        return list(self.decomposition.values()) + [self.archimedean]

    @property
    def all_cyclic(self) -> bool:
        return all(d.is_cyclic for d in self.places)


def frobenius_at(ext: GExtensionQ, p: int) -> GroupElement:
    """Σ_{q ≠ p} φ_q(p): the Frobenius at p modulo inertia."""
    total = ext.group.zero
    for c in ext.components:
        if c.p != p:
            total = total + evaluate(c, p)
    return total


def local_groups_at(ext: GExtensionQ, p: int) -> tuple:
    """(inertia, decomposition) at p, which may be unramified."""
    component = ext.component_map.get(p)
    inertia = component.inertia if component is not None else Subgroup.trivial(ext.group)
    frobenius = frobenius_at(ext, p)
    return inertia, Subgroup(ext.group, inertia.generators + (frobenius,))


def decomposition_data(ext: GExtensionQ) -> DecompositionData:
    if not ext.surjective:
        raise ValueError(f'Invalid extension: not surjective onto {ext.group}')
    inertia, frobenius, decomposition = {}, {}, {}
    for c in ext.components:
        inertia[c.p] = c.inertia
        frobenius[c.p] = frobenius_at(ext, c.p)
        decomposition[c.p] = Subgroup(ext.group, c.inertia.generators + (frobenius[c.p],))
        assert decomposition[c.p].contains(inertia[c.p]), "Inertia is not contained in decomposition."
    archimedean = Subgroup(ext.group, (ext.sign,))
    assert archimedean.order <= 2, "Decomposition group at infinity has order above 2."
    return DecompositionData(inertia=inertia, frobenius=frobenius, decomposition=decomposition,
                             archimedean=archimedean)
