"""
Independent enumeration backend: primitive surjections (ℤ/m)^* → G for each conductor m ≤ M, read through
(ℤ/m)^* ≅ Π_{p^e ∥ m} (ℤ/p^e)^*, with discriminants from the conductor-discriminant formula.
"""
import logging
from functools import lru_cache
from itertools import product
from math import prod

from sympy import discrete_log, factorint, integer_nthroot, primitive_root

from hnpcount.enumerator.extension import GExtensionQ
from hnpcount.groups import FinAbGroup, span_order
from hnpcount.localdata import LocalComponent, unit_generator

logger = logging.getLogger(__name__)


def conductor_bound(group: FinAbGroup, bound: int) -> int:
    """Largest m with m^{|G|/2} ≤ B; no extension of discriminant ≤ B has a larger conductor."""
    return int(integer_nthroot(bound ** 2, group.order)[0])


def _primitive_images_odd(group: FinAbGroup, p: int, e: int) -> list:
    """Images x of a generator h of (ℤ/p^e)^* with conductor exactly p^e."""
    cyclic_order = (p - 1) * p ** (e - 1)
    # 1 + p^{e-1}ℤ/p^e is generated by h^{(p-1)p^{e-2}} for e ≥ 2
    kernel_step = 1 if e == 1 else (p - 1) * p ** (e - 2)
    return [x for x in group.elements() if (cyclic_order * x).is_zero and not (kernel_step * x).is_zero]


def _primitive_images_two(group: FinAbGroup, e: int) -> list:
    """Images (of -1, of 5) with conductor exactly 2^e."""
    two_torsion = [x for x in group.elements() if (2 * x).is_zero]
    if e == 2:
        return [(eps, group.zero) for eps in two_torsion if not eps.is_zero]
    five_order = 2 ** (e - 2)
    fives = [x for x in group.elements() if (five_order * x).is_zero and not ((five_order // 2) * x).is_zero]
    return [(eps, w) for eps in two_torsion for w in fives]


def _character_conductor_exponent(value, p: int, e: int, images) -> int:
    """
    The exponent of p in the conductor of the ℚ/ℤ-valued character ``value`` composed with the local part.
    ``images`` holds (image of h) at odd p and (image of -1, image of 5) at 2.
    """
    if p == 2:
        eps, w = images
        if value(eps) == 0 and value(w) == 0:
            return 0
        c = 2
        while value(2 ** (c - 2) * w) != 0:
            c += 1
        return c
    (x,) = images
    if value(x) == 0:
        return 0
    c = 1
    while value((p - 1) * p ** (c - 1) * x) != 0:
        c += 1
    return c


def _to_component(group: FinAbGroup, p: int, e: int, images) -> LocalComponent:
    if p == 2:
        eps, w = images
        return LocalComponent(2, eps=eps, w=w)
    (x,) = images
    return LocalComponent(p, gamma=_generator_shift(p, e) * x)


@lru_cache(maxsize=None)
def _generator_shift(p: int, e: int) -> int:
    """k with g = h^k mod p^e, for h = primitive_root(p^e) and g the fixed unit generator."""
    modulus = p ** e
    h = int(primitive_root(modulus))
    return int(discrete_log(modulus, unit_generator(p) % modulus, h))


def enumerate_by_modulus(group: FinAbGroup, bound: int, max_modulus: int) -> list:
    """
    All surjective G-extensions of discriminant ≤ ``bound`` and conductor ≤ ``max_modulus``.

    A ``max_modulus`` below conductor_bound(group, bound) silently loses extensions.

    :return: list of GExtensionQ sorted like enumerate_extensions.
    """
    if group.is_trivial:
        raise ValueError('Invalid group: G must be non-trivial')
    characters = [psi for psi in group.characters()]
    found = []
    for m in range(2, max_modulus + 1):
        factors = factorint(m)
        if factors.get(2) == 1:
            continue
        local_choices = []
        for p, e in sorted(factors.items()):
            if p == 2:
                local_choices.append([(2, e, images) for images in _primitive_images_two(group, e)])
            else:
                local_choices.append([(p, e, (x,)) for x in _primitive_images_odd(group, p, e)])
        for choice in product(*local_choices):
            generators = [g for _, _, images in choice for g in images]
            if span_order(group, generators) != group.order:
                continue
            disc = prod(p ** sum(_character_conductor_exponent(psi, p, e, images) for psi in characters)
                        for p, e, images in choice)
            if disc > bound:
                continue
            ext = GExtensionQ(group, tuple(_to_component(group, p, e, images) for p, e, images in choice))
            assert ext.discriminant == disc, f'Discriminant mismatch at conductor {m}: {ext.discriminant} vs {disc}'
            assert ext.conductor == m, f'Conductor mismatch: {ext.conductor} vs {m}'
            found.append(ext)
    logger.info('Modulus backend over %s: %d extensions with conductor ≤ %d and disc ≤ %d',
                group, len(found), max_modulus, bound)
    return sorted(found, key=lambda ext: ext.sort_key)
