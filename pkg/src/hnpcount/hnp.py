"""
Hasse norm principle and weak approximation for the norm one torus of an abelian G-extension of ℚ, by Tate's
criterion: Sha is dual to ∧²G modulo the span V of the images of ∧²D_v over all places v.
"""
import logging
from dataclasses import dataclass

from sympy import factorint, legendre_symbol, primefactors

from hnpcount.enumerator.extension import DecompositionData, GExtensionQ, decomposition_data
from hnpcount.exterior import exterior_square, index_in_ambient, span_sum, subgroup_wedge_image
from hnpcount.groups import FinAbGroup, GroupElement, bicyclic_family, elementary_bicyclic_family, is_excluded_form
from hnpcount.localdata import LocalComponent

logger = logging.getLogger(__name__)

BIQUADRATIC = FinAbGroup((2, 2))
QUADRATIC = FinAbGroup((2,))


@dataclass(frozen=True)
class HnpReport:
    hnp_holds: bool
    sha_order: int
    a_order: int
    wa_holds: bool
    span_order: int
    decomposition_cyclic: bool
    sha_structure: FinAbGroup

    def to_record(self, verbose: bool = False) -> dict:
        record = {'hnp': self.hnp_holds, 'sha_order': str(self.sha_order), 'a_order': str(self.a_order),
                  'wa': self.wa_holds}
        if verbose:
            record['decomposition_cyclic'] = self.decomposition_cyclic
            # Invariant factors of ∧²G/V, the Pontryagin dual of Sha
            record['sha_dual_structure'] = str(self.sha_structure)
        return record


def hasse_norm_test(ext: GExtensionQ, data: DecompositionData = None) -> HnpReport:
    """
    Tate's criterion over all ramified primes and infinity; unramified places have cyclic decomposition groups and
    contribute nothing.
    """
    if data is None:
        data = decomposition_data(ext)
    square = exterior_square(ext.group)
    span = span_sum([subgroup_wedge_image(d) for d in data.places])
    sha_order = index_in_ambient(span)
    a_order = span.order
    assert sha_order * a_order == square.order, "Sha and A(T) orders do not multiply to |∧²G|."
    decomposition_cyclic = data.all_cyclic
    assert not decomposition_cyclic or a_order == 1, "Cyclic decomposition groups with nonzero wedge image."
    return HnpReport(hnp_holds=sha_order == 1, sha_order=sha_order, a_order=a_order, wa_holds=a_order == 1,
                     span_order=span.order, decomposition_cyclic=decomposition_cyclic,
                     sha_structure=span.quotient_structure)


def _is_squarefree(n: int) -> bool:
    return n != 0 and all(e == 1 for e in factorint(abs(n)).values())


def biquadratic_legendre_test(a: int, b: int) -> bool:
    """
    Whether ℚ(√a, √b) fails the Hasse norm principle, for coprime squarefree a, b ≠ 1 with a ≡ b ≡ 1 mod 4:
    (a|p) = 1 for all p | b and (b|p) = 1 for all p | a.
    """
    if a == 1 or b == 1:
        raise ValueError(f'Invalid pair ({a}, {b}): a and b must differ from 1')
    if not _is_squarefree(a) or not _is_squarefree(b):
        raise ValueError(f'Invalid pair ({a}, {b}): a and b must be squarefree')
    if a % 4 != 1 or b % 4 != 1:
        raise ValueError(f'Invalid pair ({a}, {b}): a and b must be 1 mod 4')
    if set(primefactors(abs(a))) & set(primefactors(abs(b))):
        raise ValueError(f'Invalid pair ({a}, {b}): a and b must be coprime')
    return (all(legendre_symbol(a % p, p) == 1 for p in primefactors(abs(b)))
            and all(legendre_symbol(b % p, p) == 1 for p in primefactors(abs(a))))


def fundamental_discriminant(n: int) -> int:
    """The discriminant of ℚ(√n) for squarefree n ≠ 1."""
    if n == 1 or not _is_squarefree(n):
        raise ValueError(f'Invalid radicand: {n}')
    return n if n % 4 == 1 else 4 * n


def quadratic_components(d: int) -> dict:
    """
    Local components (values in ℤ/2) of the quadratic character of the fundamental discriminant d.

    :return: dict p -> LocalComponent over the ramified primes.
    """
    odd = d if d % 4 == 1 else d // 4
    if d % 4 not in (0, 1) or (d % 4 == 0 and odd % 4 not in (2, 3)) or odd == 1 or not _is_squarefree(odd):
        raise ValueError(f'Invalid fundamental discriminant: {d}')
    one = GroupElement(QUADRATIC, (1,))
    components = {}
    odd_primes = [p for p in primefactors(abs(d)) if p != 2]
    for p in odd_primes:
        components[p] = LocalComponent(p, gamma=one)
    if d % 4 == 0:
        # χ(-1) is the sign of d, and the odd places contribute (-1)^{(p-1)/2} each
        eps = (int(d < 0) + sum(1 for p in odd_primes if p % 4 == 3)) % 2
        w = int(d % 8 == 0)
        components[2] = LocalComponent(2, eps=GroupElement(QUADRATIC, (eps,)), w=GroupElement(QUADRATIC, (w,)))
    return components


def biquadratic_extension(a: int, b: int) -> GExtensionQ:
    """ℚ(√a, √b) as a (ℤ/2)²-extension, with the first coordinate moving √a and the second moving √b."""
    first = quadratic_components(fundamental_discriminant(a))
    second = quadratic_components(fundamental_discriminant(b))
    components = []
    for p in sorted(set(first) | set(second)):
        parts = [first.get(p), second.get(p)]
        if p == 2:
            eps = tuple(c.eps.coords[0] if c is not None else 0 for c in parts)
            w = tuple(c.w.coords[0] if c is not None else 0 for c in parts)
            components.append(LocalComponent(2, eps=GroupElement(BIQUADRATIC, eps), w=GroupElement(BIQUADRATIC, w)))
        else:
            gamma = tuple(1 if c is not None else 0 for c in parts)
            components.append(LocalComponent(p, gamma=GroupElement(BIQUADRATIC, gamma)))
    ext = GExtensionQ(BIQUADRATIC, tuple(components))
    if not ext.surjective:
        raise ValueError(f'Invalid pair ({a}, {b}): ℚ(√{a}, √{b}) is not biquadratic')
    return ext


def lemma_6_13_predicate(ext: GExtensionQ, data: DecompositionData = None) -> bool:
    """
    Every ramified prime has inertia of order dividing Q or a cyclic decomposition group. For G not of the
    form ℤ/n ⊕ (ℤ/Q)^r this forces a failure of the Hasse norm principle.
    """
    if is_excluded_form(ext.group):
        raise ValueError(f'Invalid group {ext.group}: of the form ℤ/n ⊕ (ℤ/Q)^r')
    if data is None:
        data = decomposition_data(ext)
    q = ext.group.smallest_prime
    return all(q % data.inertia[p].order == 0 or data.decomposition[p].is_cyclic for p in data.decomposition)


def certificate_family(group: FinAbGroup) -> list:
    try:
        return elementary_bicyclic_family(group)
    except ValueError:
        return bicyclic_family(group)


def lemma_6_12_certificate(ext: GExtensionQ, data: DecompositionData = None) -> list:
    """
    For G of the form ℤ/n ⊕ (ℤ/Q)^r: empty if the Hasse norm principle holds, otherwise the first member of
    the bicyclic family contained in no decomposition group.
    """
    if not is_excluded_form(ext.group):
        raise ValueError(f'Invalid group {ext.group}: not of the form ℤ/n ⊕ (ℤ/Q)^r')
    if data is None:
        data = decomposition_data(ext)
    if hasse_norm_test(ext, data).hnp_holds:
        return []
    family = certificate_family(ext.group)
    for member in family:
        if not any(d.contains(member) for d in data.places):
            return [member]
    raise AssertionError('Every family member lies in a decomposition group, yet the Hasse norm principle fails.')
