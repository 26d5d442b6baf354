"""
Numerical checks of the local harmonic analysis: the pairing between Hom(ℚ_p^*, G) and ℚ_p^* ⊗ Ĝ, local
Fourier transforms of conductor weights and their closed forms, and log-log fitting of counts.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, log

import numpy as np
from scipy.stats import linregress
from sympy import divisors, multiplicity

from hnpcount.groups import Character, FinAbGroup, GroupElement, Subgroup, closure_indices, group_invariants
from hnpcount.localdata import (LocalComponent, enumerate_local_components, evaluate_coords, local_disc_exponent,
                                tame_exponent, trivial_component)

logger = logging.getLogger(__name__)

IDENTITY_TOLERANCE = 1e-9
VANISHING_TOLERANCE = 1e-12
LEADING_TOLERANCE = 1e-6


@dataclass(frozen=True)
class PairingElement:
    """x = Σ u_i ⊗ η_i in ℚ^* ⊗ Ĝ, localized at p on demand."""
    group: FinAbGroup
    terms: tuple = ()

    def __post_init__(self):
        terms = tuple((Fraction(u), eta) for u, eta in self.terms)
        for u, eta in terms:
            if u == 0:
                raise ValueError('Invalid pairing term: u must be nonzero')
            if eta.group != self.group:
                raise ValueError(f'Invalid pairing term: character of {eta.group}, expected {self.group}')
        object.__setattr__(self, 'terms', terms)

    def __add__(self, other):
        return PairingElement(self.group, self.terms + other.terms)

    def valuation_part(self, p: int) -> Character:
        """Σ v_p(u_i)·η_i; x_p is a unit class iff this vanishes."""
        total = Character(self.group, (0,) * self.group.rank)
        for u, eta in self.terms:
            total = total + valuation(u, p) * eta
        return total

    def is_unit_class(self, p: int) -> bool:
        return self.valuation_part(p).is_trivial


@dataclass(frozen=True)
class LocalCharacterFull:
    """χ ∈ Hom(ℚ_p^*, G): a unit part and the image of the uniformizer p."""
    component: LocalComponent
    frob_image: GroupElement

    @property
    def p(self) -> int:
        return self.component.p

    @property
    def group(self) -> FinAbGroup:
        return self.component.group

    def image(self) -> Subgroup:
        return Subgroup(self.group, tuple(g for g in self.component.images if not g.is_zero) + (self.frob_image,))

    def __call__(self, u) -> GroupElement:
        """χ(u) = v_p(u)·frob_image + φ_p(unit part of u)."""
        u = Fraction(u)
        if u == 0:
            raise ValueError('Invalid argument: zero has no image')
        p = self.p
        v = valuation(u, p)
        unit = u / Fraction(p) ** v
        level = self.component.level
        if level == 0:
            unit_image = (0,) * self.group.rank
        else:
            modulus = p ** level
            residue = unit.numerator * pow(unit.denominator, -1, modulus) % modulus
            unit_image = evaluate_coords(self.component, residue)
        return v * self.frob_image + GroupElement(self.group, unit_image)


def valuation(u: Fraction, p: int) -> int:
    u = Fraction(u)
    return multiplicity(p, abs(u.numerator)) - multiplicity(p, u.denominator)


def local_characters(group: FinAbGroup, p: int) -> list:
    """All of Hom(ℚ_p^*, G): |G| times the number of unit parts."""
    return [LocalCharacterFull(component, frob)
            for component in enumerate_local_components(group, p) for frob in group.elements()]


def pairing_phase(chi: LocalCharacterFull, x: PairingElement) -> Fraction:
    """Σ_i η_i(χ(u_i)) in ℚ/ℤ, exactly."""
    if chi.group != x.group:
        raise ValueError(f'Invalid pairing: character into {chi.group} against an element over {x.group}')
    total = Fraction(0)
    for u, eta in x.terms:
        total += eta(chi(u))
    return total - (total.numerator // total.denominator)


def pairing(chi: LocalCharacterFull, x: PairingElement) -> complex:
    return complex(np.exp(2j * np.pi * float(pairing_phase(chi, x))))


# Local weights f_v on Hom(ℚ_p^*, G)
def constant_one(chi: LocalCharacterFull) -> float:
    return 1.0


def unramified_indicator(chi: LocalCharacterFull) -> float:
    return 1.0 if chi.component.is_trivial else 0.0


def inertia_divides_q_indicator(chi: LocalCharacterFull) -> float:
    q = chi.group.smallest_prime
    return 1.0 if q % chi.component.inertia.order == 0 else 0.0


def local_transform(group: FinAbGroup, p: int, x: PairingElement, s: complex, f=constant_one) -> complex:
    """(1/|G|) Σ_{χ ∈ Hom(ℚ_p^*, G)} f(χ)⟨χ, x⟩ Φ_G(χ)^{-s}."""
    characters = local_characters(group, p)
    phases = np.array([float(pairing_phase(chi, x)) for chi in characters])
    weights = np.array([f(chi) for chi in characters], dtype=complex)
    exponents = np.array([local_disc_exponent(group, chi.component) for chi in characters], dtype=float)
    terms = weights * np.exp(2j * np.pi * phases) * np.exp(-complex(s) * exponents * log(p))
    return complex(terms.sum() / group.order)


def _unramified_average(group: FinAbGroup, component: LocalComponent, x: PairingElement, f) -> complex:
    """τ_f(φ, x) = (1/|G|) Σ_{ψ unramified} f(φψ)⟨ψ, x⟩."""
    p = component.p
    trivial = trivial_component(group, p)
    total = 0j
    for frob in group.elements():
        total += f(LocalCharacterFull(component, frob)) * pairing(LocalCharacterFull(trivial, frob), x)
    return total / group.order


def lemma_3_3_closed_form(group: FinAbGroup, p: int, x: PairingElement, s: complex, f=constant_one) -> complex:
    """
    Σ_{m | (exp G, p - 1)} (Σ_{φ : ker φ = O^{*m}} ⟨φ, x⟩ τ_f(φ, x)) p^{-|G|(1 - 1/m)s} for p ∤ |G|.
    """
    if group.order % p == 0:
        raise ValueError(f'Invalid prime {p}: divides |G| = {group.order}')
    by_order = {}
    for component in enumerate_local_components(group, p):
        by_order.setdefault(component.inertia.order, []).append(component)
    zero = group.zero
    total = 0j
    for m in divisors(gcd(group.exponent, p - 1)):
        inner = sum(pairing(LocalCharacterFull(component, zero), x) * _unramified_average(group, component, x, f)
                    for component in by_order.get(m, []))
        total += inner * np.exp(-complex(s) * tame_exponent(group, m) * log(p))
    return complex(total)


def is_qth_power_class(group: FinAbGroup, p: int, x: PairingElement) -> bool:
    """x_p ∈ O^{*Q} ⊗ Ĝ: every unit character with values killed by Q pairs trivially with x."""
    q = group.smallest_prime
    zero = group.zero
    return all(pairing_phase(LocalCharacterFull(component, zero), x) == 0
               for component in enumerate_local_components(group, p)
               if all((q * g).is_zero for g in component.images))


def lemma_4_8_values(group: FinAbGroup, p: int, x: PairingElement) -> Fraction:
    """
    The local factor truncated after the p^{-α s} term, at s = 1/α:
    1 + (Q^β - 1)/p, 1 - 1/p or 1.
    """
    if group.order % p == 0:
        raise ValueError(f'Invalid prime {p}: divides |G| = {group.order}')
    if not x.is_unit_class(p):
        raise ValueError(f'Invalid element: not a unit class at {p}')
    invariants = group_invariants(group)
    if (p - 1) % invariants.Q:
        return Fraction(1)
    if is_qth_power_class(group, p, x):
        return 1 + Fraction(invariants.Q ** invariants.beta - 1, p)
    return 1 - Fraction(1, p)


def leading_coefficients(group: FinAbGroup, p: int, x: PairingElement, f=constant_one, s_pair=None) -> tuple:
    """
    (c0, c1) with local_transform(s) = c0 + c1·p^{-α s} at both points of ``s_pair``; exact when only inertia of
    order 1 or Q contributes. The default pair (0, 1/α) keeps the system well conditioned for large p.
    """
    alpha = group_invariants(group).alpha
    s1, s2 = s_pair if s_pair is not None else (0.0, 1 / alpha)
    matrix = np.array([[1.0, p ** (-alpha * s1)], [1.0, p ** (-alpha * s2)]], dtype=complex)
    values = np.array([local_transform(group, p, x, s1, f), local_transform(group, p, x, s2, f)], dtype=complex)
    c0, c1 = np.linalg.solve(matrix, values)
    return complex(c0), complex(c1)


def local_image_count(group: FinAbGroup, p: int, subgroup: Subgroup) -> int:
    """#{χ ∈ Hom(ℚ_p^*, G) : χ(ℚ_p^*) = A}."""
    target = subgroup.element_indices
    found = 0
    for chi in local_characters(group, p):
        if closure_indices(group, [g.coords for g in chi.image().generators]) == target:
            found += 1
    return found


def realize_locally(group: FinAbGroup, subgroup: Subgroup, p: int):
    """The first local character at p with image exactly A, or None."""
    target = subgroup.element_indices
    for chi in local_characters(group, p):
        if closure_indices(group, [g.coords for g in chi.image().generators]) == target:
            return chi
    return None


def asymptotic_fit(counts, alpha: int, nu: int) -> dict:
    """
    Least-squares slope of log N against log B, with N / (B^{1/α} (log B)^{ν-1}) at each point.

    :param counts: list of (B, N) with increasing B.
    :param alpha: α(G).
    :param nu: ν(ℚ, G).
    """
    counts = list(counts)
    if len(counts) < 3:
        raise ValueError(f'Invalid counts: at least 3 points are required, got {len(counts)}')
    if any(counts[i][0] >= counts[i + 1][0] for i in range(len(counts) - 1)):
        raise ValueError('Invalid counts: bounds must increase')
    if any(n <= 0 or b <= 1 for b, n in counts):
        raise ValueError('Invalid counts: B must exceed 1 and N must be positive')
    log_b = np.array([log(b) for b, _ in counts])
    log_n = np.array([log(n) for _, n in counts])
    result = linregress(log_b, log_n)
    estimates = [n / (b ** (1 / alpha) * log(b) ** (nu - 1)) for b, n in counts]
    logger.info('Fitted slope %.4f (expected 1/alpha = %.4f), r = %.4f', result.slope, 1 / alpha, result.rvalue)
    return {'slope': float(result.slope), 'intercept': float(result.intercept), 'r_value': float(result.rvalue),
            'c_estimates': estimates}
