from fractions import Fraction
from math import gcd

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from hnpcount.groups import (Character, FinAbGroup, Subgroup, SubgroupBoundError, abelian_groups, bicyclic_family,
                             count_homomorphisms, count_surjections, elementary_bicyclic_family, group_invariants,
                             is_excluded_form, mobius, quotient, span_order, subgroups)
from hnpcount.presets import brute_force_surjections
from tests.strategies import group_with_elements


def test_parse_and_format():
    group = FinAbGroup.parse('4, 2')
    assert group.invariant_factors == (4, 2)
    assert str(group) == '4,2'
    assert FinAbGroup.parse('').is_trivial
    assert group.order == 8 and group.exponent == 4 and group.rank == 2


@pytest.mark.parametrize('literal', ['2,4', '1', '0,0', 'x', '2,,2'])
def test_parse_rejects_invalid_literals(literal):
    with pytest.raises(ValueError):
        FinAbGroup.parse(literal)


@pytest.mark.parametrize('orders, factors', [
    ([2, 3], (6,)),
    ([4, 2, 2], (4, 2, 2)),
    ([6, 4], (12, 2)),
    ([1, 5], (5,)),
    ([], ()),
])
def test_from_cyclic_orders(orders, factors):
    assert FinAbGroup.from_cyclic_orders(orders).invariant_factors == factors


def test_from_relations():
    assert FinAbGroup.from_relations([[2, 0], [0, 4]], 2) == FinAbGroup((4, 2))
    with pytest.raises(ValueError):
        FinAbGroup.from_relations([[2, 0]], 2)


def test_element_arithmetic():
    group = FinAbGroup((4, 2))
    g = group.element((1, 1))
    assert g.order == 4
    assert (2 * g).coords == (2, 0)
    assert (g - g).is_zero
    assert (g + group.element((3, 1))).is_zero
    with pytest.raises(ValueError):
        g + FinAbGroup((4,)).element((1,))


def test_character_values():
    group = FinAbGroup((4, 2))
    chi = Character(group, (1, 1))
    assert chi(group.element((1, 1))) == Fraction(3, 4)
    assert chi.order == 4
    assert Character(group, (0, 0)).is_trivial


@given(group_with_elements(count=3))
def test_character_is_a_homomorphism(drawn):
    group, (a, g, h) = drawn
    chi = Character(group, a.coords)
    assert (chi(g + h) - chi(g) - chi(h)).denominator == 1


@given(group_with_elements(count=2))
def test_order_of_sum_divides_lcm(drawn):
    _, (g, h) = drawn
    lcm = g.order * h.order // gcd(g.order, h.order)
    assert lcm % (g + h).order == 0


@given(group_with_elements(count=2))
def test_subgroup_orders_agree(drawn):
    group, generators = drawn
    h = Subgroup(group, tuple(generators))
    assert h.order == len(h.element_indices) == h.structure.order
    assert h.order * h.quotient.order == group.order
    assert span_order(group, generators) == h.order


def test_subgroup_structure_and_quotient():
    group = FinAbGroup((4, 2))
    klein = Subgroup(group, (group.element((2, 0)), group.element((0, 1))))
    assert klein.structure == FinAbGroup((2, 2))
    assert not klein.is_cyclic
    cyclic = Subgroup(group, (group.element((1, 1)),))
    assert cyclic.structure == FinAbGroup((4,))
    assert quotient(group, cyclic) == FinAbGroup((2,))
    assert quotient(group, Subgroup(group, (group.element((2, 0)),))) == FinAbGroup((2, 2))
    assert Subgroup(group, (2 * group.element((1, 1)),)) == Subgroup(group, (group.element((2, 0)),))
    assert klein.contains(Subgroup(group, (group.element((2, 1)),)))


@pytest.mark.parametrize('factors, expected', [
    ((2, 2), 5),
    ((4, 2), 8),
    ((2, 2, 2), 16),
    ((6,), 4),
    ((3, 3), 6),
    ((4, 4), 15),
    ((6, 2), 10),
])
def test_subgroup_counts(factors, expected):
    found = subgroups(FinAbGroup(factors))
    assert len(found) == expected
    assert len({h.element_indices for h in found}) == expected
    assert found[0].order == 1


def test_subgroup_bound():
    with pytest.raises(SubgroupBoundError):
        subgroups(FinAbGroup((4, 2)), bound=4)


@pytest.mark.parametrize('factors, expected', [
    ((2,), -1),
    ((2, 2), 2),
    ((4,), 0),
    ((6,), 1),
    ((2, 2, 2), -8),
    ((3, 3), 3),
    ((), 1),
])
def test_mobius(factors, expected):
    assert mobius(FinAbGroup(factors)) == expected


def test_count_surjections_small_cases():
    assert count_surjections(FinAbGroup((2, 2)), FinAbGroup((2, 2))) == 6
    assert count_surjections(FinAbGroup((4,)), FinAbGroup((2,))) == 1
    assert count_surjections(FinAbGroup((2,)), FinAbGroup((2, 2))) == 0
    assert count_surjections(FinAbGroup((6,)), FinAbGroup((6,))) == 2
    assert count_homomorphisms(FinAbGroup((4, 2)), FinAbGroup((2, 2))) == 16


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([g for g in abelian_groups(16) if not g.is_trivial]),
       st.sampled_from([g for g in abelian_groups(16) if not g.is_trivial]))
def test_count_surjections_matches_brute_force(source, target):
    assume(count_homomorphisms(source, target) <= 256)
    assert count_surjections(source, target) == brute_force_surjections(source, target)


def test_abelian_groups():
    found = abelian_groups(8)
    assert [g.invariant_factors for g in found] == [
        (), (2,), (3,), (2, 2), (4,), (5,), (6,), (7,), (2, 2, 2), (4, 2), (8,)]


@pytest.mark.parametrize('factors, invariants', [
    ((2,), (2, 1, 1, 1, 1)),
    ((2, 2), (2, 3, 2, 2, 3)),
    ((3, 3), (3, 8, 6, 2, 4)),
    ((4, 4), (2, 3, 8, 2, 3)),
    ((6, 3), (2, 1, 9, 1, 1)),
])
def test_group_invariants(factors, invariants):
    found = group_invariants(FinAbGroup(factors))
    assert (found.Q, found.phi_Q, found.alpha, found.beta, found.nu_over_Q) == invariants


def test_group_invariants_reject_trivial_group():
    with pytest.raises(ValueError):
        group_invariants(FinAbGroup(()))


@pytest.mark.parametrize('factors, excluded', [
    ((2,), True),
    ((2, 2), True),
    ((4, 2), True),
    ((6, 2), True),
    ((3, 3), True),
    ((9, 3), True),
    ((4, 4), False),
    ((6, 3), False),
    ((8, 4, 2), False),
])
def test_is_excluded_form(factors, excluded):
    assert is_excluded_form(FinAbGroup(factors)) == excluded


def test_bicyclic_families():
    group = FinAbGroup((2, 2, 2))
    family = elementary_bicyclic_family(group)
    assert len(family) == 3
    assert all(member.structure == FinAbGroup((2, 2)) for member in family)
    assert len(bicyclic_family(FinAbGroup((4, 4, 2)))) == 3
    with pytest.raises(ValueError):
        elementary_bicyclic_family(FinAbGroup((4, 2)))
    with pytest.raises(ValueError):
        bicyclic_family(FinAbGroup((6,)))
