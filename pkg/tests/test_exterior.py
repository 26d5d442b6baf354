from math import prod

import pytest
from hypothesis import given

from hnpcount.exterior import (exterior_order_from_tensor, exterior_square, index_in_ambient, span_sum,
                               subgroup_wedge_image, wedge)
from hnpcount.groups import FinAbGroup, Subgroup, abelian_groups, is_excluded_form
from tests.strategies import group_with_elements


@pytest.mark.parametrize('factors, order, exponent', [
    ((2,), 1, 1),
    ((2, 2), 2, 2),
    ((4, 2), 2, 2),
    ((2, 2, 2), 8, 2),
    ((4, 4), 4, 4),
    ((6, 3), 3, 3),
    ((8, 4, 2), 16, 4),
])
def test_exterior_square_order(factors, order, exponent):
    square = exterior_square(FinAbGroup(factors))
    assert square.order == order
    assert square.exponent == exponent


def test_exterior_order_matches_tensor_presentation():
    for group in abelian_groups(64):
        factors = group.invariant_factors
        expected = prod(factors[j] for i in range(len(factors)) for j in range(i + 1, len(factors)))
        assert exterior_square(group).order == expected
        assert exterior_order_from_tensor(group) == expected


def test_excluded_form_iff_exponent_divides_q():
    for group in abelian_groups(128)[1:]:
        assert is_excluded_form(group) == (group.smallest_prime % exterior_square(group).exponent == 0)


@given(group_with_elements(count=3))
def test_wedge_is_alternating_and_bilinear(drawn):
    _, (x, y, z) = drawn
    assert wedge(x, x).is_zero
    assert wedge(x, y) == -wedge(y, x)
    assert wedge(x + y, z) == wedge(x, z) + wedge(y, z)


def test_wedge_of_basis_vectors():
    group = FinAbGroup((4, 2))
    e1, e2 = group.basis()
    assert wedge(e1, e2).coords == (1,)
    assert wedge(2 * e1, e2).is_zero


def test_cyclic_subgroups_have_trivial_image():
    group = FinAbGroup((4, 4))
    assert subgroup_wedge_image(Subgroup(group, (group.element((1, 3)),))).is_trivial


def test_noncyclic_subgroup_can_have_trivial_image():
    group = FinAbGroup((4, 4))
    doubled = Subgroup(group, (group.element((2, 0)), group.element((0, 2))))
    assert not doubled.is_cyclic
    assert subgroup_wedge_image(doubled).is_trivial
    whole = subgroup_wedge_image(Subgroup.whole(group))
    assert whole.order == 4


def test_span_and_index():
    group = FinAbGroup((2, 2, 2))
    e1, e2, e3 = group.basis()
    parts = [subgroup_wedge_image(Subgroup(group, (e1, e2))), subgroup_wedge_image(Subgroup(group, (e3,)))]
    span = span_sum(parts)
    assert span.order == 2
    assert index_in_ambient(span) == 4
    assert span.quotient_structure == FinAbGroup((2, 2))
    assert wedge(e1, e2) in span
    assert wedge(e1, e3) not in span
    with pytest.raises(ValueError):
        span_sum([])
