from math import prod

import pytest
from sympy import factorint

from hnpcount.analytic import asymptotic_fit
from hnpcount.conditions import LocalConditionSet
from hnpcount.enumerator import (ExtensionSearch, GExtensionQ, conductor_bound, conductor_series_identity, count,
                                 count_characters, decomposition_data, delsarte_count, enumerate_by_modulus,
                                 enumerate_extensions, find_extension, frobenius_at)
from hnpcount.groups import FinAbGroup
from hnpcount.localdata import LocalComponent

QUADRATIC = FinAbGroup((2,))
KLEIN = FinAbGroup((2, 2))
SMALL = [FinAbGroup(f) for f in ((2,), (3,), (2, 2), (4,), (6,))]


def test_quadratic_fields_up_to_ten():
    found = list(enumerate_extensions(QUADRATIC, 10))
    assert [ext.discriminant for ext in found] == [3, 4, 5, 7, 8, 8]
    assert [ext.components[0].to_record() for ext in found[-2:]] == [{'p': 2, 'eps': [0], 'w': [1]},
                                                                     {'p': 2, 'eps': [1], 'w': [1]}]
    assert count(QUADRATIC, 10) == 6


def test_smallest_biquadratic_field():
    assert count(KLEIN, 143) == 0
    found = list(enumerate_extensions(KLEIN, 144))
    assert len(found) == 6
    assert all(ext.discriminant == 144 and ext.primes == [2, 3] for ext in found)
    assert found == sorted(found, key=lambda ext: ext.sort_key)


def test_non_surjective_characters_are_counted_on_request():
    assert count_characters(QUADRATIC, 10) == 7
    assert count(QUADRATIC, 10, require_surjective=False) == 7
    assert count_characters(QUADRATIC, 0) == 0


@pytest.mark.parametrize('group', SMALL, ids=str)
def test_enumeration_is_sorted_and_counted(group):
    found = list(enumerate_extensions(group, 3000))
    assert len(found) == count(group, 3000)
    assert all(ext.surjective and ext.discriminant <= 3000 for ext in found)
    keys = [ext.sort_key for ext in found]
    assert keys == sorted(keys)
    assert len(set(keys)) == len(keys)


@pytest.mark.parametrize('group', SMALL, ids=str)
def test_delsarte_inversion(group):
    assert delsarte_count(group, 2000) == count(group, 2000)


@pytest.mark.parametrize('group', SMALL, ids=str)
def test_conductor_series(group):
    left, right = conductor_series_identity(group, 2000)
    assert left == right


@pytest.mark.parametrize('group', SMALL + [FinAbGroup((4, 2))], ids=str)
def test_modulus_backend_agrees(group):
    bound = 2000
    assert enumerate_by_modulus(group, bound, conductor_bound(group, bound)) == list(enumerate_extensions(group, bound))


@pytest.mark.slow
@pytest.mark.parametrize('group', [KLEIN, FinAbGroup((4, 2)), FinAbGroup((3, 3))], ids=str)
def test_modulus_backend_agrees_at_larger_bounds(group):
    bound = 10 ** 5
    assert enumerate_by_modulus(group, bound, conductor_bound(group, bound)) == list(enumerate_extensions(group, bound))


@pytest.mark.slow
def test_worker_processes_give_the_same_stream():
    assert list(enumerate_extensions(KLEIN, 10 ** 5, threads=2)) == list(enumerate_extensions(KLEIN, 10 ** 5))
    assert count(QUADRATIC, 10 ** 4, threads=3) == count(QUADRATIC, 10 ** 4)


def test_invalid_search_arguments():
    with pytest.raises(ValueError):
        ExtensionSearch(FinAbGroup(()), 100)
    with pytest.raises(ValueError):
        ExtensionSearch(QUADRATIC, 0)


def test_extension_records():
    ext = list(enumerate_extensions(KLEIN, 144))[0]
    record = ext.to_record()
    assert record['disc'] == '144' and record['surjective'] is True
    assert GExtensionQ.from_record(record, KLEIN) == ext
    with pytest.raises(ValueError, match='disc'):
        GExtensionQ.from_record(dict(record, disc='145'), KLEIN)
    with pytest.raises(ValueError, match='not surjective'):
        GExtensionQ.from_record({'components': [{'p': 5, 'gamma': [1, 0]}]}, KLEIN)
    with pytest.raises(ValueError, match='not surjective'):
        GExtensionQ.from_record({'components': []}, KLEIN)
    partial = GExtensionQ.from_record({'components': [{'p': 5, 'gamma': [1, 0]}]}, KLEIN, require_surjective=False)
    assert partial.discriminant == 25


def test_duplicate_primes_are_rejected():
    component = LocalComponent(5, gamma=KLEIN.element((1, 0)))
    with pytest.raises(ValueError):
        GExtensionQ(KLEIN, (component, LocalComponent(5, gamma=KLEIN.element((0, 1)))))
    assert GExtensionQ(KLEIN, (component, LocalComponent(7, gamma=KLEIN.zero))).primes == [5]


def test_frobenius_and_decomposition(gaussian_root_three):
    ext, data = gaussian_root_three
    assert frobenius_at(ext, 2) == KLEIN.element((0, 1))
    assert data.decomposition[2].is_whole
    assert data.decomposition[3].is_whole
    assert data.archimedean.order == 2
    assert not data.all_cyclic
    assert not ext.is_totally_real


def test_decomposition_data_requires_surjectivity():
    ext = GExtensionQ(KLEIN, (LocalComponent(5, gamma=KLEIN.element((1, 0))),))
    with pytest.raises(ValueError):
        decomposition_data(ext)


def test_find_extension():
    ext = find_extension(QUADRATIC, lambda e: e.discriminant % 5 == 0, start_bound=2)
    assert ext.discriminant == 5
    assert find_extension(QUADRATIC, lambda e: False, start_bound=2, max_bound=50) is None


def fundamental_discriminants(bound):
    """Discriminants of quadratic fields with absolute value at most ``bound``, from squarefree radicands."""
    found = []
    for n in range(-bound, bound + 1):
        if n in (0, 1) or any(e > 1 for e in factorint(abs(n)).values()):
            continue
        d = n if n % 4 == 1 else 4 * n
        if abs(d) <= bound:
            found.append(d)
    return sorted(found)


def squarefree_part(n):
    return (1 if n > 0 else -1) * prod(p for p, e in factorint(abs(n)).items() if e % 2)


@pytest.mark.parametrize('bound', [10, 10 ** 3, 10 ** 4])
def test_quadratic_count_matches_fundamental_discriminants(bound):
    assert count(QUADRATIC, bound) == len(fundamental_discriminants(bound))


def test_biquadratic_count_matches_triple_products():
    bound = 2 * 10 ** 4
    discriminants = sorted(fundamental_discriminants(bound // 3), key=abs)
    fields = set()
    for i, d1 in enumerate(discriminants):
        for d2 in discriminants[i + 1:]:
            if abs(d1 * d2) > bound // 3:
                break
            d3 = squarefree_part(d1 * d2)
            d3 = d3 if d3 % 4 == 1 else 4 * d3
            if abs(d1 * d2 * d3) <= bound:
                fields.add(frozenset((d1, d2, d3)))
    assert count(KLEIN, bound) == 6 * len(fields)


def test_unramified_condition_keeps_a_proper_fraction():
    conditions = LocalConditionSet.from_records([{'p': 3, 'rule': 'unramified'}], KLEIN)
    restricted = count(KLEIN, 10 ** 4, conditions)
    assert 0 < restricted < count(KLEIN, 10 ** 4)


@pytest.mark.slow
def test_quadratic_exponent_fit():
    counts = [(b, count(QUADRATIC, b)) for b in (10 ** 4, 10 ** 5, 10 ** 6)]
    assert 0.95 <= asymptotic_fit(counts, alpha=1, nu=1)['slope'] <= 1.05
