from itertools import combinations

import pytest
from sympy import legendre_symbol, primerange

from hnpcount.enumerator import GExtensionQ, decomposition_data, enumerate_extensions
from hnpcount.groups import FinAbGroup, Subgroup
from hnpcount.hnp import (BIQUADRATIC, biquadratic_extension, biquadratic_legendre_test, fundamental_discriminant,
                          hasse_norm_test, lemma_6_12_certificate, lemma_6_13_predicate)
from hnpcount.localdata import LocalComponent


def test_thirteen_seventeen_fails(thirteen_seventeen):
    ext, data = thirteen_seventeen
    assert ext.discriminant == 48841
    assert data.all_cyclic
    report = hasse_norm_test(ext, data)
    assert not report.hnp_holds
    assert report.sha_order == 2 and report.a_order == 1 and report.wa_holds
    assert report.to_record() == {'hnp': False, 'sha_order': '2', 'a_order': '1', 'wa': True}
    assert report.to_record(verbose=True)['sha_dual_structure'] == '2'


def test_gaussian_root_three_holds(gaussian_root_three):
    ext, data = gaussian_root_three
    assert ext.discriminant == 144
    report = hasse_norm_test(ext, data)
    assert report.hnp_holds and report.sha_order == 1
    assert report.a_order == 2 and not report.wa_holds
    assert not report.decomposition_cyclic


@pytest.mark.parametrize('a, b, fails', [
    (13, 17, True),
    (5, 13, False),
    (-3, 13, True),
    (5, -3, False),
])
def test_legendre_criterion(a, b, fails):
    assert biquadratic_legendre_test(a, b) == fails
    assert hasse_norm_test(biquadratic_extension(a, b)).hnp_holds != fails


@pytest.mark.parametrize('a, b', [(3, 5), (1, 5), (5, 5), (5, 45), (5, 65), (0, 13)])
def test_legendre_criterion_rejects_invalid_pairs(a, b):
    with pytest.raises(ValueError):
        biquadratic_legendre_test(a, b)


def test_fundamental_discriminants():
    assert [fundamental_discriminant(n) for n in (-1, 2, 3, 5, -3, -6)] == [-4, 8, 12, 5, -3, -24]
    with pytest.raises(ValueError):
        fundamental_discriminant(12)


def test_hnp_fails_exactly_when_all_decomposition_groups_are_cyclic():
    for ext in enumerate_extensions(BIQUADRATIC, 10 ** 4):
        data = decomposition_data(ext)
        report = hasse_norm_test(ext, data)
        assert report.hnp_holds != data.all_cyclic
        assert report.wa_holds != report.hnp_holds
        assert report.sha_order * report.a_order == 2


def test_certificates(thirteen_seventeen, gaussian_root_three):
    ext, data = thirteen_seventeen
    certificate = lemma_6_12_certificate(ext, data)
    assert len(certificate) == 1
    assert certificate[0] == Subgroup.whole(BIQUADRATIC)
    assert not any(d.contains(certificate[0]) for d in data.places)
    ext, data = gaussian_root_three
    assert lemma_6_12_certificate(ext, data) == []
    with pytest.raises(ValueError):
        lemma_6_13_predicate(ext, data)


def test_local_predicate_on_a_four_four_extension():
    group = FinAbGroup((4, 4))
    # 5 is 2^9 mod 13, so the Frobenius at 5 generates the second factor.
    ext = GExtensionQ(group, (LocalComponent(5, gamma=group.element((1, 0))),
                              LocalComponent(13, gamma=group.element((0, 1)))))
    data = decomposition_data(ext)
    assert data.decomposition[5].is_whole
    assert not lemma_6_13_predicate(ext, data)
    assert hasse_norm_test(ext, data).hnp_holds
    with pytest.raises(ValueError):
        lemma_6_12_certificate(ext, data)


def test_non_biquadratic_pairs_are_rejected():
    with pytest.raises(ValueError):
        biquadratic_extension(5, 5)


FOUR_FOUR_PRIMES = [p for p in primerange(5, 120) if p % 4 == 1]


def four_four_pair(p, r):
    group = FinAbGroup((4, 4))
    return GExtensionQ(group, (LocalComponent(p, gamma=group.element((1, 0))),
                               LocalComponent(r, gamma=group.element((0, 1)))))


def is_quartic_residue(a, p):
    return pow(a, (p - 1) // 4, p) == 1


@pytest.mark.parametrize('p, r', list(combinations(FOUR_FOUR_PRIMES, 2)))
def test_four_four_pairs(p, r):
    ext = four_four_pair(p, r)
    data = decomposition_data(ext)
    report = hasse_norm_test(ext, data)
    # Each decomposition group is whole exactly when the other prime is a non-residue
    assert report.hnp_holds == (legendre_symbol(p, r) == -1)
    predicate = lemma_6_13_predicate(ext, data)
    assert predicate == (is_quartic_residue(p, r) and is_quartic_residue(r, p))
    if predicate:
        assert not report.hnp_holds


def test_four_four_pairs_include_local_predicate_instances():
    instances = [(p, r) for p, r in combinations(FOUR_FOUR_PRIMES, 2)
                 if lemma_6_13_predicate(four_four_pair(p, r))]
    assert instances == [(5, 101), (13, 53), (13, 61), (73, 89), (73, 109), (97, 101), (97, 113)]
