import pytest

from hnpcount.groups import FinAbGroup, Subgroup, abelian_groups, mobius, subgroups
from hnpcount.lattice import poset_mobius, subgroup_lattice


def test_klein_lattice():
    group = FinAbGroup((2, 2))
    lattice = subgroup_lattice(group)
    assert lattice.number_of_nodes() == 5
    assert lattice.number_of_edges() == 6
    assert poset_mobius(lattice, Subgroup.trivial(group), Subgroup.whole(group)) == 2


def test_mobius_matches_the_lattice():
    for group in abelian_groups(24)[1:]:
        lattice = subgroup_lattice(group)
        top = Subgroup.whole(group)
        for h in subgroups(group):
            assert poset_mobius(lattice, h, top) == mobius(h.quotient)


def test_incomparable_subgroups():
    group = FinAbGroup((2, 2))
    lattice = subgroup_lattice(group)
    first, second = (Subgroup(group, (g,)) for g in group.basis())
    assert poset_mobius(lattice, first, second) == 0
    with pytest.raises(ValueError):
        poset_mobius(lattice, first, Subgroup.whole(FinAbGroup((8,))))
