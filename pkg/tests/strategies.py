"""Hypothesis strategies shared by the test modules."""
from hypothesis import strategies as st

from hnpcount.groups import abelian_groups

SMALL_GROUPS = [g for g in abelian_groups(32) if not g.is_trivial]

small_groups = st.sampled_from(SMALL_GROUPS)


@st.composite
def elements_of(draw, group):
    return group.element(tuple(draw(st.integers(0, n - 1)) for n in group.invariant_factors))


@st.composite
def group_with_elements(draw, count=2, groups=small_groups):
    group = draw(groups)
    return group, [draw(elements_of(group)) for _ in range(count)]
