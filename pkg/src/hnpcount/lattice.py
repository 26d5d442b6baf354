"""
The subgroup lattice as a networkx DiGraph, and the Möbius function of that poset.
"""
import logging

import networkx as nx
from sympy import isprime

from hnpcount.groups import SUBGROUP_BOUND, FinAbGroup, Subgroup, subgroups

logger = logging.getLogger(__name__)


def subgroup_lattice(group: FinAbGroup, bound: int = SUBGROUP_BOUND) -> nx.DiGraph:
    """
    Nodes are element index sets with a 'subgroup' attribute; an edge H -> K means K covers H (prime index).
    """
    lattice = nx.DiGraph()
    found = subgroups(group, bound)
    for h in found:
        lattice.add_node(h.element_indices, subgroup=h, order=h.order)
    for h in found:
        for k in found:
            index = k.order // h.order
            if k.order % h.order == 0 and isprime(index) and h.element_indices <= k.element_indices:
                lattice.add_edge(h.element_indices, k.element_indices)
    logger.debug('Subgroup lattice of %s: %d nodes, %d covering edges',
                 group, lattice.number_of_nodes(), lattice.number_of_edges())
    return lattice


def poset_mobius(lattice: nx.DiGraph, lower: Subgroup, upper: Subgroup) -> int:
    """
    μ(lower, upper) in the subgroup lattice: μ(H, H) = 1 and μ(H, K) = -Σ_{H ≤ L < K} μ(H, L).
    """
    bottom, top = lower.element_indices, upper.element_indices
    if bottom not in lattice or top not in lattice:
        raise ValueError('Invalid subgroups: not nodes of the lattice')
    if not bottom <= top:
        return 0
    interval = (nx.descendants(lattice, bottom) | {bottom}) & (nx.ancestors(lattice, top) | {top})
    values = {}
    for node in sorted(interval, key=len):
        if node == bottom:
            values[node] = 1
        else:
            values[node] = -sum(values[other] for other in values if other <= node and other != node)
    return values[top]
