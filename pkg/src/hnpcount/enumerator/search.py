"""
Enumeration of G-extensions of ℚ of bounded discriminant by depth-first search over local components.
"""
import logging
from bisect import bisect_left, bisect_right
from concurrent.futures import ProcessPoolExecutor
from math import gcd, lcm

from sympy import integer_nthroot, primerange

from hnpcount.conditions import LocalConditionSet, matches_condition
from hnpcount.enumerator.extension import GExtensionQ, local_groups_at
from hnpcount.groups import (SUBGROUP_BOUND, FinAbGroup, GroupElement, closure_indices, group_invariants, mobius,
                             subgroups, _sum_of_index_sets)
from hnpcount.localdata import LocalComponent, enumerate_local_components, local_disc_exponent, trivial_component

logger = logging.getLogger(__name__)


class ExtensionSearch:
    """
    Depth-first search over tuples (φ_p)_p of local components with Π p^{w_p} ≤ B.

    Primes are visited in increasing order. A prime is a candidate only if p^α ≤ B, since every nontrivial
    component has w_p ≥ α(G). Images are tracked as element index sets so that surjectivity and the
    partial-image bound are dictionary lookups.
    """
    defaults = {'threads': 1, 'require_surjective': True, 'subgroup_bound': SUBGROUP_BOUND}

    def __init__(self, group: FinAbGroup, bound: int, conditions: LocalConditionSet = None, **kwargs):
        """
        :param group: non-trivial target group.
        :param bound: discriminant bound B ≥ 1.
        :param conditions: local conditions; all tuples are admitted if None.
        :param threads: worker processes for the top-level branches.
        :param require_surjective: if False, count every character, not only surjective ones.
        """
        if group.is_trivial:
            raise ValueError('Invalid group: G must be non-trivial')
        if not isinstance(bound, int) or bound < 1:
            raise ValueError(f'Invalid bound: {bound}')
        options = {**self.defaults, **kwargs}
        assert isinstance(options['threads'], int) and options['threads'] > 0
        if group.order > options['subgroup_bound']:
            raise ValueError(f'Invalid group: |G| = {group.order} exceeds {options["subgroup_bound"]}')
        self.group = group
        self.bound = bound
        self.conditions = conditions if conditions is not None else LocalConditionSet()
        self.threads = options['threads']
        self.require_surjective = options['require_surjective']
        self.alpha = group_invariants(group).alpha

        self._members = []
        self._ids = {}
        self._joins = {}
        self._torsion = {}
        self.trivial_id = self._intern(frozenset([0]))
        self.full_id = self._intern(frozenset(range(group.order)))

        self._setup_candidates()

    # Subgroups as interned element index sets
    def _intern(self, members: frozenset) -> int:
        index = self._ids.get(members)
        if index is None:
            index = len(self._members)
            self._ids[members] = index
            self._members.append(members)
        return index

    def _join(self, a: int, b: int) -> int:
        if a == b or b == self.trivial_id:
            return a
        if a == self.trivial_id:
            return b
        key = (a, b) if a < b else (b, a)
        joined = self._joins.get(key)
        if joined is None:
            joined = self._intern(_sum_of_index_sets(self.group, self._members[a], self._members[b]))
            self._joins[key] = joined
        return joined

    def _torsion_id(self, m: int) -> int:
        index = self._torsion.get(m)
        if index is None:
            generators = [tuple((n // gcd(n, m)) * int(k == j) for k in range(self.group.rank))
                          for j, n in enumerate(self.group.invariant_factors)]
            index = self._intern(closure_indices(self.group, generators))
            self._torsion[m] = index
        return index

    def _option(self, component: LocalComponent) -> tuple:
        key = tuple(c for g in component.images for c in g.coords)
        members = closure_indices(self.group, [g.coords for g in component.images if not g.is_zero])
        reach = 1
        for g in component.images:
            reach = lcm(reach, g.order)
        return local_disc_exponent(self.group, component), key, self._intern(members), reach

    def _options_at(self, p: int) -> list:
        found = [self._option(c) for c in enumerate_local_components(self.group, p)
                 if not c.is_trivial and self.conditions.admits_component(c)]
        return sorted(found, key=lambda option: (option[0], option[1]))

    def _setup_candidates(self):
        limit = integer_nthroot(self.bound, self.alpha)[0]
        shared = {}
        self.candidates = []
        forced = []
        for p in self.conditions.rules:
            rule = self.conditions.rule_at(p)
            if rule.prunable and not rule.admits_component(trivial_component(self.group, p)):
                forced.append(p)
        for p in primerange(2, limit + 1):
            if p in self.conditions.rules or self.group.order % p == 0:
                options = self._options_at(p)
            else:
                d = gcd(p - 1, self.group.exponent)
                if d == 1:
                    continue
                # Tame components at p depend only on gcd(p - 1, exp G).
                if d not in shared:
                    shared[d] = self._options_at(p)
                options = shared[d]
            if options:
                self.candidates.append((p, options))

        self.primes = [p for p, _ in self.candidates]
        self._thresholds = [p ** self.alpha for p in self.primes]
        self._reach_classes = {}
        for index, (_, options) in enumerate(self.candidates):
            reach = 1
            for option in options:
                reach = lcm(reach, option[3])
            self._reach_classes.setdefault(reach, []).append(index)

        self.impossible = any(p not in self.primes for p in forced)
        forced_indices = sorted(self.primes.index(p) for p in forced if p in self.primes)
        self._next_forced = []
        k = 0
        for index in range(len(self.candidates) + 1):
            while k < len(forced_indices) and forced_indices[k] < index:
                k += 1
            self._next_forced.append(forced_indices[k] if k < len(forced_indices) else len(self.candidates))
        logger.info('Search over %s with B = %d: alpha = %d, %d candidate primes up to %d',
                    self.group, self.bound, self.alpha, len(self.candidates), limit)

    def _can_reach(self, image: int, start: int, end: int) -> bool:
        """Whether the image joined with everything the primes in [start, end) could add is all of G."""
        exponent = 1
        for reach, indices in self._reach_classes.items():
            k = bisect_left(indices, start)
            if k < len(indices) and indices[k] < end:
                exponent = lcm(exponent, reach)
        return self._join(image, self._torsion_id(exponent)) == self.full_id

    def _search(self, start: int, disc: int, image: int, choices: tuple, visit):
        pending = self._next_forced[start]
        if pending == len(self.candidates) and (image == self.full_id or not self.require_surjective):
            visit(disc, choices)
        affordable = bisect_right(self._thresholds, self.bound // disc)
        end = min(affordable, pending + 1)
        if start >= end:
            return
        if self.require_surjective and image != self.full_id and not self._can_reach(image, start, affordable):
            return
        for index in range(start, end):
            self._branch(index, disc, image, choices, visit)

    def _branch(self, index: int, disc: int, image: int, choices: tuple, visit):
        p, options = self.candidates[index]
        remaining = self.bound // disc
        for k, (w, _, inertia, _) in enumerate(options):
            factor = p ** w
            if factor > remaining:
                break
            self._search(index + 1, disc * factor, self._join(image, inertia), choices + ((index, k),), visit)

    def _top_level(self):
        """Root visit plus the indices of the top-level branches worth exploring."""
        if self.impossible:
            return [], []
        roots = []
        if self._next_forced[0] == len(self.candidates) and not self.require_surjective:
            # The trivial character.
            roots.append((1, ()))
        affordable = bisect_right(self._thresholds, self.bound)
        end = min(affordable, self._next_forced[0] + 1)
        if self.require_surjective and not self._can_reach(self.trivial_id, 0, affordable):
            return roots, []
        return roots, list(range(end))

    def run_branches(self, indices, count_only: bool):
        leaves = _Leaves(count_only)
        for index in indices:
            self._branch(index, 1, self.trivial_id, (), leaves)
        return leaves.result()

    def leaves(self, count_only: bool = False):
        """All accepted tuples as (disc, choices), or their number."""
        roots, indices = self._top_level()
        if self.threads > 1 and len(indices) > 1:
            partitions = [indices[k::self.threads] for k in range(self.threads)]
            with ProcessPoolExecutor(max_workers=self.threads) as executor:
                results = list(executor.map(_run_partition, [self] * len(partitions), partitions,
                                            [count_only] * len(partitions)))
        else:
            results = [self.run_branches(indices, count_only)]
        if count_only:
            total = len(roots) + sum(results)
            logger.debug('Counted %d tuples over %d top-level branches', total, len(indices))
            return total
        found = roots + [leaf for part in results for leaf in part]
        logger.debug('Collected %d tuples over %d top-level branches; %d subgroups interned',
                     len(found), len(indices), len(self._members))
        return found

    def _leaf_key(self, leaf) -> tuple:
        disc, choices = leaf
        return disc, tuple((self.primes[i],) + self.candidates[i][1][k][1] for i, k in choices)

    def _component(self, index: int, k: int) -> LocalComponent:
        p, options = self.candidates[index]
        key = options[k][1]
        if p == 2:
            rank = self.group.rank
            return LocalComponent(2, eps=GroupElement(self.group, key[:rank]), w=GroupElement(self.group, key[rank:]))
        return LocalComponent(p, gamma=GroupElement(self.group, key))

    def materialize(self, leaf) -> GExtensionQ:
        _, choices = leaf
        return GExtensionQ(self.group, tuple(self._component(i, k) for i, k in choices))

    def _passes_predicates(self, ext: GExtensionQ) -> bool:
        for p in self.conditions.predicate_primes:
            inertia, decomposition = local_groups_at(ext, p)
            component = ext.component_map.get(p, trivial_component(self.group, p))
            if not matches_condition(self.conditions.rule_at(p), inertia, decomposition, component):
                return False
        return True

    def extensions(self):
        """Stream of GExtensionQ in ascending discriminant, then component order."""
        found = sorted(self.leaves(), key=self._leaf_key)
        for leaf in found:
            ext = self.materialize(leaf)
            if self._passes_predicates(ext):
                yield ext

    def count(self) -> int:
        if self.conditions.predicate_primes:
            return sum(1 for _ in self.extensions())
        return self.leaves(count_only=True)


class _Leaves:
    def __init__(self, count_only: bool):
        self.count_only = count_only
        self.total = 0
        self.found = []

    def __call__(self, disc, choices):
        if self.count_only:
            self.total += 1
        else:
            self.found.append((disc, choices))

    def result(self):
        return self.total if self.count_only else self.found


def _run_partition(search: ExtensionSearch, indices: list, count_only: bool):
    return search.run_branches(indices, count_only)


def enumerate_extensions(group: FinAbGroup, bound: int, conditions: LocalConditionSet = None, **kwargs):
    """
    Stream all G-extensions with discriminant ≤ ``bound`` satisfying ``conditions``.

    :param group: non-trivial target group.
    :param bound: discriminant bound.
    :param conditions: local conditions (default: none).
    :param kwargs: search options, see ExtensionSearch.defaults.
    :return: generator of GExtensionQ, ascending discriminant then lexicographic components.
    """
    return ExtensionSearch(group, bound, conditions, **kwargs).extensions()


def count(group: FinAbGroup, bound: int, conditions: LocalConditionSet = None, **kwargs) -> int:
    """N(ℚ, G, Λ, B)."""
    return ExtensionSearch(group, bound, conditions, **kwargs).count()


def count_characters(group: FinAbGroup, bound: int, **kwargs) -> int:
    """#{χ ∈ Hom(Ẑ^*, H) : Φ_H(χ) ≤ X}, surjective or not."""
    if bound < 1:
        return 0
    if group.is_trivial:
        return 1
    return ExtensionSearch(group, bound, require_surjective=False, **kwargs).count()


def _scaled_bound(bound: int, numerator: int, denominator: int) -> int:
    """⌊bound^{numerator/denominator}⌋ in exact integer arithmetic."""
    return int(integer_nthroot(bound ** numerator, denominator)[0])


def delsarte_count(group: FinAbGroup, bound: int, **kwargs) -> int:
    """
    N(ℚ, G, B) by Möbius inversion over subgroups: Σ_{H ⊆ G} μ(G/H)·#{χ : Φ_H(χ) ≤ B^{|H|/|G|}}.
    """
    total = 0
    for h in subgroups(group, kwargs.get('subgroup_bound', SUBGROUP_BOUND)):
        mu = mobius(h.quotient)
        if mu:
            total += mu * count_characters(h.structure, _scaled_bound(bound, h.order, group.order), **kwargs)
    return total


def conductor_series_identity(group: FinAbGroup, bound: int, **kwargs) -> tuple:
    """
    Both sides of #{χ : Φ_H(χ) ≤ X} = Σ_{J ⊆ H} N(ℚ, J, X^{|J|/|H|}), the trivial J contributing 1.

    :return: (left, right).
    """
    left = count_characters(group, bound, **kwargs)
    right = 0
    for j in subgroups(group, kwargs.get('subgroup_bound', SUBGROUP_BOUND)):
        scaled = _scaled_bound(bound, j.order, group.order)
        if j.order == 1:
            right += 1 if scaled >= 1 else 0
        elif scaled >= 1:
            right += count(j.structure, scaled, **kwargs)
    return left, right


def find_extension(group: FinAbGroup, predicate, start_bound: int = 100, max_bound: int = 10 ** 8, **kwargs):
    """
    The first extension (in enumeration order at the smallest sufficient doubled bound) satisfying ``predicate``.

    :return: GExtensionQ, or None if nothing up to ``max_bound`` qualifies.
    """
    bound = start_bound
    while True:
        bound = min(bound, max_bound)
        for ext in enumerate_extensions(group, bound, **kwargs):
            if predicate(ext):
                logger.info('Found %s at bound %d', ext, bound)
                return ext
        if bound >= max_bound:
            return None
        bound *= 2
