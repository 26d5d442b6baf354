"""
Local conditions Λ = (Λ_p)_p on G-extensions: a default rule for almost all primes plus explicit rules at
finitely many primes. Rules that only look at the unit part prune the search; predicates on the full local
data (inertia and decomposition groups) are checked on finished extensions.
"""
import json
import logging
from abc import ABC
from dataclasses import dataclass, field

from sympy import isprime

from hnpcount.groups import FinAbGroup, GroupElement, Subgroup
from hnpcount.localdata import LocalComponent

logger = logging.getLogger(__name__)


# Predicates on (inertia, decomposition)
def cyclic_decomposition(inertia: Subgroup, decomposition: Subgroup) -> bool:
    return decomposition.is_cyclic


def inertia_divides_q_or_cyclic(inertia: Subgroup, decomposition: Subgroup) -> bool:
    q = inertia.ambient.smallest_prime
    return q % inertia.order == 0 or decomposition.is_cyclic


def create_decomposition_avoids(subgroup: Subgroup):
    def decomposition_avoids(inertia, decomposition):
        return decomposition != subgroup

    return decomposition_avoids


def create_decomposition_equals(subgroup: Subgroup):
    def decomposition_equals(inertia, decomposition):
        return decomposition == subgroup

    return decomposition_equals


def create_predicate(name: str, group: FinAbGroup, params: dict):
    """
    Build a named predicate on (inertia, decomposition).

    :param name: one of cyclic_decomposition, inertia_divides_q_or_cyclic, decomposition_avoids,
        decomposition_equals.
    :param group: the ambient group.
    :param params: extra parameters; the subgroup predicates need "subgroup", a list of generator coordinates.
    """
    if name == 'cyclic_decomposition':
        return cyclic_decomposition
    elif name == 'inertia_divides_q_or_cyclic':
        return inertia_divides_q_or_cyclic
    elif name in ('decomposition_avoids', 'decomposition_equals'):
        assert 'subgroup' in params, f"'subgroup' is required for {name}."
        subgroup = Subgroup(group, tuple(GroupElement(group, tuple(c)) for c in params['subgroup']))
        if name == 'decomposition_avoids':
            return create_decomposition_avoids(subgroup)
        return create_decomposition_equals(subgroup)
    else:
        raise ValueError(f'Invalid predicate: {name}')


class Rule(ABC):
    """
    Base class for a local rule. ``prunable`` rules depend only on the component (the unit part) and are
    applied while searching.
    """
    kind = None
    prunable = True

    def __init__(self, **kwargs):
        self.options = kwargs

    def admits_component(self, component: LocalComponent) -> bool:
        """Whether the unit part alone can satisfy the rule."""
        return True

    def matches(self, inertia: Subgroup, decomposition: Subgroup, component: LocalComponent) -> bool:
        return self.admits_component(component)

    def to_record(self) -> dict:
        return {'rule': self.kind}

    def __repr__(self):
        return f'{type(self).__name__}({self.to_record()})'


class AnyRule(Rule):
    kind = 'any'


class UnramifiedRule(Rule):
    kind = 'unramified'

    def admits_component(self, component):
        return component.is_trivial


class InertiaDividesQRule(Rule):
    """The inertia group has order dividing Q, the smallest prime of |G|."""
    kind = 'inertia_divides_q'

    def admits_component(self, component):
        return component.group.smallest_prime % component.inertia.order == 0


class AllowedComponentsRule(Rule):
    kind = 'allowed'

    def __init__(self, **kwargs):
        super().__init__(**kwargs)
        assert 'components' in kwargs, "'components' is required for AllowedComponentsRule."
        self.components = frozenset(kwargs['components'])

    def admits_component(self, component):
        return component in self.components

    def to_record(self):
        return {'rule': self.kind,
                'components': [c.to_record() for c in sorted(self.components, key=lambda c: c.sort_key)]}


class PredicateRule(Rule):
    """A named predicate on the full local data; needs the Frobenius, so it is checked on finished extensions."""
    kind = 'predicate'
    prunable = False

    def __init__(self, **kwargs):
        super().__init__(**kwargs)
        assert 'name' in kwargs, "'name' is required for PredicateRule."
        assert 'group' in kwargs, "'group' is required for PredicateRule."
        self.name = kwargs['name']
        self.group = kwargs['group']
        self.params = kwargs.get('params', {})
        self._predicate = None
        # Fail early on unknown names
        create_predicate(self.name, self.group, self.params)

    @property
    def predicate(self):
        if self._predicate is None:
            self._predicate = create_predicate(self.name, self.group, self.params)
        return self._predicate

    def __getstate__(self):
        # Closures do not pickle; rebuild in worker processes.
        state = self.__dict__.copy()
        state['_predicate'] = None
        return state

    def matches(self, inertia, decomposition, component):
        return self.predicate(inertia, decomposition)

    def to_record(self):
        record = {'rule': self.kind, 'name': self.name}
        record.update(self.params)
        return record


DEFAULT_RULES = (AnyRule, UnramifiedRule, InertiaDividesQRule)


def rule_from_record(record: dict, group: FinAbGroup) -> Rule:
    kind = record.get('rule')
    if kind == 'any':
        return AnyRule()
    elif kind == 'unramified':
        return UnramifiedRule()
    elif kind == 'inertia_divides_q':
        return InertiaDividesQRule()
    elif kind == 'allowed':
        if not isinstance(record.get('components'), list):
            raise ValueError(f'Invalid allowed rule: {record}')
        return AllowedComponentsRule(components=[LocalComponent.from_record(c, group) for c in record['components']])
    elif kind == 'predicate':
        if 'name' not in record:
            raise ValueError(f'Invalid predicate rule: {record}')
        params = {k: v for k, v in record.items() if k not in ('rule', 'name', 'p', 'default')}
        return PredicateRule(name=record['name'], group=group, params=params)
    else:
        raise ValueError(f'Invalid rule: {kind}')


def matches_condition(rule: Rule, inertia: Subgroup, decomposition: Subgroup, phi_p: LocalComponent) -> bool:
    return rule.matches(inertia, decomposition, phi_p)


@dataclass(frozen=True)
class LocalConditionSet:
    """A default rule for all primes outside ``rules`` plus at most one rule per listed prime."""
    default: Rule = field(default_factory=AnyRule)
    rules: dict = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.default, DEFAULT_RULES):
            raise ValueError(f'Invalid default rule: {self.default!r}')
        for p in self.rules:
            if not isprime(p):
                raise ValueError(f'Invalid prime in conditions: {p}')

    def rule_at(self, p: int) -> Rule:
        return self.rules.get(p, self.default)

    @property
    def is_trivial(self) -> bool:
        return isinstance(self.default, AnyRule) and all(isinstance(r, AnyRule) for r in self.rules.values())

    @property
    def predicate_primes(self) -> list:
        return sorted(p for p, rule in self.rules.items() if not rule.prunable)

    def admits_component(self, component: LocalComponent) -> bool:
        rule = self.rule_at(component.p)
        return not rule.prunable or rule.admits_component(component)

    def to_records(self) -> list:
        records = [dict(self.default.to_record(), default=True)]
        for p in sorted(self.rules):
            records.append(dict(self.rules[p].to_record(), p=p))
        return records

    @classmethod
    def from_records(cls, records: list, group: FinAbGroup):
        """
        Decode a JSON list of {"p": int, "rule": str, ...} entries plus at most one {"default": true, "rule": ...}.
        """
        if not isinstance(records, list):
            raise ValueError('Invalid conditions: expected a JSON list')
        default = AnyRule()
        rules = {}
        seen_default = False
        for record in records:
            if not isinstance(record, dict):
                raise ValueError(f'Invalid condition entry: {record}')
            if record.get('default'):
                if seen_default:
                    raise ValueError('Invalid conditions: more than one default entry')
                seen_default = True
                default = rule_from_record(record, group)
                continue
            p = record.get('p')
            if not isinstance(p, int) or not isprime(p):
                raise ValueError(f'Invalid condition prime: {p}')
            if p in rules:
                raise ValueError(f'Invalid conditions: more than one rule at {p}')
            rules[p] = rule_from_record(record, group)
        return cls(default=default, rules=rules)

    @classmethod
    def load(cls, path, group: FinAbGroup):
        with open(path, encoding='utf-8') as f:
            try:
                records = json.load(f)
            except json.JSONDecodeError as e:
                raise ValueError(f'Invalid conditions file {path}: {e}') from None
        conditions = cls.from_records(records, group)
        logger.info('Loaded conditions from %s: default %s, %d explicit primes',
                    path, conditions.default.kind, len(conditions.rules))
        return conditions
