"""
Experiment presets. Each preset runs a desk-scale version of one counting, existence or identity experiment,
writes its tables to an output directory and records named checks; a preset fails when any check fails.
"""
import json
import logging
import os
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import gcd, prod

import pandas as pd
from sympy import factorint, primerange

from hnpcount.analytic import (IDENTITY_TOLERANCE, LEADING_TOLERANCE, VANISHING_TOLERANCE, PairingElement,
                               constant_one, inertia_divides_q_indicator, lemma_3_3_closed_form, lemma_4_8_values,
                               leading_coefficients, local_image_count, local_transform, unramified_indicator)
from hnpcount.enumerator.extension import frobenius_at
from hnpcount.enumerator.modulus import conductor_bound, enumerate_by_modulus
from hnpcount.enumerator.search import (conductor_series_identity, count, delsarte_count, enumerate_extensions,
                                        find_extension)
from hnpcount.exterior import exterior_order_from_tensor, exterior_square
from hnpcount.groups import (Character, FinAbGroup, Subgroup, abelian_groups, closure_indices, count_homomorphisms,
                             count_surjections, group_invariants, is_excluded_form, mobius, subgroups)
from hnpcount.hnp import BIQUADRATIC, biquadratic_extension, biquadratic_legendre_test, hasse_norm_test
from hnpcount.lattice import poset_mobius, subgroup_lattice
from hnpcount.localdata import phi_G_local, unit_generator
from hnpcount.survey import rows_to_table, survey_rows

logger = logging.getLogger(__name__)

ANALYTIC_S_GRID = (0.3, 0.5 + 1j, 1.0, 2 - 0.7j)
# Brute-force surjection counts are only attempted below this many homomorphisms
BRUTE_FORCE_HOMS = 1024
# The (ℤ/2)² failure fraction still rises from 10^4 (5/47) to 10^6 (119/1014); trends are read from here on
TREND_START = 10 ** 6


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ''


class PresetRun:
    """Checks and artifacts of one preset run. ``output_dir`` None runs without writing files."""

    def __init__(self, name: str, output_dir=None, max_bound: int = None, threads: int = 1):
        self.name = name
        self.output_dir = output_dir
        self.max_bound = max_bound
        self.threads = threads
        self.checks = []
        self.artifacts = []

    def cap(self, bounds) -> list:
        """Bounds clipped to ``max_bound``, deduplicated and ascending."""
        if self.max_bound is None:
            return sorted(set(bounds))
        return sorted({min(b, self.max_bound) for b in bounds})

    def check(self, name: str, passed: bool, detail: str = ''):
        self.checks.append(Check(name, bool(passed), detail))
        logger.info('%s / %s: %s %s', self.name, name, 'passed' if passed else 'FAILED', detail)

    def write_table(self, suffix: str, table: pd.DataFrame):
        if self.output_dir is None:
            return
        path = os.path.join(self.output_dir, f'{self.name}-{suffix}.csv')
        table.to_csv(path, index=False)
        self.artifacts.append(path)

    def write_json(self, suffix: str, record):
        if self.output_dir is None:
            return
        path = os.path.join(self.output_dir, f'{self.name}-{suffix}.json')
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(record, f, indent=2, ensure_ascii=False)
        self.artifacts.append(path)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def summary(self) -> str:
        lines = [f'Preset {self.name}: {"passed" if self.passed else "FAILED"}']
        for check in self.checks:
            lines.append(f'  [{"ok" if check.passed else "FAIL"}] {check.name}: {check.detail}')
        for path in self.artifacts:
            lines.append(f'  wrote {path}')
        return '\n'.join(lines)


def _strictly_decreasing(values) -> bool:
    return all(a > b for a, b in zip(values, values[1:]))


def _trend_check(run: PresetRun, name: str, rows, fractions):
    """
    Strict decrease of ``fractions`` over the rows with B ≥ TREND_START. Skipped when a cap leaves fewer than
    two such rows.
    """
    trend = [(row, fraction) for row, fraction in zip(rows, fractions) if row.B >= TREND_START]
    if len(trend) < 2:
        logger.info('%s / %s: skipped, fewer than two bounds from %d', run.name, name, TREND_START)
        return
    run.check(name, _strictly_decreasing([fraction for _, fraction in trend]), _format_fractions(rows, fractions))


def _format_fractions(rows, fractions) -> str:
    return ', '.join(f'B={row.B}: {float(fraction):.4f}' for row, fraction in zip(rows, fractions))


def _survey(run: PresetRun, group: FinAbGroup, bounds: list, suffix: str, predicates=()) -> list:
    rows = survey_rows(group, bounds, predicates=predicates, threads=run.threads)
    run.write_table(suffix, rows_to_table(rows))
    run.check(f'extensions_found_{group}', all(row.N > 0 for row in rows),
              ', '.join(f'N({row.B}) = {row.N}' for row in rows))
    return rows


def biquadratic_density(run: PresetRun):
    """HNP failures among (ℤ/2)²-extensions become rarer as B grows; they are exactly the all-cyclic ones."""
    rows = _survey(run, BIQUADRATIC, run.cap([10 ** 4, 10 ** 6, 10 ** 8]), 'survey')
    if all(row.N for row in rows):
        fractions = [Fraction(row.N_fail_hnp, row.N) for row in rows]
        _trend_check(run, 'hnp_failure_fraction_decreasing', rows, fractions)
    run.check('hnp_failure_equals_all_cyclic', all(row.N_fail_hnp == row.N_all_cyclic for row in rows))
    run.check('wa_failure_complements_hnp_failure', all(row.N_fail_wa == row.N - row.N_fail_hnp for row in rows))


def _positive_failure(run: PresetRun, group: FinAbGroup, bound: int):
    rows = _survey(run, group, run.cap([bound]), 'survey', predicates=('lemma_6_13',))
    row = rows[-1]
    run.check('some_extension_fails_hnp', row.N_fail_hnp >= 1, f'{row.N_fail_hnp} of {row.N}')
    run.check('some_extension_satisfies_hnp', row.N - row.N_fail_hnp >= 1, f'{row.N - row.N_fail_hnp} of {row.N}')
    run.check('lemma_6_13_sufficient', row.predicate_counts['N_lemma_6_13_hnp_holds'] == 0,
              f'{row.predicate_counts["N_lemma_6_13"]} extensions satisfy the local predicate')


def fourfour_failures(run: PresetRun):
    _positive_failure(run, FinAbGroup((4, 4)), 10 ** 30)


def sixthree_failures(run: PresetRun):
    _positive_failure(run, FinAbGroup((6, 3)), 10 ** 36)


def weak_approximation_density(run: PresetRun):
    """
    With a cyclic Q-Sylow subgroup weak approximation keeps holding for some extensions; for (ℤ/2)² the
    proportion holding it shrinks.
    """
    cyclic_sylow = FinAbGroup((6, 3))
    rows = survey_rows(cyclic_sylow, run.cap([10 ** 26, 10 ** 31, 10 ** 36]), threads=run.threads)
    run.write_table('cyclic-sylow', rows_to_table(rows))
    largest = rows[-1]
    run.check('cyclic_sylow_wa_holds', largest.N > largest.N_fail_wa,
              f'{largest.N - largest.N_fail_wa} of {largest.N} at B={largest.B}')

    rows = survey_rows(BIQUADRATIC, run.cap([10 ** 4, 10 ** 6, 10 ** 8]), threads=run.threads)
    run.write_table('noncyclic-sylow', rows_to_table(rows))
    if all(row.N for row in rows):
        fractions = [Fraction(row.N - row.N_fail_wa, row.N) for row in rows]
        _trend_check(run, 'noncyclic_sylow_wa_fraction_decreasing', rows, fractions)
    else:
        run.check('noncyclic_sylow_wa_fraction_decreasing', False, 'no extensions at some bound')


def decomposition_avoidance(run: PresetRun):
    """Extensions whose decomposition groups all avoid G[Q], and the local count of characters onto (ℤ/Q)²."""
    rows = _survey(run, BIQUADRATIC, run.cap([10 ** 4, 10 ** 6, 10 ** 8]), 'survey', predicates=('avoids_q_torsion',))
    if all(row.N for row in rows):
        fractions = [Fraction(row.predicate_counts['N_avoids_q_torsion'], row.N) for row in rows]
        _trend_check(run, 'avoiding_fraction_decreasing', rows, fractions)

    records = []
    for factors in ((2, 2), (3, 3)):
        group = FinAbGroup(factors)
        q = group.smallest_prime
        torsion = Subgroup.whole(group)
        expected = (q ** 2 - 1) * (q ** 2 - q)
        for p in primerange(3, 60):
            if p % q != 1 or group.order % p == 0:
                continue
            records.append({'group': str(group), 'p': p, 'count': local_image_count(group, p, torsion),
                            'expected': expected})
    table = pd.DataFrame.from_records(records)
    run.write_table('local-counts', table)
    run.check('local_image_counts', bool((table['count'] == table['expected']).all()), f'{len(table)} primes')


def squarefree_radicands(limit: int) -> list:
    """Squarefree n ≡ 1 mod 4 with n ≠ 1 and |n| ≤ limit."""
    return [n for n in range(-limit, limit + 1)
            if n % 4 == 1 and n != 1 and all(e == 1 for e in factorint(abs(n)).values())]


def biquadratic_crosscheck(run: PresetRun):
    """The Legendre-symbol criterion against Tate's criterion on every admissible pair with |ab| ≤ 10^5."""
    limit = run.cap([10 ** 5])[0]
    # The partner of any radicand has |b| ≥ 3
    radicands = sorted(squarefree_radicands(limit // 3), key=abs)
    compared = 0
    disagreements = []
    for i, a in enumerate(radicands):
        for b in radicands[i + 1:]:
            if abs(a * b) > limit:
                break
            if gcd(a, b) != 1:
                continue
            legendre = biquadratic_legendre_test(a, b)
            report = hasse_norm_test(biquadratic_extension(a, b))
            compared += 1
            if legendre == report.hnp_holds:
                disagreements.append({'a': a, 'b': b, 'legendre_fails': legendre, 'sha_order': report.sha_order})
    run.write_table('disagreements', pd.DataFrame.from_records(disagreements, columns=['a', 'b', 'legendre_fails',
                                                                                      'sha_order']))
    run.check('legendre_agrees_with_tate', not disagreements, f'{compared} pairs, {len(disagreements)} disagreements')

    report = hasse_norm_test(biquadratic_extension(13, 17))
    run.check('thirteen_seventeen', not report.hnp_holds and report.sha_order == 2 and report.wa_holds,
              json.dumps(report.to_record()))
    ext = biquadratic_extension(-1, 3)
    report = hasse_norm_test(ext)
    run.check('gaussian_root_three', ext.discriminant == 144 and report.hnp_holds and not report.wa_holds
              and report.a_order == 2, json.dumps(report.to_record()))


def brute_force_surjections(source: FinAbGroup, target: FinAbGroup) -> int:
    """Surjections counted by listing the images of the source generators."""
    choices = [[g for g in target.elements() if (n * g).is_zero] for n in source.invariant_factors]
    return sum(1 for images in product(*choices)
               if len(closure_indices(target, [g.coords for g in images])) == target.order)


def identity_suite(run: PresetRun):
    """Delsarte inversion, Möbius values, exterior-square orders and the two enumeration backends."""
    small = [g for g in abelian_groups(32) if not g.is_trivial]
    compared = 0
    failures = []
    for source, target in product(small, small):
        if count_homomorphisms(source, target) > BRUTE_FORCE_HOMS:
            continue
        compared += 1
        if count_surjections(source, target) != brute_force_surjections(source, target):
            failures.append(f'{source} -> {target}')
    run.check('delsarte_surjections', not failures, f'{compared} pairs; failing: {failures[:5]}')

    failures = []
    for group in small:
        lattice = subgroup_lattice(group)
        top = Subgroup.whole(group)
        for h in subgroups(group):
            if poset_mobius(lattice, h, top) != mobius(h.quotient):
                failures.append(f'{h}')
    run.check('mobius_matches_lattice', not failures, f'{len(small)} groups; failing: {failures[:5]}')

    failures = []
    for left, right in product(small, small):
        if left.order * right.order <= 256 and gcd(left.order, right.order) == 1:
            combined = FinAbGroup.from_cyclic_orders(left.invariant_factors + right.invariant_factors)
            if mobius(combined) != mobius(left) * mobius(right):
                failures.append(f'{left} + {right}')
    run.check('mobius_multiplicative', not failures, f'failing: {failures[:5]}')

    failures = []
    for group in abelian_groups(10 ** 4):
        factors = group.invariant_factors
        expected = prod(factors[j] for i in range(len(factors)) for j in range(i + 1, len(factors)))
        if exterior_square(group).order != expected:
            failures.append(str(group))
        elif group.order <= 256 and exterior_order_from_tensor(group) != expected:
            failures.append(f'{group} (tensor)')
    run.check('exterior_square_order', not failures, f'failing: {failures[:5]}')

    failures = [str(g) for g in abelian_groups(256) if not g.is_trivial
                and is_excluded_form(g) != (g.smallest_prime % exterior_square(g).exponent == 0)]
    run.check('excluded_form_characterization', not failures, f'failing: {failures[:5]}')

    records = []
    for factors, bound in (((2,), 10 ** 4), ((2, 2), 10 ** 6)):
        group = FinAbGroup(factors)
        for ext in enumerate_extensions(group, run.cap([bound])[0], threads=run.threads):
            phi = prod(phi_G_local(group, c, frobenius_at(ext, c.p)) for c in ext.components)
            records.append({'group': str(group), 'disc': str(ext.discriminant), 'phi': str(phi)})
    table = pd.DataFrame.from_records(records, columns=['group', 'disc', 'phi'])
    run.check('phi_equals_discriminant', bool((table['disc'] == table['phi']).all()), f'{len(table)} extensions')

    records = []
    for factors in ((2,), (2, 2), (4,), (6,), (4, 2)):
        group = FinAbGroup(factors)
        bound = run.cap([10 ** 5])[0]
        searched = list(enumerate_extensions(group, bound, threads=run.threads))
        by_modulus = enumerate_by_modulus(group, bound, conductor_bound(group, bound))
        records.append({'group': str(group), 'B': bound, 'search': len(searched), 'modulus': len(by_modulus),
                        'agree': searched == by_modulus})
    table = pd.DataFrame.from_records(records)
    run.write_table('backends', table)
    run.check('backends_agree', bool(table['agree'].all()),
              ', '.join(f'{r["group"]}: {r["search"]}' for r in records))


def series_identities(run: PresetRun):
    """Discriminant-series Möbius inversion and the conductor-series decomposition at small bounds."""
    records = []
    for factors in ((2,), (3,), (2, 2), (4,), (6,)):
        group = FinAbGroup(factors)
        for bound in run.cap([10 ** 3, 10 ** 4]):
            direct = count(group, bound, threads=run.threads)
            inverted = delsarte_count(group, bound, threads=run.threads)
            left, right = conductor_series_identity(group, bound, threads=run.threads)
            records.append({'group': str(group), 'B': bound, 'count': direct, 'delsarte': inverted,
                            'characters': left, 'character_sum': right})
    table = pd.DataFrame.from_records(records)
    run.write_table('series', table)
    run.check('delsarte_count', bool((table['count'] == table['delsarte']).all()))
    run.check('conductor_series', bool((table['characters'] == table['character_sum']).all()))


def _first_basis_character(group: FinAbGroup) -> Character:
    return Character(group, (1,) + (0,) * (group.rank - 1))


def analytic_suite(run: PresetRun):
    """Local transforms against their closed forms, vanishing, leading terms and the truncated local factors."""
    rows = []
    vanishing = 0.0
    for factors in ((2,), (2, 2), (3,)):
        group = FinAbGroup(factors)
        eta = _first_basis_character(group)
        for p in (5, 7, 13):
            elements = {'trivial': PairingElement(group),
                        'unit': PairingElement(group, ((unit_generator(p), eta),)),
                        'uniformizer': PairingElement(group, ((p, eta),))}
            for label, x in elements.items():
                for s in ANALYTIC_S_GRID:
                    transform = local_transform(group, p, x, s)
                    closed = lemma_3_3_closed_form(group, p, x, s)
                    rows.append({'group': str(group), 'p': p, 'x': label, 's': str(s),
                                 'transform': str(transform), 'deviation': abs(transform - closed)})
            for f in (constant_one, unramified_indicator, inertia_divides_q_indicator):
                for s in ANALYTIC_S_GRID:
                    vanishing = max(vanishing, abs(local_transform(group, p, elements['uniformizer'], s, f)))
    table = pd.DataFrame.from_records(rows)
    run.write_table('closed-form', table)
    worst = float(table['deviation'].max())
    run.check('lemma_3_3_identity', worst < IDENTITY_TOLERANCE, f'max deviation {worst:.3e}')
    run.check('lemma_3_4_vanishing', vanishing < VANISHING_TOLERANCE, f'max modulus {vanishing:.3e}')

    deviation = 0.0
    compared = 0
    for factors in ((2, 2), (3, 3)):
        group = FinAbGroup(factors)
        invariants = group_invariants(group)
        eta = _first_basis_character(group)
        for p in primerange(3, 101):
            if p % invariants.Q != 1 or group.order % p == 0:
                continue
            expected = {invariants.Q ** invariants.beta - 1: PairingElement(group),
                        -1: PairingElement(group, ((unit_generator(p), eta),))}
            for coefficient, x in expected.items():
                c0, c1 = leading_coefficients(group, p, x)
                deviation = max(deviation, abs(c0 - 1), abs(c1 - coefficient))
                compared += 1
    run.check('lemma_4_1_leading_terms', deviation < LEADING_TOLERANCE, f'{compared} cases, max deviation '
                                                                        f'{deviation:.3e}')

    biquadratic_unit = PairingElement(BIQUADRATIC, ((2, _first_basis_character(BIQUADRATIC)),))
    values = [lemma_4_8_values(BIQUADRATIC, 5, PairingElement(BIQUADRATIC)),
              lemma_4_8_values(BIQUADRATIC, 5, biquadratic_unit),
              lemma_4_8_values(FinAbGroup((3, 3)), 5, PairingElement(FinAbGroup((3, 3))))]
    run.check('lemma_4_8_values', values == [Fraction(8, 5), Fraction(4, 5), Fraction(1)],
              ', '.join(str(v) for v in values))

    deviation = 0.0
    for factors in ((2, 2), (3, 3)):
        group = FinAbGroup(factors)
        alpha = group_invariants(group).alpha
        eta = _first_basis_character(group)
        for p in (5, 7, 13):
            for x in (PairingElement(group), PairingElement(group, ((unit_generator(p), eta),))):
                transform = local_transform(group, p, x, 1 / alpha, inertia_divides_q_indicator)
                deviation = max(deviation, abs(transform - float(lemma_4_8_values(group, p, x))))
    run.check('lemma_4_8_matches_transform', deviation < IDENTITY_TOLERANCE, f'max deviation {deviation:.3e}')


def _hnp_without_wa(ext) -> bool:
    report = hasse_norm_test(ext)
    return report.hnp_holds and not report.wa_holds


def existence_search(run: PresetRun):
    """For each non-cyclic G, an extension where the Hasse norm principle holds but weak approximation fails."""
    max_bound = run.cap([10 ** 16])[0]
    found = {}
    for factors in ((2, 2), (3, 3), (4, 2)):
        group = FinAbGroup(factors)
        ext = find_extension(group, _hnp_without_wa, max_bound=max_bound, threads=run.threads)
        found[str(group)] = ext.to_record() if ext is not None else None
        run.check(f'found_{group}', ext is not None,
                  f'disc {ext.discriminant}' if ext is not None else f'nothing up to {max_bound}')
    run.write_json('found', found)


PRESETS = {
    'thm1.1-biquadratic': biquadratic_density,
    'thm1.4-fourfour': fourfour_failures,
    'thm1.4-sixthree': sixthree_failures,
    'thm1.5-wa': weak_approximation_density,
    'thm5.1-avoidance': decomposition_avoidance,
    'eq1.1-crosscheck': biquadratic_crosscheck,
    'identities': identity_suite,
    'analytic': analytic_suite,
    'thm1.2-existence': existence_search,
    'series-identities': series_identities,
}

VERIFY_SUITES = {'analytic': 'analytic', 'identities': 'identities', 'series': 'series-identities'}


def run_preset(name: str, output_dir='.', max_bound: int = None, threads: int = 1) -> PresetRun:
    """
    Run a preset and write its summary next to its tables.

    :param name: a key of PRESETS.
    :param output_dir: directory for CSV/JSON artifacts, created if missing; None writes nothing.
    :param max_bound: cap applied to every bound the preset uses.
    :param threads: worker processes for enumeration.
    :return: the finished PresetRun; ``passed`` tells whether every check held.
    """
    if name not in PRESETS:
        raise ValueError(f'Invalid preset: {name}')
    if max_bound is not None and max_bound < 1:
        raise ValueError(f'Invalid max bound: {max_bound}')
    if output_dir is not None:
        os.makedirs(output_dir, exist_ok=True)
    run = PresetRun(name, output_dir, max_bound, threads)
    logger.info('Running preset %s', name)
    PRESETS[name](run)
    if output_dir is not None:
        path = os.path.join(output_dir, f'{name}-summary.txt')
        with open(path, 'w', encoding='utf-8') as f:
            f.write(run.summary() + '\n')
        run.artifacts.append(path)
    return run
