"""
Command-line entry point: enumerate, count, survey, test, verify, fit and preset.
"""
import argparse
import json
import logging
import os
import sys

import pandas as pd

from hnpcount.analytic import asymptotic_fit
from hnpcount.conditions import LocalConditionSet
from hnpcount.enumerator.extension import GExtensionQ, decomposition_data
from hnpcount.enumerator.modulus import conductor_bound, enumerate_by_modulus
from hnpcount.enumerator.search import count, delsarte_count, enumerate_extensions
from hnpcount.groups import FinAbGroup, group_invariants, is_excluded_form
from hnpcount.hnp import biquadratic_extension, hasse_norm_test, lemma_6_12_certificate, lemma_6_13_predicate
from hnpcount.presets import PRESETS, VERIFY_SUITES, run_preset
from hnpcount.survey import SURVEY_PREDICATES, load_counts, survey, write_survey
from hnpcount.util import canonical_json, parse_int_list, validate_extension_records

logger = logging.getLogger(__name__)


def parse_extension_input(path, group: FinAbGroup) -> GExtensionQ:
    """
    Read an extension from JSON: a list of component records, or an object with a "components" list and an
    optional "group" literal that must match ``group``. Surjectivity is recomputed, never trusted.
    """
    with open(path, encoding='utf-8') as f:
        try:
            record = json.load(f)
        except json.JSONDecodeError as e:
            raise ValueError(f'Invalid extension file {path}: {e}') from None
    if isinstance(record, list):
        record = {'components': record}
    if isinstance(record, dict) and 'group' in record:
        if FinAbGroup.parse(str(record['group'])) != group:
            raise ValueError(f'Invalid extension file {path}: group {record["group"]}, expected {group}')
        record = {k: v for k, v in record.items() if k != 'group'}
    return GExtensionQ.from_record(record, group)


def _conditions(args, group):
    return LocalConditionSet.load(args.conditions, group) if args.conditions else None


def _open_output(path):
    return open(path, 'w', encoding='utf-8', newline='') if path else sys.stdout


def command_enumerate(args):
    group = FinAbGroup.parse(args.group)
    extensions = enumerate_extensions(group, args.bound, _conditions(args, group), threads=args.threads)
    out = _open_output(args.output)
    try:
        if args.format == 'jsonl':
            for ext in extensions:
                record = ext.to_record()
                validate_extension_records([record])
                out.write(canonical_json(record) + '\n')
        else:
            records = [{'disc': str(ext.discriminant), 'conductor': str(ext.conductor),
                        'primes': ';'.join(str(p) for p in ext.primes)} for ext in extensions]
            pd.DataFrame.from_records(records, columns=['disc', 'conductor', 'primes']).to_csv(out, index=False)
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def command_count(args):
    group = FinAbGroup.parse(args.group)
    conditions = _conditions(args, group)
    if args.method != 'search' and conditions is not None:
        raise ValueError(f'Invalid method: {args.method} does not support conditions')
    if args.method == 'search':
        n = count(group, args.bound, conditions, threads=args.threads)
    elif args.method == 'delsarte':
        n = delsarte_count(group, args.bound, threads=args.threads)
    else:
        n = len(enumerate_by_modulus(group, args.bound, conductor_bound(group, args.bound)))
    print(n)
    return 0


def command_survey(args):
    group = FinAbGroup.parse(args.group)
    predicates = tuple(p for p in args.predicates.split(',') if p) if args.predicates else ()
    table = survey(group, parse_int_list(args.bounds), _conditions(args, group), predicates, threads=args.threads)
    out = _open_output(args.output)
    try:
        write_survey(table, out)
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def command_test(args):
    if args.biquadratic:
        a, b = parse_int_list(args.biquadratic)
        ext = biquadratic_extension(a, b)
    else:
        if not args.group or not args.components:
            raise ValueError('Invalid arguments: test needs --biquadratic, or --group with --components')
        ext = parse_extension_input(args.components, FinAbGroup.parse(args.group))
    data = decomposition_data(ext)
    record = hasse_norm_test(ext, data).to_record(verbose=args.verbose_report)
    if args.verbose_report:
        record['disc'] = str(ext.discriminant)
        if is_excluded_form(ext.group):
            if not ext.group.is_cyclic:
                record['certificate'] = [str(h) for h in lemma_6_12_certificate(ext, data)]
        else:
            record['lemma_6_13'] = lemma_6_13_predicate(ext, data)
    print(json.dumps(record, ensure_ascii=False))
    return 0


def command_verify(args):
    run = run_preset(VERIFY_SUITES[args.suite], output_dir=args.output_dir, threads=args.threads)
    print(run.summary())
    return 0 if run.passed else 1


def command_fit(args):
    invariants = group_invariants(FinAbGroup.parse(args.group))
    result = asymptotic_fit(load_counts(args.counts), invariants.alpha, invariants.nu_over_Q)
    result.update(alpha=invariants.alpha, nu=invariants.nu_over_Q)
    print(json.dumps(result))
    return 0


def command_preset(args):
    run = run_preset(args.name, output_dir=args.output_dir, max_bound=args.max_bound, threads=args.threads)
    print(run.summary())
    return 0 if run.passed else 1


def _bound(literal: str) -> int:
    values = parse_int_list(literal)
    if len(values) != 1 or values[0] < 1:
        raise argparse.ArgumentTypeError(f'invalid bound: {literal}')
    return values[0]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='hnpcount', description=(
        'Count abelian extensions of Q by discriminant and test the Hasse norm principle and weak approximation.'))
    parser.add_argument('-v', '--verbose', action='count', default=0, help='-v for INFO, -vv for DEBUG logging.')
    commands = parser.add_subparsers(dest='command', required=True)

    def with_threads(sub):
        sub.add_argument('--threads', type=int, default=os.cpu_count() or 1,
                         help='Worker processes (default: all cores; 1 gives reproducible logs).')

    sub = commands.add_parser('enumerate', help='List G-extensions with discriminant up to a bound.')
    sub.add_argument('--group', required=True, help='Invariant factors, e.g. "4,2".')
    sub.add_argument('--bound', required=True, type=_bound)
    sub.add_argument('--conditions', help='JSON file of local conditions.')
    sub.add_argument('--format', choices=['jsonl', 'csv'], default='jsonl')
    sub.add_argument('--output', help='Output file (default: stdout).')
    with_threads(sub)
    sub.set_defaults(handler=command_enumerate)

    sub = commands.add_parser('count', help='N(Q, G, conditions, B).')
    sub.add_argument('--group', required=True)
    sub.add_argument('--bound', required=True, type=_bound)
    sub.add_argument('--conditions')
    sub.add_argument('--method', choices=['search', 'delsarte', 'modulus'], default='search')
    with_threads(sub)
    sub.set_defaults(handler=command_count)

    sub = commands.add_parser('survey', help='HNP and WA failure counts over several bounds, as CSV.')
    sub.add_argument('--group', required=True)
    sub.add_argument('--bounds', required=True, help='Comma separated, e.g. "10**4,10**6".')
    sub.add_argument('--conditions')
    sub.add_argument('--predicates', help=f'Extra count columns among: {", ".join(SURVEY_PREDICATES)}.')
    sub.add_argument('--output')
    with_threads(sub)
    sub.set_defaults(handler=command_survey)

    sub = commands.add_parser('test', help='Hasse norm principle and weak approximation for one extension.')
    sub.add_argument('--group')
    sub.add_argument('--components', help='JSON file with the local components.')
    sub.add_argument('--biquadratic', help='"a,b" for Q(sqrt a, sqrt b).')
    sub.add_argument('--verbose-report', action='store_true',
                     help='Add the decomposition summary, Sha structure and local certificates.')
    sub.set_defaults(handler=command_test)

    sub = commands.add_parser('verify', help='Run an identity suite and print its deviations.')
    sub.add_argument('--suite', choices=sorted(VERIFY_SUITES), required=True)
    sub.add_argument('--output-dir', help='Also write the suite tables here.')
    with_threads(sub)
    sub.set_defaults(handler=command_verify)

    sub = commands.add_parser('fit', help='Log-log slope of counts against the expected exponent.')
    sub.add_argument('--group', required=True)
    sub.add_argument('--counts', required=True, help='CSV with columns B and N.')
    sub.set_defaults(handler=command_fit)

    sub = commands.add_parser('preset', help='Run a named experiment.')
    sub.add_argument('name', choices=sorted(PRESETS))
    sub.add_argument('--output-dir', default='.')
    sub.add_argument('--max-bound', type=_bound, help='Cap every bound the preset uses.')
    with_threads(sub)
    sub.set_defaults(handler=command_preset)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format='%(asctime)s %(name)s %(levelname)s: %(message)s')
    if getattr(args, 'threads', 1) < 1:
        print(f'hnpcount: error: invalid thread count {args.threads}', file=sys.stderr)
        return 2
    try:
        return args.handler(args)
    except (ValueError, OSError) as e:
        print(f'hnpcount: error: {e}', file=sys.stderr)
        return 2


if __name__ == '__main__':
    sys.exit(main())
