"""
Survey tables: counts of extensions failing the Hasse norm principle or weak approximation over a list of bounds.
"""
import logging
from collections import Counter
from dataclasses import dataclass, field

import pandas as pd

from hnpcount.conditions import LocalConditionSet
from hnpcount.enumerator.extension import decomposition_data
from hnpcount.enumerator.search import enumerate_extensions
from hnpcount.groups import FinAbGroup, Subgroup
from hnpcount.hnp import hasse_norm_test, lemma_6_13_predicate
from hnpcount.util import format_histogram, organize_by_bound, parse_histogram, validate_survey_rows

logger = logging.getLogger(__name__)

# Named predicates on (extension, decomposition data); evaluated per extension
SURVEY_PREDICATES = {
    'lemma_6_13': lambda ext, data: lemma_6_13_predicate(ext, data),
    'totally_real': lambda ext, data: ext.is_totally_real,
    'avoids_q_torsion': lambda ext, data: avoids_q_torsion(ext, data),
}


def avoids_q_torsion(ext, data) -> bool:
    """No decomposition group equals G[Q]."""
    whole = Subgroup.whole(ext.group)
    torsion = Subgroup(ext.group, tuple(whole.ambient_torsion_generators(ext.group.smallest_prime)))
    return all(d != torsion for d in data.places)


@dataclass
class SurveyRow:
    B: int
    N: int = 0
    N_fail_hnp: int = 0
    N_fail_wa: int = 0
    N_all_cyclic: int = 0
    sha_histogram: dict = field(default_factory=dict)
    predicate_counts: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        row = {'B': self.B, 'N': self.N, 'N_fail_hnp': self.N_fail_hnp, 'N_fail_wa': self.N_fail_wa,
               'N_all_cyclic': self.N_all_cyclic, 'sha_histogram': dict(self.sha_histogram)}
        row.update(self.predicate_counts)
        return row

    @property
    def fail_hnp_fraction(self) -> float:
        return self.N_fail_hnp / self.N if self.N else 0.0


def survey_rows(group: FinAbGroup, bounds: list, conditions: LocalConditionSet = None, predicates=(),
                **kwargs) -> list:
    """
    Enumerate once at the largest bound and tally every smaller bound from the sorted stream.

    :param group: non-trivial target group.
    :param bounds: discriminant bounds.
    :param conditions: local conditions.
    :param predicates: names from SURVEY_PREDICATES; each adds N_<name> and N_<name>_hnp_holds columns.
    :return: list of SurveyRow in the order of ``bounds``.
    """
    for name in predicates:
        if name not in SURVEY_PREDICATES:
            raise ValueError(f'Invalid survey predicate: {name}')
    bounds = list(bounds)
    if not bounds:
        raise ValueError('Invalid bounds: none given')

    discriminants = []
    outcomes = []
    for ext in enumerate_extensions(group, max(bounds), conditions, **kwargs):
        data = decomposition_data(ext)
        report = hasse_norm_test(ext, data)
        flags = tuple(bool(SURVEY_PREDICATES[name](ext, data)) for name in predicates)
        discriminants.append(ext.discriminant)
        outcomes.append((report.sha_order, report.wa_holds, report.decomposition_cyclic, report.hnp_holds, flags))
    prefix = organize_by_bound(discriminants, bounds)

    rows = []
    for bound in bounds:
        row = SurveyRow(B=bound)
        histogram = Counter()
        counts = {f'N_{name}': 0 for name in predicates}
        counts.update({f'N_{name}_hnp_holds': 0 for name in predicates})
        for sha_order, wa_holds, all_cyclic, hnp_holds, flags in outcomes[:prefix[bound]]:
            histogram[sha_order] += 1
            row.N_fail_wa += not wa_holds
            row.N_all_cyclic += all_cyclic
            for name, flag in zip(predicates, flags):
                if flag:
                    counts[f'N_{name}'] += 1
                    counts[f'N_{name}_hnp_holds'] += hnp_holds
        row.N = prefix[bound]
        row.N_fail_hnp = row.N - histogram.get(1, 0)
        row.sha_histogram = dict(histogram)
        row.predicate_counts = counts
        logger.info('B = %d: N = %d, failing HNP %d, failing WA %d', bound, row.N, row.N_fail_hnp, row.N_fail_wa)
        rows.append(row)
    validate_survey_rows([row.to_dict() for row in rows])
    return rows


def rows_to_table(rows: list) -> pd.DataFrame:
    """SurveyRows as a DataFrame, with the sha histogram encoded as "order:count;..."."""
    records = []
    for row in rows:
        record = row.to_dict()
        record['sha_histogram'] = format_histogram(record['sha_histogram'])
        records.append(record)
    return pd.DataFrame.from_records(records)


def survey(group: FinAbGroup, bounds: list, conditions: LocalConditionSet = None, predicates=(),
           **kwargs) -> pd.DataFrame:
    return rows_to_table(survey_rows(group, bounds, conditions, predicates, **kwargs))


def write_survey(table: pd.DataFrame, path):
    table.to_csv(path, index=False)


def read_survey(path) -> pd.DataFrame:
    """Read a survey CSV back, keeping big integers exact."""
    table = pd.read_csv(path, dtype=str, keep_default_na=False)
    for column in table.columns:
        if column != 'sha_histogram':
            table[column] = table[column].map(int)
    table['sha_histogram'] = table['sha_histogram'].map(parse_histogram)
    return table


def load_counts(path) -> list:
    """(B, N) pairs from a CSV with columns B and N, sorted by B."""
    table = pd.read_csv(path, dtype=str)
    if 'B' not in table.columns or 'N' not in table.columns:
        raise ValueError(f'Invalid counts file {path}: columns B and N are required')
    return sorted((int(b), int(n)) for b, n in zip(table['B'], table['N']))
