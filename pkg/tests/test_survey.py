import pandas as pd
import pytest

from hnpcount.groups import FinAbGroup
from hnpcount.survey import load_counts, read_survey, survey, survey_rows, write_survey

KLEIN = FinAbGroup((2, 2))


def test_biquadratic_rows():
    rows = survey_rows(KLEIN, [143, 144, 10 ** 4], predicates=('totally_real', 'avoids_q_torsion'))
    assert [row.B for row in rows] == [143, 144, 10 ** 4]
    assert rows[0].N == 0 and rows[0].sha_histogram == {}
    assert rows[1].N == 6
    assert rows[1].N_fail_hnp == 0 and rows[1].N_fail_wa == 6
    assert rows[1].predicate_counts['N_totally_real'] == 0
    for row in rows:
        assert row.N_fail_hnp == row.N_all_cyclic
        assert row.N_fail_wa == row.N - row.N_fail_hnp
        assert sum(row.sha_histogram.values()) == row.N
        assert row.predicate_counts['N_avoids_q_torsion_hnp_holds'] <= row.predicate_counts['N_avoids_q_torsion']
    assert rows[2].N_fail_hnp > 0
    assert 0 < rows[2].fail_hnp_fraction < 1


def test_bounds_are_tallied_from_one_enumeration():
    single = survey_rows(KLEIN, [5000])[0]
    combined = survey_rows(KLEIN, [10 ** 4, 5000])
    assert combined[1].to_dict() == single.to_dict()


def test_invalid_survey_arguments():
    with pytest.raises(ValueError):
        survey_rows(KLEIN, [100], predicates=('no_such_predicate',))
    with pytest.raises(ValueError):
        survey_rows(KLEIN, [])
    with pytest.raises(ValueError):
        survey_rows(KLEIN, [10 ** 3], predicates=('lemma_6_13',))


def test_csv_round_trip(tmp_path):
    table = survey(KLEIN, [144, 2000])
    path = tmp_path / 'survey.csv'
    write_survey(table, str(path))
    again = read_survey(str(path))
    assert list(again['B']) == [144, 2000]
    assert list(again['N']) == list(table['N'])
    assert again['sha_histogram'][0] == {1: 6}


def test_load_counts(tmp_path):
    path = tmp_path / 'counts.csv'
    pd.DataFrame({'B': [1000, 100], 'N': [7, 3]}).to_csv(path, index=False)
    assert load_counts(str(path)) == [(100, 3), (1000, 7)]
    pd.DataFrame({'bound': [100]}).to_csv(path, index=False)
    with pytest.raises(ValueError):
        load_counts(str(path))
