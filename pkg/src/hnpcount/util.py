import json
from bisect import bisect_right


def validate_extension_records(data):
    """
    Assert that the extension records are correctly formatted.
    Expected format: list of dict with keys 'disc', 'components', 'surjective'.
    """
    assert all('disc' in entry and 'components' in entry and 'surjective' in entry
               for entry in data), "Invalid extension record format."
    assert all(isinstance(entry['disc'], str) and isinstance(entry['components'], list)
               and isinstance(entry['surjective'], bool) for entry in data), "Invalid extension record format."


def validate_survey_rows(rows):
    """
    Assert that survey rows are consistent.
    Expected format: list of dict with keys 'B', 'N', 'N_fail_hnp', 'N_fail_wa', 'sha_histogram'.
    """
    assert all('B' in row and 'N' in row and 'N_fail_hnp' in row and 'N_fail_wa' in row and 'sha_histogram' in row
               for row in rows), "Invalid survey row format."
    for row in rows:
        assert row['N_fail_hnp'] <= row['N'] and row['N_fail_wa'] <= row['N'], "Failure count exceeds N."
        assert sum(row['sha_histogram'].values()) == row['N'], "Sha histogram does not sum to N."
        assert row['sha_histogram'].get(1, 0) == row['N'] - row['N_fail_hnp'], "Sha histogram disagrees with HNP."


def canonical_json(record) -> str:
    """Byte-stable JSON: sorted keys, no whitespace."""
    return json.dumps(record, sort_keys=True, separators=(',', ':'), ensure_ascii=False)


def format_histogram(histogram: dict) -> str:
    """{1: 5, 2: 3} -> "1:5;2:3", ordered by key."""
    return ';'.join(f'{order}:{count}' for order, count in sorted(histogram.items()))


def parse_histogram(text: str) -> dict:
    if not isinstance(text, str) or not text.strip():
        return {}
    histogram = {}
    for part in text.split(';'):
        try:
            order, count = part.split(':')
            histogram[int(order)] = int(count)
        except ValueError:
            raise ValueError(f'Invalid histogram entry: {part!r}') from None
    return histogram


def parse_int_list(literal: str) -> list:
    """Parse "13,17" or "10**4,10**6" into integers. Powers of ten may be written 1e6."""
    values = []
    for part in literal.split(','):
        part = part.strip()
        try:
            if '**' in part:
                base, exponent = part.split('**')
                values.append(int(base) ** int(exponent))
            elif 'e' in part.lower():
                mantissa, exponent = part.lower().split('e')
                values.append(int(mantissa) * 10 ** int(exponent))
            else:
                values.append(int(part))
        except ValueError:
            raise ValueError(f'Invalid integer literal: {part!r}') from None
    return values


def organize_by_bound(discriminants: list, bounds: list) -> dict:
    """
    Cumulative prefix lengths of an ascending discriminant list for each bound.

    :param discriminants: ascending list of discriminants.
    :param bounds: bounds B.
    :return: dict B -> number of discriminants ≤ B.
    """
    assert all(discriminants[i] <= discriminants[i + 1] for i in range(len(discriminants) - 1)), \
        "Discriminants must be sorted."
    return {bound: bisect_right(discriminants, bound) for bound in bounds}
