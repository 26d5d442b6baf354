import pytest

from hnpcount.enumerator.extension import decomposition_data
from hnpcount.hnp import biquadratic_extension


@pytest.fixture
def thirteen_seventeen():
    """ℚ(√13, √17): every decomposition group is cyclic."""
    ext = biquadratic_extension(13, 17)
    return ext, decomposition_data(ext)


@pytest.fixture
def gaussian_root_three():
    """ℚ(i, √3), the smallest biquadratic field."""
    ext = biquadratic_extension(-1, 3)
    return ext, decomposition_data(ext)
