import os
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from g3modular.curve_records import load_corpus
from g3modular.exact_series import TruncatedSeries
from g3modular.forms_data import FIXTURE_ENV

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# the bundled fixtures, unless a run points the env var elsewhere
os.environ.pop(FIXTURE_ENV, None)


def series(*terms, M):
    """series((1, 1), (3, -2), M=5) is q - 2 q^3 + O(q^6)."""
    return TruncatedSeries.from_dict({n: Fraction(c) for n, c in terms}, M)


def seq(coeffs):
    return TruncatedSeries(tuple(Fraction(c) for c in coeffs))


@pytest.fixture(scope="session")
def corpus():
    return load_corpus()
