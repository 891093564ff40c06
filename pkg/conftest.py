from pathlib import Path

import pytest

from shared.models import ParetoParams, SufficientStats

DATA_DIR = Path(__file__).parent / "tests" / "data"


@pytest.fixture
def fixture_stats():
    """Sufficient statistics behind the published estimator table."""
    return SufficientStats(n=100, q1=1.0303, q2=91.7082)


@pytest.fixture
def reference():
    return ParetoParams(alpha=1.0, beta=1.0)


@pytest.fixture
def fixture_path():
    return DATA_DIR / "table2_fixture.txt"
