import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from kmedoid_ids.dataset import default_taxonomy_path  # noqa: E402

SAMPLE = Path(__file__).parents[1] / "src" / "kmedoid_ids" / "data" / "kdd_sample.csv"

NORMAL_LINE = (
    "0,tcp,http,SF,181,5450,0,0,0,0,0,1,0,0,0,0,0,0,0,0,0,0,8,8,0.00,0.00,"
    "0.00,0.00,1.00,0.00,0.00,9,9,1.00,0.00,0.11,0.00,0.00,0.00,0.00,0.00,normal."
)


@pytest.fixture
def normal_line():
    return NORMAL_LINE


@pytest.fixture
def sample_path():
    return SAMPLE


@pytest.fixture
def taxonomy_path():
    return default_taxonomy_path()


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(RESULTS):
        status, text = RESULTS[num]
        terminalreporter.write_line(f"[{status}] criterion {num}: {text}")
