import os
from pathlib import Path

import numpy as np
import pytest

from tsmetric.io import find_ucr_split, load_ucr_pair

UCR_ROOT = Path(os.environ.get("TSMETRIC_UCR_DIR", Path(__file__).resolve().parents[1] / "data" / "ucr"))

# one line per acceptance check, printed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def ucr_available(name: str) -> bool:
    try:
        find_ucr_split(UCR_ROOT, name, "TRAIN")
        find_ucr_split(UCR_ROOT, name, "TEST")
    except FileNotFoundError:
        return False
    return True


_cache: dict = {}


def load_ucr(name: str):
    if name not in _cache:
        _cache[name] = load_ucr_pair(UCR_ROOT, name)
    return _cache[name]


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
