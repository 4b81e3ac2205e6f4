import sys
from functools import lru_cache
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "default",
    deadline=None,
    max_examples=40,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


@lru_cache(maxsize=None)
def group(name):
    from wcyclic.catalogue import parse_group

    return parse_group(name)


@lru_cache(maxsize=None)
def lattice(name):
    from wcyclic.lattice import enumerate_subgroups

    return enumerate_subgroups(group(name))


@lru_cache(maxsize=None)
def chartable(name):
    from wcyclic.reps import character_table

    return character_table(group(name))


@pytest.fixture
def G():
    return group


@pytest.fixture
def L():
    return lattice


@pytest.fixture
def CT():
    return chartable


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
