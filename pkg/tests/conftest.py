import os
import random
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))


@pytest.fixture
def rng():
    return random.Random(20240917)


@pytest.fixture(scope="session")
def db():
    from seacount.modpoly import default_db

    return default_db()


@pytest.fixture
def criterion(request):
    """Record one acceptance verdict for the end-of-run summary."""
    log = request.config.__dict__.setdefault("_acceptance", [])

    def record(number, passed, detail):
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
        log.append((number, line))
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    rows = getattr(config, "_acceptance", [])
    if rows:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(rows):
            terminalreporter.write_line(line)
