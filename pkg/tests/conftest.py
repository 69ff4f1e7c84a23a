import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def cache_dir(request):
    """Critical-value cache kept in pytest's cache so reruns skip the simulation."""
    return str(request.config.cache.mkdir("cpscan-critvals"))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_collection_modifyitems(config, items):
    if os.environ.get("CPSCAN_EXTENDED") == "1":
        return
    skip = pytest.mark.skip(reason="full-scale reproduction; set CPSCAN_EXTENDED=1")
    for item in items:
        if "extended" in item.keywords:
            item.add_marker(skip)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
