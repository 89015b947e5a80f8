import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from valence.graph_core import make_graph

settings.register_profile("repo", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "repo"))

CORPUS = Path(__file__).resolve().parents[1] / "corpus"


@pytest.fixture
def corpus_root():
    return CORPUS


@pytest.fixture
def B():
    return make_graph(["v"])


@pytest.fixture
def Z():
    return make_graph(["v"], looped=["v"])


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n].line())
