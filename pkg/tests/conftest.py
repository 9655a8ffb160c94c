"""Shared fixtures.  The oracle suite is collected first so ground truth is
checked before anything is compared against it."""

import pytest

from treestack.fixtures import fixture_automaton

FIRST = "test_oracle.py"


def pytest_collection_modifyitems(items):
    items.sort(key=lambda item: item.fspath.basename != FIRST)


@pytest.fixture(scope="session")
def example():
    return fixture_automaton("example")


@pytest.fixture(scope="session")
def anbn():
    return fixture_automaton("anbn")


@pytest.fixture(scope="session")
def anbn_stages(anbn):
    from treestack.constructions import prepare

    return prepare(anbn, 2)


@pytest.fixture(scope="session")
def anbn_sigma_runs(anbn, anbn_stages):
    """Hash-keeping permuted automata for a^n b^n, N=2, with slices at length 8."""
    from treestack.constructions import sigma_automaton
    from treestack.oracle import all_permutations
    from treestack.runner import Budget, enumerate_slice

    out = {}
    for sigma in all_permutations(2):
        aut = sigma_automaton(anbn, 2, sigma, stages=anbn_stages)
        out[sigma.images] = (aut, enumerate_slice(aut, 8, 6, Budget(max_nodes=9)))
    return out


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    lines = module.summary_lines() if module else []
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
