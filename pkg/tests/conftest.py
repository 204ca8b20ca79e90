import itertools

import numpy as np
import pytest

from onassign.certifiers import Certificate, Certifier
from onassign.model import Hypergraph, WeightFunction, independent_sets


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def path_hg():
    """e1={1,2}, e2={2,3}, e3={3,4} as edges 0, 1, 2."""
    return Hypergraph(5, [(1, 2), (2, 3), (3, 4)])


@pytest.fixture
def path_profile():
    # a: e1 -> 2, e3 -> 1; b: e2 -> 3
    return {0: WeightFunction({0: 2, 2: 1}), 1: WeightFunction({1: 3})}


class CanonicalCertifier(Certifier):
    """Every independent set containing e certifies e; any two certificates block
    unless their union is independent and their elements differ.

    Only the conservative full-blocking construction; used as a reference.
    """

    def __init__(self, system):
        self.system = system
        self.k = None

    def _check(self, c):
        if c.element not in c.payload or not self.system.is_independent(c.payload):
            raise ValueError("not a certificate")

    def _blocks(self, c1, c2):
        return True

    def nodes(self):
        return [Certificate(s, e) for s in independent_sets(self.system) if s for e in s]


@pytest.fixture
def canonical_certifier():
    return CanonicalCertifier


def all_subsets(elems, max_size=None):
    elems = list(elems)
    top = len(elems) if max_size is None else max_size
    for r in range(top + 1):
        yield from itertools.combinations(elems, r)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
