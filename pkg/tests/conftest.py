import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))
from src.core import Assignment, Constraint, Instance, InstanceParams, Model


def make_instance(n, d, constraints):
    """``constraints`` is a list of (scope, forbidden tuples) pairs."""
    return Instance(n=n, d=d, constraints=[Constraint(s, f) for s, f in constraints])


@pytest.fixture
def alternating_pair():
    # x0 != x1 over {0, 1}: exactly two solutions
    return make_instance(2, 2, [((0, 1), [(0, 0), (1, 1)])])


@pytest.fixture
def blocked_pair():
    return make_instance(2, 2, [((0, 1), [(0, 0), (0, 1), (1, 0), (1, 1)])])


@pytest.fixture
def easy_params():
    # d = 6, m = 12, seven forbidden tuples per constraint
    return InstanceParams(k=2, n=10, alpha=0.8, r=0.5, p=0.2)


@pytest.fixture
def small_grid():
    """Parameterizations small enough for exhaustive enumeration."""
    grid = []
    for k, n, alpha, r, p in [
        (2, 6, 0.8, 1.0, 0.3),
        (2, 8, 0.7, 1.5, 0.25),
        (2, 7, 0.8, 2.0, 0.2),
        (3, 6, 0.8, 0.8, 0.4),
        (3, 7, 0.6, 1.0, 0.5),
    ]:
        for model in (Model.RB, Model.RD):
            for forced in (False, True):
                grid.append(InstanceParams(k=k, n=n, alpha=alpha, r=r, p=p,
                                           model=model, forced=forced))
    return grid


def assignment(*values):
    return Assignment(values)
