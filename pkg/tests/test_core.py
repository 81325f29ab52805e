import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import assignment, make_instance
from src.core import (
    Assignment,
    Constraint,
    Instance,
    InstanceParams,
    InvalidArgumentError,
    Model,
    RBCSPError,
    SolveOutcome,
    Status,
    UnsupportedParametersError,
    distance,
    round_half_up,
    satisfies,
    violated_constraints,
)


def test_round_half_up_breaks_ties_upward():
    assert round_half_up(2.5) == 3
    assert round_half_up(3.5) == 4
    assert round_half_up(2.4999) == 2


def test_constraint_sorts_forbidden_tuples():
    c = Constraint((0, 2), [(1, 1), (0, 1)])
    assert c.forbidden == ((0, 1), (1, 1))
    assert c.arity == 2
    assert not c.allows([0, 9, 1])
    assert c.allows([1, 9, 0])


def test_satisfies_and_violations(alternating_pair):
    assert satisfies(alternating_pair, assignment(0, 1))
    assert not satisfies(alternating_pair, assignment(1, 1))
    assert violated_constraints(alternating_pair, assignment(0, 0)) == [0]


def test_empty_instance_is_satisfied_by_anything():
    inst = Instance(n=3, d=2)
    assert inst.m == 0
    assert inst.k == 0
    assert satisfies(inst, assignment(1, 0, 1))


def test_empty_relation_allows_everything():
    inst = make_instance(3, 2, [((0, 1), [])])
    assert satisfies(inst, assignment(0, 0, 0))


def test_wrong_length_assignment_is_rejected(alternating_pair):
    with pytest.raises(InvalidArgumentError):
        satisfies(alternating_pair, assignment(0))


@pytest.mark.parametrize("scope", [(1, 0), (0, 0), (0, 5)])
def test_bad_scopes_are_rejected(scope):
    with pytest.raises(InvalidArgumentError):
        make_instance(3, 2, [(scope, [(0, 0)])])


def test_out_of_range_tuple_is_rejected():
    with pytest.raises(InvalidArgumentError):
        make_instance(3, 2, [((0, 1), [(0, 2)])])


def test_repeated_constraints_are_allowed():
    inst = make_instance(3, 2, [((0, 1), [(0, 0)]), ((0, 1), [(0, 0)])])
    assert inst.m == 2
    assert inst.constraints_of()[0] == [0, 1]


def test_params_validation():
    with pytest.raises(InvalidArgumentError):
        InstanceParams(k=1, n=10, alpha=0.8, r=1.0, p=0.3)
    with pytest.raises(InvalidArgumentError):
        InstanceParams(k=2, n=10, alpha=0.8, r=1.0, p=1.0)
    with pytest.raises(UnsupportedParametersError):
        InstanceParams(k=2, n=4, alpha=0.1, r=1.0, p=0.3)


def test_errors_share_a_root():
    assert issubclass(InvalidArgumentError, RBCSPError)
    assert issubclass(InvalidArgumentError, ValueError)


def test_params_model_accepts_strings():
    assert InstanceParams(k=2, n=10, alpha=0.8, r=1.0, p=0.3, model="RD").model is Model.RD


def test_solve_outcome_is_sat():
    assert SolveOutcome(status=Status.SAT).is_sat
    assert not SolveOutcome(status=Status.TIMEOUT).is_sat


def test_distance_examples():
    assert distance(assignment(0, 0, 0, 0), assignment(0, 1, 0, 1)) == 0.5
    with pytest.raises(InvalidArgumentError):
        distance(assignment(0, 1), assignment(0))
    with pytest.raises(InvalidArgumentError):
        distance(Assignment(()), Assignment(()))


values = st.lists(st.integers(0, 4), min_size=1, max_size=12)


@given(values, st.data())
def test_distance_is_a_normalized_metric(a, data):
    b = data.draw(st.lists(st.integers(0, 4), min_size=len(a), max_size=len(a)))
    x, y = Assignment(a), Assignment(b)
    assert distance(x, y) == distance(y, x)
    assert distance(x, x) == 0
    assert 0 <= distance(x, y) <= 1


@settings(max_examples=50)
@given(st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2)), max_size=9, unique=True),
       st.integers(0, 2), st.integers(0, 2))
def test_adding_a_constraint_never_creates_solutions(forbidden, x0, x1):
    base = make_instance(2, 3, [((0, 1), forbidden[:len(forbidden) // 2])])
    tighter = make_instance(2, 3, [((0, 1), forbidden[:len(forbidden) // 2]),
                                   ((0, 1), forbidden[len(forbidden) // 2:])])
    a = assignment(x0, x1)
    if satisfies(tighter, a):
        assert satisfies(base, a)
