from dataclasses import replace

import pytest

from src.core import Instance, InstanceParams, InvalidArgumentError, Status, satisfies
from src.generator import generate
from src.solver_tabu import TabuConfig, TabuSearch, solve_tabu


def test_unconstrained_instance_needs_no_flips():
    out = solve_tabu(Instance(n=4, d=3))
    assert out.status is Status.SAT
    assert out.flips == 0


def test_finds_solutions_of_easy_forced_instances():
    # p_cr = 1 - exp(-0.8) ~ 0.55
    params = InstanceParams(k=2, n=20, alpha=0.8, r=1.0, p=0.25, forced=True)
    for seed in range(50):
        gi = generate(replace(params, seed=seed))
        out = solve_tabu(gi.instance, TabuConfig(max_flips=20_000, seed=seed))
        assert out.status is Status.SAT
        assert satisfies(gi.instance, out.witness)


def test_unsat_instance_times_out(blocked_pair):
    out = solve_tabu(blocked_pair, TabuConfig(max_flips=300, seed=1))
    assert out.status is Status.TIMEOUT
    assert out.witness is None
    assert out.flips == 300


def test_restarts_split_the_budget(blocked_pair):
    out = solve_tabu(blocked_pair, TabuConfig(max_flips=300, restarts=3, seed=1))
    assert out.status is Status.TIMEOUT
    assert out.flips == 300


def test_incremental_tables_survive_self_checks(blocked_pair):
    out = solve_tabu(blocked_pair, TabuConfig(max_flips=3000, self_check=True, seed=2))
    assert out.status is Status.TIMEOUT


def test_tables_match_a_fresh_recount(easy_params):
    inst = generate(replace(easy_params, p=0.45, seed=3)).instance
    search = TabuSearch(inst, TabuConfig(max_flips=200, seed=3))
    search.run()
    search._self_check()
    for v in range(inst.n):
        for b in range(inst.d):
            recount = sum(1 for ci in search.incident[v]
                          if search._projection(ci, v, b) in search.forbidden[ci])
            assert search.conflicts[v][b] == recount


def test_same_seed_same_run(easy_params):
    inst = generate(replace(easy_params, p=0.4, seed=9)).instance
    cfg = TabuConfig(max_flips=500, seed=42)
    a, b = solve_tabu(inst, cfg), solve_tabu(inst, cfg)
    assert (a.status, a.flips, a.witness) == (b.status, b.flips, b.witness)


def test_config_validation():
    with pytest.raises(InvalidArgumentError):
        TabuConfig(max_flips=0)
    with pytest.raises(InvalidArgumentError):
        TabuConfig(restarts=0)
    with pytest.raises(InvalidArgumentError):
        solve_tabu(None)


@pytest.mark.parametrize("learning,expected", [(True, 101), (False, 1)])
def test_local_minima_raise_violated_weights(blocked_pair, learning, expected):
    # every move on the blocked pair is a non-improving one
    search = TabuSearch(blocked_pair, TabuConfig(max_flips=100, seed=5, weight_learning=learning))
    out = search.run()
    assert out.flips == 100
    assert search.weights.tolist() == [expected]
    assert all(s == expected for row in search.score for s in row)


def test_weights_never_shrink_on_a_hard_instance(easy_params):
    inst = generate(replace(easy_params, p=0.6, seed=11)).instance
    search = TabuSearch(inst, TabuConfig(max_flips=400, seed=11))
    out = search.run()
    if out.status is Status.TIMEOUT:
        assert max(search.weights) > 1
    assert min(search.weights) >= 1
    for v in range(inst.n):
        for b in range(inst.d):
            weighted = sum(search.weights[ci] for ci in search.incident[v]
                           if search._projection(ci, v, b) in search.forbidden[ci])
            assert search.score[v][b] == weighted
