"""Monte Carlo checks at desk scale. Deselect with -m "not slow"."""

import math
from dataclasses import replace

import numpy as np
import pytest

from src.analysis import expected_solutions, forced_expected_solutions, p_critical
from src.core import InstanceParams, Model, Status, satisfies
from src.experiments import (
    HardnessPoint,
    PointKind,
    SweepSpec,
    Vary,
    empirical_threshold,
    growth_exponent,
    hardness_growth,
    run_sweep,
    survival_experiment,
)
from src.generator import derive_sub_seeds, generate
from src.sat_encoder import encode_direct
from src.solver_mac import SearchConfig, brute_force, solve_mac
from src.solver_tabu import TabuConfig, solve_tabu
from test_sat_encoder import count_models

pytestmark = pytest.mark.slow

ORACLE_FAMILIES = [
    (2, 6, 0.8, 1.0, 0.3),
    (2, 8, 0.7, 1.5, 0.25),
    (2, 9, 0.6, 1.2, 0.3),
    (2, 10, 0.5, 1.0, 0.35),
    (3, 6, 0.8, 0.8, 0.4),
    (3, 8, 0.6, 1.0, 0.5),
]


def test_mac_and_tabu_agree_with_enumeration():
    checked = 0
    for i, (k, n, alpha, r, p) in enumerate(ORACLE_FAMILIES):
        for model in Model:
            for forced in (False, True):
                base = InstanceParams(k=k, n=n, alpha=alpha, r=r, p=p, model=model, forced=forced)
                for seed in derive_sub_seeds(i, 22, prefix=(int(forced), model == Model.RD)):
                    inst = generate(replace(base, seed=seed)).instance
                    status, count = brute_force(inst)
                    out = solve_mac(inst, SearchConfig(count_all=True))
                    assert (out.status, out.solutions) == (status, count)
                    tabu = solve_tabu(inst, TabuConfig(max_flips=2000, seed=seed))
                    if tabu.status is Status.SAT:
                        assert satisfies(inst, tabu.witness)
                    checked += 1
    assert checked >= 500


def test_forcing_guarantee_holds_everywhere():
    failures = 0
    grid = [(2, 10, 0.8, 1.0, 0.5), (2, 20, 0.8, 3.0, 0.3), (3, 12, 0.7, 1.0, 0.6), (2, 15, 1.0, 2.0, 0.9)]
    for i, (k, n, alpha, r, p) in enumerate(grid):
        for model in Model:
            base = InstanceParams(k=k, n=n, alpha=alpha, r=r, p=p, model=model, forced=True)
            for seed in derive_sub_seeds(100 + i, 1250, prefix=(model == Model.RD,)):
                gi = generate(replace(base, seed=seed))
                failures += not satisfies(gi.instance, gi.forced_solution)
    assert failures == 0


def test_phase_transition_at_desk_scale():
    base = InstanceParams(k=2, n=30, alpha=0.8, r=3.0, p=0.2341)
    grid = tuple(np.round(np.arange(0.15, 0.3201, 0.01), 4))
    records = run_sweep(SweepSpec(base=base, vary=Vary.P, values=grid, samples_per_point=50,
                                  master_seed=2005))
    points = np.array([r.point for r in records])
    sat = np.array([r.sat_fraction for r in records])
    cost = np.array([r.mean_cost for r in records])
    crossing = points[np.argmax(sat < 0.5)]
    assert abs(crossing - 0.2341) <= 0.05
    assert abs(points[np.argmax(cost)] - crossing) <= 0.05


def test_threshold_estimate_at_moderate_n():
    base = InstanceParams(k=2, n=30, alpha=0.8, r=3.0, p=0.2341)
    p_hat = empirical_threshold(base, samples=100, tolerance=0.01, master_seed=30)
    assert abs(p_hat - 0.2341) <= 0.05


def test_cost_grows_below_the_threshold():
    base = InstanceParams(k=2, n=20, alpha=0.8, r=1.5, p=0.4)
    frame = hardness_growth(base, [20, 25, 30], HardnessPoint(PointKind.BELOW, 0.01),
                            samples=50, master_seed=4)
    assert growth_exponent(frame, "forced_mean_cost") > 0
    assert growth_exponent(frame, "unforced_mean_cost") > 0
    assert ((frame["cost_ratio"] >= 0.25) & (frame["cost_ratio"] <= 4)).all()


def test_growth_exponent_falls_with_tightness():
    base = InstanceParams(k=2, n=20, alpha=0.8, r=1.5, p=0.45)
    exponents = []
    for p in (0.45, 0.55):
        frame = hardness_growth(base, [20, 25, 30], HardnessPoint(PointKind.ABOVE, p),
                                samples=30, master_seed=6)
        assert frame["unforced_mean_cost"].iloc[-1] > frame["unforced_mean_cost"].iloc[0]
        exponents.append(growth_exponent(frame, "unforced_mean_cost"))
    assert exponents[1] <= exponents[0]


def test_moment_predictions_match_monte_carlo():
    params = InstanceParams(k=2, n=6, alpha=1.0, r=10 / (6 * math.log(6)), p=0.2, model=Model.RD)
    for forced, predictor in ((True, forced_expected_solutions), (False, expected_solutions)):
        base = replace(params, forced=forced)
        counts = []
        for seed in derive_sub_seeds(8, 2000, prefix=(int(forced),)):
            gi = generate(replace(base, seed=seed))
            assert (gi.dims.d, gi.dims.m) == (6, 10)
            counts.append(brute_force(gi.instance)[1])
        counts = np.array(counts, dtype=float)
        stderr = counts.std(ddof=1) / math.sqrt(len(counts))
        expected = math.exp(predictor(base, gi.dims))
        assert abs(counts.mean() - expected) <= 3 * stderr


def test_encoding_preserves_solution_counts():
    base = InstanceParams(k=2, n=7, alpha=0.7, r=1.0, p=0.3)
    for i, seed in enumerate(derive_sub_seeds(10, 100)):
        params = replace(base, n=6 + i % 3, model=Model.RD if i % 2 else Model.RB, seed=seed)
        inst = generate(params).instance
        f = encode_direct(inst, amo=True)
        assert count_models(f.var_count, f.clauses) == brute_force(inst)[1]


def test_no_heavy_tail_at_the_threshold():
    base = InstanceParams(k=2, n=30, alpha=0.8, r=1.5, p=p_critical(0.8, 1.5))
    result = survival_experiment(base, runs=500, master_seed=45)
    s = result.curve["survival"].to_numpy()
    assert np.all(np.diff(s) <= 0)
    assert s[-1] == 0.0
    assert abs(result.tail_slope) > 1


def test_experiments_are_deterministic():
    base = InstanceParams(k=2, n=15, alpha=0.8, r=1.5, p=0.4)
    spec = SweepSpec(base=base, vary=Vary.P, values=(0.35, 0.4, 0.45), samples_per_point=10,
                     master_seed=12)
    assert run_sweep(spec) == run_sweep(spec)
    a = survival_experiment(base, runs=100, master_seed=1)
    b = survival_experiment(base, runs=100, master_seed=1)
    assert a.backtracks == b.backtracks
