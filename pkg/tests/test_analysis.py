import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.analysis import (
    ProfileVariant,
    check_conditions,
    distance_profile,
    expected_solutions,
    feasible_profile,
    forced_expected_solutions,
    log_comb,
    moment_gap,
    p_critical,
    r_critical,
)
from src.core import InstanceParams, InvalidArgumentError, Model
from src.generator import derive_dims


@pytest.mark.parametrize("alpha,r,expected", [
    (0.8, 3.0, 0.2341),
    (1.0, 1.0, 0.6321),
    (0.8, 1.5, 0.4134),
])
def test_golden_thresholds(alpha, r, expected):
    assert p_critical(alpha, r) == pytest.approx(expected, abs=1e-4)


def test_competition_threshold_is_a_quarter():
    assert p_critical(0.8, 0.8 / math.log(4 / 3)) == pytest.approx(0.25, abs=1e-12)


def test_threshold_arguments_are_validated():
    with pytest.raises(InvalidArgumentError):
        p_critical(0.0, 1.0)
    with pytest.raises(InvalidArgumentError):
        r_critical(0.8, 1.0)


@given(st.floats(0.05, 3.0), st.floats(0.05, 5.0))
def test_r_critical_inverts_p_critical(alpha, r):
    p = p_critical(alpha, r)
    if 1e-9 < p < 1 - 1e-9:
        assert r_critical(alpha, p) == pytest.approx(r, rel=1e-6)


@given(st.floats(0.05, 2.0), st.floats(0.05, 2.0), st.floats(0.1, 3.0))
def test_p_critical_monotonicity(a1, a2, r):
    lo, hi = sorted((a1, a2))
    assert p_critical(lo, r) <= p_critical(hi, r)
    assert p_critical(lo, r) >= p_critical(lo, r + 1.0)


def test_conditions_report():
    report = check_conditions(InstanceParams(k=2, n=30, alpha=0.8, r=3.0, p=0.3))
    assert report.conditions_thm1.all
    assert report.conditions_thm2.all
    assert report.k_exp_condition
    low_alpha = check_conditions(InstanceParams(k=2, n=30, alpha=0.4, r=3.0, p=0.3))
    assert not low_alpha.conditions_thm2.alpha_ok
    loose = check_conditions(InstanceParams(k=2, n=30, alpha=1.0, r=0.5, p=0.6))
    assert not loose.conditions_thm1.tightness_ok
    assert not loose.conditions_thm2.tightness_ok
    assert not loose.k_exp_condition


def test_log_comb_switches_to_gammaln_smoothly():
    assert log_comb(64, 20) == pytest.approx(math.log(math.comb(64, 20)))
    assert log_comb(65, 20) == pytest.approx(math.log(math.comb(65, 20)), rel=1e-10)
    assert log_comb(5, 7) == -math.inf


def test_first_moment_formula():
    params = InstanceParams(k=2, n=6, alpha=1.0, r=10 / (6 * math.log(6)), p=0.2, model=Model.RD)
    dims = derive_dims(params)
    assert (dims.d, dims.m) == (6, 10)
    assert expected_solutions(params, dims) == pytest.approx(6 * math.log(6) + 10 * math.log(0.8))


@pytest.mark.parametrize("n,alpha,r,p", [(6, 1.0, 1.0, 0.2), (20, 0.8, 1.5, 0.4), (80, 0.8, 3.0, 0.2)])
def test_forced_moment_dominates_unforced(n, alpha, r, p):
    params = InstanceParams(k=2, n=n, alpha=alpha, r=r, p=p)
    dims = derive_dims(params)
    assert forced_expected_solutions(params, dims) >= expected_solutions(params, dims) - 1e-9


def test_moment_gap_shrinks_with_n():
    gaps = []
    for n in (8, 10, 12):
        params = InstanceParams(k=2, n=n, alpha=1.0, r=2.0, p=0.8 * p_critical(1.0, 2.0))
        gaps.append(moment_gap(params, derive_dims(params)))
    assert gaps[0] > gaps[1] > gaps[2] > 0


def test_profile_shapes():
    params = InstanceParams(k=2, n=30, alpha=0.8, r=3.0, p=0.2)
    profile = distance_profile(params, ProfileVariant.FORCED, 11)
    assert len(profile.grid) == 11
    assert profile.deltas[0] == 0.0 and profile.deltas[-1] == 1.0
    assert profile.exponents[0] == pytest.approx(0.0, abs=1e-12)
    assert len(feasible_profile(params, "UNFORCED").grid) == 31
    with pytest.raises(InvalidArgumentError):
        distance_profile(params, ProfileVariant.FORCED, 2)


def test_dense_grid_holds_every_feasible_distance():
    params = InstanceParams(k=2, n=30, alpha=0.8, r=3.0, p=0.2)
    deltas = distance_profile(params, ProfileVariant.FORCED, 101).deltas
    assert all(a / 30 in set(deltas.tolist()) for a in range(31))
    assert np.all(np.diff(deltas) > 0)
    # i/100 and a/30 coincide at the 11 multiples of 0.1
    assert len(deltas) == 101 + 31 - 11
    coarse = distance_profile(params, ProfileVariant.FORCED, 30).deltas
    assert len(coarse) == 30


@settings(max_examples=40)
@given(st.sampled_from([2, 3]), st.floats(0.0, 1.0), st.floats(0.1, 1.0), st.floats(0.3, 0.95))
def test_sub_threshold_profiles_peak_at_full_distance(k, alpha_frac, p_frac, u):
    alpha = 1 / k + 0.01 + alpha_frac * (1.2 - 1 / k - 0.01)
    p = 0.1 + p_frac * ((k - 1) / k - 0.1 - 1e-3)
    r = u * r_critical(alpha, p)
    params = InstanceParams(k=k, n=30, alpha=alpha, r=r, p=p)
    for variant in ProfileVariant:
        assert distance_profile(params, variant, 101).argmax() == 1.0
