"""
Threshold and Solution-Count Analysis
=====================================
Closed-form quantities for Model RB/RD:

    p_cr = 1 - exp(-alpha / r)          critical tightness
    r_cr = -alpha / ln(1 - p)           critical density
    ln E[N]   = n ln d + m ln(1 - p)    first moment, unforced
    ln E_f[N] = ln sum_a C(n,a) (d-1)^a q_a^m
        q_a = s_a + (1 - p)(1 - s_a),   s_a = C(n-a, k) / C(n, k)

E_f[N] is the expected solution count of a forced instance (a = number of
variables on which a solution differs from the forced one). It is exact
under RD independence and only an approximation for RB.

The distance profile gives the exponent of E^delta[N] / E_f^delta[N] per
n ln n:
    forced:    r ln(1 - p + p (1 - delta)^k) + alpha delta
    unforced:  r ln(1 - p) + alpha delta
"""

import math
import sys
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import NamedTuple

import numpy as np
from scipy.special import gammaln, logsumexp

sys.path.insert(0, str(Path(__file__).parent.parent))
from config.settings import EXACT_BINOMIAL_MAX_N
from src.core import InvalidArgumentError

_BOUNDARY_EPS = 1e-12
_GRID_SNAP = 1e-12


class ProfileVariant(str, Enum):
    FORCED = "FORCED"
    UNFORCED = "UNFORCED"


class Conditions(NamedTuple):
    arity_ok: bool
    alpha_ok: bool
    tightness_ok: bool

    @property
    def all(self):
        return self.arity_ok and self.alpha_ok and self.tightness_ok


@dataclass(frozen=True)
class ThresholdReport:
    p_cr: float
    r_cr: float
    conditions_thm1: Conditions
    conditions_thm2: Conditions
    k_exp_condition: bool


@dataclass(frozen=True)
class DistanceProfile:
    grid: tuple
    variant: ProfileVariant

    @property
    def deltas(self):
        return np.array([delta for delta, _ in self.grid])

    @property
    def exponents(self):
        return np.array([e for _, e in self.grid])

    def argmax(self):
        exps = self.exponents
        # last maximal point, so ties at the right endpoint report delta = 1
        idx = len(exps) - 1 - int(np.argmax(exps[::-1]))
        return float(self.deltas[idx])


def p_critical(alpha, r):
    if not alpha > 0 or not r > 0:
        raise InvalidArgumentError(f"alpha and r must be > 0, got alpha={alpha}, r={r}")
    return -math.expm1(-alpha / r)


def r_critical(alpha, p):
    if not alpha > 0 or not 0 < p < 1:
        raise InvalidArgumentError(f"need alpha > 0 and 0 < p < 1, got alpha={alpha}, p={p}")
    return -alpha / math.log1p(-p)


def check_conditions(params):
    """
    Evaluate the applicability conditions of both threshold theorems.

    The tightness condition of the p-threshold theorem,
    p_cr <= (k-1)/k, is checked against its equivalent form
    k * exp(-alpha/r) >= 1; the two must agree away from the boundary.
    """
    k, alpha, r, p = params.k, params.alpha, params.r, params.p
    p_cr = p_critical(alpha, r)
    bound = (k - 1) / k
    arity_ok = k >= 2
    alpha_ok = alpha > 1 / k

    thm1 = Conditions(arity_ok, alpha_ok, p <= bound)
    thm2 = Conditions(arity_ok, alpha_ok, p_cr <= bound)
    k_exp = k * math.exp(-alpha / r) >= 1
    if k_exp != thm2.tightness_ok and abs(p_cr - bound) > _BOUNDARY_EPS:
        raise AssertionError(
            f"p_cr <= (k-1)/k and k*exp(-alpha/r) >= 1 disagree for k={k}, alpha={alpha}, r={r}"
        )
    return ThresholdReport(
        p_cr=p_cr,
        r_cr=r_critical(alpha, p),
        conditions_thm1=thm1,
        conditions_thm2=thm2,
        k_exp_condition=k_exp,
    )


def log_comb(n, k):
    if k < 0 or k > n:
        return -math.inf
    if n <= EXACT_BINOMIAL_MAX_N:
        return math.log(math.comb(n, k))
    return float(gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1))


def scope_avoid_fraction(n, a, k):
    """C(n-a, k) / C(n, k): chance a random k-scope misses a given a variables."""
    if n - a < k:
        return 0.0
    if n <= EXACT_BINOMIAL_MAX_N:
        return math.comb(n - a, k) / math.comb(n, k)
    return math.exp(log_comb(n - a, k) - log_comb(n, k))


def expected_solutions(params, dims):
    """ln E[N] for an unforced instance with the given dims."""
    return params.n * math.log(dims.d) + dims.m * math.log1p(-params.p)


def forced_expected_solutions(params, dims):
    """ln E_f[N], summing the finite-n distance terms in log space."""
    n, k, p = params.n, params.k, params.p
    d, m = dims.d, dims.m
    terms = []
    for a in range(n + 1):
        if d == 1 and a:
            continue
        s = scope_avoid_fraction(n, a, k)
        log_q = math.log1p(-p * (1.0 - s))
        log_spread = a * math.log(d - 1) if a else 0.0
        terms.append(log_comb(n, a) + log_spread + m * log_q)
    return float(logsumexp(terms))


def forced_exponent(delta, params):
    k, p = params.k, params.p
    return params.r * math.log(1 - p + p * (1 - delta) ** k) + params.alpha * delta


def unforced_exponent(delta, params):
    return params.r * math.log1p(-params.p) + params.alpha * delta


def distance_profile(params, variant, grid_size):
    """
    Exponent of the expected solution count at distance delta.

    The grid is uniform on [0, 1]; once grid_size >= n + 1 it also holds
    every feasible distance a/n exactly.
    """
    if grid_size < 3:
        raise InvalidArgumentError(f"grid_size must be >= 3, got {grid_size}")
    variant = ProfileVariant(variant)
    exponent = forced_exponent if variant is ProfileVariant.FORCED else unforced_exponent
    deltas = np.linspace(0.0, 1.0, grid_size)
    if grid_size >= params.n + 1:
        feasible = np.arange(params.n + 1) / params.n
        near = np.isclose(deltas[:, None], feasible[None, :], rtol=0.0, atol=_GRID_SNAP).any(axis=1)
        deltas = np.sort(np.concatenate([feasible, deltas[~near]]))
    grid = tuple((float(delta), exponent(float(delta), params)) for delta in deltas)
    return DistanceProfile(grid=grid, variant=variant)


def feasible_profile(params, variant):
    """Profile on exactly the feasible distances a/n, a = 0..n."""
    return distance_profile(params, variant, params.n + 1)


def moment_gap(params, dims):
    """(ln E_f[N] - ln E[N]) / (n ln n); tends to 0 below the threshold."""
    n = params.n
    return (forced_expected_solutions(params, dims) - expected_solutions(params, dims)) / (n * math.log(n))
