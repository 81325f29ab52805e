"""
Experiment Protocols
====================
Batch measurements over random RB/RD instances, emitted as CSV:

    run_sweep             sat fraction and cost per parameter value
    paired_sweep          forced and unforced batches side by side
    empirical_threshold   bisection on p for a 50% sat fraction
    threshold_gap_sweep   theoretical vs empirical threshold against alpha, r or n
    hardness_growth       cost against n at a fixed position relative to p_cr
    survival_experiment   runtime distribution of a randomized MAC on one instance
    competition_benchmark forced instances + DIMACS for the SAT-competition family

Seeding: every (point, batch, sample) draws its generator and solver seeds
from SeedSequence(master_seed, spawn_key=(point, forced, sample)), so
results do not depend on worker count or completion order. Rows are
sorted by (point, forced, sample) before aggregation.
"""

import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

import numpy as np
import pandas as pd
from scipy import stats

sys.path.insert(0, str(Path(__file__).parent.parent))
from config.settings import (
    DEFAULT_SAMPLES_PER_POINT,
    DEFAULT_SURVIVAL_RUNS,
    DEFAULT_THRESHOLD_TOLERANCE,
)
from src.aggregations import (
    aggregate_paired,
    aggregate_points,
    connect,
    runs_frame,
    save_runs_audit,
    sort_runs,
)
from src.analysis import p_critical
from src.core import InvalidArgumentError, Status, ThresholdBracketError
from src.generator import derive_sub_seeds, generate
from src.instance_io import metadata_comments, write_csv, write_dimacs, write_instance
from src.sat_encoder import encode_direct
from src.solver_mac import SearchConfig, solve_mac, survival_function, survival_runs
from src.solver_tabu import TabuConfig, solve_tabu

logger = logging.getLogger(__name__)

P_FLOOR = 0.005
P_CEIL = 0.995


class Vary(str, Enum):
    P = "P"
    N = "N"
    R = "R"
    ALPHA = "ALPHA"


class SolverKind(str, Enum):
    MAC = "MAC"
    TABU = "TABU"


class PointKind(str, Enum):
    THRESHOLD = "THRESHOLD"
    BELOW = "BELOW"
    ABOVE = "ABOVE"


@dataclass(frozen=True)
class HardnessPoint:
    """Where to put p: at p_cr, at p_cr - epsilon, or at a fixed p above p_cr."""

    kind: PointKind
    value: float = 0.0

    def tightness(self, alpha, r):
        p_cr = p_critical(alpha, r)
        kind = PointKind(self.kind)
        if kind is PointKind.THRESHOLD:
            return p_cr
        if kind is PointKind.BELOW:
            return p_cr - self.value
        if self.value <= p_cr:
            raise InvalidArgumentError(f"ABOVE needs p > p_cr = {p_cr:.6g}, got {self.value}")
        return self.value


@dataclass(frozen=True)
class SweepSpec:
    base: object
    vary: Vary
    values: tuple
    samples_per_point: int = DEFAULT_SAMPLES_PER_POINT
    solver: SolverKind = SolverKind.MAC
    master_seed: int = 0
    filter_unsat: bool = False
    mac_config: SearchConfig = field(default_factory=SearchConfig)
    tabu_config: TabuConfig = field(default_factory=TabuConfig)

    def __post_init__(self):
        object.__setattr__(self, "vary", Vary(self.vary))
        object.__setattr__(self, "solver", SolverKind(self.solver))
        object.__setattr__(self, "values", tuple(self.values))
        if not self.values:
            raise InvalidArgumentError("sweep needs at least one value")
        if list(self.values) != sorted(self.values):
            raise InvalidArgumentError("sweep values must be sorted")
        if self.samples_per_point < 1:
            raise InvalidArgumentError(f"samples_per_point must be >= 1, got {self.samples_per_point}")


@dataclass(frozen=True)
class SweepRecord:
    point: float
    samples: int
    filtered: int
    sat_fraction: float
    mean_cost: float
    median_cost: float
    mean_nodes: float
    timeouts: int


@dataclass(frozen=True)
class SurvivalResult:
    curve: pd.DataFrame
    tail_slope: float
    backtracks: list
    generated: object


def vary_params(base, vary, value):
    vary = Vary(vary)
    if vary is Vary.P:
        return replace(base, p=float(value))
    if vary is Vary.N:
        return replace(base, n=int(value))
    if vary is Vary.R:
        return replace(base, r=float(value))
    return replace(base, alpha=float(value))


def _run_one(job):
    """Generate and solve one sample; returns a raw run row."""
    (point, sample, params, solver, mac_config, tabu_config, filter_unsat) = job
    gen_seed, solve_seed = derive_sub_seeds(params.seed, 2, prefix=(point, int(params.forced), sample))
    gi = generate(replace(params, seed=gen_seed))
    inst = gi.instance

    if solver is SolverKind.MAC:
        out = solve_mac(inst, replace(mac_config, tie_seed=solve_seed))
        return (point, sample, params.forced, out.status.value, out.nodes, out.backtracks,
                0, out.elapsed, True)

    if filter_unsat:
        screen = solve_mac(inst, mac_config)
        if screen.status is not Status.SAT:
            return (point, sample, params.forced, screen.status.value, 0, 0, 0, 0.0, False)
    out = solve_tabu(inst, replace(tabu_config, seed=solve_seed))
    return (point, sample, params.forced, out.status.value, 0, 0, out.flips, out.elapsed, True)


def _execute(jobs, workers):
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_one, jobs, chunksize=4))
    return [_run_one(job) for job in jobs]


def collect_runs(points, samples, master_seed, solver=SolverKind.MAC, mac_config=None,
                 tabu_config=None, filter_unsat=False, workers=1):
    """
    Raw runs for a list of (point_value, params) pairs.

    ``params.seed`` is ignored; seeds come from ``master_seed``.
    """
    mac_config = mac_config or SearchConfig()
    tabu_config = tabu_config or TabuConfig()
    solver = SolverKind(solver)
    jobs = []
    for idx, (_, params) in enumerate(points):
        seeded = replace(params, seed=master_seed)
        for sample in range(samples):
            jobs.append((idx, sample, seeded, solver, mac_config, tabu_config, filter_unsat))
    logger.info("running %d samples over %d points with %s", len(jobs), len(points), solver.value)
    rows = _execute(jobs, workers)
    frame = runs_frame(rows)
    frame["point"] = frame["point"].map(lambda idx: points[idx][0])
    return frame


def records_from_frame(frame):
    records = []
    for row in frame.itertuples(index=False):
        records.append(SweepRecord(
            point=float(row.point),
            samples=int(row.samples),
            filtered=int(row.filtered),
            sat_fraction=float(row.sat_fraction),
            mean_cost=float(row.mean_cost) if pd.notna(row.mean_cost) else math.nan,
            median_cost=float(row.median_cost) if pd.notna(row.median_cost) else math.nan,
            mean_nodes=float(row.mean_nodes) if pd.notna(row.mean_nodes) else math.nan,
            timeouts=int(row.timeouts),
        ))
    return records


def sweep_frame(records):
    return pd.DataFrame([r.__dict__ for r in records],
                        columns=["point", "samples", "filtered", "sat_fraction", "mean_cost",
                                 "median_cost", "mean_nodes", "timeouts"])


def _sweep_points(spec):
    return [(value, vary_params(spec.base, spec.vary, value)) for value in spec.values]


def run_sweep(spec, workers=1, csv_path=None, audit_path=None):
    """
    Generate, solve and aggregate ``spec.samples_per_point`` instances per value.

    Timeouts never abort the sweep; they are counted per point.
    """
    runs = collect_runs(_sweep_points(spec), spec.samples_per_point, spec.master_seed,
                        spec.solver, spec.mac_config, spec.tabu_config, spec.filter_unsat, workers)
    con = connect()
    try:
        aggregated = aggregate_points(con, runs, spec.solver.value)
        if audit_path is not None:
            save_runs_audit(con, runs, audit_path)
    finally:
        con.close()
    records = records_from_frame(aggregated)
    if csv_path is not None:
        write_csv(sweep_frame(records), csv_path)
    return records


def paired_sweep(spec, workers=1, csv_path=None):
    """Forced and unforced batches at every value; one row per value."""
    points = _sweep_points(spec)
    frames = []
    for forced in (True, False):
        forced_points = [(value, replace(params, forced=forced)) for value, params in points]
        frames.append(collect_runs(forced_points, spec.samples_per_point, spec.master_seed,
                                   spec.solver, spec.mac_config, spec.tabu_config,
                                   spec.filter_unsat, workers))
    runs = sort_runs(pd.concat(frames, ignore_index=True))
    con = connect()
    try:
        paired = aggregate_paired(con, runs, spec.solver.value)
    finally:
        con.close()
    if csv_path is not None:
        write_csv(paired, csv_path)
    return paired


def _sat_fraction(base, p, seeds, mac_config):
    sat = 0
    for seed in seeds:
        gi = generate(replace(base, p=p, seed=seed))
        if solve_mac(gi.instance, mac_config).status is Status.SAT:
            sat += 1
    return sat / len(seeds)


def empirical_threshold(base, samples, tolerance=DEFAULT_THRESHOLD_TOLERANCE, master_seed=0,
                        lo=None, hi=None, mac_config=None):
    """
    Bisect p for a sat fraction of one half.

    The same instance seeds are reused at every p. An interval that does
    not bracket the crossing is widened once by its own width.

    Raises:
        ThresholdBracketError: still no bracket after widening
    """
    if base.forced:
        raise InvalidArgumentError("empirical thresholds are measured on unforced instances")
    if not tolerance > 0:
        raise InvalidArgumentError(f"tolerance must be > 0, got {tolerance}")
    mac_config = mac_config or SearchConfig()
    seeds = derive_sub_seeds(master_seed, samples)
    p_cr = p_critical(base.alpha, base.r)
    lo = max(P_FLOOR, p_cr - 0.15) if lo is None else lo
    hi = min(P_CEIL, p_cr + 0.15) if hi is None else hi
    cache = {}

    def fraction(p):
        if p not in cache:
            cache[p] = _sat_fraction(base, p, seeds, mac_config)
            logger.debug("p=%.6g sat_fraction=%.3f", p, cache[p])
        return cache[p]

    def brackets(a, b):
        return fraction(a) >= 0.5 > fraction(b)

    if not brackets(lo, hi):
        width = hi - lo
        lo, hi = max(P_FLOOR, lo - width), min(P_CEIL, hi + width)
        logger.info("widening threshold interval to [%.4g, %.4g]", lo, hi)
        if not brackets(lo, hi):
            raise ThresholdBracketError(
                f"sat fraction does not cross 0.5 on [{lo:.4g}, {hi:.4g}] "
                f"({fraction(lo):.2f} .. {fraction(hi):.2f})"
            )
    while hi - lo > tolerance:
        mid = (lo + hi) / 2
        if fraction(mid) >= 0.5:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def threshold_gap_sweep(base, vary, values, samples, tolerance=DEFAULT_THRESHOLD_TOLERANCE,
                        master_seed=0, mac_config=None, csv_path=None):
    """Theoretical minus empirical threshold for each value of alpha, r or n."""
    vary = Vary(vary)
    if vary is Vary.P:
        raise InvalidArgumentError("threshold gaps vary alpha, r or n, not p")
    rows = []
    seeds = derive_sub_seeds(master_seed, len(values))
    for value, seed in zip(values, seeds):
        params = vary_params(base, vary, value)
        p_theory = p_critical(params.alpha, params.r)
        p_hat = empirical_threshold(params, samples, tolerance, seed, mac_config=mac_config)
        rows.append({"value": value, "p_theory": p_theory, "p_empirical": p_hat,
                     "difference": p_hat - p_theory})
        logger.info("%s=%s p_cr=%.4f p_hat=%.4f", vary.value.lower(), value, p_theory, p_hat)
    frame = pd.DataFrame(rows, columns=["value", "p_theory", "p_empirical", "difference"])
    if csv_path is not None:
        write_csv(frame, csv_path)
    return frame


def hardness_growth(base, n_values, at, samples=DEFAULT_SAMPLES_PER_POINT, master_seed=0,
                    solver=SolverKind.MAC, mac_config=None, tabu_config=None, workers=1,
                    csv_path=None):
    """
    Mean and median cost of forced and unforced batches for each n.

    Columns: n, p, forced_/unforced_ mean_cost, median_cost, sat_fraction,
    timeouts, and cost_ratio = forced_mean_cost / unforced_mean_cost.
    """
    n_values = [int(n) for n in n_values]
    if any(b <= a for a, b in zip(n_values, n_values[1:])):
        raise InvalidArgumentError("n_values must be strictly increasing")
    p = at.tightness(base.alpha, base.r)
    if not 0 < p < 1:
        raise InvalidArgumentError(f"chosen tightness {p} is outside (0, 1)")
    spec = SweepSpec(base=replace(base, p=p), vary=Vary.N, values=tuple(n_values),
                     samples_per_point=samples, solver=solver, master_seed=master_seed,
                     filter_unsat=False, mac_config=mac_config or SearchConfig(),
                     tabu_config=tabu_config or TabuConfig())
    paired = paired_sweep(spec, workers=workers)
    paired = paired.rename(columns={"point": "n"})
    paired.insert(1, "p", p)
    paired["cost_ratio"] = paired["forced_mean_cost"] / paired["unforced_mean_cost"]
    if csv_path is not None:
        write_csv(paired, csv_path)
    return paired


def growth_exponent(frame, column, x="n"):
    """Slope of ln(1 + cost) against ``x``; ln(1 + .) keeps zero costs finite."""
    data = frame[[x, column]].dropna()
    if len(data) < 2:
        return math.nan
    fit = stats.linregress(data[x].astype(float), np.log1p(data[column].astype(float)))
    return float(fit.slope)


def survival_curve(counts):
    xs = np.unique(np.asarray(counts))
    return pd.DataFrame({"x": xs, "survival": survival_function(counts, xs)})


def tail_slope(curve):
    """
    Slope of log10 S(x) against log10 x over the top decade of x.

    Falls back to every positive point when the top decade holds fewer
    than two usable points.
    """
    usable = curve[(curve["x"] > 0) & (curve["survival"] > 0)]
    if usable.empty:
        return math.nan
    top = usable[usable["x"] >= usable["x"].max() / 10]
    if len(top) < 2:
        top = usable
    if len(top) < 2 or top["x"].nunique() < 2:
        return math.nan
    fit = stats.linregress(np.log10(top["x"].astype(float)), np.log10(top["survival"]))
    return float(fit.slope)


def survival_experiment(base, runs=DEFAULT_SURVIVAL_RUNS, master_seed=0, mac_config=None,
                        workers=1, csv_path=None):
    """Survival function of randomized MAC runs on one generated instance."""
    if runs < 100:
        raise InvalidArgumentError(f"survival experiments need >= 100 runs, got {runs}")
    gen_seed, tie_seed = derive_sub_seeds(master_seed, 2)
    gi = generate(replace(base, seed=gen_seed))
    cfg = replace(mac_config or SearchConfig(), randomized=True, tie_seed=tie_seed)
    counts = survival_runs(gi.instance, runs, cfg, workers=workers)
    curve = survival_curve(counts)
    slope = tail_slope(curve)
    logger.info("survival: %d runs, max backtracks %d, tail slope %.3f", runs, max(counts), slope)
    if csv_path is not None:
        write_csv(curve, csv_path)
    return SurvivalResult(curve=curve, tail_slope=slope, backtracks=counts, generated=gi)


def competition_benchmark(base, n_values, master_seed, out_dir, amo=True):
    """
    Forced instances of ``base`` for each n, written as instance and DIMACS files.

    Returns a frame listing n, d, m, clause count and both paths.
    """
    out_dir = Path(out_dir)
    rows = []
    seeds = derive_sub_seeds(master_seed, len(n_values))
    for n, seed in zip(n_values, seeds):
        gi = generate(replace(base, n=int(n), forced=True, seed=seed))
        stem = f"rb-k{base.k}-n{n}-d{gi.dims.d}-m{gi.dims.m}-forced"
        formula = encode_direct(gi.instance, amo=amo, comments=metadata_comments(gi))
        rows.append({
            "n": n,
            "d": gi.dims.d,
            "m": gi.dims.m,
            "clauses": formula.clause_count,
            "instance_path": write_instance(gi, out_dir / f"{stem}.rbcsp"),
            "dimacs_path": write_dimacs(formula, out_dir / f"{stem}.cnf"),
        })
    return pd.DataFrame(rows, columns=["n", "d", "m", "clauses", "instance_path", "dimacs_path"])
