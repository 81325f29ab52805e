"""
RB/RD Random CSP Toolkit
========================
Command-line entry point and reproduction pipeline for random constraint
satisfaction instances under Model RB and Model RD.

Subcommands:
    gen        generate one instance (unforced or forced) and write it
    solve      solve an instance file with MAC or tabu search
    analyze    threshold report, moment estimates and distance profiles
    encode     direct encoding of an instance file to DIMACS CNF
    sweep      sat fraction and search cost across a parameter grid
    threshold  empirical vs theoretical threshold
    growth     forced/unforced cost against n near or above the threshold
    survival   runtime distribution of randomized MAC on one instance
    benchmark  forced instances + CNF for the SAT-competition family
    reproduce  run every desk-scale experiment and write report_data.json

A versioned config file (``--config``, ``key = value`` lines with
``version = 1``) supplies defaults for any flag; explicit flags win.

Exit codes: solve returns 10 (SAT), 20 (UNSAT) or 30 (TIMEOUT); any
library error returns 2.
"""

import argparse
import json
import logging
import sys
from dataclasses import replace
from datetime import datetime
from pathlib import Path

# Add parent directory to path for module imports
sys.path.insert(0, str(Path(__file__).parent))

from config import presets
from config.settings import (
    BENCHMARK_DIR,
    DEFAULT_MASTER_SEED,
    DEFAULT_MAX_FLIPS,
    DEFAULT_PROFILE_GRID,
    DEFAULT_SAMPLES_PER_POINT,
    DEFAULT_SURVIVAL_RUNS,
    DEFAULT_TABU_RESTARTS,
    DEFAULT_TABU_TENURE,
    DEFAULT_THRESHOLD_SAMPLES,
    DEFAULT_THRESHOLD_TOLERANCE,
    EXIT_ERROR,
    EXIT_SAT,
    EXIT_TIMEOUT,
    EXIT_UNSAT,
    OUTPUT_DIR,
    ensure_dirs,
    load_config_file,
)
from src.analysis import (
    ProfileVariant,
    check_conditions,
    distance_profile,
    expected_solutions,
    forced_expected_solutions,
    moment_gap,
)
from src.core import ConfigError, InstanceParams, InvalidArgumentError, Model, RBCSPError, Status
from src.experiments import (
    HardnessPoint,
    PointKind,
    SolverKind,
    SweepSpec,
    Vary,
    competition_benchmark,
    empirical_threshold,
    growth_exponent,
    hardness_growth,
    paired_sweep,
    run_sweep,
    survival_experiment,
    sweep_frame,
    threshold_gap_sweep,
)
from src.generator import derive_dims, derive_sub_seeds, generate
from src.instance_io import (
    csv_text,
    instance_lines,
    metadata_comments,
    read_instance,
    write_assignment,
    write_csv,
    write_dimacs,
    write_instance,
)
from src.sat_encoder import encode_direct
from src.solver_mac import SearchConfig, solve_mac
from src.solver_tabu import TabuConfig, solve_tabu

logger = logging.getLogger("rbcsp")

EXIT_CODES = {Status.SAT: EXIT_SAT, Status.UNSAT: EXIT_UNSAT, Status.TIMEOUT: EXIT_TIMEOUT}
TRUE_WORDS = {"1", "true", "yes", "on"}
FALSE_WORDS = {"0", "false", "no", "off"}


class ReproductionPipeline:
    """
    Desk-scale reproduction of every measurement in the RB/RD study.

    Each step prints a banner, writes its CSVs under ``results_dir`` and
    stores a JSON-friendly summary in ``self.results``. Every step draws
    its own master seed from ``master_seed``, so steps can be run alone.

    Attributes:
        results: step name -> summary, serialized by generate_report_data
    """

    STEPS = 8

    def __init__(self, master_seed=DEFAULT_MASTER_SEED, samples=DEFAULT_SAMPLES_PER_POINT,
                 threshold_samples=DEFAULT_THRESHOLD_SAMPLES, survival_runs=DEFAULT_SURVIVAL_RUNS,
                 workers=1, output_dir=OUTPUT_DIR, mac_config=None, tabu_config=None):
        self.master_seed = master_seed
        self.samples = samples
        self.threshold_samples = threshold_samples
        self.survival_runs = survival_runs
        self.workers = workers
        self.output_dir = Path(output_dir)
        self.results_dir = self.output_dir / "results"
        self.mac_config = mac_config or SearchConfig()
        self.tabu_config = tabu_config or TabuConfig()
        self.step_seeds = derive_sub_seeds(master_seed, self.STEPS)
        self.results = {}

    def _banner(self, title):
        print("=" * 60)
        print(title)
        print("=" * 60)

    def _csv(self, frame, name):
        path = write_csv(frame, self.results_dir / name)
        print(f"Saved: {path}")
        return path

    def step_1_golden_values(self):
        """
        STEP 1: Closed-form thresholds and dimensions

        Checks p_cr against the published thresholds and derive_dims
        against the published (d, m) of the competition family.

        Returns:
            dict: {'thresholds': [...], 'dimensions': [...]}
        """
        self._banner("STEP 1: Golden Thresholds and Dimensions")
        thresholds = []
        for (alpha, r), expected in presets.GOLDEN_THRESHOLDS.items():
            report = check_conditions(InstanceParams(k=2, n=10, alpha=alpha, r=r, p=0.5))
            thresholds.append({"alpha": alpha, "r": r, "p_cr": report.p_cr, "expected": expected})
            print(f"  alpha={alpha:.4g} r={r:.4g}: p_cr={report.p_cr:.4f} (expected {expected})")
        dimensions = []
        for n, (d, m) in presets.GOLDEN_DIMENSIONS.items():
            dims = derive_dims(InstanceParams(**{**presets.COMPETITION, "n": n}))
            dimensions.append({"n": n, "d": dims.d, "m": dims.m, "expected": [d, m]})
            print(f"  n={n}: d={dims.d} m={dims.m} (expected d={d} m={m})")
        self.results["golden"] = {"thresholds": thresholds, "dimensions": dimensions}
        return self.results["golden"]

    def step_2_threshold_differences(self):
        """
        STEP 2: Theoretical vs experimental thresholds

        Bisects the 50% satisfiability point while varying alpha, r and n
        in turn; one CSV per varied parameter.
        """
        self._banner("STEP 2: Threshold Differences")
        base = InstanceParams(**presets.THRESHOLD_GAP)
        seeds = derive_sub_seeds(self.step_seeds[1], 3)
        sweeps = [(Vary.ALPHA, presets.THRESHOLD_GAP_ALPHAS),
                  (Vary.R, presets.THRESHOLD_GAP_RS),
                  (Vary.N, presets.THRESHOLD_GAP_NS)]
        summary = {}
        for (vary, values), seed in zip(sweeps, seeds):
            frame = threshold_gap_sweep(base, vary, values, self.threshold_samples,
                                        DEFAULT_THRESHOLD_TOLERANCE, seed, self.mac_config)
            self._csv(frame, f"threshold_gap_{vary.value.lower()}.csv")
            print(frame.to_string(index=False))
            summary[vary.value.lower()] = frame.to_dict(orient="list")
        self.results["threshold_differences"] = summary
        return summary

    def step_3_phase_transitions(self):
        """
        STEP 3: Binary and ternary phase transitions

        Sat fraction and mean MAC backtracks across a tightness grid
        straddling p_cr, for forced and unforced batches, at two sizes
        per family.
        """
        self._banner("STEP 3: Phase Transitions")
        summary = {}
        families = [
            ("binary", presets.BINARY_TRANSITION, presets.BINARY_P_GRID, presets.BINARY_TRANSITION_N_VALUES),
            ("ternary", presets.TERNARY_TRANSITION, presets.TERNARY_P_GRID, presets.TERNARY_TRANSITION_N_VALUES),
        ]
        for (name, base, grid, n_values), family_seed in zip(families, derive_sub_seeds(self.step_seeds[2], 2)):
            family = {}
            for n, seed in zip(n_values, derive_sub_seeds(family_seed, len(n_values))):
                params = InstanceParams(**{**base, "n": n})
                spec = SweepSpec(base=params, vary=Vary.P, values=tuple(grid),
                                 samples_per_point=self.samples, solver=SolverKind.MAC,
                                 master_seed=seed, mac_config=self.mac_config)
                tag = f"{name}_n{n}"
                unforced = sweep_frame(run_sweep(spec, workers=self.workers,
                                                 audit_path=self.output_dir / "audit_log" / f"{tag}_runs.parquet"))
                self._csv(unforced, f"transition_{tag}.csv")
                paired = paired_sweep(spec, workers=self.workers)
                self._csv(paired, f"transition_{tag}_paired.csv")
                peak = unforced.loc[unforced["mean_cost"].idxmax()]
                print(f"  {name} n={n}: p_cr={check_conditions(params).p_cr:.4f}, "
                      f"hardest p={peak['point']:.4f}, peak backtracks={peak['mean_cost']:.1f}")
                family[n] = {"hardest_p": float(peak["point"]), "peak_mean_cost": float(peak["mean_cost"]),
                             "sweep": unforced.to_dict(orient="list")}
            summary[name] = {"p_cr": check_conditions(InstanceParams(**base)).p_cr, "by_n": family}
        self.results["phase_transitions"] = summary
        return summary

    def step_4_growth_below_threshold(self):
        """
        STEP 4: Forced vs unforced cost just below the threshold

        Fits ln(1 + mean backtracks) against n for both batches.
        """
        self._banner("STEP 4: Growth Below the Threshold")
        base = InstanceParams(**presets.BELOW_THRESHOLD_GROWTH)
        at = HardnessPoint(PointKind.BELOW, presets.BELOW_THRESHOLD_EPSILON)
        frame = hardness_growth(base, presets.GROWTH_N_VALUES, at, self.samples,
                                self.step_seeds[3], mac_config=self.mac_config,
                                workers=self.workers)
        self._csv(frame, "growth_below_threshold.csv")
        print(frame.to_string(index=False))
        summary = {
            "forced_exponent": growth_exponent(frame, "forced_mean_cost"),
            "unforced_exponent": growth_exponent(frame, "unforced_mean_cost"),
            "cost_ratio": frame["cost_ratio"].tolist(),
        }
        print(f"  exponents: forced={summary['forced_exponent']:.4f} "
              f"unforced={summary['unforced_exponent']:.4f}")
        self.results["growth_below_threshold"] = summary
        return summary

    def step_5_survival(self):
        """
        STEP 5: Runtime distribution at the threshold

        Survival function of randomized MAC backtracks on one instance and
        the log-log slope of its top decade.
        """
        self._banner("STEP 5: Survival Function")
        base = InstanceParams(**presets.HEAVY_TAIL)
        result = survival_experiment(base, self.survival_runs, self.step_seeds[4],
                                     self.mac_config, self.workers)
        self._csv(result.curve, "survival.csv")
        print(f"  runs={self.survival_runs} max backtracks={max(result.backtracks)} "
              f"tail slope={result.tail_slope:.3f}")
        summary = {"runs": self.survival_runs, "tail_slope": result.tail_slope,
                   "max_backtracks": int(max(result.backtracks))}
        self.results["survival"] = summary
        return summary

    def step_6_growth_above_threshold(self):
        """
        STEP 6: Cost growth above the threshold for two tightness values
        """
        self._banner("STEP 6: Growth Above the Threshold")
        base = InstanceParams(**presets.ABOVE_THRESHOLD_GROWTH)
        summary = {}
        seeds = derive_sub_seeds(self.step_seeds[5], len(presets.ABOVE_THRESHOLD_TIGHTNESS))
        for p, seed in zip(presets.ABOVE_THRESHOLD_TIGHTNESS, seeds):
            at = HardnessPoint(PointKind.ABOVE, p)
            frame = hardness_growth(base, presets.GROWTH_N_VALUES, at, self.samples, seed,
                                    mac_config=self.mac_config, workers=self.workers)
            self._csv(frame, f"growth_above_p{p:g}.csv")
            summary[f"{p:g}"] = {
                "unforced_exponent": growth_exponent(frame, "unforced_mean_cost"),
                "forced_exponent": growth_exponent(frame, "forced_mean_cost"),
            }
            print(f"  p={p:g}: unforced exponent={summary[f'{p:g}']['unforced_exponent']:.4f}")
        self.results["growth_above_threshold"] = summary
        return summary

    def step_7_tabu_medians(self):
        """
        STEP 7: Median tabu flips on forced and unforced instances

        Unforced instances the complete solver cannot verify as SAT are
        filtered out first.
        """
        self._banner("STEP 7: Tabu Median Cost")
        base = InstanceParams(**presets.BINARY_TRANSITION)
        spec = SweepSpec(base=base, vary=Vary.P, values=tuple(presets.BINARY_P_GRID[:6]),
                         samples_per_point=self.samples, solver=SolverKind.TABU,
                         master_seed=self.step_seeds[6], filter_unsat=True,
                         mac_config=self.mac_config, tabu_config=self.tabu_config)
        frame = paired_sweep(spec, workers=self.workers)
        self._csv(frame, "tabu_median_flips.csv")
        print(frame[["point", "forced_median_cost", "unforced_median_cost"]].to_string(index=False))
        self.results["tabu_medians"] = frame.to_dict(orient="list")
        return self.results["tabu_medians"]

    def step_8_competition_encoding(self):
        """
        STEP 8: SAT-competition family

        Forced instances for n = 40..59 with their direct CNF encodings.
        """
        self._banner("STEP 8: Competition Encoding")
        base = InstanceParams(**presets.COMPETITION)
        frame = competition_benchmark(base, presets.COMPETITION_N_VALUES, self.step_seeds[7],
                                      self.output_dir / "benchmark")
        self._csv(frame, "benchmark_manifest.csv")
        print(f"  wrote {len(frame)} instances, {int(frame['clauses'].sum()):,} clauses in total")
        self.results["competition"] = frame[["n", "d", "m", "clauses"]].to_dict(orient="list")
        return self.results["competition"]

    def generate_report_data(self):
        """
        Write every step summary to ``report_data.json``.

        Returns:
            dict: the report, JSON-serializable
        """
        self._banner("Generating Report Data")
        report = {
            "generated_at": datetime.now().isoformat(),
            "master_seed": self.master_seed,
            "samples_per_point": self.samples,
            **self.results,
        }
        path = self.output_dir / "report_data.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(report, f, indent=2, default=str)
        print(f"Report data saved to: {path}")
        return report

    def run_full_pipeline(self, steps=None):
        """
        Run the selected steps (all by default) and write the report.

        Args:
            steps: iterable of step numbers 1..8, or None for all
        """
        print("\n" + "=" * 60)
        print("RB/RD REPRODUCTION PIPELINE")
        print("=" * 60 + "\n")
        ordered = [
            self.step_1_golden_values,
            self.step_2_threshold_differences,
            self.step_3_phase_transitions,
            self.step_4_growth_below_threshold,
            self.step_5_survival,
            self.step_6_growth_above_threshold,
            self.step_7_tabu_medians,
            self.step_8_competition_encoding,
        ]
        wanted = set(steps) if steps else set(range(1, self.STEPS + 1))
        for number, step in enumerate(ordered, start=1):
            if number in wanted:
                step()
        self.generate_report_data()
        print("\n" + "=" * 60)
        print("PIPELINE COMPLETE")
        print("=" * 60)
        print(f"\nResults saved to: {self.results_dir}")
        return self.results


def _float_list(text):
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _int_list(text):
    return [int(tok) for tok in text.split(",") if tok.strip()]


def _add_params(parser, p_required=True):
    group = parser.add_argument_group("instance parameters")
    group.add_argument("--k", type=int, default=2)
    group.add_argument("--n", type=int, default=30)
    group.add_argument("--alpha", type=float, default=0.8)
    group.add_argument("--r", type=float, default=3.0)
    group.add_argument("--p", type=float, default=None if p_required else 0.5)
    group.add_argument("--model", choices=[m.value for m in Model], default=Model.RB.value)
    group.add_argument("--forced", action="store_true")
    group.add_argument("--seed", type=int, default=0)


def _add_mac_limits(parser):
    group = parser.add_argument_group("MAC limits")
    group.add_argument("--node-limit", type=int, default=None)
    group.add_argument("--backtrack-limit", type=int, default=None)
    group.add_argument("--time-limit", type=float, default=None)


def _add_tabu_options(parser):
    group = parser.add_argument_group("tabu search")
    group.add_argument("--max-flips", type=int, default=DEFAULT_MAX_FLIPS)
    group.add_argument("--tenure", type=int, default=DEFAULT_TABU_TENURE)
    group.add_argument("--restarts", type=int, default=DEFAULT_TABU_RESTARTS)
    group.add_argument("--no-weights", action="store_true")


def _add_experiment_options(parser):
    parser.add_argument("--master-seed", type=int, default=DEFAULT_MASTER_SEED)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--out", default=None, help="CSV output path (stdout when omitted)")


def _params(args, p=None):
    p = args.p if p is None else p
    if p is None:
        p = check_conditions(InstanceParams(k=args.k, n=args.n, alpha=args.alpha, r=args.r,
                                            p=0.5)).p_cr
        logger.info("no --p given; using p_cr = %.6g", p)
    return InstanceParams(k=args.k, n=args.n, alpha=args.alpha, r=args.r, p=p,
                          model=Model(args.model), forced=args.forced, seed=args.seed)


def _mac_config(args, **extra):
    return SearchConfig(node_limit=args.node_limit, backtrack_limit=args.backtrack_limit,
                        time_limit=args.time_limit, **extra)


def _tabu_config(args, seed=0):
    return TabuConfig(max_flips=args.max_flips, tabu_tenure=args.tenure, restarts=args.restarts,
                      seed=seed, weight_learning=not args.no_weights,
                      time_limit=getattr(args, "time_limit", None))


def _emit(frame, out):
    if out:
        print(f"Saved: {write_csv(frame, out)}")
    else:
        sys.stdout.write(csv_text(frame))


def cmd_gen(args):
    gi = generate(_params(args))
    if args.out:
        print(f"Saved: {write_instance(gi, args.out)}")
    else:
        sys.stdout.write("\n".join(instance_lines(gi)) + "\n")
    return 0


def cmd_solve(args):
    gi = read_instance(args.instance)
    if args.method == "tabu":
        outcome = solve_tabu(gi.instance, _tabu_config(args, seed=args.tie_seed))
    else:
        cfg = _mac_config(args, randomized=args.randomized, tie_seed=args.tie_seed,
                          count_all=args.count_all)
        outcome = solve_mac(gi.instance, cfg)

    verdicts = {Status.SAT: "SATISFIABLE", Status.UNSAT: "UNSATISFIABLE", Status.TIMEOUT: "UNKNOWN"}
    print(f"s {verdicts[outcome.status]}")
    if outcome.witness is not None:
        print("v " + " ".join(map(str, outcome.witness.values)))
        if args.witness_out:
            write_assignment(outcome.witness, args.witness_out)
    print(f"c nodes {outcome.nodes} backtracks {outcome.backtracks} flips {outcome.flips} "
          f"elapsed {outcome.elapsed:.3f}")
    if outcome.solutions is not None:
        print(f"c solutions {outcome.solutions}")
    return EXIT_CODES[outcome.status]


def cmd_analyze(args):
    params = _params(args)
    dims = derive_dims(params)
    report = check_conditions(params)
    print(f"# d={dims.d} m={dims.m}")
    print(f"# p_cr={report.p_cr:.6g} r_cr={report.r_cr:.6g}")
    print(f"# p-threshold conditions: {report.conditions_thm1._asdict()} all={report.conditions_thm1.all}")
    print(f"# r-threshold conditions: {report.conditions_thm2._asdict()} all={report.conditions_thm2.all}")
    print(f"# k*exp(-alpha/r) >= 1: {report.k_exp_condition}")
    print(f"# ln E[N]={expected_solutions(params, dims):.6g} "
          f"ln E_f[N]={forced_expected_solutions(params, dims):.6g} "
          f"gap={moment_gap(params, dims):.6g}")
    if args.profile:
        import pandas as pd

        profile = distance_profile(params, ProfileVariant(args.profile.upper()), args.grid)
        frame = pd.DataFrame({"delta": profile.deltas, "exponent": profile.exponents})
        _emit(frame, args.out)
    return 0


def cmd_encode(args):
    gi = read_instance(args.instance)
    comments = metadata_comments(gi)
    formula = encode_direct(gi.instance, amo=not args.no_amo, comments=comments)
    out = args.out or Path(args.instance).with_suffix(".cnf")
    print(f"Saved: {write_dimacs(formula, out)} ({formula.var_count} vars, "
          f"{formula.clause_count} clauses)")
    return 0


def cmd_sweep(args):
    base = _params(args)
    if not args.values:
        raise InvalidArgumentError("sweep needs --values")
    vary = Vary(args.vary.upper())
    values = _int_list(args.values) if vary is Vary.N else _float_list(args.values)
    spec = SweepSpec(base=base, vary=vary, values=tuple(values), samples_per_point=args.samples,
                     solver=SolverKind(args.solver.upper()), master_seed=args.master_seed,
                     filter_unsat=args.filter_unsat, mac_config=_mac_config(args),
                     tabu_config=_tabu_config(args))
    if args.paired:
        _emit(paired_sweep(spec, workers=args.workers), args.out)
    else:
        records = run_sweep(spec, workers=args.workers, audit_path=args.audit)
        _emit(sweep_frame(records), args.out)
    return 0


def cmd_threshold(args):
    base = replace(_params(args, p=0.5), forced=False)
    if args.vary:
        vary = Vary(args.vary.upper())
        if not args.values:
            raise InvalidArgumentError("threshold --vary needs --values")
        values = _int_list(args.values) if vary is Vary.N else _float_list(args.values)
        frame = threshold_gap_sweep(base, vary, values, args.samples, args.tolerance,
                                    args.master_seed, _mac_config(args))
        _emit(frame, args.out)
    else:
        p_hat = empirical_threshold(base, args.samples, args.tolerance, args.master_seed,
                                    mac_config=_mac_config(args))
        p_cr = check_conditions(base).p_cr
        print(f"p_theory={p_cr:.6g} p_empirical={p_hat:.6g} difference={p_hat - p_cr:.6g}")
    return 0


def cmd_growth(args):
    if not args.n_values:
        raise InvalidArgumentError("growth needs --n-values")
    base = _params(args, p=0.5)
    at = HardnessPoint(PointKind(args.at.upper()), args.at_value)
    frame = hardness_growth(base, _int_list(args.n_values), at, args.samples, args.master_seed,
                            SolverKind(args.solver.upper()), _mac_config(args),
                            _tabu_config(args), args.workers)
    _emit(frame, args.out)
    logger.info("growth exponents: forced=%.4f unforced=%.4f",
                growth_exponent(frame, "forced_mean_cost"),
                growth_exponent(frame, "unforced_mean_cost"))
    return 0


def cmd_survival(args):
    result = survival_experiment(_params(args), args.runs, args.master_seed, _mac_config(args),
                                 args.workers)
    _emit(result.curve, args.out)
    logger.info("tail slope %.4f over %d runs", result.tail_slope, args.runs)
    return 0


def cmd_benchmark(args):
    base = InstanceParams(**presets.COMPETITION)
    frame = competition_benchmark(base, _int_list(args.n_values), args.master_seed,
                                  args.out_dir, amo=not args.no_amo)
    write_csv(frame, Path(args.out_dir) / "manifest.csv")
    print(f"Saved {len(frame)} instances to: {args.out_dir}")
    return 0


def cmd_reproduce(args):
    ensure_dirs()
    pipeline = ReproductionPipeline(
        master_seed=args.master_seed, samples=args.samples,
        threshold_samples=args.threshold_samples, survival_runs=args.runs,
        workers=args.workers, output_dir=args.output_dir,
        mac_config=_mac_config(args), tabu_config=_tabu_config(args),
    )
    pipeline.run_full_pipeline(steps=_int_list(args.steps) if args.steps else None)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="rbcsp", description="Model RB/RD random CSP toolkit")
    parser.add_argument("--config", default=None, help="versioned key = value defaults file")
    parser.add_argument("--log-level", default="INFO",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate one instance")
    _add_params(p, p_required=False)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="solve an instance file")
    p.add_argument("instance")
    p.add_argument("--method", choices=["mac", "tabu"], default="mac")
    p.add_argument("--randomized", action="store_true")
    p.add_argument("--tie-seed", type=int, default=0)
    p.add_argument("--count-all", action="store_true")
    p.add_argument("--witness-out", default=None)
    _add_mac_limits(p)
    _add_tabu_options(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("analyze", help="thresholds, moments and distance profiles")
    _add_params(p, p_required=False)
    p.add_argument("--profile", choices=["forced", "unforced"], default=None)
    p.add_argument("--grid", type=int, default=DEFAULT_PROFILE_GRID)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("encode", help="direct encoding to DIMACS")
    p.add_argument("instance")
    p.add_argument("--no-amo", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("sweep", help="sat fraction and cost over a parameter grid")
    _add_params(p)
    p.add_argument("--vary", choices=["p", "n", "r", "alpha"], default="p")
    p.add_argument("--values", default="", help="comma-separated, ascending")
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES_PER_POINT)
    p.add_argument("--solver", choices=["mac", "tabu"], default="mac")
    p.add_argument("--filter-unsat", action="store_true")
    p.add_argument("--paired", action="store_true", help="forced and unforced side by side")
    p.add_argument("--audit", default=None, help="Parquet path for raw runs")
    _add_mac_limits(p)
    _add_tabu_options(p)
    _add_experiment_options(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("threshold", help="empirical vs theoretical threshold")
    _add_params(p)
    p.add_argument("--vary", choices=["n", "r", "alpha"], default=None)
    p.add_argument("--values", default="")
    p.add_argument("--samples", type=int, default=DEFAULT_THRESHOLD_SAMPLES)
    p.add_argument("--tolerance", type=float, default=DEFAULT_THRESHOLD_TOLERANCE)
    _add_mac_limits(p)
    _add_experiment_options(p)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("growth", help="forced/unforced cost against n")
    _add_params(p)
    p.add_argument("--n-values", default="")
    p.add_argument("--at", choices=["threshold", "below", "above"], default="below")
    p.add_argument("--at-value", type=float, default=0.01,
                   help="epsilon for below, tightness for above")
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES_PER_POINT)
    p.add_argument("--solver", choices=["mac", "tabu"], default="mac")
    _add_mac_limits(p)
    _add_tabu_options(p)
    _add_experiment_options(p)
    p.set_defaults(func=cmd_growth)

    p = sub.add_parser("survival", help="randomized MAC runtime distribution")
    _add_params(p)
    p.add_argument("--runs", type=int, default=DEFAULT_SURVIVAL_RUNS)
    _add_mac_limits(p)
    _add_experiment_options(p)
    p.set_defaults(func=cmd_survival)

    p = sub.add_parser("benchmark", help="SAT-competition family as instances + CNF")
    p.add_argument("--n-values", default=",".join(map(str, presets.COMPETITION_N_VALUES)))
    p.add_argument("--master-seed", type=int, default=DEFAULT_MASTER_SEED)
    p.add_argument("--out-dir", default=str(BENCHMARK_DIR))
    p.add_argument("--no-amo", action="store_true")
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("reproduce", help="run every desk-scale experiment")
    p.add_argument("--steps", default=None, help="comma-separated step numbers (default: all)")
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES_PER_POINT)
    p.add_argument("--threshold-samples", type=int, default=DEFAULT_THRESHOLD_SAMPLES)
    p.add_argument("--runs", type=int, default=DEFAULT_SURVIVAL_RUNS)
    p.add_argument("--output-dir", default=str(OUTPUT_DIR))
    _add_mac_limits(p)
    _add_tabu_options(p)
    _add_experiment_options(p)
    p.set_defaults(func=cmd_reproduce)
    return parser


def _coerce(action, key, raw):
    if action.nargs == 0:
        word = raw.strip().lower()
        if word in TRUE_WORDS:
            return True
        if word in FALSE_WORDS:
            return False
        raise ConfigError(f"config key {key!r} expects a boolean, got {raw!r}")
    if action.type is not None:
        try:
            return action.type(raw.strip())
        except ValueError:
            raise ConfigError(f"config key {key!r}: cannot convert {raw!r}") from None
    if action.choices is not None and raw.strip() not in action.choices:
        raise ConfigError(f"config key {key!r} must be one of {sorted(action.choices)}")
    return raw.strip()


def apply_config_defaults(parser, argv, values):
    """Install config-file values as defaults of the chosen subcommand."""
    pre, _ = parser.parse_known_args(argv)
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    command = subparsers.choices[pre.command]
    actions = {a.dest: a for a in command._actions}
    defaults = {}
    for key, raw in values.items():
        if key not in actions:
            logger.warning("config key %r is not used by '%s'", key, pre.command)
            continue
        defaults[key] = _coerce(actions[key], key, raw)
    command.set_defaults(**defaults)


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.config:
            apply_config_defaults(parser, argv, load_config_file(args.config))
            args = parser.parse_args(argv)
        return args.func(args)
    except RBCSPError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
