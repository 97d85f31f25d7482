#!/bin/python

import argparse
import sys, os, json
import pandas as pd

from typing                      import Dict, List
from loguru                      import logger
from rich.console                import Console
from rich.table                  import Table
from segsignal                   import get_argparser_formatter, get_experiments_path
from segsignal.model             import Sample, Segment, DesignKind, NoiseSpec, NoiseFamily, ConfigurationError
from segsignal.model             import make_design, sample_observations, simulate_parser
from segsignal.detection         import DETECTION_TESTS, DetectionConfig, detect_parser
from segsignal.estimation        import ESTIMATORS, estimate_parser
from segsignal.analytics         import fit_rate, risk_floor, one_cp_moment_bound_rd, rates_parser
from segsignal.montecarlo        import ExperimentConfig, data_streams, run_risk_sweep, run_tail_experiment, run_experiment
from segsignal.montecarlo.engine import sweep_parser


console = Console()


def resolve_config(path : str) -> ExperimentConfig:
    """
    Load an experiment file, falling back to the shipped data/experiments.
    """
    if not os.path.exists(path):
        name      = path if path.endswith(".json") else f"{path}.json"
        candidate = f"{get_experiments_path()}/{name}"
        if os.path.exists(candidate):
            path = candidate
    return ExperimentConfig.from_json(path)


def print_record(title : str, record : Dict):
    table = Table(title=title)
    table.add_column("field", style="green")
    table.add_column("value")
    for key, value in record.items():
        table.add_row(key, str(value))
    console.print(table)


def print_frame(title : str, frame : pd.DataFrame):
    table = Table(title=title)
    for column in frame.columns:
        table.add_column(str(column))
    for _, row in frame.iterrows():
        table.add_row(*[f"{v:.6g}" if isinstance(v, float) else str(v) for v in row.tolist()])
    console.print(table)


def build_argparser():

    parser = argparse.ArgumentParser( prog="segsig", formatter_class=get_argparser_formatter())
    mode   = parser.add_subparsers(dest='mode')

    mode.add_parser( "simulate"     , parents = simulate_parser() , help="Draw a sample and write it as csv.", formatter_class=get_argparser_formatter())
    mode.add_parser( "detect"       , parents = detect_parser()   , help="Test for the presence of a segment.", formatter_class=get_argparser_formatter())
    mode.add_parser( "estimate"     , parents = estimate_parser() , help="Estimate the segment.", formatter_class=get_argparser_formatter())
    mode.add_parser( "risk-sweep"   , parents = sweep_parser()    , help="Monte Carlo risks of an estimator.", formatter_class=get_argparser_formatter())
    mode.add_parser( "tail"         , parents = sweep_parser()    , help="Monte Carlo deviation tail of the one change-point estimator.", formatter_class=get_argparser_formatter())
    mode.add_parser( "detect-sweep" , parents = sweep_parser()    , help="Monte Carlo errors of a test.", formatter_class=get_argparser_formatter())
    mode.add_parser( "rates"        , parents = rates_parser()    , help="Fit convergence rates to a risk report.", formatter_class=get_argparser_formatter())
    return parser


def run_parser(args):

    if args.mode == "simulate":
        design_rng, noise_rng = data_streams(args.seed)
        x      = make_design(DesignKind.parse(args.design), args.n, design_rng)
        sample = sample_observations(x, Segment.parse(args.segment), NoiseSpec.parse(args.noise), noise_rng)
        sample.to_csv(args.output)
        logger.info(f"simulated n={args.n} observations into {args.output}")

    elif args.mode == "detect":
        sample  = Sample.from_csv(args.input)
        outcome = DETECTION_TESTS[args.test](sample, DetectionConfig(h=args.h, c=args.c))
        if args.json:
            print(json.dumps(outcome.to_dict(), allow_nan=False))
        else:
            print_record(f"{args.test} test", {"decision": outcome.decision, "statistic": outcome.statistic, **outcome.aux})

    elif args.mode == "estimate":
        sample = Sample.from_csv(args.input)
        result = ESTIMATORS[args.method](sample, args.mu)
        if args.json:
            print(json.dumps(result.to_dict(), allow_nan=False))
        else:
            print_record(f"{args.method} estimate", {"segment": str(result.segment), "objective": result.objective, **result.indices})

    elif args.mode in ("risk-sweep", "tail", "detect-sweep"):
        cfg      = resolve_config(args.config)
        expected = {"risk-sweep": "risk", "tail": "tail", "detect-sweep": "detection"}[args.mode]
        if cfg.task != expected:
            raise ConfigurationError(f"{args.mode} runs '{expected}' experiments, {args.config} declares '{cfg.task}'")
        if args.workers is not None:
            cfg.n_workers = args.workers
        logger.info(f"running {cfg.task} experiment: {cfg.method} on {cfg.family.name}, n={cfg.n_grid}, reps={cfg.reps}")

        if cfg.task == "risk":
            report = run_risk_sweep(cfg)
            report.to_csv(args.output)
            for stats in report.coupling:
                logger.info(f"n={stats.n}: coupling held in {stats.events}/{stats.reps} replications "
                            f"(expected {stats.expected:.4f}), {stats.violations} violations")
                logger.info(f"n={stats.n}: lower bound {stats.lower_bound:.4g} on the risk, summed test errors "
                            f"{stats.gamma_hat:.4f} against the floor {stats.testing_floor:.4f}")
            if cfg.method == "one-cp" and cfg.family.name in ("s0_grid", "adversarial_pair") and cfg.design is DesignKind.RD \
                    and cfg.noise.family is NoiseFamily.GAUSSIAN and cfg.noise.sigma > 0 and float(cfg.moment).is_integer():
                for row in report.max_rows():
                    bound = one_cp_moment_bound_rd(int(cfg.moment), cfg.noise.sigma, row.n)
                    logger.info(f"n={row.n}: moment {int(cfg.moment)} risk {row.mean_loss:.4g}, bound {bound:.4g}")
            print_frame("max risk over the family", report.to_frame().query("max_over_family"))
        else:
            frame = run_tail_experiment(cfg) if cfg.task == "tail" else run_experiment(cfg)
            frame.to_csv(args.output, index=False, float_format="%.17g")
            print_frame(cfg.task, frame)

    elif args.mode == "rates":
        frame = pd.read_csv(args.input)
        frame = frame[frame["max_over_family"].astype(str).str.lower() == "true"]
        if args.estimator is not None:
            frame = frame[frame["estimator"] == args.estimator]
        if frame.empty:
            raise ConfigurationError(f"{args.input} holds no max_over_family rows to fit")

        fits = {}
        for estimator, rows in frame.groupby("estimator", sort=True):
            rows  = rows.sort_values("n")
            floor = risk_floor(int(rows["n"].max()), int(rows["reps"].max()))
            fit   = fit_rate(rows["n"].tolist(), [max(r, floor) for r in rows["mean_loss"].tolist()])
            fits[estimator] = fit
            logger.debug(f"{estimator}: risk*n={fit.risk_times_n} risk*n/ln(n)={fit.risk_times_n_over_log}")

        if args.json:
            print(json.dumps({estimator: fit.to_dict() for estimator, fit in fits.items()}))
        else:
            for estimator, fit in fits.items():
                print_record(f"{estimator} rate", {**fit.to_dict(),
                                                   "risk*n"      : ", ".join(f"{v:.4g}" for v in fit.risk_times_n),
                                                   "risk*n/ln n" : ", ".join(f"{v:.4g}" for v in fit.risk_times_n_over_log)})


def dispatch(argv : List[str]) -> int:
    """
    Run one command. Returns 0 on success, 2 on usage errors and 1 when the
    command itself fails.
    """
    parser = build_argparser()
    if not argv:
        parser.print_help(sys.stderr)
        return 2
    try:
        args = parser.parse_args(argv)
        if args.mode == "estimate" and args.method == "two-step" and args.mu is None:
            parser.error("estimate --method two-step requires --mu")
    except SystemExit as e:
        return int(e.code or 0)
    if args.mode is None:
        parser.print_help(sys.stderr)
        return 2

    logger.remove()
    logger.add(sys.stderr, level="DEBUG" if args.verbose else "INFO")
    try:
        run_parser(args)
    except (ValueError, OSError) as e:
        logger.error(f"{args.mode}: {e}")
        return 1
    return 0


def run():
    sys.exit(dispatch(sys.argv[1:]))

if __name__ == "__main__":
  run()
