__all__ = ["RiskRow",
           "CouplingStats",
           "RiskReport",
           "run_risk_sweep",
           "run_tail_experiment",
           "run_experiment"]


import math, argparse
import numpy as np
import pandas as pd

from dataclasses                 import dataclass, field
from typing                      import Dict, List, Optional, Sequence, Tuple, Union
from loguru                      import logger
from segsignal                   import get_argparser_formatter
from segsignal.model             import DesignKind, Segment, make_design, sample_observations, nikodym_distance, common_parser
from segsignal.detection         import DetectionConfig, detection_error_sweep
from segsignal.estimation        import ESTIMATORS
from segsignal.analytics         import one_cp_tail_bound, lower_bound_s0, testing_error_floor, noise_affinity
from segsignal.montecarlo.seeds  import derive_seed, data_streams, run_replications
from segsignal.montecarlo.config import ExperimentConfig


REPORT_COLUMNS = ["task", "n", "member", "estimator", "mean_loss", "stderr", "reps", "max_over_family"]



@dataclass
class RiskRow:
    task            : str
    n               : int
    member          : str
    estimator       : str
    mean_loss       : float
    stderr          : float
    reps            : int
    max_over_family : bool
    seed_lineage    : str = ""


@dataclass
class CouplingStats:
    """
    Replications where the family members agree on every design point
    (events), and among those, replications whose labels still differ
    (violations, always 0 for a correct sampler). Carries the minimax lower
    bound on the risk and the floor on the summed errors of any test between
    the two members. gamma_hat is the summed error frequency of the test
    that picks the member nearest to the estimate, to be read against that floor.
    """
    n             : int
    reps          : int
    events        : int
    violations    : int
    expected      : float
    lower_bound   : float = 0.0
    testing_floor : float = 0.0
    gamma_hat     : float = 0.0

    @property
    def frequency(self) -> float:
        return self.events / self.reps

    @property
    def stderr(self) -> float:
        return math.sqrt(self.expected * (1 - self.expected) / self.reps)


@dataclass
class RiskReport:
    rows     : List[RiskRow]           = field(default_factory=list)
    failures : Dict[int, int]          = field(default_factory=dict)
    coupling : List[CouplingStats]     = field(default_factory=list)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([{key: getattr(row, key) for key in REPORT_COLUMNS} for row in self.rows], columns=REPORT_COLUMNS)

    def to_csv(self, path : str):
        self.to_frame().to_csv(path, index=False, float_format="%.17g")

    def member_rows(self, n : int) -> List[RiskRow]:
        return [row for row in self.rows if row.n == n and not row.max_over_family]

    def max_rows(self) -> List[RiskRow]:
        return [row for row in self.rows if row.max_over_family]



#
# Replications
#

def _nearest_member(segment : Segment, members : List[Tuple[str, Segment]]) -> int:
    return min(range(len(members)), key=lambda m: nikodym_distance(segment, members[m][1]))


def _losses(cfg : ExperimentConfig, n_index : int, n : int, members : List[Tuple[str, Segment]]):
    """
    Build the replication function of one n: every member is estimated on
    its own data, drawn from a shared stream when the family asks for it.
    Returns per member loss**moment (nan on failure), and for shared noise
    whether the members agreed on the design, whether their labels matched and
    how many members the nearest-member test on the estimates got wrong.
    """
    estimate = ESTIMATORS[cfg.method]
    fixed    = make_design(DesignKind.DD, n) if cfg.design is DesignKind.DD else None

    def replicate(rep : int):
        losses, samples, estimates = [], [], []
        for member_index, (label, g) in enumerate(members):
            seed = derive_seed(cfg.master_seed, (cfg.task_id, n_index, 0 if cfg.family.shared_noise else member_index, rep))
            design_rng, noise_rng = data_streams(seed)
            x = fixed if fixed is not None else make_design(cfg.design, n, design_rng)
            sample = sample_observations(x, g, cfg.noise, noise_rng)
            samples.append((g, sample))
            try:
                segment = estimate(sample, cfg.mu).segment
                loss    = nikodym_distance(segment, g) ** cfg.moment
            except ValueError as e:
                logger.warning(f"n={n} member={label} rep={rep}: {e}")
                segment, loss = None, math.nan
            estimates.append(segment)
            losses.append(loss)

        event, violation, wrong = False, False, 0
        if cfg.family.shared_noise:
            g0, s0 = samples[0]
            event  = all(np.array_equal(g0.contains(s0.x), g.contains(s.x)) for g, s in samples[1:])
            if event:
                violation = not all(np.array_equal(s0.y, s.y) for _, s in samples[1:])
            wrong = sum(int(s is None or _nearest_member(s, members) != m) for m, s in enumerate(estimates))
        return losses, event, violation, wrong

    return replicate


def _pair_affinity(cfg : ExperimentConfig, n : int) -> float:
    """
    Hellinger affinity between the label laws of the adversarial pair. No
    grid point i/n falls in (0, 1/(2n)], so the regular design cannot tell
    them apart; on a uniform design each point lands there with probability
    1/(2n) and costs the per-point noise affinity.
    """
    if cfg.design is DesignKind.DD:
        return 1.0
    rho = 0.0 if cfg.noise.sigma == 0 else noise_affinity(cfg.noise, rng=np.random.default_rng(cfg.master_seed)).value
    return (1.0 - (1.0 - min(rho, 1.0)) / (2 * n)) ** n


def _mean_stderr(values : np.ndarray) -> Tuple[float, float, int]:
    values = values[~np.isnan(values)]
    count  = values.size
    if count == 0:
        return math.nan, math.nan, 0
    mean   = math.fsum(values.tolist()) / count
    stderr = float(values.std(ddof=1) / math.sqrt(count)) if count > 1 else 0.0
    return mean, stderr, count



#
# Sweeps
#

def run_risk_sweep(cfg : ExperimentConfig) -> RiskReport:
    """
    Monte Carlo risk of cfg.method on every member of cfg.family and every n.

    Each member gets a row with the mean of loss**moment; one extra row per n
    (max_over_family) holds the largest member mean, the finite family stand-in
    for the supremum over the class.
    """
    report = RiskReport()
    for n_index, n in enumerate(cfg.n_grid):
        members = cfg.family.members(n)
        results = run_replications(_losses(cfg, n_index, n, members), cfg.reps, cfg.n_workers)
        losses  = np.array([losses for losses, _, _, _ in results], dtype=float)

        failures = int(np.isnan(losses).sum())
        report.failures[n] = failures
        if failures:
            logger.warning(f"{cfg.method} n={n}: {failures} failed replications")

        member_rows = []
        for member_index, (label, _) in enumerate(members):
            mean, stderr, count = _mean_stderr(losses[:, member_index])
            lineage = f"{cfg.master_seed}/{cfg.task_id}/{n_index}/{0 if cfg.family.shared_noise else member_index}/0..{cfg.reps - 1}"
            member_rows.append(RiskRow(cfg.task, n, label, cfg.method, mean, stderr, count, False, lineage))
        worst = max(member_rows, key=lambda row: row.mean_loss)
        report.rows.extend(member_rows)
        report.rows.append(RiskRow(cfg.task, n, "max", cfg.method, worst.mean_loss, worst.stderr, worst.reps, True, worst.seed_lineage))

        if cfg.family.shared_noise:
            events     = sum(int(event) for _, event, _, _ in results)
            violations = sum(int(violation) for _, _, violation, _ in results)
            gamma_hat  = sum(wrong for _, _, _, wrong in results) / cfg.reps
            expected   = 1.0 if cfg.design is DesignKind.DD else (1.0 - 1.0 / (2 * n)) ** n
            floor      = testing_error_floor(_pair_affinity(cfg, n))
            report.coupling.append(CouplingStats(n, cfg.reps, events, violations, expected, lower_bound_s0(n), floor, gamma_hat))
            if violations:
                logger.warning(f"n={n}: {violations} replications broke the coupling")

        logger.debug(f"{cfg.method} n={n}: max risk {worst.mean_loss:.4g} on {worst.member}")
    return report


def run_tail_experiment(cfg : ExperimentConfig, x_grid : Optional[Sequence[float]]=None) -> pd.DataFrame:
    """
    Empirical survival P[n * loss >= x] of the one change-point estimator,
    next to the closed form deviation bound.

    Returns:
    -------
    pd.DataFrame with columns n,member,x,survival,stderr,bound,reps.
    """
    x_grid = list(x_grid if x_grid is not None else cfg.x_grid)
    rows = []
    for n_index, n in enumerate(cfg.n_grid):
        members = cfg.family.members(n)
        results = run_replications(_losses(cfg, n_index, n, members), cfg.reps, cfg.n_workers)
        losses  = np.array([losses for losses, _, _, _ in results], dtype=float) ** (1.0 / cfg.moment)
        for member_index, (label, _) in enumerate(members):
            scaled = n * losses[:, member_index]
            scaled = scaled[~np.isnan(scaled)]
            for x in x_grid:
                p     = float(np.mean(scaled >= x))
                bound = one_cp_tail_bound(x, cfg.noise.sigma) if cfg.noise.sigma > 0 else math.nan
                rows.append({"n": n, "member": label, "x": x, "survival": p,
                             "stderr": math.sqrt(p * (1 - p) / scaled.size), "bound": bound, "reps": scaled.size})
        logger.debug(f"tail n={n}: {len(members)} members, {len(x_grid)} thresholds")
    return pd.DataFrame(rows, columns=["n", "member", "x", "survival", "stderr", "bound", "reps"])


def run_experiment(cfg : ExperimentConfig) -> Union[RiskReport, pd.DataFrame]:
    if cfg.task == "risk":
        return run_risk_sweep(cfg)
    elif cfg.task == "tail":
        return run_tail_experiment(cfg)
    alternatives = lambda n: [g for _, g in cfg.family.members(n)]
    detection    = DetectionConfig(h=min(1.0, cfg.h(cfg.n_grid[0])), c=cfg.c)
    return detection_error_sweep(detection, cfg.method, alternatives, cfg.n_grid, cfg.reps,
                                 cfg.noise, cfg.design, cfg.master_seed, h_rule=cfg.h, n_workers=cfg.n_workers)



#
# Parsers
#

def sweep_parser():
  parser = argparse.ArgumentParser(description = '', add_help = False,  formatter_class=get_argparser_formatter())
  parser.add_argument('--config', action='store', dest='config', required = True,
                      help = "The experiment json file, or the name of one in data/experiments.")
  parser.add_argument('--out', action='store', dest='output', required = True,
                      help = "The csv file to write.")
  parser.add_argument('--workers', action='store', dest='workers', required = False, type=int, default=None,
                      help = "Override the number of worker threads.")
  return [common_parser(), parser]
