__all__ = ["DetectionConfig",
           "TestOutcome",
           "DetectionRow",
           "detect_left_anchored",
           "detect_scan",
           "detection_error_sweep",
           "DETECTION_TESTS"]


import math, argparse
import numpy as np
import pandas as pd

from dataclasses       import dataclass, field
from typing            import Callable, Dict, List, Optional, Sequence, Union
from loguru            import logger
from segsignal.model   import ConfigurationError, DesignKind, NoiseSpec, Sample, Segment
from segsignal.model   import make_design, sample_observations, common_parser
from segsignal         import get_argparser_formatter



@dataclass(frozen=True)
class DetectionConfig:
    """
    h is the minimal length of G under the alternative, c the threshold of the
    counting test. c = 1/2 suits symmetric noise; for asymmetric noise it must
    lie strictly between P[xi <= -1/2] and P[xi <= 1/2].
    """
    h : float
    c : float = 0.5

    def __post_init__(self):
        if not (0.0 < self.h <= 1.0):
            raise ConfigurationError(f"h must be in (0,1], got {self.h}")
        if not (0.0 < self.c < 1.0):
            raise ConfigurationError(f"c must be in (0,1), got {self.c}")



@dataclass
class TestOutcome:
    __test__ = False

    test      : str
    decision  : int
    statistic : float
    aux       : Dict = field(default_factory=dict)

    def to_dict(self) -> Dict:
        statistic = self.statistic if math.isfinite(self.statistic) else None
        return {"test": self.test, "decision": self.decision, "statistic": statistic, "aux": self.aux}



#
# Tests
#

def detect_left_anchored(sample : Sample, cfg : DetectionConfig) -> TestOutcome:
    """
    Counting test for segments anchored at 0. Rejects the null when few of
    the labels observed on [0,h] fall below 1/2: with N = #{i : x_i <= h} and
    S = #{i <= N : y_i <= 1/2}, the decision is 1 iff N >= 1 and S <= c*N.
    """
    N = int(np.searchsorted(sample.x, cfg.h, side="right"))
    S = int(np.count_nonzero(sample.y[:N] <= 0.5))
    if N == 0:
        return TestOutcome("counting", 0, float(S), {"N": 0, "S": 0, "insufficient_points": True})
    decision = int(S <= cfg.c * N)
    return TestOutcome("counting", decision, float(S), {"N": N, "S": S})


def detect_scan(sample : Sample, cfg : DetectionConfig) -> TestOutcome:
    """
    Scan test over every window of length larger than h.

    A window (k,l), 1 <= k < l <= n+1, covers the observations k..l-1 and is
    admissible when x_l - x_k > h, where x_{n+1} = 1 closes the last window on
    the right edge. The statistic is the maximum over admissible windows of

        R = 1/2 * sum_{i=k}^{l-1} (2 y_i - 1)

    and the test rejects when R >= 0. The maximum is exact: for each k it is
    read from a suffix maximum of the prefix sums over the admissible l.
    """
    n      = sample.n
    x_ext  = np.append(sample.x, 1.0)
    prefix = np.concatenate(([0.0], np.cumsum(sample.weights)))

    # first admissible closing index l (0-based into x_ext) for every opening k
    l_min  = np.searchsorted(x_ext, sample.x + cfg.h, side="right")
    valid  = l_min <= n
    if not np.any(valid):
        return TestOutcome("scan", 0, -math.inf, {"no_admissible_window": True})

    suffix_max = np.maximum.accumulate(prefix[::-1])[::-1]
    ks         = np.flatnonzero(valid)
    values     = 0.5 * (suffix_max[l_min[ks]] - prefix[ks])
    best       = int(np.argmax(values))
    k          = int(ks[best])
    l          = int(l_min[k] + np.argmax(prefix[l_min[k]:]))
    statistic  = float(values[best])

    aux = {"k": k + 1,
           "l": l + 1,
           "a": float(sample.x[k]),
           "b": float(x_ext[l]),
           "window_size": l - k}
    return TestOutcome("scan", int(statistic >= 0), statistic, aux)


DETECTION_TESTS : Dict[str, Callable[[Sample, DetectionConfig], TestOutcome]] = {
    "counting" : detect_left_anchored,
    "scan"     : detect_scan,
}



#
# Error sweeps
#

@dataclass
class DetectionRow:
    n         : int
    h         : float
    test      : str
    gamma_hat : float
    type1_hat : float
    type2_hat : float
    reps      : int
    stderr    : float

    def to_dict(self) -> Dict:
        return dict(self.__dict__)


def detection_error_sweep(cfg          : DetectionConfig,
                          test         : str,
                          alternatives : Union[Sequence[Segment], Callable[[int], Sequence[Segment]]],
                          n_grid       : Sequence[int],
                          reps         : int,
                          noise        : NoiseSpec,
                          design       : DesignKind,
                          master_seed  : int,
                          h_rule       : Optional[Callable[[int], float]]=None,
                          n_workers    : int=1,
                        ) -> pd.DataFrame:
    """
    Empirical sum of type one and type two errors per n.

    Parameters:
    ----------
    cfg : DetectionConfig
        Test thresholds. cfg.h is replaced by h_rule(n) when h_rule is given.
    test : str
        "counting" or "scan".
    alternatives : sequence of Segment, or callable n -> sequence of Segment
        Alternatives with length >= h(n). The type two error is the maximum
        over them.
    n_grid, reps, noise, design, master_seed :
        Monte Carlo settings; replication r of cell (n, member) uses the seed
        derived from (2, n_index, member_index, r), member 0 being the null.

    Returns:
    -------
    pd.DataFrame with columns n,h,test,gamma_hat,type1_hat,type2_hat,reps,stderr.
    """
    from segsignal.montecarlo.seeds import run_replications, data_streams, derive_seed

    if reps < 1:
        raise ConfigurationError(f"reps must be >= 1, got {reps}")
    if test not in DETECTION_TESTS:
        raise ConfigurationError(f"unknown test '{test}', expected one of {sorted(DETECTION_TESTS)}")
    run_test = DETECTION_TESTS[test]

    rows : List[DetectionRow] = []
    for n_index, n in enumerate(n_grid):
        h       = h_rule(n) if h_rule is not None else cfg.h
        n_cfg   = DetectionConfig(h=h, c=cfg.c)
        members = list(alternatives(n) if callable(alternatives) else alternatives)
        if not members:
            raise ConfigurationError("at least one alternative is required")
        for g in members:
            if g.length < h - 1e-12:
                raise ConfigurationError(f"alternative {g} is shorter than h={h:.6g}")

        def decide(member_index : int, g : Segment) -> Callable[[int], int]:
            def replicate(rep : int) -> int:
                design_rng, noise_rng = data_streams(derive_seed(master_seed, (2, n_index, member_index, rep)))
                x = make_design(design, n, design_rng)
                return run_test(sample_observations(x, g, noise, noise_rng), n_cfg).decision
            return replicate

        rejections = np.asarray(run_replications(decide(0, Segment.empty_set()), reps, n_workers))
        type1      = float(rejections.mean())
        type2      = 0.0
        for member_index, g in enumerate(members, start=1):
            accepts = 1 - np.asarray(run_replications(decide(member_index, g), reps, n_workers))
            type2   = max(type2, float(accepts.mean()))

        stderr = math.sqrt(type1 * (1 - type1) / reps + type2 * (1 - type2) / reps)
        rows.append(DetectionRow(n, h, test, type1 + type2, type1, type2, reps, stderr))
        logger.debug(f"{test} n={n} h={h:.4g}: type1={type1:.4f} type2={type2:.4f}")

    return pd.DataFrame([row.to_dict() for row in rows],
                        columns=["n", "h", "test", "gamma_hat", "type1_hat", "type2_hat", "reps", "stderr"])



#
# Parsers
#

def detect_parser():
  parser = argparse.ArgumentParser(description = '', add_help = False,  formatter_class=get_argparser_formatter())
  parser.add_argument('--test', action='store', dest='test', required = True, choices=sorted(DETECTION_TESTS),
                      help = "The test: counting (segments anchored at 0) or scan (any segment).")
  parser.add_argument('--h', action='store', dest='h', required = True, type=float,
                      help = "The minimal length of the segment under the alternative.")
  parser.add_argument('--c', action='store', dest='c', required = False, type=float, default=0.5,
                      help = "The threshold of the counting test.")
  parser.add_argument('--in', action='store', dest='input', required = True,
                      help = "The sample csv file.")
  parser.add_argument('--json', action='store_true', dest='json', required = False,
                      help = "Print the outcome as json.")
  return [common_parser(), parser]
