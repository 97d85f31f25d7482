__all__ = ["EstimateResult",
           "max_subarray",
           "estimate_one_changepoint",
           "estimate_segment_lse",
           "estimate_segment_two_step",
           "anchor_at_origin",
           "ESTIMATORS"]


import argparse
import numpy as np

from dataclasses     import dataclass, field
from typing          import Callable, Dict, Tuple
from segsignal       import get_argparser_formatter
from segsignal.model import ConfigurationError, Sample, Segment, common_parser



@dataclass
class EstimateResult:
    """
    Estimated segment together with the optimizing indices (1-based) and the
    value of the least squares criterion at those indices.
    """
    method    : str
    segment   : Segment
    objective : float
    indices   : Dict = field(default_factory=dict)

    def to_dict(self) -> Dict:
        return {"method"   : self.method,
                "a"        : self.segment.a,
                "b"        : self.segment.b,
                "empty"    : self.segment.empty,
                "objective": self.objective,
                "indices"  : self.indices}



def max_subarray(weights : np.ndarray) -> Tuple[int, int, float]:
    """
    Maximum contiguous sum of weights in linear time.

    Returns (k, l, total) with 1 <= k <= l <= n maximizing sum(weights[k-1:l]).
    Ties go to the smallest k, then the smallest l: the smallest closing index
    among all maximizers is found first, and the first minimum of the prefix
    sums before it gives the smallest opening index.
    """
    weights = np.asarray(weights, dtype=float)
    if weights.ndim != 1 or weights.size == 0:
        raise ConfigurationError("max_subarray needs a non empty 1d array")
    prefix  = np.concatenate(([0.0], np.cumsum(weights)))
    run_min = np.minimum.accumulate(prefix[:-1])
    totals  = prefix[1:] - run_min
    l       = int(np.argmax(totals)) + 1
    k       = int(np.argmin(prefix[:l])) + 1
    return k, l, float(prefix[l] - prefix[k - 1])


def estimate_one_changepoint(sample : Sample) -> EstimateResult:
    """
    Least squares estimate of G = [0, theta].

    F(M) = sum_{i<=M} (2 y_i - 1) for M = 0..n with F(0) = 0; the estimate is
    [0, x_M] for the smallest maximizer M, and the empty set when M = 0.
    """
    F = np.concatenate(([0.0], np.cumsum(sample.weights)))
    M = int(np.argmax(F))
    segment = Segment.empty_set() if M == 0 else Segment(0.0, float(sample.x[M - 1]))
    return EstimateResult("one-cp", segment, float(F[M]), {"M": M})


def estimate_segment_lse(sample : Sample) -> EstimateResult:
    """
    Least squares estimate over all segments: the contiguous run of
    observations maximizing sum (2 y_i - 1), returned as [x_k, x_l]. A negative
    maximum still yields the best single point [x_k, x_k].
    """
    k, l, total = max_subarray(sample.weights)
    segment = Segment(float(sample.x[k - 1]), float(sample.x[l - 1]))
    return EstimateResult("lse", segment, total, {"k": k, "l": l})


def estimate_segment_two_step(sample : Sample, mu : float) -> EstimateResult:
    """
    Split sample estimator for segments of length at least mu.

    Observations with even (1-based) index give a preliminary least squares
    segment whose midpoint m splits the odd-indexed observations into a right
    side (x >= m) and a left side (x < m). Each endpoint is then estimated as a
    single change-point from m outwards:

        F+(M) = sum_{i odd, x_i >= m, i <= M} (2 y_i - 1)   smallest argmax -> b
        F-(M) = sum_{i odd, x_i <  m, i >= M} (2 y_i - 1)   largest argmax  -> a

    An empty right side gives b = x_n, an empty left side gives a = x_1.
    """
    if mu is None or not (0.0 < mu < 1.0):
        raise ConfigurationError(f"mu must be in (0,1), got {mu}")
    if sample.n < 2:
        raise ConfigurationError(f"the two step estimator needs n >= 2, got {sample.n}")

    index       = np.arange(1, sample.n + 1)
    even, odd   = index[index % 2 == 0], index[index % 2 == 1]
    preliminary = estimate_segment_lse(sample.subsample(even - 1))
    m           = preliminary.segment.midpoint

    x, w  = sample.x, sample.weights
    right = odd[x[odd - 1] >= m]
    left  = odd[x[odd - 1] <  m]

    if right.size == 0:
        m_plus, f_plus = sample.n, 0.0
    else:
        F_plus = np.cumsum(w[right - 1])
        j      = int(np.argmax(F_plus))
        m_plus, f_plus = int(right[j]), float(F_plus[j])

    if left.size == 0:
        m_minus, f_minus = 1, 0.0
    else:
        descending = left[::-1]
        F_minus    = np.cumsum(w[descending - 1])
        j          = int(np.argmax(F_minus))
        m_minus, f_minus = int(descending[j]), float(F_minus[j])

    a, b    = float(x[m_minus - 1]), float(x[m_plus - 1])
    segment = Segment(min(a, b), max(a, b))
    indices = {"M_minus"      : m_minus,
               "M_plus"       : m_plus,
               "midpoint"     : m,
               "preliminary_a": preliminary.segment.a,
               "preliminary_b": preliminary.segment.b}
    return EstimateResult("two-step", segment, f_plus + f_minus, indices)


def anchor_at_origin(result : EstimateResult) -> EstimateResult:
    """
    Replace an estimate G by [0, sup G]. Against a truth [0, theta] the loss
    does not grow as long as inf G <= theta.
    """
    segment = result.segment if result.segment.empty else Segment(0.0, result.segment.b)
    return EstimateResult(f"{result.method}-anchored", segment, result.objective, dict(result.indices))


ESTIMATORS : Dict[str, Callable[..., EstimateResult]] = {
    "one-cp"       : lambda sample, mu=None: estimate_one_changepoint(sample),
    "lse"          : lambda sample, mu=None: estimate_segment_lse(sample),
    "lse-anchored" : lambda sample, mu=None: anchor_at_origin(estimate_segment_lse(sample)),
    "two-step"     : lambda sample, mu=None: estimate_segment_two_step(sample, mu),
}



#
# Parsers
#

def estimate_parser():
  parser = argparse.ArgumentParser(description = '', add_help = False,  formatter_class=get_argparser_formatter())
  parser.add_argument('--method', action='store', dest='method', required = True, choices=sorted(ESTIMATORS),
                      help = "The estimator.")
  parser.add_argument('--mu', action='store', dest='mu', required = False, type=float, default=None,
                      help = "The minimal segment length, required by two-step.")
  parser.add_argument('--in', action='store', dest='input', required = True,
                      help = "The sample csv file.")
  parser.add_argument('--json', action='store_true', dest='json', required = False,
                      help = "Print the estimate as json.")
  return [common_parser(), parser]
