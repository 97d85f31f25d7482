__all__ = ["RateFit",
           "AffinityEstimate",
           "hellinger_affinity_dd",
           "hellinger_affinity_rd",
           "noise_affinity",
           "one_cp_tail_bound",
           "one_cp_moment_bound_rd",
           "two_step_tail_term",
           "lower_bound_s0",
           "testing_error_floor",
           "risk_floor",
           "fit_rate"]


import math, argparse
import numpy as np

from dataclasses     import dataclass, field
from typing          import Dict, List, Optional, Sequence, Tuple
from scipy           import stats
from segsignal       import get_argparser_formatter
from segsignal.model import ConfigurationError, NoiseFamily, NoiseSpec, common_parser



def _check_sigma(sigma : float):
    if not sigma > 0:
        raise ConfigurationError(f"sigma must be > 0, got {sigma}")


def _one_cp_constant(sigma : float) -> float:
    return 2.0 / (1.0 - math.exp(-1.0 / (8.0 * sigma ** 2)))



#
# Hellinger affinities (gaussian noise)
#

def hellinger_affinity_dd(k : int, sigma : float) -> float:
    """
    Affinity 1 - H^2/2 between the laws of the labels under two segments whose
    symmetric difference holds k points of a deterministic design:
    exp(-k / (8 sigma^2)).
    """
    _check_sigma(sigma)
    if k < 0:
        raise ConfigurationError(f"k must be >= 0, got {k}")
    return math.exp(-k / (8.0 * sigma ** 2))


def hellinger_affinity_rd(delta : float, sigma : float, n : int) -> float:
    """
    Affinity under the uniform random design for two segments at Nikodym
    distance delta: (1 - (1 - exp(-1/(8 sigma^2))) * delta)^n.
    """
    _check_sigma(sigma)
    if not (0.0 <= delta <= 1.0):
        raise ConfigurationError(f"delta must be in [0,1], got {delta}")
    if n < 1:
        raise ConfigurationError(f"n must be >= 1, got {n}")
    return (1.0 - (1.0 - math.exp(-1.0 / (8.0 * sigma ** 2))) * delta) ** n


@dataclass(frozen=True)
class AffinityEstimate:
    value       : float
    stderr      : float
    approximate : bool


def noise_affinity(noise : NoiseSpec, draws : int=100000, rng : Optional[np.random.Generator]=None) -> AffinityEstimate:
    """
    Affinity between the noise law and the same law shifted by one, i.e. the
    per-point factor of the affinity between two segments. Gaussian noise is
    closed form; other families are estimated by E_p[sqrt(p(t-1)/p(t))].
    """
    _check_sigma(noise.sigma)
    if noise.family is NoiseFamily.GAUSSIAN:
        return AffinityEstimate(hellinger_affinity_dd(1, noise.sigma), 0.0, False)
    rng   = rng if rng is not None else np.random.default_rng()
    t     = noise.draw(rng, draws)
    ratio = np.sqrt(noise.density(t - 1.0) / noise.density(t))
    return AffinityEstimate(float(ratio.mean()), float(ratio.std(ddof=1) / math.sqrt(draws)), True)


def testing_error_floor(affinity : float) -> float:
    """
    Lower bound 1/2 * rho^2 on the sum of both errors of any test between two
    simple hypotheses with Hellinger affinity rho.
    """
    if not (0.0 <= affinity <= 1.0):
        raise ConfigurationError(f"affinity must be in [0,1], got {affinity}")
    return 0.5 * affinity ** 2



#
# Bounds
#

def one_cp_tail_bound(x : float, sigma : float) -> float:
    """
    Deviation bound of the one change-point estimator on a regular design:
    P[n |G_hat - G| >= x] <= min(1, C0 exp(-x / (8 sigma^2))), with
    C0 = 2 / (1 - exp(-1 / (8 sigma^2))).
    """
    _check_sigma(sigma)
    if not x > 0:
        raise ConfigurationError(f"x must be > 0, got {x}")
    return min(1.0, _one_cp_constant(sigma) * math.exp(-x / (8.0 * sigma ** 2)))


def one_cp_moment_bound_rd(q : int, sigma : float, n : int) -> float:
    """
    Bound 2 C (2q)! (16 sigma^2)^q / n^q, C = 2 + 16 sigma^2, on the q-th moment
    of the loss of the one change-point estimator on a uniform random design.
    """
    _check_sigma(sigma)
    if q < 1 or int(q) != q:
        raise ConfigurationError(f"q must be a positive integer, got {q}")
    if n < 1:
        raise ConfigurationError(f"n must be >= 1, got {n}")
    C = 2.0 + 16.0 * sigma ** 2
    return 2.0 * C * math.factorial(2 * int(q)) * (16.0 * sigma ** 2) ** q / n ** q


def two_step_tail_term(x : float, sigma : float, mu : float) -> float:
    """
    The x dependent term min(1, 2 C0 exp(-mu x / (256 sigma^2))) of the
    deviation bound of the two step estimator on a regular design. The residual
    term of that bound involves constants that are not known in closed form.
    """
    _check_sigma(sigma)
    if not x > 0:
        raise ConfigurationError(f"x must be > 0, got {x}")
    if not (0.0 < mu < 1.0):
        raise ConfigurationError(f"mu must be in (0,1), got {mu}")
    return min(1.0, 2.0 * _one_cp_constant(sigma) * math.exp(-mu * x / (256.0 * sigma ** 2)))


def lower_bound_s0(n : int) -> float:
    """
    Minimax lower bound 1/(8n) on segments anchored at 0.
    """
    if n < 1:
        raise ConfigurationError(f"n must be >= 1, got {n}")
    return 1.0 / (8.0 * n)



#
# Rate fitting
#

@dataclass
class RateFit:
    slope          : float
    intercept      : float
    r_squared      : float
    points         : List[Tuple[float, float]]
    zero_variance  : bool = False
    risk_times_n   : List[float] = field(default_factory=list)
    risk_times_n_over_log : List[float] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return {"slope": self.slope, "intercept": self.intercept, "r_squared": self.r_squared, "n_points": len(self.points)}


def risk_floor(max_n : int, reps : int) -> float:
    """
    Floor replacing zero empirical risks before a log fit: half the smallest
    non zero mean loss that reps replications at max_n can produce.
    """
    return 1.0 / (2.0 * max_n * reps)


def fit_rate(ns : Sequence[int], risks : Sequence[float]) -> RateFit:
    """
    Ordinary least squares of log(risk) on log(n).
    """
    ns, risks = np.asarray(ns, dtype=float), np.asarray(risks, dtype=float)
    if ns.size != risks.size:
        raise ConfigurationError(f"ns and risks differ in length ({ns.size} != {risks.size})")
    if ns.size < 2 or np.unique(ns).size < 2:
        raise ConfigurationError("a rate fit needs at least two distinct n")
    if np.any(risks <= 0):
        raise ConfigurationError("risks must be > 0; clamp zero risks to risk_floor(max_n, reps)")

    log_n, log_r = np.log(ns), np.log(risks)
    points       = list(zip(log_n.tolist(), log_r.tolist()))
    times_n      = (risks * ns).tolist()
    times_n_log  = (risks * ns / log_n).tolist()

    if np.ptp(log_r) == 0:
        return RateFit(0.0, float(log_r[0]), 1.0, points, True, times_n, times_n_log)

    fit = stats.linregress(log_n, log_r)
    return RateFit(float(fit.slope), float(fit.intercept), float(min(1.0, fit.rvalue ** 2)), points,
                   False, times_n, times_n_log)



#
# Parsers
#

def rates_parser():
  parser = argparse.ArgumentParser(description = '', add_help = False,  formatter_class=get_argparser_formatter())
  parser.add_argument('--in', action='store', dest='input', required = True,
                      help = "The risk report csv file.")
  parser.add_argument('--estimator', action='store', dest='estimator', required = False, default=None,
                      help = "Fit this estimator only.")
  parser.add_argument('--json', action='store_true', dest='json', required = False,
                      help = "Print the fits as json.")
  return [common_parser(), parser]
