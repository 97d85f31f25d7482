__all__ = ["ConfigurationError",
           "SampleFormatError",
           "Segment",
           "DesignKind",
           "NoiseFamily",
           "NoiseSpec",
           "Sample",
           "make_design",
           "sample_observations",
           "nikodym_distance"]


import enum, argparse
import numpy as np
import pandas as pd

from dataclasses import dataclass
from typing      import Dict, Optional, Union
from loguru      import logger
from segsignal   import get_argparser_formatter



class ConfigurationError(ValueError):
    pass


class SampleFormatError(ValueError):
    pass



@dataclass(frozen=True)
class Segment:
    """
    A closed sub-interval [a,b] of [0,1], or the empty set.

    The empty set is a distinguished value: Segment(a, a) is a legal segment of
    length zero that still contains the point a, while the empty segment
    contains nothing.
    """
    a     : float = 0.0
    b     : float = 0.0
    empty : bool  = False

    def __post_init__(self):
        if self.empty:
            return
        if not (0.0 <= self.a <= self.b <= 1.0):
            raise ConfigurationError(f"segment must satisfy 0 <= a <= b <= 1, got [{self.a}, {self.b}]")

    @classmethod
    def empty_set(cls) -> "Segment":
        return cls(0.0, 0.0, empty=True)

    @classmethod
    def parse(cls, text : str) -> "Segment":
        """
        Parse "a,b" or "empty".
        """
        text = text.strip()
        if text.lower() == "empty":
            return cls.empty_set()
        try:
            a, b = [float(v) for v in text.split(",")]
        except ValueError:
            raise ConfigurationError(f"segment must be 'a,b' or 'empty', got '{text}'")
        return cls(a, b)

    @property
    def length(self) -> float:
        return 0.0 if self.empty else self.b - self.a

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.a + self.b)

    def contains(self, x : Union[float, np.ndarray]) -> Union[bool, np.ndarray]:
        if self.empty:
            return np.zeros_like(x, dtype=bool) if isinstance(x, np.ndarray) else False
        return (self.a <= x) & (x <= self.b)

    def overlap(self, other : "Segment") -> float:
        if self.empty or other.empty:
            return 0.0
        return max(0.0, min(self.b, other.b) - max(self.a, other.a))

    def to_dict(self) -> Dict:
        return {"a": self.a, "b": self.b, "empty": self.empty}

    def __str__(self) -> str:
        return "empty" if self.empty else f"[{self.a:.6g},{self.b:.6g}]"



class DesignKind(enum.Enum):
    DD = "dd"
    RD = "rd"

    @classmethod
    def parse(cls, text : str) -> "DesignKind":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ConfigurationError(f"design must be one of dd|rd, got '{text}'")



class NoiseFamily(enum.Enum):
    GAUSSIAN   = "gaussian"
    RADEMACHER = "rademacher"
    UNIFORM    = "uniform-bounded"



@dataclass(frozen=True)
class NoiseSpec:
    """
    Centered noise with subgaussian scale sigma.

    gaussian has standard deviation sigma, rademacher takes the values +-sigma
    with probability 1/2 and uniform-bounded is uniform on [-sigma, sigma]. All
    three satisfy E[exp(u*xi)] <= exp(sigma^2 u^2 / 2). sigma = 0 is accepted as
    a noise-free mode.
    """
    family : NoiseFamily = NoiseFamily.GAUSSIAN
    sigma  : float       = 1.0

    def __post_init__(self):
        if not np.isfinite(self.sigma) or self.sigma < 0:
            raise ConfigurationError(f"noise sigma must be >= 0, got {self.sigma}")

    @classmethod
    def parse(cls, text : str) -> "NoiseSpec":
        """
        Parse "family:sigma", e.g. "gaussian:0.25".
        """
        try:
            name, sigma = text.split(":")
            sigma = float(sigma)
        except ValueError:
            raise ConfigurationError(f"noise must be 'family:sigma', got '{text}'")
        name = name.strip().lower()
        if name == "uniform":
            name = NoiseFamily.UNIFORM.value
        try:
            family = NoiseFamily(name)
        except ValueError:
            raise ConfigurationError(f"unknown noise family '{name}'")
        return cls(family, sigma)

    def draw(self, rng : np.random.Generator, size : int) -> np.ndarray:
        if self.family is NoiseFamily.GAUSSIAN:
            return rng.normal(0.0, self.sigma, size)
        elif self.family is NoiseFamily.RADEMACHER:
            return self.sigma * (2.0 * rng.integers(0, 2, size) - 1.0)
        else:
            return rng.uniform(-self.sigma, self.sigma, size)

    def density(self, t : np.ndarray) -> np.ndarray:
        """
        Density (gaussian, uniform-bounded) or probability mass (rademacher) at t.
        """
        t = np.asarray(t, dtype=float)
        if self.sigma == 0:
            raise ConfigurationError("noise density is undefined for sigma = 0")
        if self.family is NoiseFamily.GAUSSIAN:
            return np.exp(-0.5 * (t / self.sigma) ** 2) / (self.sigma * np.sqrt(2.0 * np.pi))
        elif self.family is NoiseFamily.RADEMACHER:
            return 0.5 * (np.isclose(t, self.sigma, rtol=0, atol=1e-12) | np.isclose(t, -self.sigma, rtol=0, atol=1e-12))
        else:
            return np.where(np.abs(t) <= self.sigma, 0.5 / self.sigma, 0.0)

    def to_dict(self) -> Dict:
        return {"family": self.family.value, "sigma": self.sigma}

    def __str__(self) -> str:
        return f"{self.family.value}:{self.sigma!r}"



@dataclass
class Sample:
    """
    Sorted design points x and labels y = 1(x in G) + noise.
    """
    x : np.ndarray
    y : np.ndarray

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if self.x.ndim != 1 or self.x.shape != self.y.shape:
            raise SampleFormatError(f"x and y must be 1d arrays of equal length, got {self.x.shape} and {self.y.shape}")
        if self.x.size == 0:
            raise SampleFormatError("a sample needs at least one observation")
        if np.any(np.diff(self.x) < 0):
            raise SampleFormatError("design points must be sorted ascending")
        if self.x[0] < 0 or self.x[-1] > 1:
            raise SampleFormatError("design points must lie in [0,1]")

    @property
    def n(self) -> int:
        return self.x.size

    @property
    def weights(self) -> np.ndarray:
        """
        The least squares weights 2*y - 1.
        """
        return 2.0 * self.y - 1.0

    def subsample(self, index : np.ndarray) -> "Sample":
        return Sample(self.x[index], self.y[index])

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"i": np.arange(1, self.n + 1), "x": self.x, "y": self.y})

    def to_csv(self, path : str):
        self.to_frame().to_csv(path, index=False, float_format="%.17g")
        logger.debug(f"wrote sample with n={self.n} to {path}")

    @classmethod
    def from_csv(cls, path : str) -> "Sample":
        frame = pd.read_csv(path, float_precision="round_trip")
        if list(frame.columns) != ["i", "x", "y"]:
            raise SampleFormatError(f"{path}: expected header 'i,x,y', got '{','.join(frame.columns)}'")
        return cls(frame["x"].to_numpy(dtype=float), frame["y"].to_numpy(dtype=float))



#
# Operations
#

def make_design(kind : DesignKind, n : int, rng : Optional[np.random.Generator]=None) -> np.ndarray:
    """
    Design points of size n, sorted ascending.

    Parameters:
    ----------
    kind : DesignKind
        DD gives the regular grid i/n, i=1..n. RD gives n i.i.d. uniforms on
        [0,1] sorted ascending, consuming exactly n draws of rng.
    n : int
        Number of design points, n >= 1.
    rng : np.random.Generator, optional
        Required for RD only.
    """
    if n < 1:
        raise ConfigurationError(f"n must be >= 1, got {n}")
    if kind is DesignKind.DD:
        return np.arange(1, n + 1) / n
    if rng is None:
        raise ConfigurationError("a random design needs a random stream")
    return np.sort(rng.uniform(0.0, 1.0, n))


def sample_observations(design : np.ndarray,
                        g      : Segment,
                        noise  : NoiseSpec,
                        rng    : np.random.Generator) -> Sample:
    """
    Draw y_i = 1(x_i in g) + xi_i. The i-th noise draw goes to the i-th sorted
    design point, so two segments agreeing on every design point produce the
    same labels from the same stream.
    """
    design = np.asarray(design, dtype=float)
    xi     = noise.draw(rng, design.size)
    return Sample(design, g.contains(design).astype(float) + xi)


def nikodym_distance(g1 : Segment, g2 : Segment) -> float:
    """
    Lebesgue measure of the symmetric difference of g1 and g2.
    """
    return max(0.0, g1.length + g2.length - 2.0 * g1.overlap(g2))



#
# Parsers
#

def common_parser():
  parser = argparse.ArgumentParser(description = '', add_help = False,  formatter_class=get_argparser_formatter())
  parser.add_argument('-v','--verbose', action='store_true', dest='verbose', required = False,
                      help = "Set as verbose output.")
  return parser

def simulate_parser():
  parser = argparse.ArgumentParser(description = '', add_help = False,  formatter_class=get_argparser_formatter())
  parser.add_argument('--design', action='store', dest='design', required = True, choices=['dd','rd'],
                      help = "The design: dd (regular grid i/n) or rd (sorted uniforms).")
  parser.add_argument('--n', action='store', dest='n', required = True, type=int,
                      help = "The number of observations.")
  parser.add_argument('--segment', action='store', dest='segment', required = True,
                      help = "The true segment as 'a,b', or 'empty'.")
  parser.add_argument('--noise', action='store', dest='noise', required = True,
                      help = "The noise as 'family:sigma' (gaussian, rademacher, uniform-bounded).")
  parser.add_argument('--seed', action='store', dest='seed', required = True, type=int,
                      help = "The seed of the design and noise streams.")
  parser.add_argument('--out', action='store', dest='output', required = True,
                      help = "The sample csv file to write.")
  return [common_parser(), parser]
