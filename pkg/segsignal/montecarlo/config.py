__all__ = ["ScaleRule",
           "SegmentFamily",
           "S0Grid",
           "ShortSegments",
           "SeparatedSegments",
           "AdversarialPair",
           "ExperimentConfig",
           "TASK_IDS"]


import math
import json

from dataclasses          import dataclass, field
from typing               import Dict, List, Optional, Tuple, Union
from segsignal            import load_json
from segsignal.model      import ConfigurationError, DesignKind, NoiseSpec, Segment
from segsignal.detection  import DETECTION_TESTS
from segsignal.estimation import ESTIMATORS


TASK_IDS = {"risk": 1, "detection": 2, "tail": 3}



@dataclass(frozen=True)
class ScaleRule:
    """
    A quantity depending on n: offset + scale * n**power * ln(n)**log.
    In JSON a plain number is a constant.
    """
    offset : float = 0.0
    scale  : float = 0.0
    power  : float = 0.0
    log    : float = 0.0

    def __call__(self, n : int) -> float:
        if self.scale == 0:
            return self.offset
        return self.offset + self.scale * n ** self.power * math.log(n) ** self.log

    @classmethod
    def parse(cls, value : Union[float, int, Dict]) -> "ScaleRule":
        if isinstance(value, (int, float)):
            return cls(offset=float(value))
        unknown = set(value) - {"offset", "scale", "power", "log"}
        if unknown:
            raise ConfigurationError(f"unknown scale rule keys {sorted(unknown)}")
        return cls(**{key: float(v) for key, v in value.items()})

    def to_json(self) -> Union[float, Dict]:
        if self.scale == 0:
            return self.offset
        return {"offset": self.offset, "scale": self.scale, "power": self.power, "log": self.log}



#
# Segment families
#

class SegmentFamily:
    """
    A finite family of segments standing in for the supremum over a class.
    members(n) may depend on n.
    """
    name         : str  = ""
    shared_noise : bool = False
    mu           : Optional[float] = None

    def members(self, n : int) -> List[Tuple[str, Segment]]:
        raise NotImplementedError

    def to_json(self) -> Dict:
        raise NotImplementedError

    @staticmethod
    def parse(d : Dict) -> "SegmentFamily":
        kinds = {"s0_grid": S0Grid, "s_short": ShortSegments, "s_mu": SeparatedSegments, "adversarial_pair": AdversarialPair}
        try:
            kind = kinds[d["name"]]
        except KeyError:
            raise ConfigurationError(f"unknown segment family {d.get('name')!r}, expected one of {sorted(kinds)}")
        return kind.from_json(d)


def _label(g : Segment) -> str:
    return "empty" if g.empty else f"[{g.a:.6g};{g.b:.6g}]"


class S0Grid(SegmentFamily):
    """
    Anchored segments [0, theta]. The default grid {0, 1/(2n), 1/3, 1/2,
    1 - 1/(2n), 1} is a heuristic set of hard cases, not a proven maximizer.
    """
    name = "s0_grid"

    def __init__(self, thetas : Optional[List[ScaleRule]]=None):
        self.thetas = thetas if thetas is not None else [
            ScaleRule(0.0),
            ScaleRule(scale=0.5, power=-1),
            ScaleRule(1.0 / 3.0),
            ScaleRule(0.5),
            ScaleRule(offset=1.0, scale=-0.5, power=-1),
            ScaleRule(1.0),
        ]

    def members(self, n : int) -> List[Tuple[str, Segment]]:
        segments = [Segment(0.0, min(1.0, max(0.0, theta(n)))) for theta in self.thetas]
        return [(_label(g), g) for g in segments]

    @classmethod
    def from_json(cls, d : Dict) -> "S0Grid":
        thetas = d.get("thetas")
        return cls(None if thetas is None else [ScaleRule.parse(t) for t in thetas])

    def to_json(self) -> Dict:
        return {"name": self.name, "thetas": [t.to_json() for t in self.thetas]}


class ShortSegments(SegmentFamily):
    """
    Segments of the given lengths placed at the given positions. With
    align="left" a position is the left endpoint, clipped to 1 - length; with
    align="center" it is the midpoint, clipped to [length/2, 1 - length/2].
    """
    name = "s_short"

    def __init__(self, lengths : List[ScaleRule], positions : List[float], align : str="left"):
        if align not in ("left", "center"):
            raise ConfigurationError(f"align must be left or center, got {align!r}")
        if not lengths or not positions:
            raise ConfigurationError("s_short needs at least one length and one position")
        self.lengths   = lengths
        self.positions = positions
        self.align     = align

    def members(self, n : int) -> List[Tuple[str, Segment]]:
        out = []
        for rule in self.lengths:
            length = rule(n)
            if not (0.0 <= length <= 1.0):
                raise ConfigurationError(f"segment length {length:.6g} at n={n} is outside [0,1]")
            for p in self.positions:
                if self.align == "left":
                    a = min(max(p, 0.0), 1.0 - length)
                else:
                    a = min(max(p, length / 2), 1.0 - length / 2) - length / 2
                g = Segment(a, min(1.0, a + length))
                out.append((_label(g), g))
        return out

    @classmethod
    def from_json(cls, d : Dict) -> "ShortSegments":
        return cls([ScaleRule.parse(v) for v in d["lengths"]], [float(p) for p in d["positions"]], d.get("align", "left"))

    def to_json(self) -> Dict:
        return {"name": self.name, "lengths": [v.to_json() for v in self.lengths], "positions": self.positions, "align": self.align}


class SeparatedSegments(SegmentFamily):
    """
    Fixed segments, each of length at least mu.
    """
    name = "s_mu"

    def __init__(self, mu : float, segments : List[Segment]):
        if not (0.0 < mu < 1.0):
            raise ConfigurationError(f"mu must be in (0,1), got {mu}")
        for g in segments:
            if g.length < mu:
                raise ConfigurationError(f"segment {g} is shorter than mu={mu}")
        self.mu       = mu
        self.segments = segments

    def members(self, n : int) -> List[Tuple[str, Segment]]:
        return [(_label(g), g) for g in self.segments]

    @classmethod
    def from_json(cls, d : Dict) -> "SeparatedSegments":
        return cls(float(d["mu"]), [Segment(float(a), float(b)) for a, b in d["segments"]])

    def to_json(self) -> Dict:
        return {"name": self.name, "mu": self.mu, "segments": [[g.a, g.b] for g in self.segments]}


class AdversarialPair(SegmentFamily):
    """
    G1 = [0,0] and G2 = [0, 1/(2n)]. No point of the regular design falls in
    G2 \\ G1, so both give the same data; the pair shares its noise stream.
    """
    name         = "adversarial_pair"
    shared_noise = True

    def members(self, n : int) -> List[Tuple[str, Segment]]:
        return [("G1", Segment(0.0, 0.0)), ("G2", Segment(0.0, 1.0 / (2 * n)))]

    @classmethod
    def from_json(cls, d : Dict) -> "AdversarialPair":
        return cls()

    def to_json(self) -> Dict:
        return {"name": self.name}



#
# Experiment configuration
#

@dataclass
class ExperimentConfig:
    """
    One Monte Carlo experiment, as read from a JSON file.

    Parameters:
    ----------
    master_seed : int
        Root of every replication seed.
    task : str
        "risk", "detection" or "tail".
    method : str
        An estimator (one-cp, lse, lse-anchored, two-step) for risk and tail,
        a test (counting, scan) for detection.
    family : SegmentFamily
        Truths for risk and tail, alternatives for detection.
    mu : float, optional
        Length bound for the two step estimator; defaults to the family's mu.
    moment : float
        Risk is the mean of loss**moment.
    h, c :
        Detection threshold rule h(n) and counting threshold c.
    x_grid : list of float
        Thresholds of the tail task, on the scale n * loss.
    n_workers : int
        Threads per cell; results do not depend on it.
    """
    master_seed : int
    design      : DesignKind
    noise       : NoiseSpec
    n_grid      : List[int]
    reps        : int
    task        : str
    method      : str
    family      : SegmentFamily
    mu          : Optional[float]     = None
    moment      : float               = 1.0
    h           : Optional[ScaleRule] = None
    c           : float               = 0.5
    x_grid      : List[float]         = field(default_factory=list)
    n_workers   : int                 = 1

    def __post_init__(self):
        if not self.n_grid or any(n < 1 for n in self.n_grid):
            raise ConfigurationError(f"n_grid must hold integers >= 1, got {self.n_grid}")
        if self.reps < 1:
            raise ConfigurationError(f"reps must be >= 1, got {self.reps}")
        if self.task not in TASK_IDS:
            raise ConfigurationError(f"unknown task {self.task!r}, expected one of {sorted(TASK_IDS)}")
        if self.task == "detection":
            if self.method not in DETECTION_TESTS:
                raise ConfigurationError(f"unknown test {self.method!r}, expected one of {sorted(DETECTION_TESTS)}")
            if self.h is None:
                raise ConfigurationError("a detection experiment needs a threshold rule h")
        elif self.method not in ESTIMATORS:
            raise ConfigurationError(f"unknown estimator {self.method!r}, expected one of {sorted(ESTIMATORS)}")
        if self.task == "tail":
            if self.method != "one-cp":
                raise ConfigurationError("the tail task runs the one-cp estimator only")
            if not self.x_grid or any(x <= 0 for x in self.x_grid):
                raise ConfigurationError(f"x_grid must hold positive reals, got {self.x_grid}")
        if self.mu is None:
            self.mu = self.family.mu
        if self.method == "two-step" and self.mu is None:
            raise ConfigurationError("the two-step estimator needs mu")
        if not self.moment > 0:
            raise ConfigurationError(f"moment must be > 0, got {self.moment}")

    @property
    def task_id(self) -> int:
        return TASK_IDS[self.task]

    @classmethod
    def from_dict(cls, d : Dict) -> "ExperimentConfig":
        known   = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ConfigurationError(f"unknown experiment keys {sorted(unknown)}")
        try:
            return cls(master_seed = int(d["master_seed"]),
                       design      = DesignKind.parse(d["design"]),
                       noise       = NoiseSpec.parse(d["noise"]) if isinstance(d["noise"], str)
                                     else NoiseSpec.parse(f"{d['noise']['family']}:{d['noise']['sigma']}"),
                       n_grid      = [int(n) for n in d["n_grid"]],
                       reps        = int(d["reps"]),
                       task        = d["task"],
                       method      = d["method"],
                       family      = SegmentFamily.parse(d["family"]),
                       mu          = None if d.get("mu") is None else float(d["mu"]),
                       moment      = float(d.get("moment", 1.0)),
                       h           = None if d.get("h") is None else ScaleRule.parse(d["h"]),
                       c           = float(d.get("c", 0.5)),
                       x_grid      = [float(x) for x in d.get("x_grid", [])],
                       n_workers   = int(d.get("n_workers", 1)))
        except KeyError as e:
            raise ConfigurationError(f"missing experiment key {e.args[0]!r}")

    @classmethod
    def from_json(cls, path : str) -> "ExperimentConfig":
        return cls.from_dict(load_json(path))

    def to_dict(self) -> Dict:
        return {"master_seed": self.master_seed,
                "design"     : self.design.value,
                "noise"      : str(self.noise),
                "n_grid"     : self.n_grid,
                "reps"       : self.reps,
                "task"       : self.task,
                "method"     : self.method,
                "family"     : self.family.to_json(),
                "mu"         : self.mu,
                "moment"     : self.moment,
                "h"          : None if self.h is None else self.h.to_json(),
                "c"          : self.c,
                "x_grid"     : self.x_grid,
                "n_workers"  : self.n_workers}

    def to_json(self, path : str):
        with open(path, 'w') as f:
            json.dump(self.to_dict(), f, indent=4)
