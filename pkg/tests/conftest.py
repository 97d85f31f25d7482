import numpy as np
import pytest
import hypothesis.strategies as st

from segsignal import DesignKind, NoiseSpec, Sample, Segment, make_design


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(20240607)


@pytest.fixture()
def noise_free() -> NoiseSpec:
    return NoiseSpec.parse("gaussian:0")


def dd_sample(y) -> Sample:
    """Sample on the regular grid i/n carrying the given labels."""
    y = np.asarray(y, dtype=float)
    return Sample(make_design(DesignKind.DD, y.size), y)


def random_sample(rng : np.random.Generator, n_max : int=50) -> Sample:
    """Random design and segment with gaussian noise, for oracle comparisons."""
    n      = int(rng.integers(1, n_max + 1))
    kind   = DesignKind.DD if rng.random() < 0.5 else DesignKind.RD
    x      = make_design(kind, n, rng)
    a, b   = np.sort(rng.uniform(0, 1, 2))
    sigma  = float(rng.choice([0.25, 1.0]))
    y      = (a <= x) & (x <= b)
    return Sample(x, y + rng.normal(0, sigma, n))


@st.composite
def segments(draw) -> Segment:
    """Segments of [0,1], the empty one included."""
    if draw(st.integers(0, 9)) == 0:
        return Segment.empty_set()
    a, b = sorted((draw(st.floats(0, 1)), draw(st.floats(0, 1))))
    return Segment(a, b)
