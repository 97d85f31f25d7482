__all__ = ["derive_seed",
           "data_streams",
           "run_replications"]


import numpy as np

from concurrent.futures import ThreadPoolExecutor
from typing             import Callable, List, Sequence, Tuple, TypeVar


MASK64 = (1 << 64) - 1

T = TypeVar("T")


def _splitmix64(z : int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(master_seed : int, labels : Sequence[int]) -> int:
    """
    64-bit seed for the cell addressed by labels under master_seed.

    The label path is folded left to right with the splitmix64 finalizer,
    h <- mix(h ^ mix(label)), starting from h = mix(master). Every step is a
    bijection of the running state for a fixed label, so seeds differ along
    any single label, and the fold is order sensitive. Pure integer arithmetic
    on 64 bits, identical on every platform.
    """
    h = _splitmix64(master_seed & MASK64)
    for label in labels:
        h = _splitmix64(h ^ _splitmix64(int(label) & MASK64))
    return h


def data_streams(seed : int) -> Tuple[np.random.Generator, np.random.Generator]:
    """
    Independent (design, noise) generators spawned from one seed.
    """
    design, noise = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(design), np.random.default_rng(noise)


def run_replications(replicate : Callable[[int], T], reps : int, n_workers : int=1) -> List[T]:
    """
    Evaluate replicate(0..reps-1), concurrently when n_workers > 1. Results are
    returned in replication order whatever the number of workers.
    """
    if n_workers <= 1:
        return [replicate(rep) for rep in range(reps)]
    with ThreadPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(replicate, range(reps)))
