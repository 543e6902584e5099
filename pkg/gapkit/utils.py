import json
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Iterable, List, Sequence, TypeVar

import numpy as np
from tqdm import tqdm

from gapkit.config import progress_enabled, thread_count

T = TypeVar("T")
R = TypeVar("R")

_MASK64 = np.uint64(0xFFFFFFFFFFFFFFFF)


def dumps(obj: Any) -> str:
    """Canonical JSON: sorted keys, fixed indentation, no NaN."""
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False)


def progress(iterable: Iterable[T], desc: str, total: int = None) -> Iterable[T]:
    """Wrap an iterable in a tqdm bar when GAPKIT_PROGRESS is set."""
    return tqdm(iterable, desc=desc, total=total, disable=not progress_enabled(), leave=False)


def parallel_map(func: Callable[[T], R], items: Sequence[T]) -> List[R]:
    """Map ``func`` over ``items`` keeping order, capped by GAPKIT_THREADS."""
    workers = min(thread_count(), max(1, len(items)))
    if workers == 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def hash_uniform(seed: int, keys: np.ndarray) -> np.ndarray:
    """Deterministic uniforms in [0, 1) per integer key (splitmix64).

    The value for a key does not depend on which other keys are requested,
    so random generators can extend a truncation without reshuffling it.
    """
    k = np.asarray(keys, dtype=np.int64).astype(np.uint64)
    with np.errstate(over="ignore"):
        z = k + np.uint64(seed & 0xFFFFFFFF) * np.uint64(0x9E3779B97F4A7C15) + np.uint64(0x9E3779B97F4A7C15)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        z = (z ^ (z >> np.uint64(31))) & _MASK64
    return (z >> np.uint64(11)).astype(np.float64) / float(1 << 53)


def geometric_grid(start: float, stop: float, per_decade: int = 24) -> np.ndarray:
    count = max(2, int(np.ceil(np.log10(stop / start) * per_decade)) + 1)
    return np.geomspace(start, stop, count)
