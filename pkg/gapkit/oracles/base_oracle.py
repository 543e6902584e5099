import logging
from typing import Dict, Tuple

from gapkit.config import TOLERANCES
from gapkit.errors import TruncationError
from gapkit.oracles.oracle import TrendOracle
from gapkit.sets.discrete_set import DiscreteSet
from gapkit.utils import progress

logger = logging.getLogger(__name__)


class BaseTrendOracle(TrendOracle):
    """
    Abstract base for trend oracles:

      - Subclasses override `_value()` to measure the scalar on a point array.
      - Subclasses override `_passes()` to compare the values at N and N/2.
      - This base class picks the centered points, caches values inside a
        `with` block, and runs the bisection on the parameter.
    """

    name = "base"
    min_count = 4

    def __init__(self, trend_factor: float = TOLERANCES.trend_factor):
        self.trend_factor = trend_factor
        self._cache: Dict[Tuple[int, float, int], float] = {}
        self._caching = False

    def __enter__(self):
        self._caching = True
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self._caching = False
        self._cache.clear()

    def _points(self, discrete_set: DiscreteSet, count: int):
        if count < self.min_count:
            raise TruncationError(f"{self.name} oracle needs N >= {self.min_count}, got {count}")
        pts = discrete_set.centered(count)
        if pts.size < count and not discrete_set.is_finite():
            # the window may simply be too small; widen it once
            grown = discrete_set.extend(min(4.0 * discrete_set.window_radius, discrete_set.generator.max_radius()))
            pts = grown.centered(count)
        return pts

    def value(self, discrete_set: DiscreteSet, parameter: float, count: int) -> float:
        key = (id(discrete_set), parameter, count)
        if self._caching and key in self._cache:
            return self._cache[key]
        result = self._value(self._points(discrete_set, count), parameter)
        if self._caching:
            self._cache[key] = result
        return result

    def verdict(self, discrete_set: DiscreteSet, parameter: float, count: int) -> bool:
        """True when the value collapses as N doubles from count/2 to count."""
        pts = self._points(discrete_set, count)
        if pts.size < count:
            logger.debug(f"{self.name}: only {pts.size} points available for N={count}")
            return self._short_verdict(pts, parameter)
        full = self.value(discrete_set, parameter, count)
        half = self.value(discrete_set, parameter, count // 2)
        passed = self._passes(full, half)
        logger.debug(f"{self.name} p={parameter:.6g}: N/2 -> {half:.3e}, N -> {full:.3e}, passes={passed}")
        return passed

    def bisect(
        self, discrete_set: DiscreteSet, lo: float, hi: float, count: int, steps: int = TOLERANCES.bisection_steps
    ) -> Tuple[float, float]:
        """Bracket the supremum of the parameters whose verdict passes."""
        for _ in progress(range(steps), desc=f"{self.name} bisection", total=steps):
            mid = 0.5 * (lo + hi)
            if self.verdict(discrete_set, mid, count):
                lo = mid
            else:
                hi = mid
        logger.info(f"{self.name} bracket [{lo:.4f}, {hi:.4f}] at N={count}")
        return lo, hi

    def _value(self, points, parameter: float) -> float:
        raise NotImplementedError("Subclasses must implement _value()")

    def _passes(self, full: float, half: float) -> bool:
        raise NotImplementedError("Subclasses must implement _passes()")

    def _short_verdict(self, points, parameter: float) -> bool:
        """Verdict for a set with fewer than N points: no collapse can happen."""
        return False
