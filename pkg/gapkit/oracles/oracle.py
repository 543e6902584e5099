from typing import Protocol, Tuple

from gapkit.sets.discrete_set import DiscreteSet


class TrendOracle(Protocol):
    """Defines the interface for finite-section trend oracles.

    An oracle measures a scalar on the N points of a set closest to the origin
    and decides a property of the infinite set from how that scalar changes
    when N doubles.
    """

    name: str

    def value(self, discrete_set: DiscreteSet, parameter: float, count: int) -> float: ...

    def verdict(self, discrete_set: DiscreteSet, parameter: float, count: int) -> bool: ...

    def bisect(self, discrete_set: DiscreteSet, lo: float, hi: float, count: int, steps: int) -> Tuple[float, float]: ...
