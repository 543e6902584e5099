"""Redheffer's integer assignment: sum |1/lambda_k - a/n_k| over distinct n_k."""

import logging
import math
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.optimize import linear_sum_assignment

from gapkit.config import TOLERANCES
from gapkit.density.regularity import RADIUS_FRACTIONS, Verdict
from gapkit.errors import DensityError
from gapkit.sets.discrete_set import DiscreteSet

logger = logging.getLogger(__name__)

MIN_SIDE_COUNT = 16


class RedhefferAssignment(BaseModel):
    model_config = ConfigDict(frozen=True, use_enum_values=True)

    a: float
    pairs: List[Tuple[float, int]]
    partial_sums: List[Tuple[int, float]]
    slope: float
    verdict: Verdict

    @property
    def total(self) -> float:
        return self.partial_sums[-1][1] if self.partial_sums else 0.0


def _monotone_indices(magnitudes: np.ndarray, a: float) -> np.ndarray:
    """Order-preserving injective assignment n_k >= 1 for increasing magnitudes.

    Start from round(a * lambda) and push each collision outward:
    n_k = max(r_k, n_{k-1} + 1), computed as k + cummax(r_k - k).
    """
    if magnitudes.size == 0:
        return np.empty(0, dtype=np.int64)
    r = np.maximum(np.rint(a * magnitudes).astype(np.int64), 1)
    k = np.arange(magnitudes.size, dtype=np.int64)
    return k + np.maximum.accumulate(r - k)


def _split_sides(points: np.ndarray, count: Optional[int]) -> Tuple[np.ndarray, np.ndarray]:
    positive = points[points > 0]
    negative = -points[points < 0][::-1]
    if count is not None:
        positive, negative = positive[:count], negative[:count]
    return positive, negative


def redheffer_sum(discrete_set: DiscreteSet, a: float, count: Optional[int] = None) -> RedhefferAssignment:
    """Assign distinct nonzero integers and measure the Redheffer sum.

    Args:
        discrete_set: The set; 0 must not belong to it
        a: Candidate density, positive
        count: Window size N, the number of points used on each side of 0
            (default: every point of the truncation)

    Returns:
        RedhefferAssignment with partial sums at N/8, N/4, N/2, N per side and
        the verdict from their slope against ln N
    """
    if a <= 0:
        raise DensityError(f"Candidate density must be positive, got {a}")
    if discrete_set.contains(0.0):
        raise DensityError("0 belongs to the set; translate it first (see avoid_origin)")

    positive, negative = _split_sides(discrete_set.points, count)
    n_pos = _monotone_indices(positive, a)
    n_neg = _monotone_indices(negative, a)
    cost_pos = np.abs(1.0 / positive - a / n_pos) if positive.size else np.empty(0)
    cost_neg = np.abs(1.0 / negative - a / n_neg) if negative.size else np.empty(0)

    side = max(positive.size, negative.size)
    cum_pos = np.concatenate([[0.0], np.cumsum(cost_pos)])
    cum_neg = np.concatenate([[0.0], np.cumsum(cost_neg)])
    partials = []
    for fraction in RADIUS_FRACTIONS:
        n = max(1, int(round(side * fraction)))
        partials.append((n, float(cum_pos[min(n, positive.size)] + cum_neg[min(n, negative.size)])))

    if side < MIN_SIDE_COUNT:
        slope, verdict = 0.0, Verdict.INCONCLUSIVE
    else:
        counts = np.log([n for n, _ in partials])
        slope = float(np.polyfit(counts, [v for _, v in partials], 1)[0])
        verdict = Verdict.CONVERGING if slope < TOLERANCES.slope_threshold else Verdict.DIVERGING

    pairs = [(float(p), int(n)) for p, n in zip(positive, n_pos)]
    pairs += [(float(-p), int(-n)) for p, n in zip(negative, n_neg)]
    pairs.sort()
    logger.debug(f"redheffer a={a:.6g} N={side}: sum={partials[-1][1]:.6g} slope={slope:.4g} -> {verdict.value}")
    return RedhefferAssignment(a=a, pairs=pairs, partial_sums=partials, slope=slope, verdict=verdict)


def brute_force_assignment(discrete_set: DiscreteSet, a: float, count: int = 20) -> Tuple[float, List[Tuple[float, int]]]:
    """Exact minimum-cost assignment on at most ``count`` points per side.

    Returns:
        The optimal total cost and the (lambda, n) pairs
    """
    if count > 20:
        raise DensityError(f"Brute-force assignment is limited to 20 points per side, got {count}")
    if a <= 0:
        raise DensityError(f"Candidate density must be positive, got {a}")
    positive, negative = _split_sides(discrete_set.points, count)
    lambdas = np.concatenate([-negative[::-1], positive])
    if lambdas.size == 0:
        return 0.0, []
    span = int(math.ceil(a * float(np.max(np.abs(lambdas))))) + lambdas.size + 2
    candidates = np.array([n for n in range(-span, span + 1) if n != 0], dtype=float)
    cost = np.abs(1.0 / lambdas[:, None] - a / candidates[None, :])
    rows, cols = linear_sum_assignment(cost)
    pairs = sorted((float(lambdas[r]), int(candidates[c])) for r, c in zip(rows, cols))
    return float(cost[rows, cols].sum()), pairs
