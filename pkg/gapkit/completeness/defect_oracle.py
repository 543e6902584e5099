"""Least-squares completeness defect of finite exponential sections on (-a, a)."""

import logging

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from gapkit.config import TOLERANCES
from gapkit.errors import GapkitError
from gapkit.gap.gram_oracle import gram_matrix
from gapkit.oracles.base_oracle import BaseTrendOracle
from gapkit.sets.discrete_set import DiscreteSet

logger = logging.getLogger(__name__)

MAX_TRIALS = 4096


def trial_frequencies(a: float, trials: int) -> np.ndarray:
    """beta*m for m = 0..M-1 with beta = a/(2M)."""
    return (a / (2.0 * trials)) * np.arange(trials)


def projection_residuals(points: np.ndarray, a: float, trials: int) -> np.ndarray:
    """Relative L2(-a, a) distance from each trial exponential to span{exp(i l t)}.

    Normal equations (G + rho I) c = b are solved by Cholesky; the squared
    residual is 2a - 2 c.b + c.G c, normalized by the trial norm 2a.
    """
    if trials > MAX_TRIALS:
        raise GapkitError(f"At most {MAX_TRIALS} trial functions, got {trials}")
    if points.size == 0:
        return np.ones(trials)
    targets = trial_frequencies(a, trials)
    gram = gram_matrix(points, a)
    rhs = 2.0 * a * np.sinc(a * (points[:, None] - targets[None, :]) / np.pi)
    ridge = TOLERANCES.ridge * 2.0 * a
    for attempt in range(6):
        try:
            factor = cho_factor(gram + ridge * np.eye(points.size), lower=True)
            break
        except LinAlgError:
            ridge *= 100.0
            logger.warning(f"Normal equations not positive definite; ridge raised to {ridge:.1e}")
    else:
        raise GapkitError(f"Normal equations stayed singular up to ridge {ridge:.1e}")
    coef = cho_solve(factor, rhs)
    squared = 2.0 * a - 2.0 * np.sum(coef * rhs, axis=0) + np.sum(coef * (gram @ coef), axis=0)
    return np.sqrt(np.clip(squared, 0.0, None) / (2.0 * a))


def completeness_defect_oracle(discrete_set: DiscreteSet, a: float, count: int, trials: int = 16) -> float:
    """Largest relative residual over the trial exponentials on the ``count`` centered points."""
    if a <= 0:
        raise GapkitError(f"Interval half-length must be positive, got {a}")
    return float(np.max(projection_residuals(discrete_set.centered(count), a, trials)))


class CompletenessDefectOracle(BaseTrendOracle):
    """Complete at level a when the defect collapses by a factor 5 as N doubles."""

    name = "defect"

    def __init__(self, trials: int = 16, trend_factor: float = TOLERANCES.defect_trend_factor):
        super().__init__(trend_factor)
        self.trials = trials

    def _value(self, points, parameter: float) -> float:
        return float(np.max(projection_residuals(points, parameter, self.trials)))

    def _passes(self, full: float, half: float) -> bool:
        # the ridge stops the residual near 1e-6 (8e-7 then 5e-7 on Z at 0.8 pi);
        # anything below defect_floor counts as collapsed
        return full <= max(half / self.trend_factor, TOLERANCES.defect_floor)
