"""Passing between measures on Z minus Gamma and functions orthogonal to E_Gamma.

Forward: a function f on (0, 2a) orthogonal to every exp(i gamma t) is
smoothed by a bump on [0, eps]; its Fourier coefficients off Gamma form a
measure whose transform vanishes on (2a + eps, 2 pi). Backward: the transform
of a measure with gap (0, 2a), restricted to (0, 2 pi), is orthogonal to
E_Gamma.
"""

import logging
import math
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from gapkit.config import fft_size
from gapkit.errors import GapError
from gapkit.gap.fourier import CauchyDecayTrace, cauchy_gap_test, measure_fourier
from gapkit.gap.witness import bump, periodic_coefficients
from gapkit.sets.discrete_set import DiscreteSet
from gapkit.sets.measure import AtomicMeasure, modulate

logger = logging.getLogger(__name__)

ORTHOGONALITY_TOL = 1e-8
COEFFICIENT_TOL = 1e-6
CERTIFICATE_FRACTION = 0.9


class BridgeFunction(BaseModel):
    """Samples of mu^ on the grid t_j = 2 pi j / N of [0, 2 pi)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: np.ndarray
    values: np.ndarray
    max_residual: float
    worst_gamma: Optional[int]
    certificate: CauchyDecayTrace


def unit_grid(size: int) -> np.ndarray:
    return 2.0 * math.pi * np.arange(size) / size


def _gamma_indices(gamma: DiscreteSet, size: int) -> np.ndarray:
    half = size // 2
    reach = min(float(half), gamma.generator.max_radius())
    pts = gamma.extend(reach).points if not gamma.is_finite() else gamma.points
    keys = np.rint(pts).astype(np.int64)
    if pts.size and np.max(np.abs(pts - keys)) > 1e-9:
        raise GapError("Gamma must be a subset of Z")
    return keys[(keys >= -half) & (keys < half)]


def _worst(coefficients: np.ndarray, indices: np.ndarray, size: int, scale: float) -> Tuple[float, Optional[int]]:
    if indices.size == 0 or scale == 0:
        return 0.0, None
    residuals = np.abs(coefficients[np.mod(indices, size)]) / scale
    i = int(np.argmax(residuals))
    return float(residuals[i]), int(indices[i])


def certify_gap(measure: AtomicMeasure, interval: Tuple[float, float], y_max: float = 1000.0) -> CauchyDecayTrace:
    """Cauchy-decay certificate for a gap on ``interval``, after centering it at 0."""
    lo, hi = interval
    center = 0.5 * (lo + hi)
    b = CERTIFICATE_FRACTION * 0.5 * (hi - lo)
    return cauchy_gap_test(modulate(measure, center), b, y_max)


def bridge_measure_from_function(
    gamma: DiscreteSet, samples: np.ndarray, a: float, epsilon: float, size: Optional[int] = None
) -> AtomicMeasure:
    """Measure on Z minus Gamma with a gap of length at least 2 pi - 2a - eps.

    Args:
        gamma: Gamma, a subset of Z
        samples: f on the grid points 2 pi j / N lying in [0, 2a)
        a: f lives on (0, 2a)
        epsilon: Width of the smoothing bump
        size: Grid size N (default GAPKIT_FFT_SIZE)

    Returns:
        mu = sum over n not in Gamma of g_n delta_n, g = f * h
    """
    size = size or fft_size()
    f = np.asarray(samples, dtype=complex)
    if not np.any(f):
        raise GapError("f vanishes identically; a nontrivial function is required")
    if epsilon <= 0:
        raise GapError(f"Smoothing width must be positive, got {epsilon}")
    if 2.0 * a + epsilon >= 2.0 * math.pi:
        raise GapError(f"2a + eps = {2.0 * a + epsilon:.6g} must be below 2 pi")
    grid = unit_grid(size)
    inside = int(np.count_nonzero(grid < 2.0 * a))
    if f.size != inside:
        raise GapError(f"Expected {inside} samples on [0, {2.0 * a:g}), got {f.size}")

    full = np.zeros(size, dtype=complex)
    full[:inside] = f
    f_hat = periodic_coefficients(full)
    n = np.arange(-size // 2, size // 2)
    indices = _gamma_indices(gamma, size)
    scale = float(np.max(np.abs(f_hat)))
    residual, worst = _worst(np.fft.fft(full) / size, indices, size, scale)
    if residual >= ORTHOGONALITY_TOL:
        raise GapError(f"f is not orthogonal to E_Gamma: residual {residual:.3e} at gamma={worst}")

    h = bump(grid / epsilon)
    h_hat = periodic_coefficients(h)
    g_hat = f_hat * h_hat / h_hat[size // 2]

    g_residual, g_worst = _worst(np.fft.ifftshift(g_hat), indices, size, float(np.max(np.abs(g_hat))))
    if g_residual >= COEFFICIENT_TOL:
        raise GapError(f"Coefficient on Gamma did not vanish: {g_residual:.3e} at gamma={g_worst}")
    keep = ~np.isin(n, indices)
    measure = AtomicMeasure(n[keep].astype(float), g_hat[keep]).pruned()

    gap = (2.0 * a + epsilon, 2.0 * math.pi)
    certificate = certify_gap(measure, gap)
    if not certificate.passed:
        raise GapError(f"Cauchy certificate failed for the gap {gap}: {certificate.verdict}")
    logger.info(f"forward bridge: {len(measure)} atoms, gap ({gap[0]:.4g}, {gap[1]:.4g}) certified")
    return measure


def bridge_function_from_measure(
    measure: AtomicMeasure, a: float, gamma: DiscreteSet, size: Optional[int] = None
) -> BridgeFunction:
    """Sample mu^ on (0, 2 pi) and check its orthogonality to E_Gamma.

    Args:
        measure: A nonzero measure on Z minus Gamma with gap (0, 2a)
        a: Half the gap length
        gamma: Gamma, a subset of Z
        size: Grid size N (default GAPKIT_FFT_SIZE)
    """
    size = size or fft_size()
    if measure.is_zero():
        raise GapError("The zero measure has no spectral gap to bridge; a nontrivial measure is required")
    if a <= 0:
        raise GapError(f"Gap half-length must be positive, got {a}")
    certificate = certify_gap(measure, (0.0, 2.0 * a))
    if not certificate.passed:
        raise GapError(f"Cauchy certificate failed for the gap (0, {2.0 * a:g}): {certificate.verdict}")

    grid = unit_grid(size)
    values = measure_fourier(measure, grid)
    indices = _gamma_indices(gamma, size)
    residual, worst = _worst(np.fft.fft(values) / size, indices, size, measure.total_variation)
    if residual >= COEFFICIENT_TOL:
        logger.warning(f"backward bridge residual {residual:.3e} at gamma={worst}")
    return BridgeFunction(
        grid=grid, values=values, max_residual=residual, worst_gamma=worst, certificate=certificate,
    )
