"""Constructive gap measures on full lattices."""

import logging
import math
from typing import Literal, Optional

import numpy as np

from gapkit.config import TOLERANCES, fft_size
from gapkit.errors import GapError
from gapkit.sets.discrete_set import DiscreteSet
from gapkit.sets.measure import AtomicMeasure

logger = logging.getLogger(__name__)

Profile = Literal["exp", "poly"]
SHARPNESS = 0.1


def bump(s: np.ndarray, profile: Profile = "exp", m: int = 4, sharpness: float = SHARPNESS) -> np.ndarray:
    """Bump on (0, 1), zero outside.

    ``exp`` is exp(-tau / (s(1-s))), smooth of every order; ``poly`` is
    (s(1-s))^(m+1), of class C^m.
    """
    s = np.asarray(s, dtype=float)
    out = np.zeros(s.shape)
    inside = (s > 0) & (s < 1)
    t = s[inside] * (1.0 - s[inside])
    if profile == "exp":
        out[inside] = np.exp(-sharpness / t)
    elif profile == "poly":
        out[inside] = t ** (m + 1)
    else:
        raise GapError(f"Unknown bump profile {profile!r}")
    return out


def periodic_coefficients(samples: np.ndarray) -> np.ndarray:
    """Fourier coefficients c_n, n in [-N/2, N/2), of a periodic function from N samples."""
    size = samples.size
    raw = np.fft.fft(samples) / size
    n = np.arange(-size // 2, size // 2)
    return raw[np.mod(n, size)]


def full_lattice_step(discrete_set: DiscreteSet) -> Optional[float]:
    """alpha when the set is all of alpha*Z, else None."""
    alpha = discrete_set.generator.lattice_alpha()
    exact = discrete_set.generator.exact_density()
    if alpha is None or exact is None or abs(exact - 1.0 / alpha) > 1e-12 or discrete_set.is_finite():
        return None
    return alpha


def build_gap_measure(
    discrete_set: DiscreteSet,
    a: float,
    m: int = 4,
    profile: Profile = "exp",
    size: Optional[int] = None,
    sharpness: float = SHARPNESS,
) -> AtomicMeasure:
    """Measure on alpha*Z whose transform vanishes on (-a, a).

    The transform of sum_n c_n delta_{alpha n} is 2pi/alpha periodic, so it
    suffices to take a bump g supported in (a, 2pi/alpha - a) and use its
    Fourier coefficients as weights.

    Args:
        discrete_set: A full lattice alpha*Z
        a: Gap half-length, below pi/alpha
        m: Smoothness order of the ``poly`` profile
        profile: Bump profile, ``exp`` or ``poly``
        size: Discrete transform size (default GAPKIT_FFT_SIZE)
        sharpness: tau of the ``exp`` profile; larger values give faster
            coefficient decay and a flatter edge

    Returns:
        The witness measure, atoms below the coefficient floor dropped
    """
    alpha = full_lattice_step(discrete_set)
    if alpha is None:
        raise GapError(
            f"build_gap_measure needs a full lattice, got a {discrete_set.generator.kind} set; "
            "use bridge_measure_from_function for lattice subsets"
        )
    if a <= 0:
        raise GapError(f"Gap half-length must be positive, got {a}")
    bound = math.pi / alpha
    if a >= bound:
        raise GapError(f"Gap {a} exceeds lattice bound pi/alpha={bound:.6g}")

    size = size or fft_size()
    period = 2.0 * math.pi / alpha
    x = np.arange(size) * period / size
    g = bump((x - a) / (period - 2.0 * a), profile, m, sharpness)
    coefficients = periodic_coefficients(g)
    n = np.arange(-size // 2, size // 2)
    measure = AtomicMeasure(alpha * n, coefficients).pruned(TOLERANCES.coefficient_floor)
    logger.info(
        f"gap witness on {alpha:g}*Z with gap (-{a:g}, {a:g}): {len(measure)} atoms, "
        f"total variation {measure.total_variation:.6g}"
    )
    return measure
