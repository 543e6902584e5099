"""The interlacing product phi and its Herglotz representation.

phi(z) = -prod_j (1 - z/lambda_j) / (1 - z/lambda~_j) maps the upper
half-plane to itself, so on a finite window

    phi(z) = b1 z + b2 + sum_k c_k (1/(lambda~_k - z) - 1/lambda~_k)

with c_k > 0 and b1 >= 0.
"""

import logging
from typing import List, NamedTuple, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from gapkit.errors import TransportError
from gapkit.transport.interlacing import InterlacedPair

logger = logging.getLogger(__name__)

POLE_TOL = 1e-12
B1_GRID = np.geomspace(1e3, 1e4, 8)
FRACTIONS = (0.125, 0.25, 0.5, 1.0)


class PhiValue(NamedTuple):
    value: complex
    relative_change: float


class HerglotzData(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    poles: np.ndarray
    c: np.ndarray
    b1: float
    b2: float
    weighted_sum_partials: List[Tuple[float, float]]

    def evaluate(self, z: complex) -> complex:
        """b1 z + b2 + sum c_k (1/(lambda~_k - z) - 1/lambda~_k)."""
        terms = self.c * (1.0 / (self.poles - z) - 1.0 / self.poles)
        return complex(self.b1 * z + self.b2 + np.sum(terms))


def _log_product(base: np.ndarray, tilde: np.ndarray, z: np.ndarray) -> np.ndarray:
    """log of prod (lambda~/lambda)(lambda - z)/(lambda~ - z) for each z (any branch)."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    scale = np.sum(np.log(tilde / base))
    ratio = (base[None, :] - z[:, None]) / (tilde[None, :] - z[:, None])
    return scale + np.sum(np.log(ratio.astype(complex)), axis=1)


def phi_values(pair: InterlacedPair, zs: np.ndarray) -> np.ndarray:
    """phi on the whole window of ``pair`` at each z."""
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    gaps = np.min(np.abs(pair.perturbed.points[None, :] - zs[:, None]), axis=1)
    if np.any(gaps <= POLE_TOL):
        bad = zs[int(np.argmin(gaps))]
        raise TransportError(f"z={bad} is a pole of phi")
    return -np.exp(_log_product(pair.base.points, pair.perturbed.points, zs))


def phi_eval(pair: InterlacedPair, z: complex, window: Optional[int] = None) -> PhiValue:
    """phi(z) from the ``window`` pairs closest to 0.

    Factors are paired index by index and taken symmetrically outward; the
    relative change against half the window is the convergence proxy.
    """
    full = pair.window(window)
    value = complex(phi_values(full, np.array([z]))[0])
    half = full.window(max(2, len(full) // 2))
    coarse = complex(phi_values(half, np.array([z]))[0])
    change = abs(value - coarse) / abs(value) if value != 0 else 0.0
    return PhiValue(value=value, relative_change=float(change))


def residues(pair: InterlacedPair) -> np.ndarray:
    """c_k = -Res(phi, lambda~_k), from the product with the k-th pole removed.

    c_k = (lambda~_k/lambda_k) eps_k prod_{j != k} (lambda~_j/lambda_j)
          (lambda_j - lambda~_k)/(lambda~_j - lambda~_k), evaluated in log space.
    """
    lam, tilde = pair.base.points, pair.perturbed.points
    num = lam[None, :] - tilde[:, None]
    den = tilde[None, :] - tilde[:, None]
    np.fill_diagonal(num, 1.0)
    np.fill_diagonal(den, 1.0)
    ratio = np.log(np.abs(tilde / lam))
    log_c = np.log(np.abs(pair.offsets)) + np.sum(np.log(np.abs(num)) - np.log(np.abs(den)), axis=1)
    log_c += np.sum(ratio)
    negatives = np.sum(np.signbit(num), axis=1) + np.sum(np.signbit(den), axis=1)
    negatives += np.count_nonzero(tilde / lam < 0)
    sign = np.where(negatives % 2 == 0, 1.0, -1.0) * np.sign(pair.offsets)
    return sign * np.exp(log_c)


def herglotz_residues(pair: InterlacedPair, window: Optional[int] = None) -> HerglotzData:
    """Herglotz data of phi on the window.

    Args:
        pair: A validated interlaced pair
        window: Number of pairs used (default: all)

    Returns:
        HerglotzData with c_k > 0, b1 >= 0 and b2 = phi(0) = -1
    """
    full = pair.window(window)
    c = residues(full)
    bad = np.flatnonzero(c <= 0)
    if bad.size:
        k = int(bad[0])
        raise TransportError(f"Nonpositive residue c_{k}={c[k]:.3e} at {full.perturbed.points[k]}; windowing artifact")
    tilde = full.perturbed.points

    # b1 = lim (Im phi(iy) - Im sum)/y
    ys = B1_GRID
    phi_iy = phi_values(full, 1j * ys)
    sum_im = np.array([np.sum(c * y / (tilde ** 2 + y ** 2)) for y in ys])
    b1 = max(0.0, float(np.mean((phi_iy.imag - sum_im) / ys)))
    b2 = float(phi_values(full, np.array([0.0]))[0].real)

    reach = float(np.max(np.abs(tilde)))
    weighted = c / tilde ** 2
    partials = [(f * reach, float(np.sum(weighted[np.abs(tilde) <= f * reach]))) for f in FRACTIONS]
    logger.debug(f"herglotz: {c.size} residues, b1={b1:.3e}, b2={b2:.6g}, sum c/l~^2={partials[-1][1]:.6g}")
    return HerglotzData(poles=tilde, c=c, b1=b1, b2=b2, weighted_sum_partials=partials)


def growth_ratio(pair: InterlacedPair, ys=(10.0, 1e2, 1e3, 1e4), window: Optional[int] = None) -> float:
    """max over y of |phi(iy)| / |y|."""
    values = phi_values(pair.window(window), 1j * np.asarray(ys, dtype=float))
    return float(np.max(np.abs(values) / np.asarray(ys)))
