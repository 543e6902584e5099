"""Transforms of atomic measures and the numerical gap criteria.

The transform convention is mu^(x) = sum_lambda c_lambda exp(i x lambda).
"""

import logging
import math
from enum import Enum
from typing import List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict

from gapkit.errors import GapError
from gapkit.sets.measure import AtomicMeasure
from gapkit.utils import geometric_grid

logger = logging.getLogger(__name__)

CHUNK = 256
# keeps e^{b y} finite in stored traces
MAX_EXPONENT = 600.0
DECAY_FACTOR = 10.0
# slack on the factor-10 drop per decade; a 1/y tail sits right at it
LOG_TOLERANCE = 0.1
# |K| below this multiple of sum |c| / |z - lambda|, and |mu^| below this
# multiple of the total variation, count as zero
NOISE_FLOOR = 1e-8
# the Laplace integral stops where e^{-(s - b) y} < e^-40
LAPLACE_REACH = 40.0
LOG_CEILING = 700.0


def measure_fourier(measure: AtomicMeasure, x: Union[float, np.ndarray]) -> Union[complex, np.ndarray]:
    """mu^(x) by direct summation; compensated for scalar x, chunked for arrays."""
    if np.ndim(x) == 0:
        if len(measure) == 0:
            return 0j
        terms = measure.weights * np.exp(1j * float(x) * measure.supports)
        return complex(math.fsum(terms.real.tolist()), math.fsum(terms.imag.tolist()))
    xs = np.asarray(x, dtype=float)
    out = np.zeros(xs.shape, dtype=complex)
    if len(measure) == 0:
        return out
    flat = xs.ravel()
    result = out.ravel()
    for start in range(0, flat.size, CHUNK):
        block = flat[start:start + CHUNK]
        result[start:start + CHUNK] = np.exp(1j * np.outer(block, measure.supports)) @ measure.weights
    return result.reshape(xs.shape)


def scan_step_bound(measure: AtomicMeasure) -> float:
    """Largest admissible grid step pi/(4 max|support|)."""
    top = measure.max_support()
    return math.inf if top == 0 else math.pi / (4.0 * top)


def scan_grid(interval: Tuple[float, float], step: float) -> np.ndarray:
    lo, hi = interval
    if hi <= lo:
        raise GapError(f"Empty scan interval ({lo}, {hi})")
    count = int(math.ceil((hi - lo) / step)) + 1
    return np.linspace(lo, hi, max(count, 2))


def ft_gap_scan(
    measure: AtomicMeasure, interval: Tuple[float, float], grid_step: Optional[float] = None
) -> float:
    """Supremum of |mu^| over a uniform grid of ``interval``.

    Args:
        measure: The measure to scan
        interval: Closed scan range (l, r)
        grid_step: Grid spacing, at most pi/(4 max|support|); defaults to
            that bound (or 1/64 of the interval when it is smaller)

    Returns:
        The maximum of |mu^| on the grid
    """
    bound = scan_step_bound(measure)
    if grid_step is None:
        grid_step = min(bound, (interval[1] - interval[0]) / 64.0)
    elif grid_step > bound:
        raise GapError(f"Grid step {grid_step} exceeds the anti-aliasing bound {bound:.6g}")
    if len(measure) == 0:
        return 0.0
    values = np.abs(measure_fourier(measure, scan_grid(interval, grid_step)))
    return float(np.max(values))


def cauchy_transform(measure: AtomicMeasure, z: complex) -> complex:
    """K_mu(z) = sum c_lambda / (z - lambda) for z off the real axis."""
    z = complex(z)
    if z.imag == 0:
        raise GapError(f"Cauchy transform is only defined off the real axis, got z={z}")
    if len(measure) == 0:
        return 0j
    return complex(np.sum(measure.weights / (z - measure.supports)))


class DecayVerdict(str, Enum):
    DECAYING = "decaying"
    NON_DECAYING = "non-decaying"
    INCONCLUSIVE = "inconclusive"


class CauchyDecayTrace(BaseModel):
    """e^{b|y|} |K_mu(iy)| along geometric grids on both imaginary half-axes.

    ``upper_switch``/``lower_switch`` is the first |y| at which the direct
    sum sank to the noise floor and the Laplace form took over, or None when
    the direct sum covered the whole grid.
    """

    model_config = ConfigDict(frozen=True, use_enum_values=True)

    b: float
    upper: List[Tuple[float, float]]
    lower: List[Tuple[float, float]]
    verdict: DecayVerdict
    upper_switch: Optional[float] = None
    lower_switch: Optional[float] = None

    @property
    def samples(self) -> List[Tuple[float, float]]:
        return self.upper + self.lower

    @property
    def passed(self) -> bool:
        return self.verdict == DecayVerdict.DECAYING.value


def _direct_side(measure: AtomicMeasure, ys: np.ndarray, sign: float) -> Tuple[np.ndarray, int]:
    """|K_mu(sign i y)| and the length of the leading run above the noise floor."""
    if len(measure) == 0:
        return np.zeros(ys.size), ys.size
    z = sign * 1j * ys[:, None]
    terms = measure.weights[None, :] / (z - measure.supports[None, :])
    values = np.abs(np.sum(terms, axis=1))
    trusted = values > NOISE_FLOOR * np.sum(np.abs(terms), axis=1)
    run = int(np.argmin(trusted)) if not np.all(trusted) else ys.size
    return values, run


def _laplace_side(transform: np.ndarray, step: float, ys: np.ndarray, b: float) -> np.ndarray:
    """log of |int_0^inf e^{-(s - b) y} mu^(-+s) ds| for each y, -inf when it vanishes.

    ``transform`` holds mu^ at s_j = j * step on the relevant half-line,
    already cleared below the noise floor.
    """
    nonzero = np.flatnonzero(transform)
    out = np.full(ys.size, -np.inf)
    if nonzero.size == 0:
        return out
    s = nonzero * step
    weights = transform[nonzero] * np.where(nonzero == 0, 0.5 * step, step)
    exponents = -(s[None, :] - b) * ys[:, None]
    top = np.max(exponents, axis=1)
    total = np.abs(np.sum(np.exp(exponents - top[:, None]) * weights[None, :], axis=1))
    positive = total > 0
    out[positive] = top[positive] + np.log(total[positive])
    return out


def _decade_trend(trace: np.ndarray, ys: np.ndarray, start: float) -> str:
    if np.all(trace == 0.0):
        return "flat"
    inside = ys >= start * (1 - 1e-12)
    decade, span = trace[inside], ys[inside]
    first, last = decade[0], decade[-1]
    if last == 0.0:
        return "decaying"
    if first == 0.0:
        return "growing"
    # change per decade of y, so grid points need not hit the decade ends
    rate = math.log10(last / first) / math.log10(span[-1] / span[0])
    unit = math.log10(DECAY_FACTOR)
    if rate <= -unit * (1.0 - LOG_TOLERANCE):
        return "decaying"
    if rate >= unit:
        return "growing"
    return "unclear"


def cauchy_gap_test(measure: AtomicMeasure, b: float, y_max: float = 1000.0) -> CauchyDecayTrace:
    """Decide whether e^{b|y|} K_mu(iy) tends to 0 as y goes to both infinities.

    The trace is sampled on a geometric grid from 2 to y_max (to 600/b when
    that is smaller, so e^{b y} stays finite). K_mu(iy) comes from the
    direct sum while it stays above the noise floor. Further out it comes
    from the scaled Laplace form

        e^{b y} K_mu(+-iy) = -+i int_0^inf e^{-(s - b) y} mu^(-+s) ds,

    with |mu^| below NOISE_FLOOR times the total variation read as zero.
    The verdict reads the last decade of the grid: decaying when the trace
    drops by a factor 10 there, non-decaying when it grows by a factor 10.
    """
    if b < 0:
        raise GapError(f"Exponent b must be nonnegative, got {b}")
    y_max = max(float(y_max), 4.0)
    reach = y_max if b == 0 else max(4.0, min(y_max, MAX_EXPONENT / b))
    ys = geometric_grid(2.0, reach)
    start = max(2.0, reach / 10.0)

    direct = {sign: _direct_side(measure, ys, sign) for sign in (1.0, -1.0)}
    switch = {sign: (float(ys[run]) if run < ys.size else None) for sign, (_, run) in direct.items()}
    pending = [y for y in switch.values() if y is not None]
    if pending:
        step = min(scan_step_bound(measure), 1.0 / ys[-1])
        s_max = b + LAPLACE_REACH / min(pending)
        s = np.arange(int(math.ceil(s_max / step)) + 1) * step
        floor = NOISE_FLOOR * measure.total_variation

    sides, traces = {}, {}
    for sign, (values, run) in direct.items():
        trace = np.exp(b * ys) * values
        if run < ys.size:
            transform = measure_fourier(measure, -sign * s)
            transform[np.abs(transform) <= floor] = 0.0
            logs = _laplace_side(transform, step, ys[run:], b)
            trace[run:] = np.where(np.isfinite(logs), np.exp(np.minimum(logs, LOG_CEILING)), 0.0)
        traces[sign] = trace
        sides[sign] = _decade_trend(trace, ys, start)

    trends = set(sides.values())
    if "growing" in trends:
        verdict = DecayVerdict.NON_DECAYING
    elif trends <= {"decaying", "flat"}:
        verdict = DecayVerdict.DECAYING
    else:
        verdict = DecayVerdict.INCONCLUSIVE
    logger.debug(
        f"cauchy test b={b:.4g} y<={reach:.4g}: upper={sides[1.0]} (switch {switch[1.0]}), "
        f"lower={sides[-1.0]} (switch {switch[-1.0]}) -> {verdict.value}"
    )
    return CauchyDecayTrace(
        b=b,
        upper=[(float(y), float(v)) for y, v in zip(ys, traces[1.0])],
        lower=[(float(-y), float(v)) for y, v in zip(ys, traces[-1.0])],
        verdict=verdict,
        upper_switch=switch[1.0],
        lower_switch=switch[-1.0],
    )


def tame_coefficients(
    measure: AtomicMeasure, epsilon: float, m: int = 2, gap: Optional[float] = None
) -> AtomicMeasure:
    """Multiply weights by h(t) = (sin(eps t/m) / (eps t/m))^m.

    h has spectrum in [-eps, eps] and h(0) = 1, so a gap (-g, g) of the input
    shrinks to (-(g - eps), g - eps) while the weights gain a |t|^-m factor.
    """
    if epsilon <= 0:
        raise GapError(f"Taming width must be positive, got {epsilon}")
    if m < 1:
        raise GapError(f"Taming order must be at least 1, got {m}")
    if gap is not None and epsilon >= gap:
        raise GapError(f"Taming width {epsilon} is not below the declared gap {gap}")
    h = np.sinc(epsilon * measure.supports / (m * math.pi)) ** m
    return AtomicMeasure(measure.supports, measure.weights * h).pruned()


def decay_exponent(measure: AtomicMeasure) -> float:
    """Fitted p with |c_lambda| <= C |lambda|^-p, from the tail envelope."""
    s = np.abs(measure.supports)
    w = np.abs(measure.weights)
    keep = (s >= 1.0) & (w > 0)
    s, w = s[keep], w[keep]
    if s.size < 4:
        raise GapError(f"Too few atoms away from the origin to fit a decay exponent ({s.size})")
    order = np.argsort(s)[::-1]
    envelope = np.maximum.accumulate(w[order])
    slope = np.polyfit(np.log(s[order]), np.log(envelope), 1)[0]
    return float(-slope)
