"""Upper and lower Beurling-Malliavin densities by bisection on Redheffer verdicts."""

import logging
import math
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from gapkit.config import TOLERANCES
from gapkit.density.redheffer import redheffer_sum
from gapkit.density.regularity import RegularityDiagnostics, Verdict, regular_witness_density, regularity_integral
from gapkit.errors import DensityError, TruncationError
from gapkit.sets.discrete_set import DiscreteSet, avoid_origin, complement_in_lattice, separation, snap_to_lattice
from gapkit.sets.generators import Generator
from gapkit.utils import parallel_map

logger = logging.getLogger(__name__)


class DensityOptions(BaseModel):
    """Knobs for the density estimators.

    Attributes:
        radius: Truncation radius used for the Redheffer windows
        steps: Bisection steps
        margin: Added to 1/separation for the initial upper end
        resolution: Offset between the Redheffer transition and the density;
            the slope 2(D - a) crosses the threshold at a = D - resolution
    """

    model_config = ConfigDict(frozen=True)

    radius: float = Field(default=2000.0, gt=0)
    steps: int = Field(default=TOLERANCES.bisection_steps, ge=1)
    margin: float = 0.5
    resolution: float = TOLERANCES.slope_threshold / 2.0


class DensityEstimate(BaseModel):
    model_config = ConfigDict(frozen=True)

    estimate: float
    bracket: Tuple[float, float]
    method: str
    exact: Optional[float] = None
    agrees: Optional[bool] = None
    wide: bool = False
    notes: List[str] = Field(default_factory=list)


class DensityReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    upper: DensityEstimate
    lower: DensityEstimate
    diagnostics: List[RegularityDiagnostics] = Field(default_factory=list)
    one_sided: bool = False
    consistent: bool = True


class ComplementarityReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    alpha: float
    lower: DensityEstimate
    complement_upper: DensityEstimate
    residual: float


def lattice_density_exact(generator: Generator) -> float:
    """Kept points per period over the period, for periodic lattice laws."""
    value = generator.exact_density()
    if value is None:
        raise DensityError(f"No exact density for a {generator.kind} set")
    return value


def _working_window(discrete_set: DiscreteSet, radius: float) -> DiscreteSet:
    reach = min(radius, discrete_set.generator.max_radius())
    try:
        return discrete_set.extend(reach)
    except TruncationError:
        return discrete_set


def _bracket_contains(bracket: Tuple[float, float], value: float) -> bool:
    tol = 1e-9
    return bracket[0] - tol <= value <= bracket[1] + tol


def upper_bm_density(discrete_set: DiscreteSet, opts: Optional[DensityOptions] = None) -> DensityEstimate:
    """Infimum of the a admitting a convergent Redheffer assignment.

    Args:
        discrete_set: A separated set
        opts: Estimator options

    Returns:
        DensityEstimate with the bisection bracket, tagged with the exact
        periodic value when the law has one
    """
    opts = opts or DensityOptions()
    exact = discrete_set.generator.exact_density()
    if discrete_set.is_finite():
        return DensityEstimate(estimate=0.0, bracket=(0.0, 0.0), method="finite", exact=0.0, agrees=True)

    work, shift = avoid_origin(_working_window(discrete_set, opts.radius))
    notes = [f"translated by {shift:.6g} to avoid 0"] if shift else []
    if len(work) < 2:
        raise TruncationError(f"Window of radius {work.window_radius} holds fewer than two points")
    lo, hi = 0.0, 1.0 / separation(work) + opts.margin

    top = redheffer_sum(work, hi)
    if top.verdict != Verdict.CONVERGING.value:
        notes.append(f"no convergence at the counting bound a={hi:.6g}")
        logger.warning(f"Redheffer sum does not converge at a={hi:.6g}; bracket is unreliable")
    diverged = False
    for _ in range(opts.steps):
        mid = 0.5 * (lo + hi)
        if redheffer_sum(work, mid).verdict == Verdict.CONVERGING.value:
            hi = mid
        else:
            lo, diverged = mid, True
    res = opts.resolution
    bracket = (lo + res / 2.0 if diverged else 0.0, hi + 1.5 * res)
    estimate = 0.5 * (bracket[0] + bracket[1])
    wide = bracket[1] - bracket[0] > 0.1
    if wide:
        notes.append("bracket wider than 0.1")
    agrees = _bracket_contains(bracket, exact) if exact is not None else None
    if agrees is False:
        logger.warning(f"Exact density {exact:.6g} outside bisection bracket {bracket}")
    logger.info(f"upper BM density ~ {estimate:.4f} in [{bracket[0]:.4f}, {bracket[1]:.4f}]")
    return DensityEstimate(
        estimate=estimate, bracket=bracket, method="redheffer", exact=exact, agrees=agrees, wide=wide, notes=notes,
    )


def _from_complement(alpha: float, complement_upper: DensityEstimate, method: str, exact: Optional[float]) -> DensityEstimate:
    full = 1.0 / alpha
    lo = max(0.0, full - complement_upper.bracket[1])
    hi = max(0.0, full - complement_upper.bracket[0])
    estimate = max(0.0, full - complement_upper.estimate)
    agrees = _bracket_contains((lo, hi), exact) if exact is not None else None
    return DensityEstimate(
        estimate=estimate, bracket=(lo, hi), method=method, exact=exact, agrees=agrees,
        wide=complement_upper.wide, notes=list(complement_upper.notes),
    )


def lower_bm_density(discrete_set: DiscreteSet, opts: Optional[DensityOptions] = None) -> DensityEstimate:
    """Supremum of the a for which the set holds a strongly a-regular subset.

    Lattice subsets use 1/alpha minus the upper density of their complement in
    alpha*Z. Other sets are first snapped to a fine lattice, which keeps the
    lower density, and the lattice route is applied to the snapped set.
    """
    opts = opts or DensityOptions()
    if discrete_set.is_finite():
        return DensityEstimate(estimate=0.0, bracket=(0.0, 0.0), method="finite", exact=0.0, agrees=True)

    exact = discrete_set.generator.exact_density()
    alpha = discrete_set.generator.lattice_alpha()
    if alpha is not None:
        complement = complement_in_lattice(discrete_set, alpha)
        return _from_complement(alpha, upper_bm_density(complement, opts), "complement", exact)

    work = _working_window(discrete_set, opts.radius)
    delta = separation(work) / 8.0
    fine = delta / 4.0
    snapped, _ = snap_to_lattice(work, delta, fine)
    logger.info(f"Snapping to {fine:.6g}*Z (delta={delta:.6g}) for the complement route")
    complement = complement_in_lattice(snapped, fine)
    estimate = _from_complement(fine, upper_bm_density(complement, opts), "snapped", exact)

    witness = regular_witness_density(work, work.window_radius)
    note = f"regular witness a={witness.a:.6g} ({witness.diagnostics.verdict})"
    return estimate.model_copy(update={"notes": estimate.notes + [note]})


def density_report(discrete_set: DiscreteSet, opts: Optional[DensityOptions] = None) -> DensityReport:
    """Both densities, regularity diagnostics at the upper estimate, and consistency flags."""
    opts = opts or DensityOptions()
    upper, lower = parallel_map(lambda f: f(discrete_set, opts), [upper_bm_density, lower_bm_density])
    pts = discrete_set.points
    one_sided = not discrete_set.is_finite() and pts.size > 0 and (pts.min() >= 0 or pts.max() <= 0)
    if one_sided:
        logger.warning("Set is unbounded in one direction only; the signed counting convention is used")
    tol = upper.bracket[1] - upper.bracket[0] + lower.bracket[1] - lower.bracket[0] + TOLERANCES.slope_threshold
    consistent = lower.estimate <= upper.estimate + tol
    if not consistent:
        logger.warning(f"lower density {lower.estimate:.4g} exceeds upper density {upper.estimate:.4g}")
    diagnostics: List[RegularityDiagnostics] = []
    if not discrete_set.is_finite():
        work = _working_window(discrete_set, opts.radius)
        diagnostics.append(regularity_integral(work, upper.estimate, work.window_radius))
    return DensityReport(upper=upper, lower=lower, diagnostics=diagnostics, one_sided=bool(one_sided), consistent=consistent)


def complementarity_check(discrete_set: DiscreteSet, opts: Optional[DensityOptions] = None) -> ComplementarityReport:
    """Residual of D_BM(L) + D^BM(alpha*Z minus L) = 1/alpha from independent estimates.

    The lower density comes from the regular witness search on the set itself,
    the complement's upper density from the Redheffer bisection.
    """
    opts = opts or DensityOptions()
    alpha = discrete_set.generator.lattice_alpha()
    if alpha is None:
        raise DensityError("Complementarity needs a set contained in a lattice alpha*Z")
    complement = complement_in_lattice(discrete_set, alpha)
    complement_upper = upper_bm_density(complement, opts)

    if discrete_set.is_finite():
        lower = DensityEstimate(estimate=0.0, bracket=(0.0, 0.0), method="finite")
    else:
        work = _working_window(discrete_set, opts.radius)
        witness = regular_witness_density(work, work.window_radius, upper=1.0 / alpha + opts.margin)
        lower = DensityEstimate(estimate=witness.a, bracket=witness.bracket, method="regular_witness")
    residual = abs(lower.estimate + complement_upper.estimate - 1.0 / alpha)
    if not math.isfinite(residual):
        raise DensityError("Complementarity residual is not finite")
    logger.info(f"complementarity residual {residual:.4g} (alpha={alpha:g})")
    return ComplementarityReport(alpha=alpha, lower=lower, complement_upper=complement_upper, residual=residual)
