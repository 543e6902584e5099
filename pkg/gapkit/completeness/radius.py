"""Completeness radius of E_Lambda: formula route, defect route and identities."""

import logging
import math
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field

from gapkit.completeness.defect_oracle import CompletenessDefectOracle
from gapkit.density.estimators import DensityOptions, upper_bm_density
from gapkit.density.regularity import regular_witness_density
from gapkit.errors import DensityError, PerturbationError
from gapkit.gap.estimate import RouteEstimate
from gapkit.sets.discrete_set import DiscreteSet, complement_in_lattice, perturb, separation
from gapkit.sets.dsl import format_set_spec
from gapkit.utils import parallel_map, progress

logger = logging.getLogger(__name__)

AGREEMENT = 0.15


class RadiusOptions(BaseModel):
    model_config = ConfigDict(frozen=True)

    window: int = Field(default=128, ge=8)
    trials: int = Field(default=16, ge=1, le=4096)
    steps: int = Field(default=12, ge=1)
    density: DensityOptions = DensityOptions()


class RadiusReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    set_spec: str
    formula_route: RouteEstimate
    defect_route: RouteEstimate
    agreement: bool


class PerturbationCheck(BaseModel):
    model_config = ConfigDict(frozen=True)

    delta: float
    base_radius: float
    radii: List[float]
    max_deviation: float
    bracket_width: float
    within: bool


class IdentityReport(BaseModel):
    """G(L) + R(alpha*Z minus L) against pi/alpha."""

    model_config = ConfigDict(frozen=True)

    alpha: float
    gap: RouteEstimate
    radius: RouteEstimate
    target: float
    residual: float
    tolerance: float
    holds: bool


def formula_radius(discrete_set: DiscreteSet, opts: Optional[DensityOptions] = None) -> RouteEstimate:
    """pi times the upper density."""
    upper = upper_bm_density(discrete_set, opts)
    return RouteEstimate(
        estimate=math.pi * upper.estimate,
        bracket=(math.pi * upper.bracket[0], math.pi * upper.bracket[1]),
        method=f"pi*upper_bm/{upper.method}",
    )


def defect_radius(discrete_set: DiscreteSet, opts: RadiusOptions) -> RouteEstimate:
    """Bisection on a over defect trend verdicts, capped at pi/alpha + 1 (or pi/sep + 1)."""
    if discrete_set.is_finite():
        return RouteEstimate(estimate=0.0, bracket=(0.0, 0.0), method="defect")
    alpha = discrete_set.generator.lattice_alpha()
    step = alpha if alpha is not None else separation(discrete_set)
    with CompletenessDefectOracle(trials=opts.trials) as oracle:
        lo, hi = oracle.bisect(discrete_set, 0.0, math.pi / step + 1.0, opts.window, opts.steps)
    return RouteEstimate(estimate=0.5 * (lo + hi), bracket=(lo, hi), method="defect")


def radius_estimate(discrete_set: DiscreteSet, opts: Optional[RadiusOptions] = None) -> RadiusReport:
    opts = opts or RadiusOptions()
    formula = formula_radius(discrete_set, opts.density)
    defect = defect_radius(discrete_set, opts)
    agreement = abs(formula.estimate - defect.estimate) <= AGREEMENT * max(formula.estimate, 1e-12)
    if not agreement:
        logger.warning(
            f"radius routes disagree: formula {formula.estimate:.4f} vs defect {defect.estimate:.4f}; "
            "the formula route is authoritative"
        )
    return RadiusReport(
        set_spec=format_set_spec(discrete_set.generator),
        formula_route=formula,
        defect_route=defect,
        agreement=agreement,
    )


def perturbation_radius_check(
    discrete_set: DiscreteSet,
    delta: float,
    trials: int = 5,
    seed: int = 0,
    opts: Optional[DensityOptions] = None,
) -> PerturbationCheck:
    """Max |R(perturbed) - R(set)| over seeded symmetric perturbations |eps| < delta.

    Args:
        discrete_set: A separated set
        delta: Perturbation bound, below separation/4
        trials: Number of perturbations
        seed: Base seed; trial t uses seed + t
        opts: Density options for the formula route

    Returns:
        PerturbationCheck with the deviation and the base bracket width
    """
    if delta < 0:
        raise PerturbationError(f"delta must be nonnegative, got {delta}")
    base = formula_radius(discrete_set, opts)
    width = base.bracket[1] - base.bracket[0]
    if delta == 0:
        return PerturbationCheck(
            delta=0.0, base_radius=base.estimate, radii=[base.estimate] * trials,
            max_deviation=0.0, bracket_width=width, within=True,
        )
    if len(discrete_set) > 1 and delta >= separation(discrete_set) / 4.0:
        raise PerturbationError(
            f"Perturbation too large: delta={delta} must be below separation/4={separation(discrete_set) / 4.0}"
        )

    def one_trial(t: int) -> float:
        moved = perturb(discrete_set, delta, mode="symmetric", seed=seed + t)
        return formula_radius(moved, opts).estimate

    radii = parallel_map(one_trial, list(progress(range(trials), desc="perturbation trials", total=trials)))
    deviation = max(abs(r - base.estimate) for r in radii)
    tolerance = width
    logger.info(f"perturbation check delta={delta:g}: max deviation {deviation:.4g} (tolerance {tolerance:.4g})")
    return PerturbationCheck(
        delta=delta, base_radius=base.estimate, radii=radii,
        max_deviation=deviation, bracket_width=width, within=deviation <= tolerance,
    )


def _lattice_step(discrete_set: DiscreteSet) -> float:
    alpha = discrete_set.generator.lattice_alpha()
    if alpha is None:
        raise DensityError("The identity needs a set contained in a lattice alpha*Z")
    return alpha


def _witness_gap(discrete_set: DiscreteSet, opts: DensityOptions) -> RouteEstimate:
    if discrete_set.is_finite():
        return RouteEstimate(estimate=0.0, bracket=(0.0, 0.0), method="finite")
    work = discrete_set.extend(min(opts.radius, discrete_set.generator.max_radius()))
    witness = regular_witness_density(work, work.window_radius)
    return RouteEstimate(
        estimate=math.pi * witness.a,
        bracket=(math.pi * witness.bracket[0], math.pi * witness.bracket[1]),
        method="pi*regular_witness",
    )


def radius_from_gap_route(discrete_set: DiscreteSet, opts: Optional[DensityOptions] = None) -> RouteEstimate:
    """R(alpha*Z minus L) read off as pi/alpha - G(L), with G(L) from a regular witness."""
    opts = opts or DensityOptions()
    alpha = _lattice_step(discrete_set)
    gap = _witness_gap(discrete_set, opts)
    full = math.pi / alpha
    return RouteEstimate(
        estimate=max(0.0, full - gap.estimate),
        bracket=(max(0.0, full - gap.bracket[1]), max(0.0, full - gap.bracket[0])),
        method="pi/alpha-gap",
    )


def gap_radius_identity(discrete_set: DiscreteSet, opts: Optional[DensityOptions] = None) -> IdentityReport:
    """Check G(L) + R(alpha*Z minus L) = pi/alpha from independent estimates.

    G comes from a regular witness inside the set, R from the Redheffer
    bisection on the complement.
    """
    opts = opts or DensityOptions()
    alpha = _lattice_step(discrete_set)
    gap = _witness_gap(discrete_set, opts)
    radius = formula_radius(complement_in_lattice(discrete_set, alpha), opts)
    target = math.pi / alpha
    residual = abs(gap.estimate + radius.estimate - target)
    tolerance = (gap.bracket[1] - gap.bracket[0]) + (radius.bracket[1] - radius.bracket[0])
    tolerance = max(tolerance, math.pi * opts.resolution)
    logger.info(f"gap/radius identity alpha={alpha:g}: residual {residual:.4g} (tolerance {tolerance:.4g})")
    return IdentityReport(
        alpha=alpha, gap=gap, radius=radius, target=target,
        residual=residual, tolerance=tolerance, holds=residual <= tolerance,
    )
