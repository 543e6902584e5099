"""Gap characteristic of a set by the density formula, the Gram oracle and the complement."""

import logging
import math
from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from gapkit.density.estimators import DensityOptions, lower_bm_density, upper_bm_density
from gapkit.errors import DensityError
from gapkit.gap.fourier import ft_gap_scan
from gapkit.gap.gram_oracle import GramGapOracle
from gapkit.gap.witness import build_gap_measure, full_lattice_step
from gapkit.sets.discrete_set import DiscreteSet, complement_in_lattice, separation
from gapkit.sets.dsl import format_set_spec
from gapkit.sets.measure import AtomicMeasure

logger = logging.getLogger(__name__)

AGREEMENT = 0.15
WITNESS_FRACTION = 0.9


class GapOptions(BaseModel):
    model_config = ConfigDict(frozen=True)

    window: int = Field(default=128, ge=8)
    steps: int = Field(default=12, ge=1)
    weighted: bool = False
    witness: bool = False
    density: DensityOptions = DensityOptions()


class RouteEstimate(BaseModel):
    model_config = ConfigDict(frozen=True)

    estimate: float
    bracket: Tuple[float, float]
    method: str


class WitnessSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    gap: float
    atoms: int
    total_variation: float
    scan_sup: float


class GapReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    set_spec: str
    density_route: RouteEstimate
    oracle_route: RouteEstimate
    complement_route: Optional[RouteEstimate] = None
    witness: Optional[WitnessSummary] = None
    agreement: bool


def gap_from_complement(discrete_set: DiscreteSet, opts: Optional[DensityOptions] = None) -> RouteEstimate:
    """pi/alpha - pi * D^BM(alpha*Z minus the set), for lattice subsets."""
    alpha = discrete_set.generator.lattice_alpha()
    if alpha is None:
        raise DensityError("The complement route needs a set contained in a lattice alpha*Z")
    upper = upper_bm_density(complement_in_lattice(discrete_set, alpha), opts)
    full = math.pi / alpha
    return RouteEstimate(
        estimate=max(0.0, full - math.pi * upper.estimate),
        bracket=(max(0.0, full - math.pi * upper.bracket[1]), max(0.0, full - math.pi * upper.bracket[0])),
        method="complement",
    )


def oracle_gap_bracket(discrete_set: DiscreteSet, opts: GapOptions) -> RouteEstimate:
    """Bisection on a over Gram trend verdicts, capped at pi/alpha + 1 (or pi/sep + 1)."""
    if discrete_set.is_finite():
        return RouteEstimate(estimate=0.0, bracket=(0.0, 0.0), method="gram")
    alpha = discrete_set.generator.lattice_alpha()
    step = alpha if alpha is not None else separation(discrete_set)
    with GramGapOracle(weighted=opts.weighted) as oracle:
        lo, hi = oracle.bisect(discrete_set, 0.0, math.pi / step + 1.0, opts.window, opts.steps)
    return RouteEstimate(estimate=0.5 * (lo + hi), bracket=(lo, hi), method="gram")


def lattice_witness(discrete_set: DiscreteSet, gap: Optional[float] = None) -> Tuple[AtomicMeasure, WitnessSummary]:
    """Gap witness at 90% of the lattice bound, with its transform scanned inside the gap."""
    alpha = full_lattice_step(discrete_set)
    if alpha is None:
        raise DensityError("Witnesses are built on full lattices only")
    a = gap if gap is not None else WITNESS_FRACTION * math.pi / alpha
    measure = build_gap_measure(discrete_set, a)
    level = 0.95 * a
    sup = ft_gap_scan(measure, (-level, level))
    summary = WitnessSummary(gap=a, atoms=len(measure), total_variation=measure.total_variation, scan_sup=sup)
    return measure, summary


def gap_characteristic_estimate(discrete_set: DiscreteSet, opts: Optional[GapOptions] = None) -> GapReport:
    """Both routes to the gap characteristic and whether they agree within 15%.

    The density route, pi times the lower density, is authoritative; the Gram
    route is a finite-section cross-check.
    """
    opts = opts or GapOptions()
    lower = lower_bm_density(discrete_set, opts.density)
    density_route = RouteEstimate(
        estimate=math.pi * lower.estimate,
        bracket=(math.pi * lower.bracket[0], math.pi * lower.bracket[1]),
        method=f"pi*lower_bm/{lower.method}",
    )
    oracle_route = oracle_gap_bracket(discrete_set, opts)
    complement_route = None
    if discrete_set.generator.lattice_alpha() is not None and not discrete_set.is_finite():
        complement_route = gap_from_complement(discrete_set, opts.density)

    witness = None
    if opts.witness and full_lattice_step(discrete_set) is not None:
        _, witness = lattice_witness(discrete_set)

    reference = density_route.estimate
    agreement = abs(reference - oracle_route.estimate) <= AGREEMENT * max(reference, 1e-12)
    if not agreement:
        logger.warning(
            f"gap routes disagree: density {reference:.4f} vs Gram {oracle_route.estimate:.4f}; "
            "the density route is authoritative"
        )
    return GapReport(
        set_spec=format_set_spec(discrete_set.generator),
        density_route=density_route,
        oracle_route=oracle_route,
        complement_route=complement_route,
        witness=witness,
        agreement=agreement,
    )
