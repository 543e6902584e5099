"""Interlaced pairs lambda_j < lambda_j + eps_j < lambda_{j+1}."""

import logging
from typing import Optional

import numpy as np

from gapkit.config import TOLERANCES
from gapkit.errors import TransportError
from gapkit.sets.discrete_set import DiscreteSet, perturb, separation
from gapkit.sets.measure import AtomicMeasure

logger = logging.getLogger(__name__)


class InterlacedPair:
    """A base set and its positive perturbation, aligned index by index.

    Attributes:
        base: lambda_j
        perturbed: lambda~_j = lambda_j + eps_j
        offsets: eps_j, all in (delta/2, delta)
        delta: The perturbation bound
        mirrored: True when the pair was obtained by swapping roles
    """

    __slots__ = ("base", "perturbed", "offsets", "delta", "mirrored")

    def __init__(self, base: DiscreteSet, perturbed: DiscreteSet, delta: float, mirrored: bool = False):
        self.base = base
        self.perturbed = perturbed
        self.offsets = perturbed.points - base.points
        self.delta = float(delta)
        self.mirrored = mirrored

    def __len__(self) -> int:
        return len(self.base)

    def __repr__(self) -> str:
        return f"InterlacedPair(n={len(self)}, delta={self.delta}, mirrored={self.mirrored})"

    @property
    def separation(self) -> float:
        return separation(self.base)

    def window(self, count: Optional[int] = None) -> "InterlacedPair":
        """The ``count`` pairs whose base points are closest to 0."""
        if count is None or count >= len(self):
            return self
        order = np.sort(np.argsort(np.abs(self.base.points), kind="stable")[:count])
        base = DiscreteSet.explicit(self.base.points[order])
        perturbed = DiscreteSet.explicit(self.perturbed.points[order])
        return InterlacedPair(base, perturbed, self.delta, self.mirrored)

    def swapped(self) -> "InterlacedPair":
        """Roles exchanged: lambda~ becomes the base, handled by mirroring x -> -x.

        The mirrored pair is (-lambda~, -lambda), again a positive perturbation.
        """
        base = DiscreteSet.explicit(-self.perturbed.points[::-1])
        perturbed = DiscreteSet.explicit(-self.base.points[::-1])
        return validate_interlacing(base, perturbed, self.delta, mirrored=not self.mirrored)


def mirror_measure(measure: AtomicMeasure) -> AtomicMeasure:
    """The image of a measure under x -> -x."""
    return AtomicMeasure(-measure.supports, measure.weights)


def validate_interlacing(
    base: DiscreteSet, perturbed: DiscreteSet, delta: float, mirrored: bool = False
) -> InterlacedPair:
    """Check every interlacing condition and build the pair.

    Raises:
        TransportError: Naming the first index that breaks a condition
    """
    lam, tilde = base.points, perturbed.points
    if lam.size != tilde.size:
        raise TransportError(f"Base has {lam.size} points in the window but the perturbed set has {tilde.size}")
    if lam.size < 2:
        raise TransportError("Interlacing needs at least two points")
    d = separation(base)
    if delta <= 0 or delta >= d / 4.0:
        raise TransportError(f"delta={delta} must lie in (0, separation/4={d / 4.0})")
    offsets = tilde - lam
    low = np.flatnonzero(offsets <= delta / 2.0)
    if low.size:
        j = int(low[0])
        raise TransportError(f"Offset {offsets[j]:.6g} at index {j} is not above delta/2={delta / 2.0}")
    high = np.flatnonzero(offsets >= delta)
    if high.size:
        j = int(high[0])
        raise TransportError(f"Offset {offsets[j]:.6g} at index {j} is not below delta={delta}")
    for name, pts in (("base", lam), ("perturbed", tilde)):
        hit = np.flatnonzero(np.abs(pts) <= TOLERANCES.absolute)
        if hit.size:
            raise TransportError(f"0 belongs to the {name} set (index {int(hit[0])}); translate first")
    crossing = np.flatnonzero(tilde[:-1] >= lam[1:])
    if crossing.size:
        j = int(crossing[0])
        raise TransportError(f"Interlacing broken at index {j}: {tilde[j]} >= {lam[j + 1]}")
    straddle = np.flatnonzero((lam < 0) & (tilde > 0))
    if straddle.size:
        j = int(straddle[0])
        raise TransportError(f"0 lies between base point {lam[j]} and its perturbation {tilde[j]} (index {j})")
    return InterlacedPair(base, perturbed, delta, mirrored)


def perturbed_pair(base: DiscreteSet, delta: float, seed: int = 0, count: Optional[int] = None) -> InterlacedPair:
    """Seeded positive perturbation of ``base`` (offsets in (delta/2, delta)) as a validated pair."""
    if count is not None:
        pts = base.centered(count)
        base = DiscreteSet.explicit(pts)
    moved = perturb(base, delta, mode="positive", seed=seed)
    logger.info(f"perturbed pair: {len(base)} points, delta={delta:g}, seed={seed}")
    return validate_interlacing(
        DiscreteSet.explicit(base.points), DiscreteSet.explicit(moved.points), delta,
    )


def pair_with_offsets(base: DiscreteSet, offsets: np.ndarray, delta: float) -> InterlacedPair:
    """Pair with explicit offsets, one per base point."""
    offsets = np.asarray(offsets, dtype=float)
    if offsets.shape != base.points.shape:
        raise TransportError(f"Expected {len(base)} offsets, got {offsets.size}")
    return validate_interlacing(DiscreteSet.explicit(base.points), DiscreteSet.explicit(base.points + offsets), delta)
