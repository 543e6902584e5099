"""Separated real sequences: truncations of infinite sets with their law."""

import logging
import math
from typing import Iterable, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from gapkit.config import TOLERANCES
from gapkit.errors import PerturbationError, SeparationError, TruncationError
from gapkit.sets.generators import (
    ExplicitGenerator,
    Generator,
    ModifiedGenerator,
    PerturbationMode,
    PerturbedGenerator,
    complement_generator,
)

logger = logging.getLogger(__name__)


class Window(BaseModel):
    """Truncation control: a radius and, for lattice laws, the index half-count."""

    model_config = ConfigDict(frozen=True)

    radius: float = Field(gt=0)
    half_count: Optional[int] = None


class DiscreteSet:
    """A strictly increasing, separated truncation of a (conceptually infinite) set.

    Attributes:
        points: Read-only sorted array of the points inside the window
        generator: Law producing the infinite set
        window_radius: The points cover [-window_radius, window_radius]
    """

    __slots__ = ("points", "generator", "window_radius")

    def __init__(self, points: Iterable[float], generator: Generator, window_radius: float):
        pts = np.array(list(points) if not isinstance(points, np.ndarray) else points, dtype=float)
        if pts.ndim != 1:
            raise SeparationError("Points must be a one-dimensional sequence")
        if pts.size > 1 and np.any(np.diff(pts) <= 0):
            bad = int(np.argmin(np.diff(pts)))
            raise SeparationError(
                f"Points must be strictly increasing; points {bad} and {bad + 1} are {pts[bad]} and {pts[bad + 1]}"
            )
        if window_radius <= 0:
            raise TruncationError(f"Window radius must be positive, got {window_radius}")
        pts.setflags(write=False)
        self.points = pts
        self.generator = generator
        self.window_radius = float(window_radius)

    @classmethod
    def from_generator(cls, generator: Generator, radius: float) -> "DiscreteSet":
        return cls(generator.points(radius), generator, radius)

    @classmethod
    def explicit(cls, values: Iterable[float], finite: bool = True) -> "DiscreteSet":
        pts = sorted(float(v) for v in values)
        radius = max([abs(p) for p in pts], default=0.0) or 1.0
        generator = ExplicitGenerator(values=tuple(pts), finite=finite, radius=None if finite else radius)
        return cls(pts, generator, radius)

    def __len__(self) -> int:
        return int(self.points.size)

    def __repr__(self) -> str:
        return f"DiscreteSet(kind={self.generator.kind}, n={len(self)}, radius={self.window_radius})"

    @property
    def window(self) -> Window:
        alpha = self.generator.lattice_alpha()
        half = int(math.floor(self.window_radius / alpha + 1e-12)) if alpha else None
        return Window(radius=self.window_radius, half_count=half)

    def is_finite(self) -> bool:
        return self.generator.is_finite()

    def extend(self, radius: float) -> "DiscreteSet":
        """Return a truncation covering at least [-radius, radius]."""
        if radius <= self.window_radius:
            return self
        if radius > self.generator.max_radius() + 1e-12:
            raise TruncationError(
                f"Set {self.generator.kind} cannot be extended beyond radius {self.generator.max_radius()} (asked {radius})"
            )
        return DiscreteSet.from_generator(self.generator, radius)

    def centered(self, count: int) -> np.ndarray:
        """The ``count`` points closest to the origin, sorted."""
        pts = self.points
        if count >= pts.size:
            return pts
        order = np.argsort(np.abs(pts), kind="stable")[:count]
        return np.sort(pts[order])

    def contains(self, x: float, atol: float = TOLERANCES.absolute) -> bool:
        if self.points.size == 0:
            return False
        i = int(np.searchsorted(self.points, x))
        for j in (i - 1, i):
            if 0 <= j < self.points.size and abs(self.points[j] - x) <= atol:
                return True
        return False


def separation(discrete_set: DiscreteSet) -> float:
    """Minimum gap between consecutive points of the truncation."""
    if len(discrete_set) < 2:
        raise SeparationError(f"Undefined separation: set has {len(discrete_set)} point(s)")
    return float(np.min(np.diff(discrete_set.points)))


def counting_function(discrete_set: DiscreteSet, x: float) -> int:
    """Signed counting function.

    n(x) = #(points in [0, x]) for x >= 0 and -#(points in (x, 0)) for x < 0.
    """
    if abs(x) > discrete_set.window_radius + TOLERANCES.absolute:
        raise TruncationError(f"x={x} is outside the truncation radius {discrete_set.window_radius}")
    return int(counting_values(discrete_set.points, np.asarray([x], dtype=float))[0])


def counting_values(points: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Vectorised signed counting function on sorted ``points``."""
    zero_left = np.searchsorted(points, 0.0, side="left")
    right = np.searchsorted(points, xs, side="right")
    positive = right - zero_left
    negative = -(zero_left - right)
    return np.where(xs >= 0, positive, negative)


def translate(discrete_set: DiscreteSet, x: float) -> DiscreteSet:
    """Shift every point by -x; the law becomes explicit."""
    shifted = discrete_set.points - x
    if discrete_set.is_finite():
        radius = max(float(np.max(np.abs(shifted))) if shifted.size else 0.0, discrete_set.window_radius) or 1.0
        generator = ExplicitGenerator(values=tuple(shifted.tolist()), finite=True)
        return DiscreteSet(shifted, generator, radius)
    radius = discrete_set.window_radius - abs(x)
    if radius <= 0:
        raise TruncationError(f"Shift {x} exceeds the truncation radius {discrete_set.window_radius}")
    kept = shifted[np.abs(shifted) <= radius + TOLERANCES.absolute]
    generator = ExplicitGenerator(values=tuple(kept.tolist()), finite=False, radius=radius)
    return DiscreteSet(kept, generator, radius)


def avoid_origin(discrete_set: DiscreteSet) -> Tuple[DiscreteSet, float]:
    """Translate by a third of the separation when 0 is a point of the set.

    Returns:
        The (possibly) translated set and the shift that was applied
    """
    if not discrete_set.contains(0.0):
        return discrete_set, 0.0
    shift = separation(discrete_set) / 3.0 if len(discrete_set) > 1 else 0.5
    logger.info(f"0 belongs to the set, translating by {shift:.6g}")
    return translate(discrete_set, shift), shift


def _check_perturbation(discrete_set: DiscreteSet, delta: float) -> float:
    d = separation(discrete_set)
    if delta >= d / 4.0:
        raise PerturbationError(f"Perturbation too large: delta={delta} must be below separation/4={d / 4.0}")
    return d


def snap_to_lattice(
    discrete_set: DiscreteSet, delta: float, alpha: float, randomized: bool = False, seed: int = 0
) -> Tuple[DiscreteSet, np.ndarray]:
    """Move every point to alpha*Z with an offset strictly inside (delta/2, delta).

    Args:
        discrete_set: The set to snap
        delta: Perturbation bound, below separation/4
        alpha: Lattice step, at most delta/4
        randomized: Draw offsets uniformly before rounding instead of taking
            the smallest admissible lattice point
        seed: Seed for the randomized variant

    Returns:
        The snapped set and the offsets of the points it keeps; for an
        infinite law, points pushed past the shrunk window are dropped
    """
    if delta <= 0:
        raise PerturbationError(f"delta must be positive, got {delta}")
    _check_perturbation(discrete_set, delta)
    if alpha > delta / 4.0 + TOLERANCES.absolute:
        raise PerturbationError(f"Lattice too coarse: alpha={alpha} must be at most delta/4={delta / 4.0}")
    mode: PerturbationMode = "snap_random" if randomized else "snap"
    generator = PerturbedGenerator(base=discrete_set.generator, delta=delta, mode=mode, alpha=alpha, seed=seed)
    offsets = generator.offsets_for(discrete_set.points)
    moved = discrete_set.points + offsets
    radius = max(discrete_set.window_radius - delta, TOLERANCES.absolute)
    if discrete_set.is_finite():
        radius = discrete_set.window_radius + delta
    else:
        keep = np.abs(moved) <= radius + TOLERANCES.absolute
        moved, offsets = moved[keep], offsets[keep]
    snapped = DiscreteSet(moved, generator, radius)
    return snapped, offsets


def perturb(discrete_set: DiscreteSet, delta: float, mode: PerturbationMode = "positive", seed: int = 0) -> DiscreteSet:
    """Seeded random perturbation lambda + eps_lambda.

    ``positive`` draws eps in (delta/2, delta), ``symmetric`` draws |eps| < delta.
    For an infinite law the window shrinks by delta and points moved past it are dropped.
    delta = 0 returns the set unchanged.
    """
    if delta == 0:
        return discrete_set
    if len(discrete_set) > 1:
        _check_perturbation(discrete_set, delta)
    generator = PerturbedGenerator(base=discrete_set.generator, delta=delta, mode=mode, seed=seed)
    moved = discrete_set.points + generator.offsets_for(discrete_set.points)
    radius = discrete_set.window_radius + delta if discrete_set.is_finite() else discrete_set.window_radius - delta
    if not discrete_set.is_finite():
        moved = moved[np.abs(moved) <= radius + TOLERANCES.absolute]
    return DiscreteSet(moved, generator, radius)


def insert_point(discrete_set: DiscreteSet, point: float) -> DiscreteSet:
    """Add one point that is not already in the set."""
    if discrete_set.contains(point):
        raise SeparationError(f"Point {point} already belongs to the set")
    generator = ModifiedGenerator(base=discrete_set.generator, added=(float(point),))
    pts = np.sort(np.append(discrete_set.points, point))
    return DiscreteSet(pts, generator, max(discrete_set.window_radius, abs(point)))


def remove_points(discrete_set: DiscreteSet, points: Iterable[float]) -> DiscreteSet:
    """Remove finitely many points of the set."""
    removed = tuple(float(p) for p in points)
    for p in removed:
        if not discrete_set.contains(p):
            raise SeparationError(f"Point {p} is not in the set")
    generator = ModifiedGenerator(base=discrete_set.generator, removed=removed)
    return DiscreteSet(generator.points(discrete_set.window_radius), generator, discrete_set.window_radius)


def complement_in_lattice(discrete_set: DiscreteSet, alpha: Optional[float] = None) -> DiscreteSet:
    """alpha*Z minus the set, for sets living on alpha*Z."""
    step = alpha or discrete_set.generator.lattice_alpha()
    if step is None:
        raise PerturbationError("Set is not a lattice subset; pass alpha or snap it first")
    generator = complement_generator(discrete_set.generator, step)
    return DiscreteSet.from_generator(generator, discrete_set.window_radius)
