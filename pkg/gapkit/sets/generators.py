"""Generator laws describing the infinite set behind a truncation.

A ``DiscreteSet`` only stores the points inside a window; its generator knows
how to produce the points of any larger window, so operations can extend a
truncation on demand instead of failing at its boundary.
"""

import math
from typing import Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator
from typing_extensions import Annotated

from gapkit.errors import PerturbationError, TruncationError
from gapkit.utils import hash_uniform

POINT_TOL = 1e-9


def _lattice_indices(alpha: float, radius: float) -> np.ndarray:
    lo = math.ceil(-radius / alpha - 1e-12)
    hi = math.floor(radius / alpha + 1e-12)
    return np.arange(lo, hi + 1, dtype=np.int64)


def _point_keys(points: np.ndarray) -> np.ndarray:
    return np.rint(np.asarray(points) * 1e6).astype(np.int64)


class _GeneratorBase(BaseModel):
    model_config = ConfigDict(frozen=True)

    def points(self, radius: float) -> np.ndarray:
        """Sorted points of the infinite set inside [-radius, radius]."""
        raise NotImplementedError

    def is_finite(self) -> bool:
        return False

    def max_radius(self) -> float:
        """Largest window this law can produce."""
        return math.inf

    def lattice_alpha(self) -> Optional[float]:
        """Step alpha when every point lies on alpha*Z by construction."""
        return None

    def exact_density(self) -> Optional[float]:
        """Exact Beurling-Malliavin density when the law is periodic."""
        return None


class ExplicitGenerator(_GeneratorBase):
    kind: Literal["explicit"] = "explicit"
    values: Tuple[float, ...] = ()
    finite: bool = True
    # Window covered by ``values`` when they truncate an infinite set.
    radius: Optional[float] = None

    def points(self, radius: float) -> np.ndarray:
        if radius > self.max_radius() + 1e-12:
            raise TruncationError(
                f"Explicit set covers only [-{self.max_radius()}, {self.max_radius()}], requested radius {radius}"
            )
        pts = np.asarray(self.values, dtype=float)
        if self.finite:
            return pts
        return pts[np.abs(pts) <= radius + 1e-12]

    def is_finite(self) -> bool:
        return self.finite

    def max_radius(self) -> float:
        if self.finite:
            return math.inf
        if self.radius is not None:
            return self.radius
        return float(np.max(np.abs(self.values))) if self.values else 0.0

    def exact_density(self) -> Optional[float]:
        return 0.0 if self.finite else None


class LatticeGenerator(_GeneratorBase):
    kind: Literal["lattice"] = "lattice"
    alpha: float = Field(gt=0)

    def points(self, radius: float) -> np.ndarray:
        return _lattice_indices(self.alpha, radius) * self.alpha

    def lattice_alpha(self) -> Optional[float]:
        return self.alpha

    def exact_density(self) -> Optional[float]:
        return 1.0 / self.alpha


class LatticeMinusGenerator(_GeneratorBase):
    """alpha*Z with periodic residues, single indices and a random thinning removed.

    With ``complement=True`` the generator yields exactly the removed points.
    """

    kind: Literal["lattice_minus"] = "lattice_minus"
    alpha: float = Field(gt=0)
    modulus: int = Field(default=1, ge=1)
    residues: Tuple[int, ...] = ()
    indices: Tuple[int, ...] = ()
    thin: float = Field(default=0.0, ge=0.0, lt=1.0)
    seed: int = 0
    complement: bool = False

    @field_validator("residues")
    @classmethod
    def _sorted_residues(cls, value: Tuple[int, ...]) -> Tuple[int, ...]:
        return tuple(sorted(set(value)))

    def removed_mask(self, n: np.ndarray) -> np.ndarray:
        removed = np.zeros(n.shape, dtype=bool)
        if self.residues:
            removed |= np.isin(np.mod(n, self.modulus), np.mod(self.residues, self.modulus))
        if self.indices:
            removed |= np.isin(n, self.indices)
        if self.thin > 0:
            removed |= hash_uniform(self.seed, n) < self.thin
        return removed

    def points(self, radius: float) -> np.ndarray:
        n = _lattice_indices(self.alpha, radius)
        removed = self.removed_mask(n)
        keep = removed if self.complement else ~removed
        return n[keep] * self.alpha

    def _removed_classes(self) -> int:
        return len({r % self.modulus for r in self.residues})

    def is_finite(self) -> bool:
        if self.thin > 0:
            return False
        if self.complement:
            return self._removed_classes() == 0
        return self._removed_classes() == self.modulus

    def lattice_alpha(self) -> Optional[float]:
        return self.alpha

    def exact_density(self) -> Optional[float]:
        if self.thin > 0:
            return None
        removed_fraction = self._removed_classes() / self.modulus
        kept = removed_fraction if self.complement else 1.0 - removed_fraction
        return kept / self.alpha

    def flipped(self) -> "LatticeMinusGenerator":
        return self.model_copy(update={"complement": not self.complement})


PerturbationMode = Literal["snap", "snap_random", "positive", "symmetric"]


class PerturbedGenerator(_GeneratorBase):
    """Points lambda + eps_lambda of a base law.

    ``snap`` moves each point to the smallest point of alpha*Z strictly above
    lambda + delta/2; ``snap_random`` draws eps in (delta/2, delta) and rounds
    to alpha*Z inside that interval; ``positive`` draws eps in (delta/2, delta);
    ``symmetric`` draws |eps| < delta. Random draws are keyed by the point so
    extending the window never changes existing offsets.
    """

    kind: Literal["perturbed"] = "perturbed"
    base: "Generator"
    delta: float = Field(ge=0)
    mode: PerturbationMode = "snap"
    alpha: Optional[float] = None
    seed: int = 0

    def offsets_for(self, base_points: np.ndarray) -> np.ndarray:
        lam = np.asarray(base_points, dtype=float)
        half = self.delta / 2.0
        if self.mode in ("snap", "snap_random"):
            if self.alpha is None or self.alpha <= 0:
                raise PerturbationError("Snapping perturbations need a positive lattice step alpha")
            k_min = np.floor((lam + half) / self.alpha + POINT_TOL) + 1
            if self.mode == "snap":
                k = k_min
            else:
                k_max = np.ceil((lam + self.delta) / self.alpha - POINT_TOL) - 1
                u = np.clip(hash_uniform(self.seed, _point_keys(lam)), 1e-9, 1 - 1e-9)
                k = np.clip(np.rint((lam + half * (1.0 + u)) / self.alpha), k_min, k_max)
            return k * self.alpha - lam
        u = np.clip(hash_uniform(self.seed, _point_keys(lam)), 1e-9, 1 - 1e-9)
        if self.mode == "positive":
            return half * (1.0 + u)
        return self.delta * (2.0 * u - 1.0)

    def points(self, radius: float) -> np.ndarray:
        base_points = self.base.points(min(radius + self.delta + 1.0, self.base.max_radius()))
        moved = base_points + self.offsets_for(base_points)
        return moved[np.abs(moved) <= radius + 1e-12]

    def is_finite(self) -> bool:
        return self.base.is_finite()

    def max_radius(self) -> float:
        return self.base.max_radius() - self.delta

    def lattice_alpha(self) -> Optional[float]:
        return self.alpha if self.mode in ("snap", "snap_random") else None

    def exact_density(self) -> Optional[float]:
        return self.base.exact_density()


class ModifiedGenerator(_GeneratorBase):
    """A base law with finitely many points added and removed."""

    kind: Literal["modified"] = "modified"
    base: "Generator"
    added: Tuple[float, ...] = ()
    removed: Tuple[float, ...] = ()

    def points(self, radius: float) -> np.ndarray:
        pts = self.base.points(radius)
        if self.removed:
            gone = np.isclose(pts[:, None], np.asarray(self.removed)[None, :], atol=POINT_TOL, rtol=0).any(axis=1)
            pts = pts[~gone]
        extra = [p for p in self.added if abs(p) <= radius + 1e-12]
        if extra:
            pts = np.sort(np.concatenate([pts, np.asarray(extra, dtype=float)]))
        return pts

    def is_finite(self) -> bool:
        return self.base.is_finite()

    def max_radius(self) -> float:
        return self.base.max_radius()

    def lattice_alpha(self) -> Optional[float]:
        alpha = self.base.lattice_alpha()
        if alpha is None:
            return None
        for p in self.added:
            if abs(p / alpha - round(p / alpha)) > POINT_TOL:
                return None
        return alpha

    def exact_density(self) -> Optional[float]:
        return self.base.exact_density()


class ComplementGenerator(_GeneratorBase):
    """alpha*Z minus the points of a base law that lives on alpha*Z."""

    kind: Literal["complement"] = "complement"
    base: "Generator"
    alpha: float = Field(gt=0)

    def points(self, radius: float) -> np.ndarray:
        n = _lattice_indices(self.alpha, radius)
        scaled = self.base.points(radius) / self.alpha
        taken = np.rint(scaled).astype(np.int64)
        if taken.size and np.max(np.abs(scaled - taken)) > POINT_TOL:
            raise PerturbationError(f"Base set is not contained in {self.alpha}*Z")
        return n[~np.isin(n, taken)] * self.alpha

    def is_finite(self) -> bool:
        base_density = self.base.exact_density()
        return base_density is not None and abs(base_density - 1.0 / self.alpha) < 1e-12

    def max_radius(self) -> float:
        return self.base.max_radius()

    def lattice_alpha(self) -> Optional[float]:
        return self.alpha

    def exact_density(self) -> Optional[float]:
        base_density = self.base.exact_density()
        if base_density is None:
            return None
        return 1.0 / self.alpha - base_density


Generator = Annotated[
    Union[
        ExplicitGenerator,
        LatticeGenerator,
        LatticeMinusGenerator,
        PerturbedGenerator,
        ModifiedGenerator,
        ComplementGenerator,
    ],
    Field(discriminator="kind"),
]

PerturbedGenerator.model_rebuild()
ModifiedGenerator.model_rebuild()
ComplementGenerator.model_rebuild()


def complement_generator(generator: "Generator", alpha: float) -> "Generator":
    """alpha*Z minus the set described by ``generator``."""
    if isinstance(generator, LatticeMinusGenerator) and abs(generator.alpha - alpha) < 1e-15:
        return generator.flipped()
    if isinstance(generator, LatticeGenerator) and abs(generator.alpha - alpha) < 1e-15:
        return LatticeMinusGenerator(alpha=alpha, complement=True)
    if isinstance(generator, ComplementGenerator) and abs(generator.alpha - alpha) < 1e-15:
        return generator.base
    return ComplementGenerator(base=generator, alpha=alpha)
