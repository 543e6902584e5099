"""Finite atomic measures: sum of complex weights on distinct real points."""

import logging
import math
from pathlib import Path
from typing import Iterable, Union

import numpy as np

from gapkit.config import TOLERANCES
from gapkit.errors import GapError, ReportError

logger = logging.getLogger(__name__)


class AtomicMeasure:
    """mu = sum_k w_k delta_{s_k} with distinct supports s_k.

    Atoms are stored sorted by support; arrays are read-only.
    """

    __slots__ = ("supports", "weights", "total_variation")

    def __init__(self, supports: Iterable[float], weights: Iterable[complex]):
        s = np.asarray(list(supports) if not isinstance(supports, np.ndarray) else supports, dtype=float)
        w = np.asarray(list(weights) if not isinstance(weights, np.ndarray) else weights, dtype=complex)
        if s.shape != w.shape or s.ndim != 1:
            raise GapError(f"Supports and weights must be matching 1-d arrays, got {s.shape} and {w.shape}")
        order = np.argsort(s, kind="stable")
        s, w = s[order], w[order]
        if s.size > 1 and np.any(np.diff(s) <= TOLERANCES.absolute):
            i = int(np.argmin(np.diff(s)))
            raise GapError(f"Support points must be distinct; {s[i]} repeats")
        if not np.all(np.isfinite(w)):
            raise GapError("Weights must be finite")
        s.setflags(write=False)
        w.setflags(write=False)
        self.supports = s
        self.weights = w
        self.total_variation = math.fsum(np.abs(w).tolist())

    @classmethod
    def zero(cls) -> "AtomicMeasure":
        return cls(np.empty(0), np.empty(0, dtype=complex))

    @classmethod
    def dirac(cls, point: float, weight: complex = 1.0) -> "AtomicMeasure":
        return cls([point], [weight])

    def __len__(self) -> int:
        return int(self.supports.size)

    def __repr__(self) -> str:
        return f"AtomicMeasure(atoms={len(self)}, total_variation={self.total_variation:.6g})"

    def is_zero(self) -> bool:
        return self.total_variation == 0.0

    def pruned(self, floor: float = TOLERANCES.coefficient_floor) -> "AtomicMeasure":
        """Drop atoms whose weight modulus is below ``floor``."""
        keep = np.abs(self.weights) >= floor
        return AtomicMeasure(self.supports[keep], self.weights[keep])

    def shifted(self, x: float) -> "AtomicMeasure":
        """Move every atom by -x (the measure of the translated set)."""
        return AtomicMeasure(self.supports - x, self.weights)

    def max_support(self) -> float:
        return float(np.max(np.abs(self.supports))) if len(self) else 0.0


def modulate(measure: AtomicMeasure, s: float) -> AtomicMeasure:
    """Multiply the weight at lambda by exp(i s lambda).

    The transform of the result at x equals the original transform at x + s.
    """
    if s == 0:
        return measure
    return AtomicMeasure(measure.supports, measure.weights * np.exp(1j * s * measure.supports))


def read_measure_file(path: Union[str, Path]) -> AtomicMeasure:
    """Read ``support weight_re weight_im`` lines; ``#`` starts a comment."""
    supports, weights = [], []
    try:
        with open(path, "r", encoding="utf-8") as f:
            lines = f.readlines()
    except OSError as e:
        raise GapError(f"Cannot read measure file {path}: {e}") from e
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise GapError(f"{path}:{lineno}: expected 'support weight_re weight_im', got {line!r}")
        try:
            s, re_w, im_w = (float(p) for p in parts)
        except ValueError as e:
            raise GapError(f"{path}:{lineno}: malformed number in {line!r}") from e
        supports.append(s)
        weights.append(complex(re_w, im_w))
    return AtomicMeasure(supports, weights)


def write_measure_file(measure: AtomicMeasure, path: Union[str, Path]) -> None:
    try:
        with open(path, "w", encoding="utf-8") as f:
            f.write("# support weight_re weight_im\n")
            for s, w in zip(measure.supports, measure.weights):
                f.write(f"{float(s)!r} {float(w.real)!r} {float(w.imag)!r}\n")
    except OSError as e:
        raise ReportError(f"Cannot write measure file {path}: {e}") from e
