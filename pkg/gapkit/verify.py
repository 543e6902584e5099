"""Verification suites: each checks one identity of the theory on concrete sets."""

import logging
import math
from typing import Callable, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from gapkit.completeness.radius import gap_radius_identity, perturbation_radius_check
from gapkit.config import RunConfig
from gapkit.density.estimators import DensityOptions, complementarity_check
from gapkit.errors import GapkitError, SetSpecError
from gapkit.gap.bridges import bridge_function_from_measure, bridge_measure_from_function, unit_grid
from gapkit.gap.estimate import GapOptions, gap_characteristic_estimate
from gapkit.gap.fourier import cauchy_gap_test, decay_exponent, ft_gap_scan, tame_coefficients
from gapkit.gap.witness import bump, build_gap_measure
from gapkit.sets.discrete_set import DiscreteSet
from gapkit.sets.dsl import load_set
from gapkit.sets.measure import AtomicMeasure, modulate
from gapkit.transport.herglotz import growth_ratio, phi_eval
from gapkit.transport.interlacing import InterlacedPair, perturbed_pair
from gapkit.transport.transport import transport_measure, verify_transport

logger = logging.getLogger(__name__)

SUITES = ("prop21", "prop22", "prop23", "prop24", "theorem_gap", "lemma51")

ODD_INTEGERS = "lattice-minus:alpha=1,residues=0 mod 2"
EVEN_IN_Z = "lattice-minus:alpha=1,residues=1 mod 2"
PROP21_FAMILIES = (
    EVEN_IN_Z,
    "lattice-minus:alpha=1,residues=0 mod 3",
    "lattice-minus:alpha=1,residues=0;1 mod 5",
)
THEOREM_GAP_FAMILIES = (
    ("lattice:alpha=1", 0.15),
    ("lattice:alpha=2", 0.15),
    ("lattice-minus:alpha=0.5,thin=0.3,seed=0", 0.20),
)


class Check(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    value: float
    limit: float
    passed: bool
    detail: str = ""


class SuiteResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    suite: str
    checks: List[Check] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _below(name: str, value: float, limit: float, detail: str = "") -> Check:
    return Check(name=name, value=float(value), limit=float(limit), passed=bool(value <= limit), detail=detail)


def _above(name: str, value: float, limit: float, detail: str = "") -> Check:
    return Check(name=name, value=float(value), limit=float(limit), passed=bool(value >= limit), detail=detail)


def _flag(name: str, ok: bool, detail: str = "") -> Check:
    return Check(name=name, value=1.0 if ok else 0.0, limit=1.0, passed=bool(ok), detail=detail)


def _density_options(config: RunConfig) -> DensityOptions:
    return DensityOptions(radius=max(config.radius, 2000.0))


def _lattice_subset_spec(config: RunConfig, default: str) -> str:
    if config.set_spec:
        return config.set_spec
    if config.removed:
        return f"lattice-minus:alpha={config.alpha!r},residues={config.removed}"
    return default


def half_period_function(size: int, a: float, start: float = 0.05, stop: float = 0.8) -> np.ndarray:
    """Samples on [0, 2a) of u(t) + u(t - pi), u a bump on (start, stop).

    The function is pi-periodic on the circle, so every odd Fourier
    coefficient vanishes.
    """
    grid = unit_grid(size)
    t = grid[grid < 2.0 * a]
    width = stop - start
    return bump((t - start) / width) + bump((t - math.pi - start) / width)


def transport_witness(a: float = 2.2, epsilon: float = 0.2, reach: float = 255.0) -> AtomicMeasure:
    """Tamed witness on Z + 1/2 with gap (-(a - eps), a - eps) and |weights| = O(|t|^-2)."""
    lattice = load_set("lattice:alpha=1", radius=4096)
    witness = build_gap_measure(lattice, a, sharpness=1.0).shifted(-0.5)
    tamed = tame_coefficients(witness, epsilon, m=2, gap=a)
    keep = np.abs(tamed.supports) <= reach
    return AtomicMeasure(tamed.supports[keep], tamed.weights[keep])


def half_integer_pair(delta: float = 0.2, seed: int = 0, window: int = 512) -> InterlacedPair:
    base = DiscreteSet.explicit(np.arange(-window // 2, window // 2) + 0.5)
    return perturbed_pair(base, delta, seed=seed)


def run_prop21(config: RunConfig) -> SuiteResult:
    specs = [config.set_spec] if config.set_spec else list(PROP21_FAMILIES)
    checks = []
    for spec in specs:
        report = complementarity_check(load_set(spec, config.radius), _density_options(config))
        detail = f"lower={report.lower.estimate:.4f}, complement upper={report.complement_upper.estimate:.4f}"
        checks.append(_below(f"complementarity[{spec}]", report.residual, 0.05, detail))
    return SuiteResult(suite="prop21", checks=checks)


def run_prop22(config: RunConfig) -> SuiteResult:
    spec = _lattice_subset_spec(config, EVEN_IN_Z)
    identity = gap_radius_identity(load_set(spec, config.radius), _density_options(config))
    checks = [
        _below(
            f"gap+radius[{spec}]", identity.residual, 0.15 * identity.target,
            f"G={identity.gap.estimate:.4f}, R={identity.radius.estimate:.4f}, pi/alpha={identity.target:.4f}",
        )
    ]

    gamma = load_set(ODD_INTEGERS, radius=4096)
    source = modulate(build_gap_measure(load_set("lattice:alpha=2", radius=4096), 1.2), -1.2)
    backward = bridge_function_from_measure(source, 1.2, gamma)
    checks.append(_below("backward bridge residual", backward.max_residual, 1e-6))

    a, epsilon = 2.0, 0.2
    forward = bridge_measure_from_function(gamma, half_period_function(4096, a), a, epsilon)
    odd = np.mod(np.rint(forward.supports), 2) != 0
    checks.append(_flag("forward bridge lives on 2Z", not np.any(odd)))
    lo = 2.0 * a + epsilon
    sup = ft_gap_scan(forward, (lo + 1e-3, 2.0 * math.pi - 1e-3))
    checks.append(_below("forward bridge gap scan", sup / forward.total_variation, 1e-5))
    closure = bridge_function_from_measure(modulate(forward, lo), 0.5 * (2.0 * math.pi - lo), gamma)
    checks.append(_below("bridge loop closure", closure.max_residual, 1e-6))
    return SuiteResult(suite="prop22", checks=checks)


def run_prop23(config: RunConfig) -> SuiteResult:
    delta = config.delta if config.delta > 0 else 0.2
    pair = half_integer_pair(delta, config.seed)
    source = transport_witness()
    a = 2.0
    checks = [_above("witness decay exponent", decay_exponent(source), 1.9)]

    result = transport_measure(pair, source)
    checks.append(_flag("residues positive", bool(np.all(result.herglotz.c > 0))))
    checks.append(_flag("Im phi(i) > 0", phi_eval(pair, 1j).value.imag > 0))
    checks.append(_below("growth |phi(iy)|/y", growth_ratio(pair), 10.0))
    checks.append(_below("partial-fraction identity", result.identity_error, 1e-3))
    partials = [v for _, v in result.l1_partials]
    growth = partials[-1] / partials[-2] - 1.0 if partials[-2] > 0 else 0.0
    checks.append(_below("l1 growth on last doubling", growth, 0.01))

    target = verify_transport(result.measure, a)
    checks.append(_flag("transported gap certified", target.passed, f"scan sup {target.scan_sup:.3e}"))
    origin = verify_transport(source, a)
    agree = [r.verdict for r in origin.rungs] == [r.verdict for r in target.rungs]
    checks.append(_flag("rung verdicts agree", agree))
    above = cauchy_gap_test(result.measure, 3.0)
    checks.append(_flag("no gap at b=3", not above.passed, above.verdict))
    return SuiteResult(suite="prop23", checks=checks)


def run_prop24(config: RunConfig) -> SuiteResult:
    delta = config.delta if config.delta > 0 else 0.2
    specs = [(config.set_spec, delta)] if config.set_spec else [("lattice:alpha=1", delta), ("lattice:alpha=2", 2 * delta)]
    checks = []
    trials = config.trials or 5
    for spec, d in specs:
        report = perturbation_radius_check(load_set(spec, config.radius), d, trials, config.seed, _density_options(config))
        limit = report.bracket_width
        checks.append(_below(f"radius deviation[{spec}, delta={d:g}]", report.max_deviation, limit))
    return SuiteResult(suite="prop24", checks=checks)


def run_theorem_gap(config: RunConfig) -> SuiteResult:
    families = [(config.set_spec, 0.15)] if config.set_spec else list(THEOREM_GAP_FAMILIES)
    options = GapOptions(window=config.window, density=_density_options(config))
    checks = []
    for spec, tolerance in families:
        report = gap_characteristic_estimate(load_set(spec, config.radius), options)
        r1, r2 = report.density_route.estimate, report.oracle_route.estimate
        checks.append(_below(f"two routes[{spec}]", abs(r1 - r2), tolerance * max(r1, 1e-12), f"density {r1:.4f}, gram {r2:.4f}"))
    return SuiteResult(suite="theorem_gap", checks=checks)


def _lemma51_measures(seed: int) -> Dict[str, tuple]:
    """Name -> (measure, known gap or None)."""
    z = load_set("lattice:alpha=1", radius=4096)
    two = load_set("lattice:alpha=2", radius=4096)
    measures = {
        "Z witness a=2": (build_gap_measure(z, 2.0), 2.0),
        "2Z witness a=1.2": (build_gap_measure(two, 1.2), 1.2),
        "Z witness a=1.5": (build_gap_measure(z, 1.5), 1.5),
        "2Z poly witness a=1": (build_gap_measure(two, 1.0, m=4, profile="poly"), 1.0),
        "tamed Z+1/2 witness": (transport_witness(), 2.0),
        "delta_1": (AtomicMeasure.dirac(1.0), None),
        "delta_0": (AtomicMeasure.dirac(0.0), None),
    }
    rng = np.random.default_rng(seed)
    for i in range(3):
        s = rng.uniform(-5.0, 5.0)
        supports = [s, s + rng.uniform(2.0, 4.0)]
        weights = rng.normal(size=2) + 1j * rng.normal(size=2)
        measures[f"two atoms #{i}"] = (AtomicMeasure(supports, weights), None)
    return measures


def run_lemma51(config: RunConfig) -> SuiteResult:
    checks = []
    for name, (measure, gap) in _lemma51_measures(config.seed).items():
        rungs = [gap - 0.1, gap + 0.5] if gap is not None else [0.5, 1.0]
        for b in rungs:
            scan_pass = ft_gap_scan(measure, (-b, b)) <= 1e-6 * max(measure.total_variation, 1.0)
            cauchy_pass = cauchy_gap_test(measure, b).passed
            expected = gap is not None and b < gap
            ok = scan_pass == cauchy_pass == expected
            checks.append(_flag(f"{name} b={b:g}", ok, f"scan={scan_pass}, cauchy={cauchy_pass}"))
    return SuiteResult(suite="lemma51", checks=checks)


RUNNERS: Dict[str, Callable[[RunConfig], SuiteResult]] = {
    "prop21": run_prop21,
    "prop22": run_prop22,
    "prop23": run_prop23,
    "prop24": run_prop24,
    "theorem_gap": run_theorem_gap,
    "lemma51": run_lemma51,
}


def run_verify(suite: str, config: RunConfig) -> SuiteResult:
    """Run one suite; pipeline errors are re-raised with the suite name."""
    if suite not in RUNNERS:
        raise GapkitError(f"Unknown suite {suite!r}; expected one of {', '.join(SUITES)} or all")
    logger.info(f"running suite {suite}")
    try:
        result = RUNNERS[suite](config)
    except SetSpecError as e:
        raise SetSpecError(f"[{suite}] {e.message}", e.position, e.expected) from e
    except GapkitError as e:
        raise type(e)(f"[{suite}] {e}") from e
    for check in result.checks:
        if not check.passed:
            logger.warning(f"{suite}: {check.name} failed ({check.value:.4g} > {check.limit:.4g}) {check.detail}")
    return result


def run_all(config: RunConfig, suites: Optional[List[str]] = None) -> List[SuiteResult]:
    return [run_verify(name, config) for name in (suites or SUITES)]
