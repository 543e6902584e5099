import math

import numpy as np
import pytest

from gapkit.completeness import (
    CompletenessDefectOracle,
    RadiusOptions,
    completeness_defect_oracle,
    formula_radius,
    gap_radius_identity,
    perturbation_radius_check,
    projection_residuals,
    radius_estimate,
    radius_from_gap_route,
    trial_frequencies,
)
from gapkit.config import TOLERANCES
from gapkit.density import DensityOptions
from gapkit.errors import DensityError, GapkitError, PerturbationError
from gapkit.sets import DiscreteSet, load_set

OPTIONS = DensityOptions(radius=2000)


@pytest.fixture(scope="module")
def lattice():
    return load_set("lattice:alpha=1", radius=2000)


def test_trial_frequencies():
    np.testing.assert_allclose(trial_frequencies(2.0, 4), [0.0, 0.25, 0.5, 0.75])


def test_member_frequency_has_no_residual():
    residuals = projection_residuals(np.arange(-8.0, 8.0), 1.0, 4)
    assert residuals[0] < 1e-4


def test_empty_section_has_unit_defect():
    empty = DiscreteSet.explicit([])
    assert completeness_defect_oracle(empty, 1.0, 8) == 1.0


def test_defect_oracle_errors(lattice):
    with pytest.raises(GapkitError):
        completeness_defect_oracle(lattice, 0.0, 16)


def test_defect_collapses_inside_the_radius(lattice):
    assert completeness_defect_oracle(lattice, 1.0, 64) < 1e-3
    with CompletenessDefectOracle() as oracle:
        assert oracle.verdict(lattice, 1.0, 64)
        assert not oracle.verdict(lattice, 4.0, 64)


def test_defect_trend_below_and_above_the_radius(lattice):
    oracle = CompletenessDefectOracle()
    inside = [oracle.value(lattice, 0.8 * math.pi, n) for n in (64, 128)]
    assert 1e-8 < inside[1] <= inside[0] < 1e-5
    assert max(inside) < TOLERANCES.defect_floor
    assert oracle.verdict(lattice, 0.8 * math.pi, 128)
    outside = [oracle.value(lattice, 1.2 * math.pi, n) for n in (64, 128)]
    assert min(outside) > 0.1
    assert not oracle.verdict(lattice, 1.2 * math.pi, 128)


@pytest.mark.parametrize("a", [2.0, 4.0])
def test_defect_does_not_grow_with_the_window(lattice, a):
    defects = [completeness_defect_oracle(lattice, a, n) for n in (16, 32, 64, 128)]
    for smaller, larger in zip(defects, defects[1:]):
        assert larger <= smaller + TOLERANCES.defect_floor


def test_formula_radius_of_integers(lattice):
    route = formula_radius(lattice, OPTIONS)
    assert route.bracket[0] <= math.pi <= route.bracket[1]


def test_perturbation_keeps_the_radius(lattice):
    check = perturbation_radius_check(lattice, 0.2, trials=5, seed=0, opts=OPTIONS)
    assert len(check.radii) == 5
    assert check.within == (check.max_deviation <= check.bracket_width)
    assert check.within


def test_zero_perturbation_is_exact(lattice):
    check = perturbation_radius_check(lattice, 0.0, trials=3, opts=OPTIONS)
    assert check.max_deviation == 0.0
    assert check.radii == [check.base_radius] * 3


def test_large_perturbation_is_rejected(lattice):
    with pytest.raises(PerturbationError):
        perturbation_radius_check(lattice, 0.3, opts=OPTIONS)


def test_gap_radius_identity_on_evens():
    evens = load_set("lattice-minus:alpha=1,residues=1 mod 2", radius=2000)
    identity = gap_radius_identity(evens, OPTIONS)
    assert identity.target == pytest.approx(math.pi)
    assert identity.residual <= 0.15 * math.pi
    assert identity.gap.estimate == pytest.approx(math.pi / 2, rel=0.05)


def test_radius_from_gap_route():
    thirds = load_set("lattice-minus:alpha=1,residues=0 mod 3", radius=2000)
    route = radius_from_gap_route(thirds, OPTIONS)
    assert route.estimate == pytest.approx(math.pi / 3, abs=0.1)


def test_identity_needs_a_lattice():
    with pytest.raises(DensityError):
        gap_radius_identity(DiscreteSet.explicit(np.arange(-100, 100) + 0.5, finite=False))


@pytest.mark.slow
def test_radius_routes_agree_on_integers(lattice):
    report = radius_estimate(lattice, RadiusOptions(window=128, density=OPTIONS))
    assert report.agreement
    assert report.formula_route.estimate == pytest.approx(math.pi, rel=0.05)
