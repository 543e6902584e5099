import math

import numpy as np
import pytest

from gapkit.config import TOLERANCES
from gapkit.density import DensityOptions
from gapkit.errors import GapError
from gapkit.gap import (
    DecayVerdict,
    GapOptions,
    GramGapOracle,
    bridge_function_from_measure,
    bridge_measure_from_function,
    build_gap_measure,
    cauchy_gap_test,
    cauchy_transform,
    decay_exponent,
    ft_gap_scan,
    gap_characteristic_estimate,
    gap_from_complement,
    gram_gap_oracle,
    gram_matrix,
    measure_fourier,
    tame_coefficients,
)
from gapkit.gap.bridges import unit_grid
from gapkit.gap.gram_oracle import smallest_eigenvalue
from gapkit.sets import load_set, modulate, translate
from gapkit.sets.measure import AtomicMeasure
from gapkit.verify import ODD_INTEGERS, half_period_function, transport_witness


@pytest.fixture(scope="module")
def lattice():
    return load_set("lattice:alpha=1", radius=4096)


@pytest.fixture(scope="module")
def witness(lattice):
    return build_gap_measure(lattice, 2.0, m=4)


def test_gram_matrix():
    points = np.array([-1.0, 0.5, 2.0])
    gram = gram_matrix(points, 1.5)
    np.testing.assert_allclose(np.diag(gram), 3.0)
    np.testing.assert_allclose(gram, gram.T)
    assert gram[0, 1] == pytest.approx(2.0 * math.sin(1.5 * 1.5) / 1.5)


def test_gram_oracle_errors(lattice):
    with pytest.raises(GapError):
        gram_gap_oracle(lattice, 0.0, 16)
    with pytest.raises(GapError):
        gram_gap_oracle(lattice, 1.0, 3)


def test_gram_verdicts_on_integers(lattice):
    with GramGapOracle() as oracle:
        assert oracle.verdict(lattice, 1.0, 64)
        assert not oracle.verdict(lattice, 4.0, 64)


def test_gram_trend_below_and_above_the_gap_characteristic(lattice):
    oracle = GramGapOracle()
    inside = [oracle.value(lattice, 0.8 * math.pi, n) for n in (64, 128)]
    assert max(inside) < TOLERANCES.eigen_floor
    assert oracle.verdict(lattice, 0.8 * math.pi, 128)
    half, full = (oracle.value(lattice, 1.2 * math.pi, n) for n in (64, 128))
    assert full > TOLERANCES.eigen_floor
    assert half / full < 2.0
    assert not oracle.verdict(lattice, 1.2 * math.pi, 128)


def test_weighted_gram_also_shrinks_above_the_gap_characteristic(lattice):
    oracle = GramGapOracle(weighted=True)
    half, full = (oracle.value(lattice, 1.2 * math.pi, n) for n in (64, 128))
    assert half / full > 2.0


def test_gram_eigenvalue_ignores_translation(lattice):
    points = lattice.centered(32)
    assert smallest_eigenvalue(points + 0.37, 4.0) == pytest.approx(smallest_eigenvalue(points, 4.0), rel=1e-8)
    shifted = translate(lattice, 0.37)
    with GramGapOracle() as oracle:
        assert oracle.verdict(shifted, 1.0, 64)
        assert not oracle.verdict(shifted, 4.0, 64)


def test_gram_eigenvalue_drops_when_a_point_is_added(lattice):
    points = lattice.centered(32)
    for extra in (0.5, 20.25):
        grown = np.sort(np.append(points, extra))
        assert smallest_eigenvalue(grown, 4.0) <= smallest_eigenvalue(points, 4.0) + 1e-12


def test_gram_verdict_on_short_finite_set():
    finite = load_set("explicit:0,0.3,1.0")
    assert not GramGapOracle().verdict(finite, 1.0, 8)


def test_witness_vanishes_on_the_gap(witness):
    assert ft_gap_scan(witness, (-1.9, 1.9)) < 1e-6
    assert abs(measure_fourier(witness, math.pi)) > 1e-3
    supports = witness.supports
    np.testing.assert_array_equal(supports, np.rint(supports))


def test_witness_passes_the_cauchy_test(witness):
    assert cauchy_gap_test(witness, 1.5).verdict == DecayVerdict.DECAYING.value


def test_witness_rejects_oversized_gaps(lattice):
    with pytest.raises(GapError, match="exceeds lattice bound"):
        build_gap_measure(lattice, 3.2)


def test_witness_needs_a_full_lattice():
    with pytest.raises(GapError):
        build_gap_measure(load_set("lattice-minus:alpha=1,residues=0 mod 3"), 0.5)


def test_poly_profile_witness(lattice):
    measure = build_gap_measure(lattice, 1.0, m=4, profile="poly")
    assert ft_gap_scan(measure, (-0.9, 0.9)) < 1e-6


def test_single_atom_has_no_gap():
    trace = cauchy_gap_test(AtomicMeasure.dirac(1.0), 0.5)
    assert trace.verdict == DecayVerdict.NON_DECAYING.value
    assert not trace.passed
    assert len(trace.samples) == len(trace.upper) + len(trace.lower)


def test_cauchy_trace_switches_to_the_laplace_form(witness):
    trace = cauchy_gap_test(witness, 1.5)
    assert trace.upper_switch is not None
    assert trace.lower_switch is not None
    assert cauchy_gap_test(AtomicMeasure.dirac(1.0), 0.5).upper_switch is None


def test_cauchy_verdict_agrees_with_the_scan_past_a_flat_edge():
    tamed = transport_witness()
    assert ft_gap_scan(tamed, (-2.5, 2.5)) > 1e-3 * tamed.total_variation
    assert not cauchy_gap_test(tamed, 2.5).passed
    assert cauchy_gap_test(tamed, 1.9).passed


def test_dirac_decays_at_zero():
    assert cauchy_gap_test(AtomicMeasure.dirac(1.0), 0.0).passed


def test_cauchy_test_rejects_negative_b(witness):
    with pytest.raises(GapError):
        cauchy_gap_test(witness, -1.0)


def test_modulation_shifts_the_transform_on_a_grid(two_atoms):
    xs = np.linspace(-3.0, 3.0, 41)
    np.testing.assert_allclose(
        measure_fourier(modulate(two_atoms, 0.7), xs), measure_fourier(two_atoms, xs + 0.7), atol=1e-12
    )


def test_scan_rejects_a_coarse_grid(two_atoms):
    with pytest.raises(GapError, match="anti-aliasing"):
        ft_gap_scan(two_atoms, (-1.0, 1.0), grid_step=1.0)


def test_cauchy_transform_of_dirac():
    dirac = AtomicMeasure(np.array([0.0]), np.array([1.0 + 0j]))
    assert cauchy_transform(dirac, 1j) == pytest.approx(-1j)
    with pytest.raises(GapError):
        cauchy_transform(dirac, 2.0)


def test_taming_leaves_the_origin_weight_alone():
    measure = AtomicMeasure(np.array([-3.0, 0.0, 5.0]), np.array([1.0, 2.0, -1.0], dtype=complex))
    tamed = tame_coefficients(measure, 0.5, m=2)
    assert tamed.weights[1] == pytest.approx(2.0)
    assert abs(tamed.weights[2]) < 1.0


def test_taming_keeps_a_smaller_gap(witness):
    tamed = tame_coefficients(witness, 0.2, m=2, gap=2.0)
    assert ft_gap_scan(tamed, (-1.7, 1.7)) < 1e-6
    with pytest.raises(GapError):
        tame_coefficients(witness, 2.5, gap=2.0)


def test_tamed_witness_weights_decay_quadratically():
    assert decay_exponent(transport_witness()) >= 1.9


def test_backward_bridge():
    gamma = load_set(ODD_INTEGERS, radius=4096)
    source = modulate(build_gap_measure(load_set("lattice:alpha=2", radius=4096), 1.2), -1.2)
    bridge = bridge_function_from_measure(source, 1.2, gamma)
    assert bridge.max_residual < 1e-6
    assert bridge.certificate.passed
    np.testing.assert_allclose(bridge.grid, unit_grid(len(bridge.grid)))


def test_forward_bridge_lands_off_gamma():
    gamma = load_set(ODD_INTEGERS, radius=4096)
    a, epsilon = 2.0, 0.2
    measure = bridge_measure_from_function(gamma, half_period_function(4096, a), a, epsilon)
    assert not np.any(np.mod(np.rint(measure.supports), 2) != 0)
    sup = ft_gap_scan(measure, (2 * a + epsilon + 1e-3, 2 * math.pi - 1e-3))
    assert sup / measure.total_variation < 1e-5


def test_bridges_reject_trivial_inputs():
    gamma = load_set(ODD_INTEGERS, radius=4096)
    with pytest.raises(GapError):
        bridge_function_from_measure(AtomicMeasure.zero(), 1.0, gamma)
    with pytest.raises(GapError):
        bridge_measure_from_function(gamma, np.zeros(int(np.count_nonzero(unit_grid(4096) < 4.0))), 2.0, 0.2)


def test_forward_bridge_needs_orthogonality():
    gamma = load_set(ODD_INTEGERS, radius=4096)
    ones = np.ones(int(np.count_nonzero(unit_grid(4096) < 4.0)))
    with pytest.raises(GapError, match="not orthogonal"):
        bridge_measure_from_function(gamma, ones, 2.0, 0.2)


def test_odd_integers_are_odd():
    points = load_set(ODD_INTEGERS, radius=64).points
    assert points.size > 0
    assert np.all(np.mod(points, 2.0) == 1.0)


def test_gap_from_complement_of_evens():
    evens = load_set("lattice-minus:alpha=1,residues=1 mod 2", radius=2000)
    route = gap_from_complement(evens, DensityOptions(radius=2000))
    assert route.estimate == pytest.approx(math.pi / 2, rel=0.05)
    assert route.bracket[0] <= route.estimate <= route.bracket[1]


@pytest.mark.slow
@pytest.mark.parametrize("alpha", [1.0, 2.0])
def test_gap_routes_agree_on_lattices(alpha):
    report = gap_characteristic_estimate(
        load_set(f"lattice:alpha={alpha}", radius=2000), GapOptions(window=256, witness=True)
    )
    assert report.agreement
    assert report.density_route.estimate == pytest.approx(math.pi / alpha, rel=0.05)
    assert report.witness is not None
    assert report.witness.scan_sup < 1e-6
