import numpy as np
import pytest

from gapkit.errors import TransportError
from gapkit.gap import cauchy_gap_test
from gapkit.sets import DiscreteSet
from gapkit.sets.measure import AtomicMeasure
from gapkit.transport import (
    growth_ratio,
    herglotz_residues,
    mirror_measure,
    pair_with_offsets,
    perturbed_pair,
    phi_eval,
    reverse_transport,
    transport_measure,
    validate_interlacing,
    verify_transport,
)
from gapkit.transport.herglotz import phi_values
from gapkit.verify import half_integer_pair, transport_witness


@pytest.fixture(scope="module")
def base():
    return DiscreteSet.explicit(np.arange(-32, 32) + 0.5)


@pytest.fixture(scope="module")
def pair(base):
    return perturbed_pair(base, 0.2, seed=0)


def _cubic_weights(points):
    return (1.0 + 0.5j) / (1.0 + np.abs(points) ** 3)


def test_perturbed_pair_offsets(pair):
    assert len(pair) == 64
    assert np.all(pair.offsets > 0.1)
    assert np.all(pair.offsets < 0.2)
    assert pair.separation == pytest.approx(1.0)


def test_pair_is_seeded(base, pair):
    again = perturbed_pair(base, 0.2, seed=0)
    np.testing.assert_array_equal(again.perturbed.points, pair.perturbed.points)


def test_validation_names_the_index(base):
    offsets = np.full(len(base), 0.15)
    offsets[5] = 0.05
    with pytest.raises(TransportError, match="index 5"):
        pair_with_offsets(base, offsets, 0.2)


def test_validation_rejects_zero():
    lattice = DiscreteSet.explicit(np.arange(-8.0, 8.0))
    with pytest.raises(TransportError, match="0 belongs"):
        pair_with_offsets(lattice, np.full(16, 0.15), 0.2)


def test_validation_rejects_large_delta(base):
    with pytest.raises(TransportError):
        validate_interlacing(base, DiscreteSet.explicit(base.points + 0.3), 0.4)


def test_validation_rejects_mismatched_windows(base):
    with pytest.raises(TransportError):
        validate_interlacing(base, DiscreteSet.explicit(base.points[1:] + 0.15), 0.2)


def test_herglotz_residues(pair):
    data = herglotz_residues(pair)
    assert np.all(data.c > 0)
    assert data.b2 == pytest.approx(-1.0)
    assert data.b1 == pytest.approx(0.0, abs=1e-8)
    z = 0.3 + 1.0j
    expected = phi_values(pair, np.array([z]))[0]
    assert data.evaluate(z) == pytest.approx(expected, rel=1e-8)


def test_phi_maps_upper_half_plane_up(pair):
    assert phi_eval(pair, 1j).value.imag > 0
    assert phi_eval(pair, 2.0 + 0.5j).value.imag > 0
    assert growth_ratio(pair) < 10.0


def test_herglotz_data_rebuilds_phi_on_a_wide_window():
    wide = half_integer_pair(0.2, seed=0, window=512)
    data = herglotz_residues(wide)
    rng = np.random.default_rng(7)
    zs = rng.uniform(-60.0, 60.0, 20) + 1j * rng.uniform(0.5, 5.0, 20) * rng.choice([-1.0, 1.0], 20)
    expected = phi_values(wide, zs)
    rebuilt = np.array([data.evaluate(z) for z in zs])
    np.testing.assert_allclose(rebuilt, expected, rtol=1e-6)


def test_phi_keeps_each_half_plane(pair):
    heights = np.geomspace(0.05, 50.0, 5)
    x, y = np.meshgrid(np.linspace(-20.0, 20.0, 10), np.concatenate([-heights, heights]))
    zs = (x + 1j * y).ravel()
    assert zs.size == 100
    assert np.all(phi_values(pair, zs).imag * zs.imag > 0)


def test_weighted_residue_sums_settle_as_the_window_grows():
    growth = []
    for window in (128, 256, 512):
        partials = [v for _, v in herglotz_residues(half_integer_pair(0.2, seed=0, window=window)).weighted_sum_partials]
        growth.append(partials[-1] / partials[-2] - 1.0)
    assert growth[-1] < 0.01
    assert growth[2] <= growth[1] <= growth[0]


def test_phi_rejects_poles(pair):
    with pytest.raises(TransportError, match="pole"):
        phi_values(pair, np.array([pair.perturbed.points[3]]))


def test_swapped_pair_is_a_positive_perturbation(pair):
    flipped = pair.swapped()
    assert flipped.mirrored
    assert np.all(flipped.offsets > 0.1)
    np.testing.assert_allclose(flipped.base.points, -pair.perturbed.points[::-1])
    assert not flipped.swapped().mirrored


def test_transport_identity(pair):
    measure = AtomicMeasure(pair.base.points, _cubic_weights(pair.base.points))
    result = transport_measure(pair, measure)
    assert result.identity_error < 1e-3
    assert len(result.l1_partials) == 4
    on_tilde = np.isin(result.measure.supports, pair.perturbed.points)
    assert np.count_nonzero(~on_tilde) <= 2
    x1, x2 = result.anchors
    assert x1 < pair.perturbed.points[0] and x2 > pair.perturbed.points[-1]


def test_cutoff_keeps_the_outermost_carrying_atom(pair):
    points = pair.base.points[np.abs(pair.base.points) <= 10.5]
    result = transport_measure(pair, AtomicMeasure(points, _cubic_weights(points)))
    assert result.cutoff == pytest.approx(10.5)
    assert result.identity_error < 1e-3


def test_identity_check_sees_a_short_cutoff(pair, monkeypatch):
    monkeypatch.setattr("gapkit.transport.transport._inner_cutoff", lambda d, lam, delta: 0.5)
    measure = AtomicMeasure(pair.base.points, _cubic_weights(pair.base.points))
    with pytest.raises(TransportError, match="identity"):
        transport_measure(pair, measure)


def test_transport_is_linear(pair):
    points = pair.base.points
    first = _cubic_weights(points)
    second = (0.3 - 0.8j) * np.cos(points) / (1.0 + points ** 4)
    one = transport_measure(pair, AtomicMeasure(points, first))
    two = transport_measure(pair, AtomicMeasure(points, second))
    both = transport_measure(pair, AtomicMeasure(points, first + 2.0 * second))
    np.testing.assert_allclose(both.e, one.e + 2.0 * two.e, rtol=1e-9, atol=1e-13)
    np.testing.assert_allclose(both.f, np.array(one.f) + 2.0 * np.array(two.f), rtol=1e-9, atol=1e-13)


def test_reverse_transport(pair):
    measure = AtomicMeasure(pair.perturbed.points, _cubic_weights(pair.perturbed.points))
    result = reverse_transport(pair, measure)
    assert result.identity_error < 1e-3
    on_base = np.isin(result.measure.supports, pair.base.points)
    assert np.count_nonzero(~on_base) <= 2


def test_transport_rejects_bad_inputs(pair):
    stray = AtomicMeasure(np.arange(-10.0, 10.0) + 0.25, np.ones(20) / (1.0 + np.arange(20.0) ** 3))
    with pytest.raises(TransportError):
        transport_measure(pair, stray)
    measure = AtomicMeasure(pair.base.points, _cubic_weights(pair.base.points))
    with pytest.raises(TransportError, match="collides"):
        transport_measure(pair, measure, x1=pair.base.points[0], x2=100.0)


def test_zero_measure_is_rejected_as_a_witness(pair):
    result = transport_measure(pair, AtomicMeasure.zero())
    assert result.measure.is_zero()
    certificate = verify_transport(result.measure, 1.0)
    assert certificate.trivial
    assert not certificate.passed
    assert certificate.note == "trivial witness rejected"


def test_mirror_measure(two_atoms):
    mirrored = mirror_measure(two_atoms)
    np.testing.assert_allclose(mirrored.supports, [-1.25, 0.5])


@pytest.mark.slow
def test_transport_keeps_the_gap():
    pair = half_integer_pair(0.2, seed=0, window=512)
    source = transport_witness()
    result = transport_measure(pair, source)
    assert np.all(result.herglotz.c > 0)
    assert result.cutoff > 50.0
    partials = [v for _, v in result.l1_partials]
    assert partials[-1] / partials[-2] - 1.0 < 0.01
    certificate = verify_transport(result.measure, 2.0)
    assert certificate.passed
    assert [r.b for r in certificate.rungs] == [1.0, 1.5]
    assert not cauchy_gap_test(result.measure, 3.0).passed
