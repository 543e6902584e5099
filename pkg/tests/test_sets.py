import numpy as np
import pytest

from gapkit.errors import GapError, PerturbationError, SeparationError, SetSpecError, TruncationError
from gapkit.sets import (
    DiscreteSet,
    avoid_origin,
    complement_in_lattice,
    counting_function,
    format_set_spec,
    insert_point,
    load_set,
    modulate,
    parse_set_dsl,
    perturb,
    read_measure_file,
    remove_points,
    separation,
    snap_to_lattice,
    translate,
    write_measure_file,
)
from gapkit.sets.discrete_set import counting_values
from gapkit.sets.generators import LatticeGenerator, LatticeMinusGenerator
from gapkit.sets.measure import AtomicMeasure


def test_parse_lattice():
    generator = parse_set_dsl("lattice:alpha=0.5")
    assert isinstance(generator, LatticeGenerator)
    assert generator.alpha == 0.5


def test_parse_lattice_minus_drops_residue_class():
    generator = parse_set_dsl("lattice-minus:alpha=1,residues=0 mod 3")
    assert isinstance(generator, LatticeMinusGenerator)
    pts = generator.points(30)
    assert pts.size > 0
    assert not np.any(np.mod(pts, 3) == 0)
    assert generator.exact_density() == pytest.approx(2 / 3)


@pytest.mark.parametrize(
    "text",
    [
        "lattice:alpha=-1",
        "lattice:alpha=abc",
        "lattice-minus:alpha=1,residues=3 mod 3",
        "lattice:beta=1",
        "circle:alpha=1",
        "lattice",
        "",
    ],
)
def test_parse_errors_carry_position(text):
    with pytest.raises(SetSpecError) as info:
        parse_set_dsl(text)
    assert info.value.position >= 0
    assert "position" in str(info.value)


def test_negative_alpha_reports_expected_token():
    with pytest.raises(SetSpecError) as info:
        parse_set_dsl("lattice:alpha=-1")
    assert info.value.expected == "a positive number"
    assert info.value.position > len("lattice:")


@pytest.mark.parametrize(
    "text",
    [
        "lattice:alpha=0.5",
        "lattice-minus:alpha=1,residues=0;1 mod 5",
        "lattice-minus:alpha=0.5,thin=0.3,seed=7",
        "lattice-minus:alpha=1,residues=0 mod 2,complement=true",
        "explicit:0,0.3,1.0",
        "perturb:base=[lattice:alpha=1],delta=0.2,mode=snap,alpha=0.05",
        "perturb:base=[lattice:alpha=1],delta=0.2,mode=symmetric,seed=3",
        "modify:base=[lattice:alpha=1],remove=0;1;2",
        "complement:base=[lattice-minus:alpha=1,residues=0 mod 3],alpha=1",
    ],
)
def test_format_inverts_parse(text):
    generator = parse_set_dsl(text)
    assert parse_set_dsl(format_set_spec(generator)) == generator


def test_unbracketed_perturb_base():
    generator = parse_set_dsl("perturb:base=lattice:alpha=1,delta=0.2,mode=positive")
    assert generator.base == LatticeGenerator(alpha=1.0)
    assert generator.delta == 0.2


def test_counting_function_is_signed(integers):
    assert counting_function(integers, 0.0) == 1
    assert counting_function(integers, 2.5) == 3
    assert counting_function(integers, -2.5) == -2
    with pytest.raises(TruncationError):
        counting_function(integers, 60.0)


def test_separation(integers):
    assert separation(integers) == pytest.approx(1.0)
    with pytest.raises(SeparationError):
        separation(DiscreteSet.explicit([0.3]))


def test_counting_function_steps_by_one(integers):
    xs = np.arange(-49.995, 49.995, 0.01)
    for points in (integers.points, perturb(integers, 0.2, mode="symmetric", seed=2).points):
        steps = np.diff(counting_values(points, xs))
        assert set(np.unique(steps)) <= {0, 1}
        assert steps.sum() == np.count_nonzero((points > xs[0]) & (points <= xs[-1]))


def test_translation_keeps_the_separation(integers):
    finite = DiscreteSet.explicit([-2.0, 0.3, 1.1, 4.0])
    assert separation(translate(finite, 0.37)) == pytest.approx(separation(finite))
    assert separation(translate(integers, 0.5)) == pytest.approx(separation(integers))


def test_points_must_increase():
    with pytest.raises(SeparationError):
        DiscreteSet.explicit([1.0, 1.0])


def test_positive_perturbation_offsets(integers):
    moved = perturb(integers, 0.2, mode="positive", seed=1)
    assert len(moved) == len(integers) - 2
    offsets = moved.points - integers.points[1:-1]
    assert np.all(offsets > 0.1)
    assert np.all(offsets < 0.2)


def test_symmetric_perturbation_offsets(integers):
    moved = perturb(integers, 0.2, mode="symmetric", seed=1)
    offsets = moved.points - integers.points[1:-1]
    assert np.all(np.abs(offsets) < 0.2)
    assert np.any(offsets < 0)


def test_perturbation_is_seeded(integers):
    a = perturb(integers, 0.2, mode="symmetric", seed=4)
    b = perturb(integers, 0.2, mode="symmetric", seed=4)
    np.testing.assert_array_equal(a.points, b.points)


def test_zero_perturbation_is_identity(integers):
    assert perturb(integers, 0.0) is integers


def test_perturbation_bound_is_enforced(integers):
    with pytest.raises(PerturbationError):
        perturb(integers, 0.3)


def test_snap_to_lattice(integers):
    snapped, offsets = snap_to_lattice(integers, 0.2, 0.05)
    assert np.all(offsets > 0.1)
    assert np.all(offsets < 0.2)
    steps = snapped.points / 0.05
    np.testing.assert_allclose(steps, np.rint(steps), atol=1e-9)
    assert snapped.generator.lattice_alpha() == 0.05


def test_moved_points_stay_inside_the_window(integers):
    for moved in (
        perturb(integers, 0.2, mode="positive", seed=3),
        perturb(integers, 0.2, mode="symmetric", seed=3),
        snap_to_lattice(integers, 0.2, 0.05)[0],
    ):
        assert moved.window_radius == pytest.approx(49.8)
        assert np.all(np.abs(moved.points) <= moved.window_radius)
    snapped, offsets = snap_to_lattice(integers, 0.2, 0.05)
    assert offsets.shape == snapped.points.shape


def test_snap_rejects_coarse_lattice(integers):
    with pytest.raises(PerturbationError):
        snap_to_lattice(integers, 0.2, 0.1)


def test_complement_of_evens_is_odd(evens):
    odds = complement_in_lattice(evens, 1.0)
    assert np.all(np.mod(odds.points, 2) == 1)
    assert odds.generator.exact_density() == pytest.approx(0.5)


def test_avoid_origin(integers):
    moved, shift = avoid_origin(integers)
    assert shift == pytest.approx(1 / 3)
    assert not moved.contains(0.0)
    _, none = avoid_origin(translate(integers, 0.5))
    assert none == 0.0


def test_insert_and_remove(integers):
    with pytest.raises(SeparationError):
        insert_point(integers, 3.0)
    trimmed = remove_points(integers, [0.0, 1.0, 2.0])
    assert len(trimmed) == len(integers) - 3
    assert not trimmed.contains(1.0)
    assert trimmed.generator.lattice_alpha() == 1.0


def test_finite_set_from_dsl_is_kept_whole():
    finite = load_set("explicit:0,0.3,1.0", radius=0.5)
    np.testing.assert_allclose(finite.points, [0.0, 0.3, 1.0])
    assert finite.is_finite()


def test_measure_file(tmp_path, two_atoms):
    path = tmp_path / "mu.measure"
    write_measure_file(two_atoms, path)
    loaded = read_measure_file(path)
    np.testing.assert_array_equal(loaded.supports, two_atoms.supports)
    np.testing.assert_array_equal(loaded.weights, two_atoms.weights)


def test_measure_file_errors(tmp_path):
    path = tmp_path / "bad.measure"
    path.write_text("0.0 1.0\n")
    with pytest.raises(GapError):
        read_measure_file(path)
    with pytest.raises(GapError):
        read_measure_file(tmp_path / "missing.measure")


def test_measure_rejects_repeated_supports():
    with pytest.raises(GapError):
        AtomicMeasure([1.0, 1.0], [1.0, 2.0])


def test_modulate_shifts_the_transform(two_atoms):
    moved = modulate(two_atoms, 0.7)
    np.testing.assert_allclose(moved.weights, two_atoms.weights * np.exp(0.7j * two_atoms.supports))
    assert moved.total_variation == pytest.approx(two_atoms.total_variation)
