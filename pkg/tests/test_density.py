import math

import numpy as np
import pytest

from gapkit.density import (
    DensityOptions,
    Verdict,
    brute_force_assignment,
    complementarity_check,
    density_report,
    lattice_density_exact,
    lower_bm_density,
    redheffer_sum,
    regular_witness_density,
    regularity_integral,
    upper_bm_density,
)
from gapkit.errors import DensityError
from gapkit.sets import DiscreteSet, load_set, parse_set_dsl, translate


@pytest.fixture
def half_integers():
    return DiscreteSet.explicit(np.arange(-1000, 1000) + 0.5, finite=False)


def test_redheffer_converges_at_the_density(half_integers):
    result = redheffer_sum(half_integers, 1.0)
    assert result.verdict == Verdict.CONVERGING.value
    assert [n for n, _ in result.partial_sums] == [125, 250, 500, 1000]


def test_redheffer_diverges_below_the_density(half_integers):
    result = redheffer_sum(half_integers, 0.5)
    assert result.verdict == Verdict.DIVERGING.value
    assert result.slope > 0.5


def test_redheffer_assignment_is_injective(half_integers):
    result = redheffer_sum(half_integers, 0.7, count=100)
    ns = [n for _, n in result.pairs]
    assert len(set(ns)) == len(ns)
    assert 0 not in ns


def test_redheffer_short_window_is_inconclusive(half_integers):
    assert redheffer_sum(half_integers, 1.0, count=8).verdict == Verdict.INCONCLUSIVE.value


def test_redheffer_errors(integers, half_integers):
    with pytest.raises(DensityError):
        redheffer_sum(half_integers, 0.0)
    with pytest.raises(DensityError):
        redheffer_sum(integers, 1.0)


@pytest.mark.parametrize("step, a", [(2.0, 0.5), (1.0, 1.0)])
def test_redheffer_sum_vanishes_on_punctured_lattices(step, a):
    n = np.arange(1, 401)
    punctured = DiscreteSet.explicit(step * np.concatenate([-n[::-1], n]), finite=False)
    result = redheffer_sum(punctured, a)
    assert result.total == 0.0
    assert result.verdict == Verdict.CONVERGING.value


@pytest.mark.parametrize("count", [4, 12, 20])
def test_brute_force_matches_the_assignment_near_the_integers(count):
    k = np.arange(1, 41, dtype=float)
    jittered = DiscreteSet.explicit(np.concatenate([-k[::-1] + 0.1 * np.sin(k[::-1]), k + 0.1 * np.cos(k)]), finite=False)
    greedy = redheffer_sum(jittered, 1.0, count=count)
    optimal, pairs = brute_force_assignment(jittered, 1.0, count=count)
    assert optimal == pytest.approx(greedy.total, rel=1e-12, abs=1e-15)
    assert pairs == greedy.pairs


def test_brute_force_never_beats_exact(half_integers):
    greedy = redheffer_sum(half_integers, 0.8, count=10)
    optimal, pairs = brute_force_assignment(half_integers, 0.8, count=10)
    assert len(pairs) == 20
    assert optimal <= greedy.total + 1e-12
    with pytest.raises(DensityError):
        brute_force_assignment(half_integers, 0.8, count=21)


def test_regularity_integral_of_integers():
    # For Z the mirrored pieces pair up to 1/(1+x^2), so the integral is arctan(R).
    diag = regularity_integral(load_set("lattice:alpha=1", radius=1000), 1.0, 1000.0)
    assert diag.partial_integrals[-1][1] == pytest.approx(math.atan(1000.0), abs=1e-6)
    assert abs(diag.partial_integrals[-1][1] - math.pi / 2) < 0.05
    assert diag.verdict == Verdict.CONVERGING.value


def test_regularity_integral_diverges_off_density():
    diag = regularity_integral(load_set("lattice:alpha=1", radius=1000), 0.5, 1000.0)
    assert diag.verdict == Verdict.DIVERGING.value


def test_regularity_verdict_ignores_translation():
    integers = load_set("lattice:alpha=1", radius=1000)
    shifted = translate(integers, 0.3)
    for a in (0.5, 1.0, 1.5):
        assert regularity_integral(shifted, a, 900.0).verdict == regularity_integral(integers, a, 900.0).verdict


def test_regularity_diverges_further_from_the_density():
    integers = load_set("lattice:alpha=1", radius=1000)
    slopes = [regularity_integral(integers, a, 1000.0).slope for a in (1.0, 1.25, 1.5, 2.0)]
    assert slopes == sorted(slopes)
    assert regularity_integral(integers, 1.0, 1000.0).verdict == Verdict.CONVERGING.value


def test_regular_witness_of_integers():
    witness = regular_witness_density(load_set("lattice:alpha=1", radius=1000), 1000.0)
    assert witness.a == pytest.approx(1.0, abs=0.02)


@pytest.mark.parametrize(
    "text, expected",
    [
        ("lattice:alpha=0.5", 2.0),
        ("lattice-minus:alpha=1,residues=0 mod 3", 2 / 3),
        ("lattice-minus:alpha=1,residues=0;1 mod 5", 0.6),
        ("complement:base=[lattice-minus:alpha=1,residues=0 mod 3],alpha=1", 1 / 3),
        ("explicit:0,0.3,1.0", 0.0),
    ],
)
def test_lattice_density_exact(text, expected):
    assert lattice_density_exact(parse_set_dsl(text)) == pytest.approx(expected)


def test_lattice_density_exact_needs_a_period():
    with pytest.raises(DensityError):
        lattice_density_exact(parse_set_dsl("lattice-minus:alpha=1,thin=0.3"))


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
def test_upper_density_of_lattices(alpha):
    estimate = upper_bm_density(load_set(f"lattice:alpha={alpha}", radius=2000), DensityOptions(radius=2000))
    low, high = estimate.bracket
    assert low <= 1 / alpha <= high
    assert high - low <= 0.05
    assert estimate.agrees
    assert any("translated" in note for note in estimate.notes)


def test_finite_sets_have_zero_density():
    finite = load_set("explicit:0,0.3,1.0")
    assert upper_bm_density(finite).estimate == 0.0
    assert lower_bm_density(finite).bracket == (0.0, 0.0)


def test_lower_density_of_full_lattice_is_exact():
    estimate = lower_bm_density(load_set("lattice:alpha=1", radius=2000))
    assert estimate.method == "complement"
    assert estimate.estimate == pytest.approx(1.0)


def test_density_report_of_integers():
    report = density_report(load_set("lattice:alpha=1", radius=2000), DensityOptions(radius=2000))
    assert report.consistent
    assert not report.one_sided
    assert report.upper.estimate == pytest.approx(1.0, abs=0.05)
    assert report.diagnostics[0].verdict == Verdict.CONVERGING.value


@pytest.mark.parametrize(
    "text",
    [
        "lattice-minus:alpha=1,residues=1 mod 2",
        "lattice-minus:alpha=1,residues=0 mod 3",
        "lattice-minus:alpha=1,residues=0;1 mod 5",
    ],
)
def test_complementarity(text):
    report = complementarity_check(load_set(text, radius=2000), DensityOptions(radius=2000))
    assert report.residual <= 0.05


def test_complementarity_needs_a_lattice(half_integers):
    with pytest.raises(DensityError):
        complementarity_check(half_integers)
