import numpy as np
import pytest

from gapkit.sets import load_set
from gapkit.sets.measure import AtomicMeasure


@pytest.fixture
def integers():
    return load_set("lattice:alpha=1", radius=50)


@pytest.fixture
def evens():
    return load_set("lattice-minus:alpha=1,residues=1 mod 2", radius=2000)


@pytest.fixture
def two_atoms():
    return AtomicMeasure(np.array([-0.5, 1.25]), np.array([1.0, -0.5j]))
