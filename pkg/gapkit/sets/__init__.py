from gapkit.sets.discrete_set import (
    DiscreteSet,
    Window,
    avoid_origin,
    complement_in_lattice,
    counting_function,
    insert_point,
    perturb,
    remove_points,
    separation,
    snap_to_lattice,
    translate,
)
from gapkit.sets.dsl import format_set_spec, load_set, parse_set_dsl
from gapkit.sets.measure import AtomicMeasure, modulate, read_measure_file, write_measure_file
