from gapkit.density.estimators import (
    ComplementarityReport,
    DensityEstimate,
    DensityOptions,
    DensityReport,
    complementarity_check,
    density_report,
    lattice_density_exact,
    lower_bm_density,
    upper_bm_density,
)
from gapkit.density.redheffer import RedhefferAssignment, brute_force_assignment, redheffer_sum
from gapkit.density.regularity import (
    RegularityDiagnostics,
    RegularWitness,
    Verdict,
    regular_witness_density,
    regularity_integral,
)
