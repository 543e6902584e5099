from gapkit.completeness.defect_oracle import (
    CompletenessDefectOracle,
    completeness_defect_oracle,
    projection_residuals,
    trial_frequencies,
)
from gapkit.completeness.radius import (
    IdentityReport,
    PerturbationCheck,
    RadiusOptions,
    RadiusReport,
    defect_radius,
    formula_radius,
    gap_radius_identity,
    perturbation_radius_check,
    radius_estimate,
    radius_from_gap_route,
)
