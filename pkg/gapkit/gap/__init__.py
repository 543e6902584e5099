from gapkit.gap.bridges import BridgeFunction, bridge_function_from_measure, bridge_measure_from_function, certify_gap
from gapkit.gap.estimate import GapOptions, GapReport, gap_characteristic_estimate, gap_from_complement
from gapkit.gap.fourier import (
    CauchyDecayTrace,
    DecayVerdict,
    cauchy_gap_test,
    cauchy_transform,
    decay_exponent,
    ft_gap_scan,
    measure_fourier,
    tame_coefficients,
)
from gapkit.gap.gram_oracle import GramGapOracle, gram_gap_oracle, gram_matrix
from gapkit.gap.witness import build_gap_measure
