from gapkit.transport.herglotz import HerglotzData, PhiValue, growth_ratio, herglotz_residues, phi_eval
from gapkit.transport.interlacing import (
    InterlacedPair,
    mirror_measure,
    pair_with_offsets,
    perturbed_pair,
    validate_interlacing,
)
from gapkit.transport.transport import (
    TransportCertificate,
    TransportResult,
    reverse_transport,
    transport_measure,
    verify_transport,
)
