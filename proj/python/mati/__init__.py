"""MATI certification and validation for delayed networked control loops."""

from ._mati import (
    CertMode,
    ErrorSystemParams,
    EstimatorKind,
    InfeasibleTarget,
    MatiCertificate,
    ProtocolKind,
    RazumikhinWitness,
    Scenario,
    SearchFailure,
    build_scenario,
    certify,
    check_conditions,
    estimate_l2_gain,
    make_protocol,
    simulate,
    sweep_csv,
    verify_ugas,
)

__all__ = [
    "CertMode",
    "ErrorSystemParams",
    "EstimatorKind",
    "InfeasibleTarget",
    "MatiCertificate",
    "ProtocolKind",
    "RazumikhinWitness",
    "Scenario",
    "SearchFailure",
    "build_scenario",
    "certify",
    "check_conditions",
    "estimate_l2_gain",
    "make_protocol",
    "simulate",
    "sweep_csv",
    "verify_ugas",
]
