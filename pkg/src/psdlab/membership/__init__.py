"""Certificate-producing membership machinery for the cone filtration."""

from .certificates import (
    Certificate,
    DualPoint,
    DualPointCertificate,
    LevelCertificate,
    SosCertificate,
    Verification,
    certificate_from_json,
    verify_certificate,
)
from .decide import (
    CertificateConstructionError,
    MembershipResult,
    Options,
    ProbeReport,
    boundary_probe,
    ci_inner_certify,
    ci_refute,
    interior_sigma_test,
    sos_test,
    squares_from_gram,
)
from .moments import MomentMatrix, moment_from_points, riesz_apply
from .sampling import SampleReport, hi_sample, negative_point, psd_sample_test

__all__ = [
    "Certificate",
    "CertificateConstructionError",
    "DualPoint",
    "DualPointCertificate",
    "LevelCertificate",
    "MembershipResult",
    "MomentMatrix",
    "Options",
    "ProbeReport",
    "SampleReport",
    "SosCertificate",
    "Verification",
    "boundary_probe",
    "certificate_from_json",
    "ci_inner_certify",
    "ci_refute",
    "hi_sample",
    "interior_sigma_test",
    "moment_from_points",
    "negative_point",
    "psd_sample_test",
    "riesz_apply",
    "sos_test",
    "squares_from_gram",
    "verify_certificate",
]
