"""Diagnostics on computed eigenpairs and analytic probes of the model."""
from .cook import DilationIntegral, cook_integral_probe, dilation_integral_probe, shell_sums
from .localization import (
    DecayFit,
    LocalizationReport,
    decay_fit,
    ipr,
    localization_report,
    shell_maxima,
)
from .weyl import WeylPacket, bump, loglog_slope, weyl_residual
from .wells import (
    HellmannFeynman,
    WellCurvePoint,
    finite_well_decay,
    finite_well_ground_energy,
    hellmann_feynman_check,
    is_monotone,
    occupation,
    single_well_ground_curve,
)

__all__ = [
    "DecayFit",
    "DilationIntegral",
    "HellmannFeynman",
    "LocalizationReport",
    "WellCurvePoint",
    "WeylPacket",
    "bump",
    "cook_integral_probe",
    "decay_fit",
    "dilation_integral_probe",
    "finite_well_decay",
    "finite_well_ground_energy",
    "hellmann_feynman_check",
    "ipr",
    "is_monotone",
    "localization_report",
    "loglog_slope",
    "occupation",
    "shell_maxima",
    "single_well_ground_curve",
    "weyl_residual",
]
