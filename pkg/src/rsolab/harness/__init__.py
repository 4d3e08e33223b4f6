"""Ensemble experiment drivers, seed management and result persistence."""
from .config import ExperimentConfig
from .experiments import (
    GROWING,
    INDETERMINATE,
    SATURATING,
    LocalizationRow,
    LocalizationStudyResult,
    PhaseDiagramResult,
    PhasePoint,
    PhaseRow,
    WegnerResult,
    WegnerRow,
    classify,
    classify_counts,
    growth_ratio,
    localize_operator,
    realization_seeds,
    run_localization_study,
    run_phase_sweep,
    run_wegner_probe,
)
from .persistence import RunManifest, list_runs, load_run, save_run

__all__ = [
    "ExperimentConfig",
    "GROWING",
    "INDETERMINATE",
    "LocalizationRow",
    "LocalizationStudyResult",
    "PhaseDiagramResult",
    "PhasePoint",
    "PhaseRow",
    "RunManifest",
    "SATURATING",
    "WegnerResult",
    "WegnerRow",
    "classify",
    "classify_counts",
    "growth_ratio",
    "list_runs",
    "load_run",
    "localize_operator",
    "realization_seeds",
    "run_localization_study",
    "run_phase_sweep",
    "run_wegner_probe",
    "save_run",
]
