"""
Experiments Layer

Implements:
- Validated JSON experiment specs and the competition figure presets
- Deterministic figure data with CSV rows and a JSON manifest
- Verification suites with pass/fail/warn records
"""

from .figures import FigureResult, build_manifest, evaluate_mechanism, run_figure
from .reporting import (
    RESULT_COLUMNS,
    CheckRecord,
    CheckStatus,
    SuiteReport,
    load_reference,
    result_row,
    results_frame,
    write_manifest,
    write_results,
)
from .specs import ExperimentSpec, MechanismSpec, SampleSpec, figure_preset
from .suites import SUITES, SuiteConfig, run_suite, three_interval_mismatches

__all__ = [
    "FigureResult",
    "build_manifest",
    "evaluate_mechanism",
    "run_figure",
    "RESULT_COLUMNS",
    "CheckRecord",
    "CheckStatus",
    "SuiteReport",
    "load_reference",
    "result_row",
    "results_frame",
    "write_manifest",
    "write_results",
    "ExperimentSpec",
    "MechanismSpec",
    "SampleSpec",
    "figure_preset",
    "SUITES",
    "SuiteConfig",
    "run_suite",
    "three_interval_mismatches",
]
