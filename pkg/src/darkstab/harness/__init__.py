"""Presets, scans, lineshape analysis, file output and the command line."""
from .analysis import (AnalysisError, InsufficientSpanError, extract_fwhm, find_optimum,
                       lineshape_fwhm, loglog_slope)
from .config import ConfigError
from .presets import PRESET_NAMES, Setup, build_setup, preset_defaults
from .scan import Axis, ScanRecord, ScanSpec, evaluate_point, run_scan

__all__ = [
    "AnalysisError", "InsufficientSpanError", "extract_fwhm", "find_optimum",
    "lineshape_fwhm", "loglog_slope", "ConfigError", "PRESET_NAMES", "Setup",
    "build_setup", "preset_defaults", "Axis", "ScanRecord", "ScanSpec",
    "evaluate_point", "run_scan",
]
