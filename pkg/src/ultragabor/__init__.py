"""Weight calculus, weight-system conditions and Gabor machinery for
Gelfand-Shilov type spaces of ultradifferentiable functions."""

from .errors import UltraGaborError
from .verdict import ConditionVerdict, Status
from .weights import (WeightFunction, WeightSequence, associated_function, gevrey, log_power, power_weight,
                      young_conjugate)
from .systems import WeightSystem, build_from_weight_function, build_from_weight_sequence, check_DN, check_ooOmega
from .grids import WeightGrid, build_beurling_grid, build_roumieu_grid, check_Q, check_wQ
from .testfunctions import TestFunction, christensen_dual, christensen_window, gaussian_window, hermite_window
from .timefreq import frame_roundtrip, gaussian_dual, reconstruct, stft, wexler_raz_check
from .lab import ExperimentReport, ExperimentSpec, run_experiment, run_suite

__version__ = "0.1.0"

__all__ = [
    "UltraGaborError", "ConditionVerdict", "Status",
    "WeightFunction", "WeightSequence", "associated_function", "gevrey", "log_power", "power_weight",
    "young_conjugate",
    "WeightSystem", "build_from_weight_function", "build_from_weight_sequence", "check_DN", "check_ooOmega",
    "WeightGrid", "build_beurling_grid", "build_roumieu_grid", "check_Q", "check_wQ",
    "TestFunction", "christensen_dual", "christensen_window", "gaussian_window", "hermite_window",
    "frame_roundtrip", "gaussian_dual", "reconstruct", "stft", "wexler_raz_check",
    "ExperimentReport", "ExperimentSpec", "run_experiment", "run_suite",
]
