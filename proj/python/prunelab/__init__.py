"""Python interface to the prunelab native core."""

from ._prunelab import (
    InterpolationThreshold,
    InvalidArgument,
    IoError,
    NoClosedForm,
    NumericalError,
    RidgelessRequired,
    SelectionStrategy,
    compare_adaptive_static,
    compute_scalars,
    preset_config,
    preset_names,
    ridgeless_test_error,
    run_cell,
    run_sweep_csv,
    spectral_state,
    stieltjes_m,
    theory_test_error,
    threshold_for_keep_probability,
)

__all__ = [
    "InterpolationThreshold",
    "InvalidArgument",
    "IoError",
    "NoClosedForm",
    "NumericalError",
    "RidgelessRequired",
    "SelectionStrategy",
    "compare_adaptive_static",
    "compute_scalars",
    "preset_config",
    "preset_names",
    "ridgeless_test_error",
    "run_cell",
    "run_sweep_csv",
    "spectral_state",
    "stieltjes_m",
    "theory_test_error",
    "threshold_for_keep_probability",
]
