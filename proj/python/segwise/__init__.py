"""Change-point detection with cross-validated model size and overestimation control."""

from ._segwise import (
    CapacityError,
    ConfigError,
    InputError,
    cost_path,
    critical_value,
    cusum,
    cv_curve,
    detect,
    dp_exact,
    pelt,
    segment_mean,
    segmentation_cost,
    simulate,
    sse_cost,
    uq,
    wbs_rank,
)

__all__ = [
    "CapacityError",
    "ConfigError",
    "InputError",
    "cost_path",
    "critical_value",
    "cusum",
    "cv_curve",
    "detect",
    "dp_exact",
    "pelt",
    "segment_mean",
    "segmentation_cost",
    "simulate",
    "sse_cost",
    "uq",
    "wbs_rank",
]
