"""Change-point detection for high-dimensional data with L_p-distance U-statistics.

Typical use::

    from cpscan import TestConfig, test_segment, binary_segmentation
    result = test_segment(X, TestConfig(kappa=0.4))
    segments = binary_segmentation(X)
"""

__version__ = "0.1.0"

from .critvals import (
    BridgeQuantileTable,
    cache_lookup_or_build,
    gumbel_threshold,
    p_value,
    simulate_bridge_sup,
)
from .detector import (
    SegmentationResult,
    TestConfig,
    TestResult,
    binary_segmentation,
    run_detection,
    test_segment,
)
from .distances import DistanceMatrix, pairwise_distances, rescale_factor
from .errors import CpscanError, DataError, DegenerateScaleError, ParameterError, TableMismatchError
from .jackknife import JackknifeEstimate, jackknife_sigma, normalize
from .metrics import adjusted_rand_index, breakpoints_to_labels, rand_index
from .ustat import ProcessPaths, PrefixSums, WeightSpec, build_paths, prefix_sums, statistic_T, weight_value

__all__ = [
    "BridgeQuantileTable", "CpscanError", "DataError", "DegenerateScaleError", "DistanceMatrix",
    "JackknifeEstimate", "ParameterError", "PrefixSums", "ProcessPaths", "SegmentationResult",
    "TableMismatchError", "TestConfig", "TestResult", "WeightSpec", "adjusted_rand_index",
    "binary_segmentation", "breakpoints_to_labels", "build_paths", "cache_lookup_or_build",
    "gumbel_threshold", "jackknife_sigma", "normalize", "p_value", "pairwise_distances",
    "prefix_sums", "rand_index", "rescale_factor", "run_detection", "simulate_bridge_sup",
    "statistic_T", "test_segment", "weight_value",
]
