"""Wild-bootstrap kernel two-sample and independence tests for time series."""

from .hsic import hsic_stat, instantaneous_independence_test, shift_hsic_test
from .kernels import KernelSpec, gram, median_heuristic
from .lag_hsic import LagHsicConfig, gpd_tail_quantile, lag_hsic_test
from .mmd import empirical_mmd, mmd_permutation_test, mmd_test
from .results import TestResult
from .wild_bootstrap import BootstrapConfig, generate_w

__version__ = "0.1.0"

__all__ = [
    "BootstrapConfig", "KernelSpec", "LagHsicConfig", "TestResult", "empirical_mmd", "generate_w",
    "gpd_tail_quantile", "gram", "hsic_stat", "instantaneous_independence_test", "lag_hsic_test",
    "median_heuristic", "mmd_permutation_test", "mmd_test", "shift_hsic_test",
]
