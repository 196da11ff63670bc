"""Test result container and the threshold / p-value protocol shared by all tests."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Dict

import numpy as np


def check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    return alpha


def order_statistic_threshold(null_samples, level: float) -> float:
    """The ceil(level * (B + 1))-th smallest null sample (1-based).

    Returns ``inf`` when that rank exceeds B, i.e. the replicate set is too
    small to resolve the requested quantile.
    """
    x = np.sort(np.asarray(null_samples, dtype=float))
    B = x.size
    if B == 0:
        raise ValueError("no null samples")
    rank = math.ceil(level * (B + 1) - 1e-9)
    if rank > B:
        return math.inf
    return float(x[max(rank, 1) - 1])


def bootstrap_p_value(statistic: float, null_samples) -> float:
    x = np.asarray(null_samples, dtype=float)
    return float((1 + np.count_nonzero(x >= statistic)) / (x.size + 1))


@dataclass
class TestResult:
    statistic: float
    null_samples: np.ndarray
    threshold: float
    p_value: float
    reject: bool
    alpha: float
    method: str
    seed: int
    meta: Dict[str, Any] = field(default_factory=dict)

    # keep pytest from collecting this as a test class
    __test__ = False

    @classmethod
    def from_null(cls, statistic: float, null_samples, alpha: float, method: str, seed: int,
                  **meta) -> "TestResult":
        null_samples = np.asarray(null_samples, dtype=float)
        threshold = order_statistic_threshold(null_samples, 1.0 - alpha)
        return cls(
            statistic=float(statistic),
            null_samples=null_samples,
            threshold=threshold,
            p_value=bootstrap_p_value(statistic, null_samples),
            reject=bool(statistic > threshold),
            alpha=alpha,
            method=method,
            seed=int(seed),
            meta=meta,
        )

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready summary (null samples omitted)."""
        out = {
            "method": self.method,
            "statistic": self.statistic,
            "threshold": self.threshold,
            "p_value": self.p_value,
            "reject": self.reject,
            "alpha": self.alpha,
            "seed": self.seed,
        }
        out.update(self.meta)
        return out
