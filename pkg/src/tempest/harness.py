"""Data ingestion and single-test dispatch shared by the CLI and the benchmarks."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np

from .hsic import instantaneous_independence_test, shift_hsic_test
from .kernels import MEDIAN, KernelSpec
from .lag_hsic import AUTO, LAG_REPLICATES, LagHsicConfig, lag_hsic_test
from .mmd import DEFAULT_PERMUTATIONS, mmd_permutation_test, mmd_test
from .wild_bootstrap import DEFAULT_BLOCK_LENGTH, DEFAULT_REPLICATES, BootstrapConfig

TESTS = ("mmd-wild", "mmd-paired", "mmd-permutation", "hsic-wild", "hsic-shift", "lag-hsic")


class InputError(ValueError):
    """Bad user data; ``code`` is a stable machine-readable identifier."""

    def __init__(self, message: str, code: str = "invalid-input"):
        super().__init__(message)
        self.code = code


def load_csv(path: Union[str, Path], has_header: bool = False) -> np.ndarray:
    """Read a rectangular numeric CSV (row = time index, column = dimension)."""
    path = Path(path)
    try:
        fh = path.open(newline="", encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}", "io-error") from exc
    rows = []
    width = None
    with fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if has_header and lineno == 1:
                continue
            if not row or all(not c.strip() for c in row):
                continue
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise InputError(f"{path}: row {lineno} has {len(row)} columns, expected {width}",
                                 "ragged-rows")
            try:
                values = [float(c) for c in row]
            except ValueError:
                raise InputError(f"{path}: non-numeric value in row {lineno}", "non-numeric") from None
            if not all(math.isfinite(v) for v in values):
                raise InputError(f"{path}: NaN or infinite value in row {lineno}", "non-finite")
            rows.append(values)
    if not rows:
        raise InputError(f"{path}: no data rows", "empty")
    return np.asarray(rows, dtype=float)


def write_csv(path: Union[str, Path], data: np.ndarray, header=None):
    data = np.atleast_2d(np.asarray(data, dtype=float).T).T
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if header:
            w.writerow(header)
        for row in data:
            w.writerow([repr(float(v)) for v in row])


@dataclass
class ExperimentSpec:
    """One hypothesis test on a fixed pair of series."""

    test: str
    X: np.ndarray
    Y: np.ndarray
    name: str = ""
    alpha: float = 0.05
    seed: int = 0
    block_length: float = DEFAULT_BLOCK_LENGTH
    replicates: Optional[int] = None  # None: 1000 for lag-hsic, else 300
    variant: Optional[str] = None
    kernel: str = "gaussian"
    bandwidth: Union[float, str] = MEDIAN
    factor: bool = True
    gpd: bool = True
    lags: Union[int, str] = AUTO
    notes: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.test not in TESTS:
            raise InputError(f"unknown test {self.test!r}; expected one of {TESTS}", "invalid-config")


def default_replicates(test: str) -> int:
    return LAG_REPLICATES if test == "lag-hsic" else DEFAULT_REPLICATES


def run_test(spec: ExperimentSpec) -> Dict[str, Any]:
    """Run the test described by ``spec`` and return a JSON-ready dict."""
    kspec = KernelSpec(spec.kernel, spec.bandwidth)
    variant = spec.variant or "vb2"
    if spec.replicates is None:
        spec = replace(spec, replicates=default_replicates(spec.test))
    boot = BootstrapConfig(spec.block_length, spec.replicates, variant, spec.seed)
    notes = dict(spec.notes)
    factor_applied = None
    if spec.test == "mmd-wild":
        res = mmd_test(spec.X, spec.Y, kspec, boot, spec.alpha, mode="wild")
    elif spec.test == "mmd-paired":
        res = mmd_test(spec.X, spec.Y, kspec, boot, spec.alpha, mode="paired")
    elif spec.test == "mmd-permutation":
        res = mmd_permutation_test(spec.X, spec.Y, kspec, spec.replicates, spec.alpha, spec.seed)
    elif spec.test == "hsic-wild":
        res = instantaneous_independence_test(spec.X, spec.Y, kspec, kspec, boot, spec.alpha,
                                              factor=spec.factor)
        factor_applied = spec.factor
    elif spec.test == "hsic-shift":
        res = shift_hsic_test(spec.X, spec.Y, kspec, kspec, spec.replicates, spec.alpha, spec.seed)
    else:
        cfg = LagHsicConfig(spec.lags, spec.alpha, boot, spec.gpd, factor=spec.factor)
        res = lag_hsic_test(spec.X, spec.Y, kspec, kspec, cfg)
        factor_applied = spec.factor
        notes.update(M=res.meta["M"], argmax_lag=res.argmax_lag, level=res.level,
                     threshold_method=res.meta["threshold_method"])
        return _report(spec, res.to_dict()["method"], res.statistic, res.threshold,
                       res.to_dict()["p_value"], res.reject, boot, factor_applied, notes)
    return _report(spec, res.method, res.statistic, res.threshold, res.p_value, res.reject, boot,
                   factor_applied, notes)


def _report(spec, method, statistic, threshold, p_value, reject, boot, factor_applied, notes):
    n = spec.X.shape[0] if spec.X.shape[0] == spec.Y.shape[0] else [spec.X.shape[0], spec.Y.shape[0]]
    uses_w = spec.test not in ("mmd-permutation", "hsic-shift")
    return {
        "method": method,
        "statistic": _finite(statistic),
        "threshold": _finite(threshold),
        "p_value": _finite(p_value),
        "reject": bool(reject),
        "alpha": spec.alpha,
        "n": n,
        "B": spec.replicates,
        "l_n": boot.block_length if uses_w else None,
        "seed": spec.seed,
        "factor_applied": factor_applied,
        "notes": notes,
    }


def _finite(x):
    x = float(x)
    if math.isfinite(x):
        return x
    return "inf" if x > 0 else "-inf"


def dumps(obj) -> str:
    """Deterministic JSON text (insertion key order, no NaN/Infinity tokens)."""
    return json.dumps(_sanitize(obj), indent=2, allow_nan=False, default=_json_default) + "\n"


def _sanitize(obj):
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, float):
        return _finite(obj)
    return obj


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return _finite(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")
