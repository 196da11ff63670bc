"""Rejection-rate benchmarks mirroring the experiments on MCMC output, audio,
extinct-Gaussian pairs, common-variance pairs and coupled oscillators.

Each preset is a list of cells; a cell fixes a data generator and a set of
methods. In every trial all methods of a cell see the same data. Random
streams are keyed by ``(suite seed, cell index, trial index, purpose)`` so
results do not depend on execution order or the number of workers.
"""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Sequence, Tuple

import numpy as np

from . import generators as gen
from .hsic import instantaneous_independence_test, shift_hsic_test
from .kernels import KernelSpec
from .lag_hsic import LAG_REPLICATES, LagHsicConfig, lag_hsic_test
from .mmd import mmd_permutation_test, mmd_test
from .wild_bootstrap import DEFAULT_REPLICATES, BootstrapConfig, Purpose, stream

PRESETS = ("table1-mcmc", "table1-audio", "fig1-extinct", "fig2-vec", "fig2-osc")
DEFAULT_TRIALS = 200

MCMC_BANDWIDTH = 1.7
AUDIO_BANDWIDTH = 14.0
SHIFTED_MEAN = (2.5, 0.0)


@dataclass
class Settings:
    alpha: float = 0.05
    block_length: float = 20.0
    replicates: Any = None  # None: 1000 for lag-hsic, else 300
    factor: bool = True
    gpd: bool = True
    lags: Any = "auto"
    kernel: str = "gaussian"
    bandwidth: Any = None  # None: preset default


@dataclass
class Cell:
    experiment: str
    hypothesis: str
    param: str
    value: Any
    n_x: int
    n_y: int
    data: Callable  # (rng_x, rng_y) -> (X, Y)
    methods: Sequence[str]
    bandwidth: Any = "median"


@dataclass
class RejectionReport:
    preset: str
    experiment: str
    hypothesis: str
    param: str
    value: Any
    n_x: int
    n_y: int
    method: str
    trials: int
    rejections: int
    mean_statistic: float
    mean_threshold: float
    wall_time: float = 0.0
    records: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def rejection_rate(self) -> float:
        return self.rejections / self.trials


def trial_seed(seed: int, cell: int, trial: int) -> int:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(cell, trial))
    return int(ss.generate_state(1, np.uint64)[0])


# --- presets ----------------------------------------------------------------

def _mcmc_cells(full: bool) -> List[Cell]:
    n = 500
    methods = ("mmd-permutation", "mmd-wild", "mmd-vb1", "mmd-vb2")
    shifted = SHIFTED_MEAN

    def iid(r):
        return gen.gen_iid_normal(n, seed=r)

    def gibbs(r):
        return gen.gen_gibbs_normal(n, seed=r)

    def gibbs_shifted(r):
        return gen.gen_gibbs_normal(n, mean=shifted, seed=r)

    rows = [
        ("iid-vs-iid", "H0", lambda rx, ry: (iid(rx), iid(ry))),
        ("iid-vs-gibbs", "H0", lambda rx, ry: (iid(rx), gibbs(ry))),
        ("gibbs-vs-gibbs", "H0", lambda rx, ry: (gibbs(rx), gibbs(ry))),
        ("gibbs-vs-shifted-gibbs", "H1", lambda rx, ry: (gibbs(rx), gibbs_shifted(ry))),
    ]
    return [Cell(name, hyp, "n", n, n, n, fn, methods, MCMC_BANDWIDTH) for name, hyp, fn in rows]


def _audio_cells(full: bool) -> List[Cell]:
    sizes = [(300, 200), (600, 400)] + ([(900, 600)] if full else [])
    methods = ("mmd-permutation", "mmd-wild")
    cells = []
    for hyp, sig_y in (("H0", 0.1), ("H1", 0.05)):
        for nx, ny in sizes:
            def data(rx, ry, nx=nx, ny=ny, sig_y=sig_y):
                return (gen.gen_pitch_sound(nx, sigma_frac=0.1, lam=0.8, seed=rx),
                        gen.gen_pitch_sound(ny, sigma_frac=sig_y, lam=0.8, seed=ry))
            cells.append(Cell("audio", hyp, "n_x", nx, nx, ny, data, methods, AUDIO_BANDWIDTH))
    return cells


def _extinct_cells(full: bool) -> List[Cell]:
    n = 1200 if full else 500
    methods = ("hsic-shift", "hsic-vb1", "hsic-vb2")
    cells = []
    for ar in (0.2, 0.5, 0.8):
        def data(rx, ry, ar=ar):
            return gen.gen_ar1(n, ar, rx), gen.gen_ar1(n, ar, ry)
        cells.append(Cell("extinct-gaussian", "H0", "ar", ar, n, n, data, methods))
    for radius in (0.5, 1.0, 1.5, 2.0):
        def data(rx, ry, radius=radius):
            return gen.gen_extinct_gaussian_pair(n, 0.5, radius, rx)
        cells.append(Cell("extinct-gaussian", "H1", "extinction_radius", radius, n, n, data, methods))
    return cells


def _vec_cells(full: bool) -> List[Cell]:
    sizes = (300, 600, 1200) + ((2400,) if full else ())
    cells = []
    for n in sizes:
        def alt(rx, ry, n=n):
            return gen.gen_vec_pair(n, seed=rx)

        def null(rx, ry, n=n):
            return gen.gen_vec_pair(n, seed=rx)[0], gen.gen_vec_pair(n, seed=ry)[1]
        cells.append(Cell("vec", "H1", "n", n, n, n, alt, ("lag-hsic",)))
        cells.append(Cell("vec", "H0", "n", n, n, n, null, ("lag-hsic",)))
    return cells


def _osc_cells(full: bool) -> List[Cell]:
    sizes = (500, 1000, 2000) + ((4000,) if full else ())
    cells = []
    for n in sizes:
        for hyp, C in (("H1", 0.4), ("H0", 0.0)):
            def data(rx, ry, n=n, C=C):
                return gen.gen_oscillator_pair(n, C=C, seed=rx)
            cells.append(Cell("oscillator", hyp, "n", n, n, n, data, ("lag-hsic",)))
    return cells


_BUILDERS = {
    "table1-mcmc": _mcmc_cells,
    "table1-audio": _audio_cells,
    "fig1-extinct": _extinct_cells,
    "fig2-vec": _vec_cells,
    "fig2-osc": _osc_cells,
}


def preset_cells(preset: str, full: bool = False) -> List[Cell]:
    if preset not in _BUILDERS:
        raise ValueError(f"unknown preset {preset!r}; expected one of {PRESETS}")
    return _BUILDERS[preset](full)


# --- running ----------------------------------------------------------------

def run_method(method: str, X, Y, seed: int, settings: Settings, bandwidth) -> Tuple[bool, float, float]:
    """Run one named method and return (reject, statistic, threshold)."""
    s = settings
    bw = s.bandwidth if s.bandwidth is not None else bandwidth
    B = s.replicates or (LAG_REPLICATES if method == "lag-hsic" else DEFAULT_REPLICATES)
    k = KernelSpec(s.kernel, bw)
    if method == "mmd-permutation":
        r = mmd_permutation_test(X, Y, k, B, s.alpha, seed)
    elif method in ("mmd-wild", "mmd-vb1", "mmd-vb2"):
        mode = method.split("-")[1]
        r = mmd_test(X, Y, k, BootstrapConfig(s.block_length, B, "vb1", seed), s.alpha, mode)
    elif method in ("hsic-vb1", "hsic-vb2"):
        cfg = BootstrapConfig(s.block_length, B, method.split("-")[1], seed)
        r = instantaneous_independence_test(X, Y, k, k, cfg, s.alpha, factor=s.factor)
    elif method == "hsic-shift":
        r = shift_hsic_test(X, Y, k, k, B, s.alpha, seed)
    elif method == "lag-hsic":
        cfg = LagHsicConfig(s.lags, s.alpha, BootstrapConfig(s.block_length, B, "vb2", seed),
                            s.gpd, factor=s.factor)
        r = lag_hsic_test(X, Y, k, k, cfg)
    else:
        raise ValueError(f"unknown method {method!r}")
    return r.reject, float(r.statistic), float(r.threshold)


def _run_trial(args):
    preset, full, seed, ci, trial, settings = args
    cell = preset_cells(preset, full)[ci]
    X, Y = cell.data(stream(seed, ci, trial, Purpose.DATA_X), stream(seed, ci, trial, Purpose.DATA_Y))
    tseed = trial_seed(seed, ci, trial)
    out = []
    for m in cell.methods:
        t0 = time.perf_counter()
        reject, stat, thr = run_method(m, X, Y, tseed, settings, cell.bandwidth)
        out.append((m, reject, stat, thr, time.perf_counter() - t0))
    return out


def run_benchmark(preset: str, trials: int = DEFAULT_TRIALS, seed: int = 0, full: bool = False,
                  settings: Settings | None = None, jobs: int = 1, progress=None) -> List[RejectionReport]:
    """Rejection rates for every (cell, method) of a preset."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    settings = settings or Settings()
    cells = preset_cells(preset, full)
    tasks = [(preset, full, seed, ci, t, settings) for ci in range(len(cells)) for t in range(trials)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_trial, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        results = []
        for i, task in enumerate(tasks):
            results.append(_run_trial(task))
            if progress:
                progress(i + 1, len(tasks))

    reports = []
    for ci, cell in enumerate(cells):
        per_cell = results[ci * trials:(ci + 1) * trials]
        for mi, m in enumerate(cell.methods):
            recs = [{"trial": t, "reject": r[mi][1], "statistic": r[mi][2], "threshold": r[mi][3]}
                    for t, r in enumerate(per_cell)]
            finite_thr = [r["threshold"] for r in recs if math.isfinite(r["threshold"])]
            reports.append(RejectionReport(
                preset=preset, experiment=cell.experiment, hypothesis=cell.hypothesis,
                param=cell.param, value=cell.value, n_x=cell.n_x, n_y=cell.n_y, method=m,
                trials=trials, rejections=sum(r["reject"] for r in recs),
                mean_statistic=float(np.mean([r["statistic"] for r in recs])),
                mean_threshold=float(np.mean(finite_thr)) if finite_thr else math.inf,
                wall_time=float(sum(r[mi][4] for r in per_cell)),
                records=recs,
            ))
    return reports


CSV_FIELDS = ("preset", "experiment", "hypothesis", "param", "value", "n_x", "n_y", "method",
              "trials", "rejections", "rejection_rate", "mean_statistic", "mean_threshold")


def _row(r: RejectionReport, timing: bool) -> Dict[str, Any]:
    row = {f: getattr(r, f) for f in CSV_FIELDS}
    if timing:
        row["wall_time"] = round(r.wall_time, 3)
    return row


def reports_csv(reports: Sequence[RejectionReport], timing: bool = False) -> str:
    buf = io.StringIO()
    fields = CSV_FIELDS + (("wall_time",) if timing else ())
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for r in reports:
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in _row(r, timing).items()})
    return buf.getvalue()


def reports_json(reports: Sequence[RejectionReport], seed: int, timing: bool = False,
                 records: bool = True) -> Dict[str, Any]:
    cells = []
    for r in reports:
        row = _row(r, timing)
        if records:
            row["records"] = r.records
        cells.append(row)
    return {"preset": reports[0].preset if reports else None, "seed": seed, "cells": cells}
