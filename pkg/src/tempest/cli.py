"""Command line interface.

    tempest mmd-test  --x X.csv --y Y.csv [--mode wild|paired|permutation]
    tempest hsic-test --x X.csv --y Y.csv [--mode wild|shift]
    tempest lag-hsic  --x X.csv --y Y.csv [--lags auto|INT] [--gpd on|off]
    tempest generate  FAMILY --n N [--out FILE]
    tempest bench     PRESET [--trials N] [--out-dir DIR]

Option defaults can be overridden by ``TEMPEST_<OPTION>`` environment
variables (e.g. ``TEMPEST_ALPHA=0.01``); explicit flags win over both.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import bench, generators
from .harness import ExperimentSpec, InputError, dumps, load_csv, run_test, write_csv
from .wild_bootstrap import Purpose, stream


def _env(name: str, default):
    return os.environ.get(f"TEMPEST_{name.upper().replace('-', '_')}", default)


def _on_off(value: str) -> bool:
    v = str(value).lower()
    if v in ("on", "true", "1", "yes"):
        return True
    if v in ("off", "false", "0", "no"):
        return False
    raise argparse.ArgumentTypeError(f"expected on/off, got {value!r}")


def _bandwidth(value: str):
    if str(value).lower() == "median":
        return "median"
    try:
        bw = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bandwidth must be a positive number or 'median', got {value!r}")
    if not bw > 0:
        raise argparse.ArgumentTypeError("bandwidth must be positive")
    return bw


def _lags(value: str):
    if str(value).lower() == "auto":
        return "auto"
    return int(value)


def _seed(value: str) -> int:
    s = int(value)
    if not 0 <= s < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return s


def _common(p: argparse.ArgumentParser, bandwidth_default="median"):
    p.add_argument("--alpha", type=float, default=float(_env("alpha", 0.05)))
    p.add_argument("--block-size", type=float, default=float(_env("block_size", 20.0)),
                   help="wild bootstrap block length l_n")
    reps = _env("replicates", None)
    p.add_argument("--replicates", type=int, default=None if reps is None else int(reps),
                   help="bootstrap replicates / permutations / shifts (default 1000 for lag-hsic, else 300)")
    p.add_argument("--variant", choices=("vb1", "vb2"), default=_env("variant", None))
    p.add_argument("--kernel", choices=("gaussian", "laplacian"), default=_env("kernel", "gaussian"))
    bw = _env("bandwidth", bandwidth_default)
    p.add_argument("--bandwidth", type=_bandwidth, default=None if bw is None else _bandwidth(bw),
                   help="positive number or 'median'")
    p.add_argument("--seed", type=_seed, default=_seed(_env("seed", 0)))
    p.add_argument("--factor6", type=_on_off, default=_on_off(_env("factor6", "on")),
                   help="scale HSIC bootstrap samples by binom(4,2)=6")
    p.add_argument("--gpd", type=_on_off, default=_on_off(_env("gpd", "on")))
    p.add_argument("--lags", type=_lags, default=_lags(_env("lags", "auto")))
    p.add_argument("--format", choices=("json", "csv"), default=_env("format", "json"))


def _data_args(p):
    p.add_argument("--x", required=True, help="CSV file for X (rows = time)")
    p.add_argument("--y", required=True, help="CSV file for Y")
    p.add_argument("--header", action="store_true", help="input files have a header row")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tempest", description="Wild-bootstrap kernel tests for time series")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mmd-test", help="two-sample test")
    _data_args(p)
    p.add_argument("--mode", choices=("wild", "paired", "permutation"), default="wild")
    _common(p)

    p = sub.add_parser("hsic-test", help="instantaneous independence test")
    _data_args(p)
    p.add_argument("--mode", choices=("wild", "shift"), default="wild")
    _common(p)

    p = sub.add_parser("lag-hsic", help="multi-lag independence test")
    _data_args(p)
    _common(p)

    p = sub.add_parser("generate", help="write a synthetic series as CSV")
    p.add_argument("family", choices=sorted(generators.GENERATORS))
    p.add_argument("--n", type=int, required=True, help="length (periods for 'pitch')")
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                   help="generator keyword argument, repeatable")
    p.add_argument("--seed", type=_seed, default=_seed(_env("seed", 0)))
    p.add_argument("--out", help="output file (default stdout); paired families write X and Y columns")

    p = sub.add_parser("bench", help="rejection-rate benchmark preset")
    p.add_argument("preset", choices=bench.PRESETS)
    p.add_argument("--trials", type=int, default=int(_env("trials", bench.DEFAULT_TRIALS)))
    p.add_argument("--full", action="store_true", help="include the largest sample sizes")
    p.add_argument("--jobs", type=int, default=int(_env("jobs", 1)))
    p.add_argument("--out-dir", help="write <preset>.csv and <preset>.json here")
    p.add_argument("--timing", action="store_true", help="add wall time columns (breaks byte reproducibility)")
    p.add_argument("--records", type=_on_off, default=True, help="include per-trial records in JSON")
    _common(p, bandwidth_default=None)
    return parser


def _spec(args, test: str) -> ExperimentSpec:
    X = load_csv(args.x, args.header)
    Y = load_csv(args.y, args.header)
    return ExperimentSpec(
        test=test, X=X, Y=Y, alpha=args.alpha, seed=args.seed, block_length=args.block_size,
        replicates=args.replicates, variant=args.variant, kernel=args.kernel,
        bandwidth=args.bandwidth, factor=args.factor6, gpd=args.gpd, lags=args.lags,
    )


def _emit_result(result: dict, fmt: str, out):
    if fmt == "json":
        out.write(dumps(result))
        return
    flat = {k: (json.dumps(v, sort_keys=False) if isinstance(v, (dict, list)) else v)
            for k, v in result.items()}
    out.write(",".join(flat) + "\n")
    out.write(",".join("" if v is None else _csv_cell(v) for v in flat.values()) + "\n")


def _csv_cell(v) -> str:
    s = repr(v) if isinstance(v, float) else str(v)
    if any(c in s for c in ',"\n'):
        s = '"' + s.replace('"', '""') + '"'
    return s


def _parse_param(items):
    params = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep:
            raise InputError(f"--param expects KEY=VALUE, got {item!r}", "invalid-config")
        try:
            params[key] = int(value)
        except ValueError:
            try:
                params[key] = float(value)
            except ValueError:
                params[key] = value
    return params


def _generate(args, out):
    fn = generators.GENERATORS[args.family]
    params = _parse_param(args.param)
    data = fn(args.n, seed=stream(args.seed, Purpose.DATA), **params)
    if isinstance(data, tuple):
        X, Y = data
        arr = np.hstack([X, Y])
        header = [f"x{i}" for i in range(X.shape[1])] + [f"y{i}" for i in range(Y.shape[1])]
    else:
        arr = np.atleast_2d(data.T).T
        header = [f"x{i}" for i in range(arr.shape[1])]
    if args.out:
        write_csv(args.out, arr, header)
    else:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        for row in arr:
            w.writerow([repr(float(v)) for v in row])


def _bench(args, out):
    settings = bench.Settings(
        alpha=args.alpha, block_length=args.block_size, replicates=args.replicates,
        factor=args.factor6, gpd=args.gpd, lags=args.lags, kernel=args.kernel, bandwidth=args.bandwidth,
    )

    def progress(i, total):
        if i == total or i % 10 == 0:
            print(f"\r{args.preset}: {i}/{total} trials", end="\n" if i == total else "", file=sys.stderr)

    reports = bench.run_benchmark(args.preset, args.trials, args.seed, args.full, settings, args.jobs,
                                  progress=progress)
    csv_text = bench.reports_csv(reports, args.timing)
    json_text = dumps(bench.reports_json(reports, args.seed, args.timing, args.records))
    if args.out_dir:
        d = Path(args.out_dir)
        d.mkdir(parents=True, exist_ok=True)
        (d / f"{args.preset}.csv").write_text(csv_text, encoding="utf-8")
        (d / f"{args.preset}.json").write_text(json_text, encoding="utf-8")
    out.write(csv_text if args.format == "csv" else json_text)


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        if args.command == "mmd-test":
            test = {"wild": "mmd-wild", "paired": "mmd-paired", "permutation": "mmd-permutation"}[args.mode]
            _emit_result(run_test(_spec(args, test)), args.format, out)
        elif args.command == "hsic-test":
            test = {"wild": "hsic-wild", "shift": "hsic-shift"}[args.mode]
            _emit_result(run_test(_spec(args, test)), args.format, out)
        elif args.command == "lag-hsic":
            _emit_result(run_test(_spec(args, "lag-hsic")), args.format, out)
        elif args.command == "generate":
            _generate(args, out)
        else:
            _bench(args, out)
    except InputError as exc:
        print(dumps({"error": exc.code, "message": str(exc)}), end="", file=sys.stderr)
        return 2
    except (ValueError, FloatingPointError) as exc:
        print(dumps({"error": "invalid-input", "message": str(exc)}), end="", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
