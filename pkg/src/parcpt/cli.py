"""Command-line surface: detect on CSV data, run simulations, run benchmarks.

Exit codes: 0 success, 2 input error (unreadable or malformed data), 3
configuration error, 1 internal error. ``simulate`` and ``bench`` write
their seeded results as CSV/JSON files whose bytes depend only on the seed
and configuration; ``bench`` additionally writes a timing table, which is a
measurement and varies run to run.

Output files
------------
simulate:  simulate_reps.csv, simulate_summary.json
bench:     bench_metrics.csv, bench_summary.json, bench_timing.csv

CSV data format for ``detect``: one observation per row, d numeric columns,
no header unless ``--header`` is passed. A candidates file (``--candidates``)
holds whitespace- or comma-separated integer indices.

Config files (``--config``) are flat ``key = value`` lines with ``#``
comments; keys match the long flag names (scenario, n, delta, reps, seed,
methods, workers, overlap, epsilon, noise_sd, out). Explicit flags win.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from .core import (
    METHODS,
    DetectorConfig,
    InvalidConfigError,
    InvalidInputError,
    PenaltyRule,
    TimeSeries,
)
from .dp import optimal_partition
from .parallel import detect
from .simbench import SCENARIO_CHANGES, bench, simulate

__all__ = ["RunConfig", "main"]

_METRIC_COLUMNS = [
    "scenario", "n", "delta_mu", "noise_sd", "method", "workers", "seed", "rep",
    "false_alarms", "missed", "avg_location_error", "max_location_error",
    "relative_cost", "num_changepoints", "error",
]
_TIMING_COLUMNS = [
    "scenario", "n", "delta_mu", "noise_sd", "method", "workers", "seed", "rep",
    "median_wall_time_s", "baseline_wall_time_s", "speedup_vs_pelt", "error",
]

_CONFIG_KEYS = {
    "scenario", "n", "delta", "reps", "seed", "methods", "workers",
    "overlap", "epsilon", "noise_sd", "out",
}


@dataclass(frozen=True)
class RunConfig:
    """Resolved simulate/bench run: sweeps, seed and output location."""

    scenario: str
    n_values: tuple[int, ...]
    delta_values: tuple[float, ...]
    methods: tuple[str, ...]
    worker_counts: tuple[int, ...]
    reps: int
    seed: int
    epsilon: float
    noise_sd: float
    overlap: int | None
    out_dir: Path

    def __post_init__(self):
        if self.scenario not in SCENARIO_CHANGES:
            raise InvalidConfigError(
                f"unknown scenario {self.scenario!r}, expected one of "
                f"{sorted(SCENARIO_CHANGES)}"
            )
        for name, values in (
            ("n", self.n_values),
            ("delta", self.delta_values),
            ("methods", self.methods),
            ("workers", self.worker_counts),
        ):
            if not values:
                raise InvalidConfigError(f"sweep list {name!r} must be non-empty")
        for method in self.methods:
            if method not in METHODS:
                raise InvalidConfigError(f"unknown method {method!r}")
        if not 0 <= self.seed < 2**64:
            raise InvalidConfigError("seed must be a 64-bit unsigned integer")
        if self.reps < 1:
            raise InvalidConfigError("reps must be >= 1")


def _read_series_csv(path: str, skip_header: bool) -> TimeSeries:
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc}") from exc
    rows = []
    with fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if skip_header and lineno == 1:
                continue
            if not row:
                continue
            parsed = []
            for colno, cell in enumerate(row, start=1):
                try:
                    parsed.append(float(cell))
                except ValueError:
                    raise InvalidInputError(
                        f"{path}: non-numeric value {cell!r} at row {lineno}, column {colno}"
                    ) from None
            rows.append(parsed)
    if not rows:
        raise InvalidInputError(f"{path}: no data rows")
    width = len(rows[0])
    for i, row in enumerate(rows):
        if len(row) != width:
            raise InvalidInputError(
                f"{path}: row {i + 1} has {len(row)} columns, expected {width}"
            )
    return TimeSeries(rows)


def _read_candidates(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc}") from exc
    tokens = text.replace(",", " ").split()
    try:
        return [int(t) for t in tokens]
    except ValueError as exc:
        raise InvalidInputError(f"{path}: candidate indices must be integers") from exc


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: Path, columns, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row.get(col)) for col in columns])


def _write_json(path: Path, payload) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _parse_int_list(text: str, flag: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in str(text).split(",") if t.strip())
    except ValueError:
        raise InvalidConfigError(f"{flag} expects comma-separated integers, got {text!r}") from None


def _parse_float_list(text: str, flag: str) -> tuple[float, ...]:
    try:
        return tuple(float(t) for t in str(text).split(",") if t.strip())
    except ValueError:
        raise InvalidConfigError(f"{flag} expects comma-separated numbers, got {text!r}") from None


def _load_config_file(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidInputError(f"cannot read config {path}: {exc}") from exc
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _CONFIG_KEYS:
            raise InvalidConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = value
    return values


def _resolve(args, key: str, file_values: dict, default):
    cli_value = getattr(args, key, None)
    if cli_value is not None:
        return cli_value
    config_key = {"delta_values": "delta", "n_values": "n", "out": "out"}.get(key, key)
    if config_key in file_values and file_values[config_key] != "":
        return file_values[config_key]
    return default


def _build_run_config(args, workers_is_list: bool) -> RunConfig:
    file_values = _load_config_file(args.config) if args.config else {}

    scenario = str(_resolve(args, "scenario", file_values, None) or "")
    n_raw = _resolve(args, "n_values", file_values, None)
    delta_raw = _resolve(args, "delta_values", file_values, None)
    if not scenario or n_raw is None or delta_raw is None:
        raise InvalidConfigError("scenario, n and delta are required (flags or config file)")
    methods_raw = _resolve(args, "methods", file_values, "pelt,chunk,deal")
    workers_raw = _resolve(args, "workers", file_values, "1,2,4" if workers_is_list else "4")
    seed = int(_resolve(args, "seed", file_values, 0))
    reps = int(_resolve(args, "reps", file_values, 200 if not workers_is_list else 3))
    epsilon = float(_resolve(args, "epsilon", file_values, 0.05))
    noise_sd = float(_resolve(args, "noise_sd", file_values, 1.0))
    overlap_raw = _resolve(args, "overlap", file_values, None)
    out_dir = Path(_resolve(args, "out", file_values, "parcpt_out"))

    worker_counts = _parse_int_list(workers_raw, "--workers")
    if not workers_is_list and len(worker_counts) != 1:
        raise InvalidConfigError("simulate takes a single --workers value")
    return RunConfig(
        scenario=scenario,
        n_values=_parse_int_list(n_raw, "--n"),
        delta_values=_parse_float_list(delta_raw, "--delta"),
        methods=tuple(str(methods_raw).split(",")),
        worker_counts=worker_counts,
        reps=reps,
        seed=seed,
        epsilon=epsilon,
        noise_sd=noise_sd,
        overlap=None if overlap_raw in (None, "") else int(overlap_raw),
        out_dir=out_dir,
    )


def _ensure_out_dir(out_dir: Path) -> None:
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        probe = out_dir / ".write_probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise InvalidInputError(f"output directory {out_dir} is not writable: {exc}") from exc


def cmd_detect(args) -> int:
    y = _read_series_csv(args.input, args.header)
    candidates = _read_candidates(args.candidates) if args.candidates else None
    if candidates is not None and args.method != "pelt":
        raise InvalidConfigError("--candidates restricts the serial engine; use --method pelt")
    if candidates is not None and args.normalize_variance:
        raise InvalidConfigError("--candidates does not combine with --normalize-variance")
    config = DetectorConfig(
        method=args.method,
        workers=args.workers,
        overlap=args.overlap,
        penalty=PenaltyRule(epsilon=args.epsilon, dimension=y.d),
        min_segment_length=args.min_segment_length,
        normalize_variance=args.normalize_variance,
    )
    beta = config.resolved_beta(y)

    started = time.perf_counter()
    if candidates is None:
        seg = detect(y, config)
    else:
        seg = optimal_partition(
            y, candidates, beta, min_segment_length=args.min_segment_length
        )
    wall = time.perf_counter() - started

    payload = {
        "n": y.n,
        "d": y.d,
        "method": args.method,
        "beta": beta,
        "changepoints": list(seg.changepoints),
        "penalized_cost": seg.penalised_cost,
        "wall_time_s": wall,
    }
    print(json.dumps(payload))
    return 0


def cmd_simulate(args) -> int:
    run = _build_run_config(args, workers_is_list=False)
    _ensure_out_dir(run.out_dir)
    all_rows = []
    summaries = []
    for n in run.n_values:
        for delta in run.delta_values:
            result = simulate(
                scenario=run.scenario,
                n=n,
                delta_mu=delta,
                reps=run.reps,
                seed=run.seed,
                methods=run.methods,
                workers=run.worker_counts[0],
                overlap=run.overlap,
                epsilon=run.epsilon,
                noise_sd=run.noise_sd,
            )
            all_rows.extend(result.rows)
            summaries.append(result.summary)
    _write_csv(run.out_dir / "simulate_reps.csv", _METRIC_COLUMNS, all_rows)
    _write_json(run.out_dir / "simulate_summary.json", {"runs": summaries})
    print(f"wrote {run.out_dir / 'simulate_reps.csv'} and simulate_summary.json")
    return 0


def cmd_bench(args) -> int:
    run = _build_run_config(args, workers_is_list=True)
    _ensure_out_dir(run.out_dir)
    metric_rows = []
    timing_rows = []
    summaries = []
    for n in run.n_values:
        for delta in run.delta_values:
            result = bench(
                scenario=run.scenario,
                n=n,
                delta_mu=delta,
                workers_list=run.worker_counts,
                reps=run.reps,
                seed=run.seed,
                methods=run.methods,
                overlap=run.overlap,
                epsilon=run.epsilon,
                noise_sd=run.noise_sd,
                inner_reps=args.inner_reps,
            )
            metric_rows.extend(result.metric_rows)
            timing_rows.extend(result.timing_rows)
            summaries.append(result.summary)
    _write_csv(run.out_dir / "bench_metrics.csv", _METRIC_COLUMNS, metric_rows)
    _write_csv(run.out_dir / "bench_timing.csv", _TIMING_COLUMNS, timing_rows)
    _write_json(run.out_dir / "bench_summary.json", {"runs": summaries})
    print(f"wrote bench_metrics.csv, bench_timing.csv and bench_summary.json in {run.out_dir}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="parcpt",
        description="Penalised-cost changepoint detection with parallel schedulers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_detect = sub.add_parser("detect", help="detect changepoints in a CSV series")
    p_detect.add_argument("--input", required=True, help="CSV file, one observation per row")
    p_detect.add_argument("--method", default="pelt", help="pelt, chunk or deal")
    p_detect.add_argument("--workers", type=int, default=None)
    p_detect.add_argument("--overlap", type=int, default=None)
    p_detect.add_argument("--epsilon", type=float, default=0.05)
    p_detect.add_argument("--min-segment-length", type=int, default=1)
    p_detect.add_argument("--normalize-variance", action="store_true")
    p_detect.add_argument("--header", action="store_true", help="skip the first CSV row")
    p_detect.add_argument(
        "--candidates", default=None,
        help="file of admissible changepoint indices; restricts the search",
    )
    p_detect.set_defaults(handler=cmd_detect)

    def add_run_flags(p, workers_help):
        p.add_argument("--scenario", default=None, help="A, B, C, D or E")
        p.add_argument("--n", dest="n_values", default=None, help="series length(s), comma-separated")
        p.add_argument("--delta", dest="delta_values", default=None, help="mean shift(s), comma-separated")
        p.add_argument("--reps", type=int, default=None,
                       help="replicates (default 200 for simulate, 3 for bench)")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--methods", default=None, help="comma-separated subset of pelt,chunk,deal")
        p.add_argument("--workers", default=None, help=workers_help)
        p.add_argument("--overlap", type=int, default=None)
        p.add_argument("--epsilon", type=float, default=None)
        p.add_argument("--noise-sd", dest="noise_sd", type=float, default=None)
        p.add_argument("--out", dest="out", default=None, help="output directory")
        p.add_argument("--config", default=None, help="key = value config file")

    p_sim = sub.add_parser("simulate", help="seeded accuracy study, CSV/JSON out")
    add_run_flags(p_sim, "worker count for chunk/deal (single value)")
    p_sim.set_defaults(handler=cmd_simulate)

    p_bench = sub.add_parser("bench", help="seeded timing study, CSV/JSON out")
    add_run_flags(p_bench, "worker counts to sweep, comma-separated")
    p_bench.add_argument("--inner-reps", type=int, default=3,
                         help="timing repeats per measurement (median taken)")
    p_bench.set_defaults(handler=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except InvalidInputError as exc:
        print(f"parcpt: input error: {exc}", file=sys.stderr)
        return 2
    except InvalidConfigError as exc:
        print(f"parcpt: config error: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # pragma: no cover - defensive
        print(f"parcpt: internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
