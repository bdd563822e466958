"""Command-line entry point: ``aremos {run,sweep-t1,synth,gridtable,verify}``.

Exit codes: 0 success, 2 validation failure, 3 numerical failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import datetime as dt
import logging
import sys
from pathlib import Path

from . import pipeline
from .errors import AremosError, InsufficientHistoryError, ValidationError

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4


def _floats(text):
    return tuple(float(v) for v in text.split(",") if v.strip())


def _ints(text):
    return tuple(int(v) for v in text.split(",") if v.strip())


def _strings(text):
    return tuple(v.strip() for v in text.split(",") if v.strip())


def _bool(text):
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _optional_float(text):
    return None if str(text).strip().lower() in ("", "none") else float(text)


# RunConfig field -> parser for values coming from --config files
_RUN_FIELDS = {
    "ar_training_length": int,
    "emos_training_length": int,
    "max_ar_order": int,
    "psi_count": int,
    "slp_weights": _floats,
    "slp_spreads": _floats,
    "objective": str,
    "slp_weight": _optional_float,
    "slp_spread": _optional_float,
    "exchangeable": _bool,
    "seed": int,
    "stations": _strings,
    "pit_bins": int,
    "ljung_box_lag": int,
    "dm_lags": _ints,
    "n_jobs": int,
    "grid_selection": str,
}


def read_config_file(path) -> dict:
    """Flat ``key = value`` file; keys are RunConfig fields (dashes allowed)."""
    parser = configparser.ConfigParser(interpolation=None)
    text = Path(path).read_text(encoding="utf-8")
    try:
        parser.read_string("[run]\n" + text)
    except configparser.Error as exc:
        raise ValidationError(f"{path}: {exc}") from None
    values = {}
    for key, raw in parser["run"].items():
        name = key.replace("-", "_")
        if name not in _RUN_FIELDS:
            raise ValidationError(f"{path}: unknown key {key!r}")
        try:
            values[name] = _RUN_FIELDS[name](raw)
        except ValueError as exc:
            raise ValidationError(f"{path}: bad value for {key}: {exc}") from None
    return values


def _add_run_flags(p: argparse.ArgumentParser, seed_required: bool) -> None:
    defaults = pipeline.RunConfig()
    p.add_argument("--data", required=True, help="dataset CSV (station_id,date,obs,m1..mK)")
    p.add_argument("--config", help="key = value file; its entries override flags")
    p.add_argument("--seed", type=int, required=seed_required, help="seed for rank-tie randomization")
    p.add_argument("--ar-training-length", type=int, default=defaults.ar_training_length)
    p.add_argument("--emos-training-length", type=int, default=defaults.emos_training_length)
    p.add_argument("--max-ar-order", type=int, default=defaults.max_ar_order)
    p.add_argument("--psi-count", type=int, default=defaults.psi_count)
    p.add_argument("--slp-weights", type=_floats, default=defaults.slp_weights, help="comma list of w1 values")
    p.add_argument("--slp-spreads", type=_floats, default=defaults.slp_spreads, help="comma list of spread values")
    p.add_argument("--objective", choices=["CRPS", "DSS", "crps", "dss"], default=defaults.objective)
    p.add_argument("--slp-weight", type=float, help="fix w1 instead of grid search (needs --slp-spread)")
    p.add_argument("--slp-spread", type=float, help="fix the spread instead of grid search")
    p.add_argument("--full-weights", action="store_true", help="one EMOS weight per member")
    p.add_argument("--stations", type=_strings, help="comma list of station ids to keep")
    p.add_argument("--pit-bins", type=int, default=defaults.pit_bins)
    p.add_argument("--ljung-box-lag", type=int, default=defaults.ljung_box_lag)
    p.add_argument("--dm-lags", type=_ints, default=defaults.dm_lags, help="comma list of h values")
    p.add_argument("--n-jobs", type=int, default=defaults.n_jobs)
    p.add_argument(
        "--grid-selection",
        choices=["in-sample", "held-out"],
        default=defaults.grid_selection,
        help="score the pool grid on all verification days or only the first half",
    )


def _run_config(args) -> pipeline.RunConfig:
    values = {
        "ar_training_length": args.ar_training_length,
        "emos_training_length": args.emos_training_length,
        "max_ar_order": args.max_ar_order,
        "psi_count": args.psi_count,
        "slp_weights": args.slp_weights,
        "slp_spreads": args.slp_spreads,
        "objective": args.objective.upper(),
        "slp_weight": args.slp_weight,
        "slp_spread": args.slp_spread,
        "exchangeable": not args.full_weights,
        "seed": args.seed,
        "stations": args.stations,
        "pit_bins": args.pit_bins,
        "ljung_box_lag": args.ljung_box_lag,
        "dm_lags": args.dm_lags,
        "n_jobs": args.n_jobs,
        "grid_selection": args.grid_selection,
    }
    if args.config:
        values.update(read_config_file(args.config))
    return pipeline.RunConfig(**values)


def _load(path):
    result = pipeline.ingest(path)
    for sid, reason in result.rejected.items():
        print(f"rejected station {sid}: {reason}", file=sys.stderr)
    return result.stations


def cmd_run(args) -> int:
    config = _run_config(args)
    report = pipeline.run_experiment(_load(args.data), config)
    for path in pipeline.emit_report(report, args.out):
        print(path)
    return EXIT_OK


def cmd_gridtable(args) -> int:
    config = _run_config(args)
    if config.slp_weight is not None:
        raise ValidationError("gridtable searches the grid; drop --slp-weight/--slp-spread")
    report = pipeline.run_experiment(_load(args.data), config)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    pipeline.grid_frame(report).to_csv(out, index=False, float_format=pipeline.FLOAT_FORMAT, lineterminator="\n")
    print(f"best w1={report.slp_weight} c={report.slp_spread}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    max_order = args.max_ar_order
    if args.config:
        max_order = read_config_file(args.config).get("max_ar_order", max_order)
    table = pipeline.sweep_training_length(_load(args.data), args.t1, max_order)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    table.to_csv(out, index=False, float_format=pipeline.FLOAT_FORMAT, lineterminator="\n")
    print(table.to_string(index=False))
    return EXIT_OK


def cmd_synth(args) -> int:
    spec_fields = {f.name for f in dataclasses.fields(pipeline.SyntheticSpec)}
    values = {k: v for k, v in vars(args).items() if k in spec_fields and v is not None}
    spec = pipeline.SyntheticSpec(**values)
    stations = pipeline.generate_synthetic(spec, args.seed)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    pipeline.write_dataset(stations, out)
    print(out)
    return EXIT_OK


def cmd_verify(args) -> int:
    frame = pipeline.read_forecasts(args.forecasts)
    scores, summary, hist, tests = pipeline.verify_forecasts(frame, args.pit_bins, args.dm_lags)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    pipeline._write_frame(out / "scores.csv", scores)
    pipeline._write_frame(out / "summary.csv", summary)
    pipeline._write_json(out / "histograms.json", hist)
    pipeline._write_json(out / "tests.json", tests)
    print(summary.to_string(index=False))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aremos", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="full rolling experiment and report")
    _add_run_flags(p, seed_required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("gridtable", help="mean score of every (w1, spread) cell")
    _add_run_flags(p, seed_required=False)
    p.add_argument("--out", required=True, help="output CSV")
    p.set_defaults(func=cmd_gridtable)

    p = sub.add_parser("sweep-t1", help="MAE of the AR-modified mean per AR training length")
    p.add_argument("--data", required=True)
    p.add_argument("--config")
    p.add_argument("--t1", type=_ints, default=(30, 60, 90, 120, 150, 180, 210))
    p.add_argument("--max-ar-order", type=int, default=pipeline.RunConfig().max_ar_order)
    p.add_argument("--out", required=True, help="output CSV")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("synth", help="write a synthetic dataset")
    p.add_argument("--out", required=True, help="output CSV")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--stations", dest="n_stations", type=int)
    p.add_argument("--days", dest="n_days", type=int)
    p.add_argument("--members", dest="n_members", type=int)
    p.add_argument("--start-date", type=dt.date.fromisoformat)
    p.add_argument("--error-ar", type=_floats)
    p.add_argument("--error-sd", type=float)
    p.add_argument("--bias", type=float)
    p.add_argument("--member-noise-sd", type=float)
    p.add_argument("--dispersion", type=float)
    p.add_argument("--predictability-sd", type=float)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("verify", help="score precomputed Gaussian forecasts")
    p.add_argument("--forecasts", required=True, help="CSV: station_id,date,method,obs,mean,variance")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--pit-bins", type=int, default=pipeline.PIT_BINS)
    p.add_argument("--dm-lags", type=_ints, default=(1,))
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValidationError, InsufficientHistoryError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (AremosError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
