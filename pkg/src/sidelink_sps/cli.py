"""Command-line front end: experiment dispatch and CSV emission.

Exit codes: 0 on success, 2 for configuration errors, 3 when a scenario
exceeds grid capacity.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from dataclasses import replace
from pathlib import Path

from .analytic import AnalyticParams, p_col_sps, p_col_spsla, sci_extra_bits
from .config import (
    CapacityError,
    ConfigurationError,
    SCHEDULER_SPS,
    SCHEDULER_SPSLA,
    ScenarioConfig,
    ues_for_cbr,
)
from .experiment import SweepResult, sweep

ROW_HEADER = ["scheduler", "cbr", "num_ues", "prob_keep", "churn", "rc_la",
              "seed", "t_seconds", "collision_prob", "ci95"]

LIGHT_CBR_PCTS = [1.0, 2.0, 3.0, 4.0, 5.0]
HEAVY_CBR_PCTS = [10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0, 90.0]
PROB_KEEP_POINTS = [0.2, 0.4, 0.6, 0.8]
CHURN_POINTS = [0.01, 0.05, 0.1, 0.2]


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path: Path, header: list[str], rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _summary_rows(result: SweepResult):
    duration = result.base.duration_s
    for point in result.points:
        yield [point.scheduler, point.cbr_pct, point.num_ues, point.prob_keep,
               point.churn, point.rc_la, "agg", duration, point.mean, point.ci95]


def _series_rows(result: SweepResult):
    warmup = result.base.warmup_s
    for point in result.points:
        for seed, series in zip(point.seeds, point.series_by_run):
            for i, value in enumerate(series):
                yield [point.scheduler, point.cbr_pct, point.num_ues, point.prob_keep,
                       point.churn, point.rc_la, seed, warmup + i + 1, value, ""]
        for i, value in enumerate(point.mean_series):
            yield [point.scheduler, point.cbr_pct, point.num_ues, point.prob_keep,
                   point.churn, point.rc_la, "agg", warmup + i + 1, value, ""]


def _parse_points(text: str) -> list[float]:
    try:
        return [float(p) for p in text.split(",") if p.strip() != ""]
    except ValueError:
        raise ConfigurationError(f"bad points list {text!r}") from None


def _parse_grid(text: str) -> list[float]:
    """a:b:step inclusive grid."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigurationError(f"bad grid {text!r}, expected start:stop:step")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise ConfigurationError(f"bad grid {text!r}") from None
    if step <= 0 or stop < start:
        raise ConfigurationError(f"bad grid {text!r}")
    out = []
    x = start
    while x <= stop + 1e-9:
        out.append(round(x, 10))
        x += step
    return out


_CONFIG_KEYS = {
    "scheduler": str, "cbr": float, "ues": int, "duration": int, "seed": int,
    "runs": int, "prob_keep": float, "churn": float, "rc_la": int,
    "subchannels": int, "rri": int, "out": str, "jobs": int, "warmup": int,
    "axis": str, "points": str, "cbr_grid": str, "max_subchannels": int,
    "figures": str,
}


def load_config_file(path: str) -> dict:
    """Plain `key = value` file; keys mirror the CLI flags."""
    values: dict = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigurationError(f"{path}:{lineno}: expected key = value")
            key, _, val = line.partition("=")
            key = key.strip().replace("-", "_")
            if key not in _CONFIG_KEYS:
                raise ConfigurationError(f"{path}:{lineno}: unknown key {key!r}")
            caster = _CONFIG_KEYS[key]
            try:
                values[key] = caster(val.strip())
            except ValueError:
                raise ConfigurationError(f"{path}:{lineno}: bad value for {key!r}") from None
    return values


def _default_seed() -> int:
    env = os.environ.get("SPS_SIM_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigurationError(f"SPS_SIM_SEED={env!r} is not an integer") from None
    return 1


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key = value file; flags override it")
    parser.add_argument("--scheduler", choices=[SCHEDULER_SPS, SCHEDULER_SPSLA, "both"])
    parser.add_argument("--cbr", type=float, help="target channel busy ratio, percent")
    parser.add_argument("--ues", type=int, help="population size (conflicts with --cbr)")
    parser.add_argument("--duration", type=int, help="seconds per run")
    parser.add_argument("--seed", type=int, help="base seed (fallback: SPS_SIM_SEED)")
    parser.add_argument("--runs", type=int, help="seeds per configuration point")
    parser.add_argument("--prob-keep", type=float, help="probResourceKeep in [0, 1]")
    parser.add_argument("--churn", type=float, help="population fraction replaced per second")
    parser.add_argument("--rc-la", type=int, help="counter value at which the lookahead is planned")
    parser.add_argument("--subchannels", type=int, help="subchannels per subframe")
    parser.add_argument("--rri", type=int, help="resource reservation interval, ms")
    parser.add_argument("--warmup", type=int, help="seconds excluded from metrics")
    parser.add_argument("--out", help="output directory (default: current)")
    parser.add_argument("--jobs", type=int, help="worker processes for runs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sidelink-sps",
        description="Mode 4 sidelink scheduling simulator (sensing-based SPS, "
                    "with or without reselection lookaheads)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="simulate one configuration point")
    _add_common(run_p)

    sweep_p = sub.add_parser("sweep", help="sweep one axis over a list of points")
    _add_common(sweep_p)
    sweep_p.add_argument("--axis", choices=["cbr", "prob-keep", "churn"], required=True)
    sweep_p.add_argument("--points", required=True,
                         help="comma list; cbr in percent, others as fractions")

    ana_p = sub.add_parser("analytic", help="closed-form curves and bit costs")
    _add_common(ana_p)
    ana_p.add_argument("--cbr-grid", default="0.05:0.95:0.05",
                       help="start:stop:step over the busy-ratio fraction")
    ana_p.add_argument("--max-subchannels", type=int, default=100,
                       help="bits table covers 1..N subchannels")

    tab_p = sub.add_parser("tables", help="light+heavy load summaries, both schedulers")
    _add_common(tab_p)

    fig_p = sub.add_parser("figdata", help="emit fig5.csv .. fig11.csv datasets")
    _add_common(fig_p)
    fig_p.add_argument("--figures", default="5,6,7,8,9,10,11",
                       help="comma list of figure ids to emit")

    return parser


def _merge_options(args: argparse.Namespace) -> argparse.Namespace:
    if getattr(args, "config", None):
        file_values = load_config_file(args.config)
        for key, val in file_values.items():
            if getattr(args, key, None) is None:
                setattr(args, key, val)
    return args


def _base_config(args, scheduler: str, need_population: bool = True) -> ScenarioConfig:
    if args.cbr is not None and args.ues is not None:
        raise ConfigurationError("--cbr and --ues are mutually exclusive")
    n_subchannels = args.subchannels if args.subchannels is not None else 25
    rri = args.rri if args.rri is not None else 100
    if args.ues is not None:
        num_ues = args.ues
    elif args.cbr is not None:
        num_ues = ues_for_cbr(args.cbr / 100.0, n_subchannels, rri)
    elif need_population:
        raise ConfigurationError("one of --cbr or --ues is required")
    else:
        num_ues = n_subchannels  # placeholder population for sweeps over cbr
    return ScenarioConfig(
        scheduler=scheduler,
        num_ues=num_ues,
        n_subchannels=n_subchannels,
        rri=rri,
        rc_la=args.rc_la if args.rc_la is not None else 1,
        prob_resource_keep=args.prob_keep if args.prob_keep is not None else 0.0,
        churn_rate=args.churn if args.churn is not None else 0.0,
        duration_s=args.duration if args.duration is not None else 100,
        seed=args.seed if args.seed is not None else _default_seed(),
        runs=args.runs if args.runs is not None else 10,
        warmup_s=args.warmup if args.warmup is not None else 0,
    )


def _schedulers(args, default=("sps",)) -> tuple[str, ...]:
    sched = getattr(args, "scheduler", None)
    if sched is None:
        return tuple(default)
    if sched == "both":
        return (SCHEDULER_SPS, SCHEDULER_SPSLA)
    return (sched,)


def _out_dir(args) -> Path:
    return Path(args.out) if args.out else Path(".")


def cmd_run(args) -> int:
    schedulers = _schedulers(args)
    base = _base_config(args, schedulers[0])
    result = sweep("cbr", [base.cbr_target], base, schedulers=schedulers, jobs=args.jobs)
    out = _out_dir(args)
    write_csv(out / "summary.csv", ROW_HEADER, _summary_rows(result))
    write_csv(out / "series.csv", ROW_HEADER, _series_rows(result))
    for point in result.points:
        print(f"{point.scheduler} cbr={point.cbr_pct:g}% ues={point.num_ues}: "
              f"mean={point.mean:.6g} ci95={point.ci95:.3g}")
    return 0


def cmd_sweep(args) -> int:
    axis = args.axis.replace("-", "_")
    points = _parse_points(args.points)
    if axis == "cbr":
        points = [p / 100.0 for p in points]
    schedulers = _schedulers(args)
    base = _base_config(args, schedulers[0], need_population=(axis != "cbr"))
    result = sweep(axis, points, base, schedulers=schedulers, jobs=args.jobs)
    out = _out_dir(args)
    write_csv(out / "summary.csv", ROW_HEADER, _summary_rows(result))
    write_csv(out / "series.csv", ROW_HEADER, _series_rows(result))
    print(f"swept {axis} over {len(points)} points x {len(schedulers)} scheduler(s)")
    return 0


def _analytic_rows(grid: list[float]):
    for cbr in grid:
        params = AnalyticParams(cbr=cbr)
        yield [cbr, p_col_sps(params), p_col_spsla(params)]


def _bits_rows(n_max: int):
    for n in range(1, n_max + 1):
        yield [n, sci_extra_bits(n), sci_extra_bits(n, include_offset=True)]


def cmd_analytic(args) -> int:
    out = _out_dir(args)
    grid = _parse_grid(args.cbr_grid)
    write_csv(out / "analytic.csv", ["cbr", "p_col_sps", "p_col_spsla"], _analytic_rows(grid))
    write_csv(out / "bits.csv", ["n_subch", "bits_no_offset", "bits_with_offset"],
              _bits_rows(args.max_subchannels))
    print(f"analytic.csv ({len(grid)} points) and bits.csv written to {out}")
    return 0


def cmd_tables(args) -> int:
    base = _base_config(args, SCHEDULER_SPS, need_population=False)
    points = [p / 100.0 for p in LIGHT_CBR_PCTS + HEAVY_CBR_PCTS]
    result = sweep("cbr", points, base,
                   schedulers=(SCHEDULER_SPS, SCHEDULER_SPSLA), jobs=args.jobs)
    out = _out_dir(args)
    write_csv(out / "summary.csv", ROW_HEADER, _summary_rows(result))
    write_csv(out / "series.csv", ROW_HEADER, _series_rows(result))
    for point in result.points:
        print(f"{point.scheduler:6s} cbr={point.cbr_pct:5.1f}%: mean={point.mean:.4g} "
              f"ci95={point.ci95:.3g}")
    return 0


def cmd_figdata(args) -> int:
    wanted = {int(f) for f in args.figures.split(",") if f.strip()}
    unknown = wanted - {5, 6, 7, 8, 9, 10, 11}
    if unknown:
        raise ConfigurationError(f"unknown figure ids {sorted(unknown)}")
    out = _out_dir(args)
    base = _base_config(args, SCHEDULER_SPS, need_population=False)
    both = (SCHEDULER_SPS, SCHEDULER_SPSLA)

    if 5 in wanted:
        write_csv(out / "fig5.csv", ["n_subch", "bits_no_offset", "bits_with_offset"],
                  _bits_rows(100))
    if 6 in wanted:
        write_csv(out / "fig6.csv", ["cbr", "p_col_sps", "p_col_spsla"],
                  _analytic_rows(_parse_grid("0.05:0.95:0.05")))
    if 7 in wanted:
        res = sweep("cbr", [p / 100.0 for p in LIGHT_CBR_PCTS], base, schedulers=both,
                    jobs=args.jobs)
        write_csv(out / "fig7.csv", ROW_HEADER, _series_rows(res))
    if 8 in wanted:
        res = sweep("cbr", [p / 100.0 for p in HEAVY_CBR_PCTS], base, schedulers=both,
                    jobs=args.jobs)
        write_csv(out / "fig8.csv", ROW_HEADER, _series_rows(res))
    if 9 in wanted or 10 in wanted:
        keeps = PROB_KEEP_POINTS
        for fig, pcts in ((9, LIGHT_CBR_PCTS), (10, HEAVY_CBR_PCTS)):
            if fig not in wanted:
                continue
            rows = []
            for keep in keeps:
                keep_base = replace(base, prob_resource_keep=keep)
                res = sweep("cbr", [p / 100.0 for p in pcts], keep_base, schedulers=both,
                            jobs=args.jobs)
                rows.extend(_summary_rows(res))
            write_csv(out / f"fig{fig}.csv", ROW_HEADER, rows)
    if 11 in wanted:
        churn_base = replace(base, num_ues=ues_for_cbr(0.5, base.n_subchannels, base.rri))
        res = sweep("churn", CHURN_POINTS, churn_base, schedulers=both, jobs=args.jobs)
        write_csv(out / "fig11.csv", ROW_HEADER, _summary_rows(res))
    print(f"figure datasets written to {out}")
    return 0


_COMMANDS = {
    "run": cmd_run,
    "sweep": cmd_sweep,
    "analytic": cmd_analytic,
    "tables": cmd_tables,
    "figdata": cmd_figdata,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = _merge_options(args)
        return _COMMANDS[args.command](args)
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
