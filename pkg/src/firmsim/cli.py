"""Command-line harness: scenario runs, replicate batches, parameter sweeps,
sensitivity scans, and bit-stable long-format export.

Exit codes: 0 ok, 1 invalid configuration (violations listed on stderr),
2 runtime error (I/O and friends; argparse uses 2 for usage errors too).
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import metrics
from .core import (SCENARIOS, SimConfig, TIME_INIT_METHODS, TYPE_NAMES,
                   scenario_config, validate_config)
from .engine import AggregateResult, RunResult, run_replicates

EXPORT_COLUMNS = (
    ["t", "scenario", "replicate", "sigma", "mu", "lambda", "s_max", "ego",
     "profitability"]
    + [f"profitability_{g}" for g in TYPE_NAMES]
    + ["satisfaction_mean"] + [f"satisfaction_{g}" for g in TYPE_NAMES]
    + ["homophily_mean"] + [f"homophily_{g}" for g in TYPE_NAMES]
    + ["verbal_warnings", "written_warnings", "cumulated_profitability",
       "relative_profitability"]
)
INT_COLUMNS = {"t", "verbal_warnings", "written_warnings"}

SWEEPABLE = ("sigma0", "mu0", "lambda0", "time_init_method", "scenario",
             "suf_sui", "h", "kappa", "eta", "s_eff")
SENSITIVITY_PARAMS = ("sigma0", "mu0", "lambda0", "time_init_method")
STRATEGY_SCAN = (0.0, 0.25, 0.5, 0.75, 1.0)


class ConfigError(Exception):
    """Invalid configuration or unusable parameter; exits with code 1."""


def _fmt(value, column: str) -> str:
    if value is None:
        return ""
    v = float(value)
    if math.isnan(v):
        return ""
    if column in INT_COLUMNS:
        return str(int(round(v)))
    return format(v, ".17g")


def _rows(columns: dict[str, np.ndarray], scenario: str, replicate_label: str,
          relative: np.ndarray | None):
    steps = len(columns["t"]) - 1
    for t in range(1, steps + 1):
        row = []
        for name in EXPORT_COLUMNS:
            if name == "scenario":
                row.append(scenario)
            elif name == "replicate":
                row.append(replicate_label)
            elif name == "relative_profitability":
                row.append(_fmt(relative[t] if relative is not None else None, name))
            else:
                row.append(_fmt(columns[name][t], name))
        yield row


def export_records(columns: dict[str, np.ndarray], scenario: str,
                   replicate_label: str, path: Path, fmt: str,
                   relative: np.ndarray | None = None, append: bool = False) -> None:
    """Write one run's (or aggregate's) long-format rows for t >= 1.

    Floats carry 17 significant digits (exact round-trip); missing values
    are empty CSV fields / JSON nulls; LF line endings; stable column order.
    """
    mode = "a" if append else "w"
    with open(path, mode, encoding="utf-8", newline="\n") as fh:
        if fmt == "csv":
            if not append:
                fh.write(",".join(EXPORT_COLUMNS) + "\n")
            for row in _rows(columns, scenario, replicate_label, relative):
                fh.write(",".join(row) + "\n")
        elif fmt == "json":
            for row in _rows(columns, scenario, replicate_label, relative):
                parts = []
                for name, cell in zip(EXPORT_COLUMNS, row):
                    if name in ("scenario", "replicate"):
                        parts.append(f'"{name}": {json.dumps(cell)}')
                    else:
                        parts.append(f'"{name}": {cell if cell != "" else "null"}')
                fh.write("{" + ", ".join(parts) + "}\n")
        else:
            raise ConfigError(f"unknown format {fmt!r}")


def export_agents(run: RunResult, scenario: str, path: Path, fmt: str) -> None:
    """Per-agent daily traces (opt-in; potentially large)."""
    cols = run.agent_columns
    if cols is None:
        raise ConfigError("per-agent export requires a run recorded with --per-agent")
    vtypes = run.final_state.vtypes
    n = len(vtypes)
    header = ["t", "scenario", "replicate", "agent", "vtype", "s", "c", "p",
              "satisfaction", "output", "reward"]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if fmt == "csv":
            fh.write(",".join(header) + "\n")
        for t in range(1, run.steps + 1):
            for a in range(n):
                cells = [str(t), scenario, str(run.replicate), str(a),
                         TYPE_NAMES[int(vtypes[a])]]
                cells += [format(float(cols[k][t, a]), ".17g")
                          for k in ("s", "c", "p", "satisfaction", "output", "reward")]
                if fmt == "csv":
                    fh.write(",".join(cells) + "\n")
                else:
                    obj = dict(zip(header, cells))
                    fh.write(json.dumps(obj) + "\n")


def parse_config_file(path: Path) -> dict[str, str]:
    """Flat key = value text format; '#' starts a comment."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


_TUPLE_FIELDS = {"type_dist": 4, "init_strategy": 3, "cap_dist": 2}
_INT_FIELDS = {"n", "suf", "lookback_x", "steps", "replicates", "master_seed"}
_FLOAT_FIELDS = {"kappa", "wage_hourly", "h", "tau", "s_eff", "eta", "sui"}
_BOOL_FIELDS = {"endogenous_management", "rho_mu_scaling"}
_STR_FIELDS = {"time_init_method", "norm_behavior_lag", "obs_mean_divisor",
               "sigma_guard", "monitoring_rounding", "scenario"}


def _coerce(key: str, value: str):
    if key in _INT_FIELDS:
        return int(value)
    if key in _FLOAT_FIELDS:
        return float(value)
    if key in _BOOL_FIELDS:
        low = value.lower()
        if low in ("true", "1", "yes", "on"):
            return True
        if low in ("false", "0", "no", "off"):
            return False
        raise ConfigError(f"cannot parse boolean {key} = {value!r}")
    if key in _TUPLE_FIELDS:
        parts = tuple(float(p) for p in value.split(","))
        if len(parts) != _TUPLE_FIELDS[key]:
            raise ConfigError(f"{key} needs {_TUPLE_FIELDS[key]} comma-separated values")
        return parts
    if key in _STR_FIELDS:
        return value
    raise ConfigError(f"unknown config key {key!r}")


def build_config(args, scenario: str | None = None) -> SimConfig:
    """Resolve the effective config: scenario defaults < file < CLI flags."""
    file_vals: dict[str, str] = {}
    if args.config:
        file_vals = parse_config_file(Path(args.config))
    name = scenario or getattr(args, "scenario", None) or file_vals.get("scenario", "Base")
    if name not in SCENARIOS:
        raise ConfigError(f"unknown scenario {name!r}; choices: {sorted(SCENARIOS)}")
    cfg = scenario_config(name)
    for key, raw in file_vals.items():
        if key == "scenario":
            continue
        cfg = replace(cfg, **{key: _coerce(key, raw)})
    overrides = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.replicates is not None:
        overrides["replicates"] = args.replicates
    if args.steps is not None:
        overrides["steps"] = args.steps
    for spec in getattr(args, "set", None) or []:
        if "=" not in spec:
            raise ConfigError(f"--set expects key=value, got {spec!r}")
        key, _, raw = spec.partition("=")
        overrides[key.strip()] = _coerce(key.strip(), raw.strip())
    if overrides:
        cfg = replace(cfg, **overrides)
    problems = validate_config(cfg)
    if problems:
        raise ConfigError("invalid config: " + "; ".join(problems))
    return cfg


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _run_batch(cfg: SimConfig, args, record_agents: bool = False) -> AggregateResult:
    return run_replicates(cfg, threads=args.threads) if not record_agents else _run_batch_agents(cfg, args)


def _run_batch_agents(cfg: SimConfig, args) -> AggregateResult:
    from .engine import run_scenario
    from .core import seed_replicate

    runs = [run_scenario(cfg, seed_replicate(cfg.master_seed, k), replicate=k,
                         record_agents=True) for k in range(cfg.replicates)]
    return AggregateResult(config=cfg, runs=runs, mean=metrics.aggregate_replicates(runs))


def cmd_run(args) -> int:
    cfg = build_config(args)
    out = _out_dir(args)
    agg = _run_batch(cfg, args, record_agents=args.per_agent)
    relative = None
    if cfg.scenario == "Base":
        cum = agg.mean["cumulated_profitability"]
        relative = metrics.relative_cumulated_profitability(cum, cum)
    ext = args.format
    mean_path = out / f"{cfg.scenario}_mean.{ext}"
    export_records(agg.mean, cfg.scenario, "mean", mean_path, ext, relative)
    rep_path = out / f"{cfg.scenario}_replicates.{ext}"
    for k, run in enumerate(agg.runs):
        rel = None
        if cfg.scenario == "Base":
            cum = run.columns["cumulated_profitability"]
            rel = metrics.relative_cumulated_profitability(cum, cum)
        export_records(run.columns, cfg.scenario, str(run.replicate), rep_path,
                       ext, rel, append=k > 0)
    if args.per_agent:
        for run in agg.runs:
            suffix = f"_rep{run.replicate}" if cfg.replicates > 1 else ""
            export_agents(run, cfg.scenario, out / f"{cfg.scenario}_agents{suffix}.{ext}", ext)
    if cfg.steps >= 2:
        export_correlations(agg, out / f"{cfg.scenario}_correlations.csv")
    print(f"wrote {mean_path} and {rep_path}")
    return 0


def export_correlations(agg: AggregateResult, path: Path) -> None:
    """Across-replicate correlation distribution plus the mean-series row."""
    rows = metrics.replicate_correlations(agg.runs)
    rows += [dict(row, replicate="mean")
             for row in metrics.replicate_correlations([agg.mean])]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("replicate,group,SP,HP,SH\n")
        for row in rows:
            cells = [str(row["replicate"]), row["group"]]
            cells += [_fmt(row[k], k) for k in ("SP", "HP", "SH")]
            fh.write(",".join(cells) + "\n")


def cmd_scenarios(args) -> int:
    out = _out_dir(args)
    ext = args.format
    aggregates: dict[str, AggregateResult] = {}
    for name in SCENARIOS:
        cfg = build_config(args, scenario=name)
        aggregates[name] = _run_batch(cfg, args)
    base_cum = aggregates["Base"].mean["cumulated_profitability"]
    written = []
    for name, agg in aggregates.items():
        relative = metrics.relative_cumulated_profitability(
            agg.mean["cumulated_profitability"], base_cum)
        path = out / f"{name}_mean.{ext}"
        export_records(agg.mean, name, "mean", path, ext, relative)
        written.append(path)
    print("wrote " + ", ".join(str(p) for p in written))
    return 0


def _grid_from_params(param_specs: list[str]) -> list[tuple[str, list[str]]]:
    grid: list[tuple[str, list[str]]] = []
    for spec in param_specs:
        if "=" not in spec:
            raise ConfigError(f"--param expects name=v1,v2,..., got {spec!r}")
        name, _, raw = spec.partition("=")
        name = name.strip()
        if name not in SWEEPABLE:
            raise ConfigError(f"parameter {name!r} is not sweepable; choices: {SWEEPABLE}")
        values = [v.strip() for v in raw.split(",") if v.strip()]
        if not values:
            raise ConfigError(f"--param {name} needs at least one value")
        grid.append((name, values))
    return grid


def _apply_point(cfg: SimConfig, point: dict[str, str]) -> SimConfig:
    for name, raw in point.items():
        if name == "sigma0":
            s0 = list(cfg.init_strategy)
            s0[0] = float(raw)
            cfg = replace(cfg, init_strategy=tuple(s0))
        elif name == "mu0":
            s0 = list(cfg.init_strategy)
            s0[1] = float(raw)
            cfg = replace(cfg, init_strategy=tuple(s0))
        elif name == "lambda0":
            s0 = list(cfg.init_strategy)
            s0[2] = float(raw)
            cfg = replace(cfg, init_strategy=tuple(s0))
        elif name == "time_init_method":
            cfg = replace(cfg, time_init_method=raw)
        elif name == "scenario":
            if raw not in SCENARIOS:
                raise ConfigError(f"unknown scenario {raw!r}")
            suf, sui, endog = SCENARIOS[raw]
            cfg = replace(cfg, scenario=raw, suf=suf, sui=sui,
                          endogenous_management=endog)
        elif name == "suf_sui":
            suf_s, _, sui_s = raw.partition(":")
            cfg = replace(cfg, suf=int(suf_s), sui=float(sui_s))
        elif name in ("h", "kappa", "eta", "s_eff"):
            cfg = replace(cfg, **{name: float(raw)})
        else:
            raise ConfigError(f"parameter {name!r} is not sweepable")
    return cfg


def _point_label(point: dict[str, str]) -> str:
    return "__".join(f"{k}={v}".replace(":", "-").replace("/", "-")
                     for k, v in point.items())


def run_sweep(base_cfg: SimConfig, grid: list[tuple[str, list[str]]], args) -> int:
    """Run one replicate batch per grid point; write a manifest mapping
    points to files."""
    out = _out_dir(args)
    ext = args.format
    names = [name for name, _ in grid]
    manifest = {"format": ext, "points": []}
    combos = itertools.product(*(values for _, values in grid)) if grid else ()
    for combo in combos:
        point = dict(zip(names, combo))
        cfg = _apply_point(base_cfg, point)
        problems = validate_config(cfg)
        if problems:
            raise ConfigError("invalid config at point "
                              f"{point}: " + "; ".join(problems))
        agg = _run_batch(cfg, args)
        fname = f"{_point_label(point)}_mean.{ext}"
        export_records(agg.mean, cfg.scenario, "mean", out / fname, ext)
        manifest["points"].append({"params": point, "file": fname})
    manifest_path = out / "manifest.json"
    with open(manifest_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {len(manifest['points'])} result file(s) and {manifest_path}")
    return 0


def cmd_sweep(args) -> int:
    cfg = build_config(args)
    grid = _grid_from_params(args.param or [])
    return run_sweep(cfg, grid, args)


def cmd_sensitivity(args) -> int:
    if args.param not in SENSITIVITY_PARAMS:
        raise ConfigError(
            f"sensitivity parameter must be one of {SENSITIVITY_PARAMS}")
    # Scans need an adapting management to show path dependence; default to
    # the Monthly cadence when the user did not pick a scenario.
    scenario = getattr(args, "scenario", None)
    if scenario is None and (not args.config or
                             "scenario" not in parse_config_file(Path(args.config))):
        scenario = "Monthly"
    cfg = build_config(args, scenario=scenario)
    if args.param == "time_init_method":
        values = list(TIME_INIT_METHODS)
    else:
        values = [format(v, "g") for v in STRATEGY_SCAN]
    return run_sweep(cfg, [(args.param, values)], args)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="firmsim",
        description="Agent-based firm simulator: scenarios, replicates, sweeps, export.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--seed", type=int, default=None, help="master seed")
        p.add_argument("--replicates", type=int, default=None)
        p.add_argument("--steps", type=int, default=None)
        p.add_argument("--out", default="out", metavar="DIR")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--threads", type=int, default=1,
                       help="replicate-level parallelism bound")
        p.add_argument("--config", default=None, metavar="FILE",
                       help="flat key = value config file")

    p_run = sub.add_parser("run", help="run one scenario's replicate batch")
    common(p_run)
    p_run.add_argument("--scenario", default=None, choices=sorted(SCENARIOS))
    p_run.add_argument("--per-agent", action="store_true", dest="per_agent",
                       help="also export per-agent daily traces")
    p_run.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a single config field")
    p_run.set_defaults(func=cmd_run)

    p_sc = sub.add_parser("scenarios", help="run the five named scenarios")
    common(p_sc)
    p_sc.set_defaults(func=cmd_scenarios)

    p_sw = sub.add_parser("sweep", help="Cartesian grid over sweepable parameters")
    common(p_sw)
    p_sw.add_argument("--scenario", default=None, choices=sorted(SCENARIOS))
    p_sw.add_argument("--param", action="append", metavar="NAME=V1,V2,...",
                      help=f"sweepable: {', '.join(SWEEPABLE)}")
    p_sw.add_argument("--set", action="append", metavar="KEY=VALUE")
    p_sw.set_defaults(func=cmd_sweep)

    p_se = sub.add_parser("sensitivity", help="one-at-a-time initial-value scans")
    common(p_se)
    p_se.add_argument("--scenario", default=None, choices=sorted(SCENARIOS))
    p_se.add_argument("--param", required=True,
                      help=f"one of {', '.join(SENSITIVITY_PARAMS)}")
    p_se.add_argument("--set", action="append", metavar="KEY=VALUE")
    p_se.set_defaults(func=cmd_sensitivity)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse prints usage itself
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
