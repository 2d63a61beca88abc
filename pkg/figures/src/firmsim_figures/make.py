"""Rebuild the headline figures and tables from exported scenario CSVs.

Consumes only the simulator's long-format export schema; nothing is
re-simulated here, so identical input bytes yield identical plotted series.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

ALL_SCENARIOS = ("Base", "Daily", "Monthly", "Biannually", "Yearly")
ADAPTIVE = ("Daily", "Monthly", "Biannually", "Yearly")
GROUPS = ("C", "O", "SE", "ST")
GROUP_LABELS = {"C": "Conservative", "O": "Open to change",
                "SE": "Self-enhancing", "ST": "Self-transcendent"}
COLORS = {"Daily": "tab:blue", "Monthly": "tab:orange",
          "Biannually": "tab:green", "Yearly": "tab:red", "Base": "black"}

# in-group edge share of an unweighted complete graph with four equal groups
COMPLETE_GRAPH_REFERENCE = (100 / 4 - 1) / (100 - 1)


class MissingScenarioError(FileNotFoundError):
    """One or more expected scenario exports are absent."""

    def __init__(self, missing: list[str], directory: Path):
        self.missing = list(missing)
        super().__init__(
            f"missing scenario file(s) in {directory}: {', '.join(self.missing)}")


def scenario_path(input_dir: Path, name: str) -> Path:
    return Path(input_dir) / f"{name}_mean.csv"


def load_scenarios(input_dir: Path, expect=None) -> dict[str, pd.DataFrame]:
    """Load the aggregate CSVs; Base is always required (relative reference).

    `expect` lists scenario names that must be present; by default every
    present scenario is loaded and only Base is mandatory.
    """
    input_dir = Path(input_dir)
    wanted = list(expect) if expect else [n for n in ALL_SCENARIOS
                                          if scenario_path(input_dir, n).exists()]
    if "Base" not in wanted:
        wanted.insert(0, "Base")
    missing = [n for n in wanted if not scenario_path(input_dir, n).exists()]
    if missing:
        raise MissingScenarioError(missing, input_dir)
    out = {}
    for name in wanted:
        df = pd.read_csv(scenario_path(input_dir, name))
        df = df[df["replicate"] == "mean"] if "replicate" in df else df
        out[name] = df.reset_index(drop=True)
    return out


def _panel_grid(title: str):
    fig = plt.figure(figsize=(12, 5))
    gs = fig.add_gridspec(2, 4)
    main = fig.add_subplot(gs[:, :2])
    panels = [fig.add_subplot(gs[i, 2 + j]) for i in range(2) for j in range(2)]
    fig.suptitle(title)
    return fig, main, panels


def _years(df: pd.DataFrame) -> np.ndarray:
    return df["t"].to_numpy() / 365.0


def fig_profitability(data: dict[str, pd.DataFrame], path: Path) -> None:
    scenarios = [n for n in ADAPTIVE if n in data] or list(data)
    fig = plt.figure(figsize=(12, 7))
    gs = fig.add_gridspec(2, 6)
    main = fig.add_subplot(gs[0, :3])
    right = gs[0, 3:].subgridspec(2, 2)
    group_axes = [fig.add_subplot(right[i, j]) for i in range(2) for j in range(2)]
    strat_axes = [fig.add_subplot(gs[1, 2 * i:2 * i + 2]) for i in range(3)]

    for name in scenarios:
        df = data[name]
        main.plot(_years(df), df["profitability"], color=COLORS[name],
                  lw=0.9, label=name)
    main.set_title("Firm profitability")
    main.set_xlabel("years")
    main.legend(fontsize=8)

    for ax, g in zip(group_axes, GROUPS):
        for name in scenarios:
            df = data[name]
            ax.plot(_years(df), df[f"profitability_{g}"], color=COLORS[name], lw=0.7)
        ax.set_title(GROUP_LABELS[g], fontsize=9)
        ax.tick_params(labelsize=7)

    for ax, key, label in zip(strat_axes, ("sigma", "mu", "lambda"),
                              ("monitoring", "reward intensity", "reward type")):
        for name in scenarios:
            df = data[name]
            ax.plot(_years(df), df[key], color=COLORS[name], lw=0.9)
        ax.set_ylim(-0.05, 1.05)
        ax.set_title(label, fontsize=10)
        ax.set_xlabel("years")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def _aggregate_and_groups(data, column_mean: str, column_group: str,
                          title: str, path: Path, reference: float | None = None):
    scenarios = [n for n in ADAPTIVE if n in data] or list(data)
    fig, main, panels = _panel_grid(title)
    for name in scenarios:
        df = data[name]
        main.plot(_years(df), df[column_mean], color=COLORS[name], lw=0.9,
                  label=name)
    if reference is not None:
        main.axhline(reference, ls="--", color="grey", lw=0.8,
                     label="complete graph")
    main.set_xlabel("years")
    main.legend(fontsize=8)
    for ax, g in zip(panels, GROUPS):
        for name in scenarios:
            df = data[name]
            ax.plot(_years(df), df[f"{column_group}_{g}"], color=COLORS[name],
                    lw=0.7)
        ax.set_title(GROUP_LABELS[g], fontsize=9)
        ax.tick_params(labelsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def relative_series(data: dict[str, pd.DataFrame], name: str) -> np.ndarray:
    base = data["Base"]["cumulated_profitability"].to_numpy(dtype=float)
    run = data[name]["cumulated_profitability"].to_numpy(dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        return run / base


def fig_relative_profitability(data: dict[str, pd.DataFrame], path: Path) -> None:
    scenarios = [n for n in ADAPTIVE if n in data] or ["Base"]
    fig, ax = plt.subplots(figsize=(8, 5))
    for name in scenarios:
        df = data[name]
        ax.plot(_years(df), relative_series(data, name), color=COLORS[name],
                lw=1.0, label=name)
    ax.axhline(1.0, ls="--", color="black", lw=0.9, label="Base")
    ax.set_title("Cumulated profitability relative to the constant-strategy baseline")
    ax.set_xlabel("years")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    good = ~(np.isnan(x) | np.isnan(y))
    x, y = x[good], y[good]
    if x.size < 2:
        return math.nan
    xd, yd = x - x.mean(), y - y.mean()
    vx, vy = float(xd @ xd), float(yd @ yd)
    if vx == 0.0 or vy == 0.0:
        return math.nan
    return float((xd @ yd) / math.sqrt(vx * vy))


def correlations_table(data: dict[str, pd.DataFrame]) -> pd.DataFrame:
    """Satisfaction/profitability/homophily correlations per group and scenario."""
    rows = []
    scenarios = [n for n in ADAPTIVE if n in data]
    for g in list(GROUPS) + ["Average"]:
        for name in scenarios:
            df = data[name]
            if g == "Average":
                sat = df["satisfaction_mean"]
                prof = df["profitability"]
                hom = df["homophily_mean"]
            else:
                sat = df[f"satisfaction_{g}"]
                prof = df[f"profitability_{g}"]
                hom = df[f"homophily_{g}"]
            sat, prof, hom = (x.to_numpy(dtype=float) for x in (sat, prof, hom))
            rows.append({
                "value_group": GROUP_LABELS.get(g, g),
                "scenario": name,
                "SP": round(_pearson(sat, prof), 3),
                "HP": round(_pearson(hom, prof), 3),
                "SH": round(_pearson(sat, hom), 3),
            })
    return pd.DataFrame(rows)


def relative_table(data: dict[str, pd.DataFrame]) -> pd.DataFrame:
    """End-of-run cumulated profitability relative to Base, in percent."""
    rows = []
    for name in data:
        rel = relative_series(data, name)
        final = rel[~np.isnan(rel)][-1]
        rows.append({"scenario": name,
                     "relative_profitability_pct": f"{100 * final:.2f}"})
    rows.sort(key=lambda r: -float(r["relative_profitability_pct"]))
    return pd.DataFrame(rows)


def make_figures(input_dir, output_dir, expect=None) -> list[Path]:
    """Write the four figures and two tables; returns the created paths."""
    data = load_scenarios(Path(input_dir), expect=expect)
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    created = []

    path = out / "profitability_strategy.png"
    fig_profitability(data, path)
    created.append(path)

    path = out / "homophily.png"
    _aggregate_and_groups(data, "homophily_mean", "homophily",
                          "Interaction homophily", path,
                          reference=COMPLETE_GRAPH_REFERENCE)
    created.append(path)

    path = out / "satisfaction.png"
    _aggregate_and_groups(data, "satisfaction_mean", "satisfaction",
                          "Job satisfaction", path)
    created.append(path)

    path = out / "relative_profitability.png"
    fig_relative_profitability(data, path)
    created.append(path)

    path = out / "correlations.csv"
    correlations_table(data).to_csv(path, index=False, lineterminator="\n")
    created.append(path)

    path = out / "relative_profitability.csv"
    relative_table(data).to_csv(path, index=False, lineterminator="\n")
    created.append(path)
    return created


def make_sensitivity_figure(manifest_dir, output_dir) -> list[Path]:
    """Profitability-over-time plot with one line per sweep grid point."""
    manifest_dir = Path(manifest_dir)
    manifest_path = manifest_dir / "manifest.json"
    if not manifest_path.exists():
        raise FileNotFoundError(f"no manifest.json in {manifest_dir}")
    manifest = json.loads(manifest_path.read_text())
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)

    fig, ax = plt.subplots(figsize=(8, 5))
    for point in manifest["points"]:
        df = pd.read_csv(manifest_dir / point["file"])
        label = ", ".join(f"{k}={v}" for k, v in point["params"].items())
        ax.plot(df["t"] / 365.0, df["profitability"], lw=0.9, label=label)
    ax.set_title("Firm profitability per parameter value")
    ax.set_xlabel("years")
    if manifest["points"]:
        ax.legend(fontsize=8)
    fig.tight_layout()
    path = out / "sensitivity_profitability.png"
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return [path]
