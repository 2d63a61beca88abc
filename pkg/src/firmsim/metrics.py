"""Derived observables: interaction homophily, correlations, replicate
aggregation, and cumulated/relative profitability."""

from __future__ import annotations

import math

import numpy as np


def interaction_homophily(i: int, edges: np.ndarray, types) -> float:
    """Share of agent i's edge mass pointing at same-type peers.

    NaN for isolated agents (no positive edge): "no peers" must not be
    conflated with "no in-group peers".
    """
    types = np.asarray(types)
    row = edges[i]
    total = row.sum()
    if total <= 0.0:
        return math.nan
    same = row[types == types[i]].sum()  # diagonal contributes 0
    return float(same / total)


def homophily_all(edges: np.ndarray, types: np.ndarray) -> np.ndarray:
    """Per-agent homophily vector; NaN where undefined."""
    types = np.asarray(types)
    same = types[:, None] == types[None, :]
    total = edges.sum(axis=1)
    in_group = (edges * same).sum(axis=1)
    out = np.full(types.shape, np.nan)
    ok = total > 0.0
    out[ok] = in_group[ok] / total[ok]
    return out


def pearson(xs, ys) -> float:
    """Pearson correlation; NaN when either series has zero variance."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.size != y.size or x.size < 2:
        raise ValueError("series must have equal length of at least 2")
    xd = x - x.mean()
    yd = y - y.mean()
    vx = float(xd @ xd)
    vy = float(yd @ yd)
    if vx == 0.0 or vy == 0.0:
        return math.nan
    return float((xd @ yd) / math.sqrt(vx * vy))


def aggregate_replicates(runs) -> dict[str, np.ndarray]:
    """Element-wise mean of every numeric column across replicate runs.

    Missing values (NaN) are excluded per cell; a cell that is missing in
    every replicate stays NaN. Accepts anything exposing .columns (a dict of
    equal-length numpy arrays) or plain column dicts.
    """
    if not runs:
        raise ValueError("need at least one replicate")
    col_dicts = [r.columns if hasattr(r, "columns") else r for r in runs]
    keys = list(col_dicts[0])
    out: dict[str, np.ndarray] = {}
    for key in keys:
        sums = None
        counts = None
        for cols in col_dicts:
            arr = np.asarray(cols[key], dtype=float)
            good = ~np.isnan(arr)
            if sums is None:
                sums = np.where(good, arr, 0.0)
                counts = good.astype(np.int64)
            else:
                sums = sums + np.where(good, arr, 0.0)
                counts = counts + good
        with np.errstate(invalid="ignore"):
            out[key] = np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)
    return out


def replicate_correlations(runs) -> list[dict]:
    """Per-replicate satisfaction/profitability/homophily correlations.

    One row per (replicate, value group or firm level) with the three
    pairwise coefficients; complements the replicate-mean correlations with
    the across-replicate distribution. Accepts objects exposing .columns.
    """
    from .core import TYPE_NAMES  # local to avoid cycles at import time

    rows = []
    for idx, run in enumerate(runs):
        cols = run.columns if hasattr(run, "columns") else run
        label = getattr(run, "replicate", idx)
        for group in list(TYPE_NAMES) + ["firm"]:
            if group == "firm":
                sat = cols["satisfaction_mean"]
                prof = cols["profitability"]
                hom = cols["homophily_mean"]
            else:
                sat = cols[f"satisfaction_{group}"]
                prof = cols[f"profitability_{group}"]
                hom = cols[f"homophily_{group}"]
            rows.append({
                "replicate": label,
                "group": group,
                "SP": _masked_pearson(sat, prof),
                "HP": _masked_pearson(hom, prof),
                "SH": _masked_pearson(sat, hom),
            })
    return rows


def _masked_pearson(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    good = ~(np.isnan(x) | np.isnan(y))
    if good.sum() < 2:
        return math.nan
    return pearson(x[good], y[good])


def cumulated_profitability(output_totals, reward_totals) -> np.ndarray:
    """Ratio of cumulated output to cumulated rewards up to each day.

    NaN entries (the initialization slot) contribute nothing and stay NaN
    in the result.
    """
    out = np.asarray(output_totals, dtype=float)
    rew = np.asarray(reward_totals, dtype=float)
    good = ~np.isnan(out)
    cum_o = np.cumsum(np.where(good, out, 0.0))
    cum_r = np.cumsum(np.where(good, rew, 0.0))
    res = np.full(out.shape, np.nan)
    ok = good & (cum_r > 0.0)
    res[ok] = cum_o[ok] / cum_r[ok]
    return res


def relative_cumulated_profitability(run_cumulated, baseline_cumulated) -> np.ndarray:
    """Day-wise ratio of a run's cumulated profitability to a baseline's."""
    run = np.asarray(run_cumulated, dtype=float)
    base = np.asarray(baseline_cumulated, dtype=float)
    if run.size != base.size:
        raise ValueError("series must have equal length")
    with np.errstate(invalid="ignore", divide="ignore"):
        return run / base
