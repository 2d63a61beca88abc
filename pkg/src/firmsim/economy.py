"""Output, bonuses, rewards, and the profitability observable."""

from __future__ import annotations

import numpy as np


def individual_output(p, mean_coop_others, kappa: float, pi, w: float = 1.0):
    """Cobb-Douglas daily output from own individual time and others' mean
    cooperation, scaled by productivity. Conventions: 0^x = 0 for x > 0,
    0^0 = 1."""
    p = np.asarray(p, dtype=float)
    cbar = np.asarray(mean_coop_others, dtype=float)
    out = np.asarray(pi, dtype=float) * np.power(p, 1.0 - kappa) * np.power(cbar, kappa) * w
    return float(out) if out.ndim == 0 else out


def mean_coop_others(c: np.ndarray) -> np.ndarray:
    """Per-agent mean cooperation time of everyone else."""
    c = np.asarray(c, dtype=float)
    return (c.sum() - c) / (c.size - 1)


def bonus(o_i, outputs, lam: float):
    """Convex mix of own output and the firm mean, set by the scheme type."""
    out = (1.0 - lam) * np.asarray(o_i, dtype=float) + lam * float(np.mean(outputs))
    return float(out) if out.ndim == 0 else out


def bonuses(outputs: np.ndarray, lam: float) -> np.ndarray:
    return bonus(outputs, outputs, lam)


def reward(base_wage_daily: float, mu: float, b_i):
    """Daily pay: homogeneous base wage plus intensity-weighted bonus."""
    out = base_wage_daily + mu * np.asarray(b_i, dtype=float)
    return float(out) if out.ndim == 0 else out


def profitability(outputs, rewards) -> float:
    """Ratio of summed output to summed rewards for one day (or one group)."""
    total_r = float(np.sum(rewards))
    assert total_r > 0.0, "reward sum must be positive (base wage is positive)"
    return float(np.sum(outputs)) / total_r
