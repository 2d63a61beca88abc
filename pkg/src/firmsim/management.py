"""Monitoring, warnings, the adaptive shirking threshold, and the strategy
controller that steers monitoring intensity and the reward scheme."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ManagementState


@dataclass
class StrategyWindow:
    """Per-day benchmark series over the lookback horizon (NaN = missing)."""

    window_len: int
    obs_shirk: np.ndarray
    obs_coop: np.ndarray
    output: np.ndarray

    @property
    def mean_obs_shirk(self) -> float:
        return _nanmean(self.obs_shirk)

    @property
    def mean_obs_coop(self) -> float:
        return _nanmean(self.obs_coop)

    @property
    def mean_output(self) -> float:
        return _nanmean(self.output)

    @property
    def last_obs_shirk(self) -> float:
        """Most recent non-missing observed shirking mean in the window."""
        arr = np.asarray(self.obs_shirk, dtype=float)
        good = arr[~np.isnan(arr)]
        return float(good[-1]) if good.size else math.nan


def _nanmean(arr) -> float:
    arr = np.asarray(arr, dtype=float)
    good = ~np.isnan(arr)
    if not good.any():
        return math.nan
    return float(arr[good].mean())


def draw_monitoring_set(sigma: float, n: int, rng: np.random.Generator,
                        rounding: str = "round") -> np.ndarray:
    """Uniform sample (no replacement) of the monitored subset.

    The subset size is sigma*n rounded to the nearest integer
    (rounding="round", ties to even) or rounded up (rounding="ceil", so any
    positive monitoring level keeps at least one observation per day; used
    as the engine default because a frozen observation stream locks the
    strategy controller into whatever its last small-sample update was).
    """
    k = int(np.rint(sigma * n)) if rounding == "round" else int(math.ceil(sigma * n))
    k = min(max(k, 0), n)
    if k == 0:
        return np.empty(0, dtype=np.int64)
    return rng.choice(n, size=k, replace=False).astype(np.int64)


def process_monitoring(etc, allocs, s_max: float, employees, eta: float, t: int,
                       divisor: str = "etc"):
    """Check the observed agents against the shirking threshold.

    Every catch beyond the threshold issues a verbal warning (satisfaction
    shock eta); every third catch additionally issues a written warning
    (shock 3*eta, timestamp recorded, catch counter reset). Returns the
    warning list plus the observed shirk/coop means (NaN when nothing was
    observed). Mutates the given employees.
    """
    etc = np.asarray(etc, dtype=np.int64)
    warnings: list[tuple[int, str]] = []
    for i in etc:
        emp = employees[i]
        if allocs[i].s > s_max:
            emp.catch_count += 1
            emp.satisfaction *= 1.0 - eta
            warnings.append((int(i), "verbal"))
            if emp.catch_count == 3:
                emp.satisfaction *= 1.0 - 3.0 * eta
                emp.ww_times.append(t)
                emp.catch_count = 0
                warnings.append((int(i), "written"))
    if etc.size == 0:
        return warnings, math.nan, math.nan
    denom = float(etc.size) if divisor == "etc" else float(len(employees))
    mean_s = sum(allocs[i].s for i in etc) / denom
    mean_c = sum(allocs[i].c for i in etc) / denom
    return warnings, mean_s, mean_c


def update_max_shirking(s_max: float, mean_obs_shirk_prev: float, h: float) -> float:
    """Drift the accepted-shirking threshold toward yesterday's observation."""
    if mean_obs_shirk_prev is None or math.isnan(mean_obs_shirk_prev):
        return s_max
    return (1.0 - h) * s_max + h * mean_obs_shirk_prev


def expected_group_output(s_max: float, kappa: float, tau: float) -> float:
    """Cobb-Douglas optimum given the accepted-shirking threshold.

    Conventions: 0^0 = 1; equal factor bases short-circuit to the base itself
    (x^(1-k) * x^k = x), which keeps the symmetric kappa=0.5 case exact.
    """
    alpha = tau - s_max
    b1 = alpha * (1.0 - kappa)
    b2 = alpha * kappa
    if b1 == b2:
        return b1
    return _pow0(b1, 1.0 - kappa) * _pow0(b2, kappa)


def _pow0(base: float, exp: float) -> float:
    if exp == 0.0:
        return 1.0
    return base ** exp


def update_strategy(mgmt: ManagementState, window: StrategyWindow, sui: float,
                    ego: float, kappa: float, tau: float,
                    sigma_guard: str = "recent") -> tuple[float, float, float]:
    """One controller step; returns the new (sigma, mu, lambda), clamped to [0, 1].

    Monitoring scales up (down) when observed shirking exceeds (stays
    within) the current threshold; from exactly zero it re-activates
    proportionally to the output shortfall. Reward intensity scales up (down)
    when window-mean output falls short of (exceeds) the expected optimum;
    the scheme type moves toward group rewards when observed cooperation
    falls short of the desired level. Multiplicative updates cannot leave
    zero, so mu and lambda re-seed to sui when their increase condition
    fires at zero. Missing window data leaves the dependent value unchanged;
    "equal" branches use a 1e-9 relative tolerance.

    The monitoring guard compares the threshold against the window's most
    recent observation by default (sigma_guard="recent"). The window-mean
    variant ("window") is the literal long-average reading, but because the
    threshold itself tracks observations with a much shorter lag, any
    sustained shirking decline then reads as "above threshold" at every
    update and monitoring ratchets to 1 instead of being abandoned.
    """
    sbar = window.last_obs_shirk if sigma_guard == "recent" else window.mean_obs_shirk
    cbar = window.mean_obs_coop
    obar = window.mean_output
    sigma, mu, lam = mgmt.sigma, mgmt.mu, mgmt.lam

    if sigma == 0.0:
        if not math.isnan(obar) and obar < ego:
            sigma = (1.0 - obar / ego) * sui
    elif not math.isnan(sbar):
        sigma = sigma * (1.0 + sui) if sbar > mgmt.s_max else sigma * (1.0 - sui)

    if not math.isnan(obar) and not math.isclose(obar, ego, rel_tol=1e-9, abs_tol=0.0):
        if obar < ego:
            mu = sui if mu == 0.0 else mu * (1.0 + sui)
        else:
            mu = mu * (1.0 - sui)

    coop_target = kappa * (tau - mgmt.s_max)
    if not math.isnan(cbar) and not math.isclose(cbar, coop_target, rel_tol=1e-9, abs_tol=0.0):
        if cbar < coop_target:
            lam = sui if lam == 0.0 else lam * (1.0 + sui)
        else:
            lam = lam * (1.0 - sui)

    clamp = lambda v: min(max(v, 0.0), 1.0)
    return clamp(sigma), clamp(mu), clamp(lam)
