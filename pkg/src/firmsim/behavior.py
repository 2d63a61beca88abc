"""Value-driven daily time allocation.

Agents draw shirking and cooperation hours from triangular distributions
centered on their personal norms. The mode is shifted by type-specific
reactions to the management style, and written warnings shrink the upper
bound of the shirking distribution for a while.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import TimeAllocation, ValueType


@dataclass
class TriangularParams:
    a: float  # lower bound
    m: float  # mode
    b: float  # upper bound


def _as_float(x):
    arr = np.asarray(x, dtype=float)
    return float(arr) if arr.ndim == 0 else arr


def deviation_delta(vtype: ValueType) -> float:
    """Width of the tolerated deviation from a norm, per value group."""
    return (1.0 / 3.0, 1.0, 2.0 / 3.0, 2.0 / 3.0)[int(vtype)]


def autonomy_offset(vtype, sigma: float, s_norm, delta):
    """Mode shift of the shirking draw as a reaction to monitoring.

    Monitoring below 0.5 counts as trusting, above 0.5 as controlling, and
    exactly 0.5 is neutral. Conservatives shirk less under control and more
    under trust; open-to-change agents mirror them; the other two groups do
    not react to monitoring at all.
    """
    if sigma == 0.5:
        direction_c = 0.0
    elif sigma < 0.5:
        direction_c = 0.5
    else:
        direction_c = -0.5
    code = np.asarray(vtype, dtype=np.int64)
    factor = np.where(code == ValueType.C, direction_c,
                      np.where(code == ValueType.O, -direction_c, 0.0))
    return _as_float(factor * np.asarray(s_norm, dtype=float) * delta)


def cooperativeness_offset(vtype, c_norm, delta):
    """Mode shift of the cooperation draw: SE down, ST up, C/O neutral."""
    code = np.asarray(vtype, dtype=np.int64)
    factor = np.where(code == ValueType.SE, -0.5,
                      np.where(code == ValueType.ST, 0.5, 0.0))
    return _as_float(factor * np.asarray(c_norm, dtype=float) * delta)


def rewards_offset(vtype, lam: float, mu: float, c_norm, delta, mu_scaling: bool = True):
    """Mode shift of the cooperation draw as a reaction to the reward scheme.

    A scheme below 0.5 counts as individual-based, above 0.5 as group-based,
    exactly 0.5 is neutral. By default the shift is scaled by the reward
    intensity so that it vanishes when no rewards are implemented
    (mu_scaling=False restores the unscaled variant).
    """
    if lam == 0.5:
        se, st = 0.0, 0.0
    elif lam < 0.5:
        se, st = -0.5, -0.1
    else:
        se, st = 0.1, 0.5
    code = np.asarray(vtype, dtype=np.int64)
    factor = np.where(code == ValueType.SE, se,
                      np.where(code == ValueType.ST, st, 0.0))
    out = factor * np.asarray(c_norm, dtype=float) * delta
    if mu_scaling:
        out = out * mu
    return _as_float(out)


def warning_scaling(ww_times, t: int) -> float:
    """Shrink factor for the shirking upper bound after written warnings.

    1.0 with a clean record; otherwise decays with the number of warnings
    (saturating at three) and recovers as the latest one ages. All recorded
    steps must lie strictly before t.
    """
    seq = list(ww_times)
    if not seq:
        return 1.0
    return float(beta_factor(len(seq), max(seq), t))


def beta_factor(ww_count, last_ww, t: int):
    """Vector form of warning_scaling over (count, latest-step) pairs."""
    count = np.asarray(ww_count, dtype=np.int64)
    last = np.asarray(last_ww, dtype=float)
    k = np.minimum(count, 3).astype(float)
    recency = (t - last) / t
    out = np.where(count == 0, 1.0, (1.0 - k / 3.0) + (k / 3.0) * recency)
    return _as_float(out)


def triangular_bounds(x_norm, delta, beta, offset) -> TriangularParams:
    """Distribution bounds around a norm; the mode is clamped into [a, b]."""
    a, m, b = _bounds(x_norm, delta, beta, offset)
    return TriangularParams(float(a), float(m), float(b))


def _bounds(x_norm, delta, beta, offset):
    x = np.asarray(x_norm, dtype=float)
    a = x * (1.0 - np.asarray(delta, dtype=float))
    b = x * (1.0 + np.asarray(beta, dtype=float) * delta)
    m = np.clip(x + offset, a, b)
    return a, m, b


def triangular_icdf(u, a, m, b):
    """Inverse CDF of the triangular distribution; degenerate spans return a."""
    u = np.asarray(u, dtype=float)
    a = np.asarray(a, dtype=float)
    m = np.asarray(m, dtype=float)
    b = np.asarray(b, dtype=float)
    span = b - a
    safe = np.where(span > 0.0, span, 1.0)
    fm = np.where(span > 0.0, (m - a) / safe, 0.0)
    left = a + np.sqrt(np.clip(u * span * (m - a), 0.0, None))
    right = b - np.sqrt(np.clip((1.0 - u) * span * (b - m), 0.0, None))
    out = np.where(span <= 0.0, a, np.where(u < fm, left, right))
    return _as_float(out)


def sample_triangular(params: TriangularParams, rng: np.random.Generator) -> float:
    return float(triangular_icdf(rng.random(), params.a, params.m, params.b))


def close_budget(s, c, tau: float):
    """Make (s, c, residual p) fit the daily budget exactly.

    If the two draws overshoot the budget they are rescaled proportionally,
    preserving their ratio; residual float dust is folded into c so that
    p >= 0 and s + c + p == tau.
    """
    s = np.asarray(s, dtype=float)
    c = np.asarray(c, dtype=float)
    tot = s + c
    over = tot > tau
    denom = np.where(over, tot, 1.0)
    scale = np.where(over, tau / denom, 1.0)
    s = s * scale
    c = c * scale
    p = tau - s - c
    dust = p < 0.0
    c = np.where(dust, c + p, c)
    p = np.where(dust, 0.0, p)
    return _as_float(s), _as_float(c), _as_float(p)


def allocate_time(emp, mgmt, tau: float, t: int, rng: np.random.Generator,
                  rho_mu_scaling: bool = True) -> TimeAllocation:
    """Draw one employee's daily allocation (two uniforms consumed)."""
    beta = warning_scaling(emp.ww_times, t)
    phi = autonomy_offset(emp.vtype, mgmt.sigma, emp.s_norm, emp.delta)
    shift_c = (cooperativeness_offset(emp.vtype, emp.c_norm, emp.delta)
               + rewards_offset(emp.vtype, mgmt.lam, mgmt.mu, emp.c_norm, emp.delta,
                                mu_scaling=rho_mu_scaling))
    sb = triangular_bounds(emp.s_norm, emp.delta, beta, phi)
    cb = triangular_bounds(emp.c_norm, emp.delta, 1.0, shift_c)
    s = triangular_icdf(rng.random(), sb.a, sb.m, sb.b)
    c = triangular_icdf(rng.random(), cb.a, cb.m, cb.b)
    s, c, p = close_budget(s, c, tau)
    return TimeAllocation(s, c, p)


def draw_allocations(s_norm, c_norm, delta, beta, phi, shift_c, tau, u_s, u_c):
    """Vectorized allocation for all agents from pre-drawn uniforms."""
    sa, sm, sb = _bounds(s_norm, delta, beta, phi)
    ca, cm, cb = _bounds(c_norm, delta, 1.0, shift_c)
    s = triangular_icdf(u_s, sa, sm, sb)
    c = triangular_icdf(u_c, ca, cm, cb)
    return close_budget(s, c, tau)


def initial_allocation(method: str, kappa: float, tau: float, s_max0: float,
                       rng: np.random.Generator) -> TimeAllocation:
    """First-day allocation before any norm exists."""
    if method == "Randomly":
        u = np.sort(rng.random(2))
        return TimeAllocation(u[0] * tau, (u[1] - u[0]) * tau, (1.0 - u[1]) * tau)
    if method == "Equally":
        third = tau / 3.0
        return TimeAllocation(third, third, third)
    if method == "Kappa":
        rest = tau - s_max0
        return TimeAllocation(s_max0, kappa * rest, (1.0 - kappa) * rest)
    if method == "KappaNoShirk":
        return TimeAllocation(0.0, kappa * tau, (1.0 - kappa) * tau)
    raise ValueError(f"unknown time_init_method {method!r}")


def initial_allocations(method: str, kappa: float, tau: float, s_max0: float,
                        n: int, rng: np.random.Generator):
    """Vectorized initial allocations; Randomly consumes n*2 uniforms."""
    if method == "Randomly":
        u = np.sort(rng.random((n, 2)), axis=1)
        s = u[:, 0] * tau
        c = (u[:, 1] - u[:, 0]) * tau
        p = (1.0 - u[:, 1]) * tau
        return s, c, p
    one = initial_allocation(method, kappa, tau, s_max0, rng)
    return (np.full(n, one.s), np.full(n, one.c), np.full(n, one.p))
