"""Job satisfaction: base levels, mean reversion, warning shocks, productivity."""

from __future__ import annotations

import numpy as np

from .core import ValueType


def base_satisfaction(vtype, sigma: float, mu: float, lam: float):
    """Neutral satisfaction level implied by the current management style.

    Conservatives like monitoring, open-to-change agents dislike it;
    self-enhancers prefer individual rewards, self-transcendents group
    rewards, both proportionally to the reward intensity.
    """
    code = np.asarray(vtype, dtype=np.int64)
    out = np.select(
        [code == ValueType.C, code == ValueType.O, code == ValueType.SE],
        [sigma, 1.0 - sigma, 0.5 + mu * (0.5 - lam)],
        default=0.5 + mu * (lam - 0.5),
    )
    return float(out) if out.ndim == 0 else out


def recover_satisfaction(s, s0):
    """Daily 1% drift of satisfaction back toward its base level.

    The step never overshoots the base: approaching from below is capped at
    s0, from above floored at s0.
    """
    s = np.asarray(s, dtype=float)
    s0 = np.asarray(s0, dtype=float)
    out = np.where(s > s0, np.maximum(0.99 * s, s0),
                   np.where(s < s0, np.minimum(1.01 * s, s0), s))
    out = np.clip(out, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def apply_warning_shock(s: float, kind: str, eta: float) -> float:
    """Multiplicative satisfaction drop: eta for verbal, 3*eta for written."""
    if kind == "verbal":
        return s * (1.0 - eta)
    if kind == "written":
        if eta > 1.0 / 3.0:
            raise ValueError("eta above 1/3 would push satisfaction negative")
        return s * (1.0 - 3.0 * eta)
    raise ValueError(f"unknown warning kind {kind!r}")


def productivity(s, s_eff: float):
    """Affine satisfaction-to-productivity link, ranging 1 +/- s_eff."""
    out = (1.0 - s_eff) + 2.0 * s_eff * np.asarray(s, dtype=float)
    return float(out) if out.ndim == 0 else out
