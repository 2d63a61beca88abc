"""Domain types, parameter validation, and deterministic RNG streams.

Everything here is plain data: agents, the management's state, the run
configuration, and the per-day observation record shared by the engine,
metrics, and exporters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import IntEnum

import numpy as np

TYPE_NAMES = ("C", "O", "SE", "ST")


class ValueType(IntEnum):
    """Higher-order personal value group of an employee."""

    C = 0  # conservative: security, conformity
    O = 1  # open to change: self-direction, stimulation
    SE = 2  # self-enhancing: power, achievement
    ST = 3  # self-transcendent: benevolence, universalism


# Deviation-from-norms width per value group (C, O, SE, ST).
DELTA_BY_TYPE = (1.0 / 3.0, 1.0, 2.0 / 3.0, 2.0 / 3.0)

TIME_INIT_METHODS = ("Randomly", "Equally", "Kappa", "KappaNoShirk")
NORM_LAGS = ("current", "previous")
OBS_DIVISORS = ("etc", "n")
SIGMA_GUARDS = ("recent", "window")
MONITORING_ROUNDINGS = ("ceil", "round")

# Neutral constant strategy: intermediate monitoring, no rewards, group-based
# assessment if rewards were ever switched on.
BASE_STRATEGY = (0.5, 0.0, 1.0)


@dataclass
class TimeAllocation:
    """One workday split into shirking, cooperation, and individual tasks."""

    s: float
    c: float
    p: float

    def total(self) -> float:
        return self.s + self.c + self.p

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.s, self.c, self.p)


@dataclass
class Employee:
    id: int
    vtype: ValueType
    alloc: TimeAllocation
    s_norm: float
    c_norm: float
    satisfaction: float
    base_satisfaction: float
    catch_count: int = 0
    ww_times: list[int] = field(default_factory=list)
    beta: float = 1.0
    cap: int = 0
    delta: float = 0.0

    def __post_init__(self) -> None:
        if self.delta == 0.0:
            self.delta = DELTA_BY_TYPE[int(self.vtype)]


@dataclass
class ManagementState:
    """Current strategy plus the observation ledgers it is steered by."""

    sigma: float
    mu: float
    lam: float
    s_max: float
    obs_shirk_history: list[float] = field(default_factory=list)
    obs_coop_history: list[float] = field(default_factory=list)
    output_history: list[float] = field(default_factory=list)


@dataclass
class SimConfig:
    """All exogenous parameters of one simulation setup."""

    n: int = 100
    type_dist: tuple[float, float, float, float] = (0.25, 0.25, 0.25, 0.25)
    kappa: float = 0.5
    wage_hourly: float = 1.0
    h: float = 0.1
    tau: float = 8.0
    s_eff: float = 0.5
    eta: float = 0.05
    suf: int = 1
    sui: float = 1.0 / 600.0
    lookback_x: int | None = None  # None means "equal to suf"
    steps: int = 3650
    replicates: int = 100
    master_seed: int = 0
    init_strategy: tuple[float, float, float] = BASE_STRATEGY
    time_init_method: str = "Randomly"
    cap_dist: tuple[float, float] = (0.0, 7.14)
    endogenous_management: bool = False
    norm_behavior_lag: str = "current"
    rho_mu_scaling: bool = True
    obs_mean_divisor: str = "etc"
    monitoring_rounding: str = "ceil"
    sigma_guard: str = "recent"
    scenario: str = "Base"

    @property
    def lookback(self) -> int:
        return self.suf if self.lookback_x is None else self.lookback_x

    @property
    def base_wage_daily(self) -> float:
        # Daily base wage: hourly wage times the daily time budget.
        return self.wage_hourly * self.tau

    @property
    def initial_s_max(self) -> float:
        return self.tau / 10.0

    def validate(self) -> list[str]:
        return validate_config(self)


# Named setups: (suf, sui, endogenous management). The Base scenario keeps the
# neutral strategy constant; the other four adapt it at different cadences.
SCENARIOS: dict[str, tuple[int, float, bool]] = {
    "Base": (1, 1.0 / 600.0, False),
    "Daily": (1, 1.0 / 60.0, True),
    "Monthly": (30, 1.0 / 20.0, True),
    "Biannually": (180, 3.0 / 10.0, True),
    "Yearly": (365, 73.0 / 120.0, True),
}


def scenario_config(name: str, **overrides) -> SimConfig:
    """Build a SimConfig for one of the named scenarios."""
    if name not in SCENARIOS:
        raise ValueError(f"unknown scenario {name!r}; expected one of {sorted(SCENARIOS)}")
    suf, sui, endog = SCENARIOS[name]
    cfg = SimConfig(suf=suf, sui=sui, endogenous_management=endog, scenario=name)
    return replace(cfg, **overrides) if overrides else cfg


@dataclass
class AgentDay:
    """Per-agent observables for one day (recorded only on request)."""

    s: np.ndarray
    c: np.ndarray
    p: np.ndarray
    satisfaction: np.ndarray
    output: np.ndarray
    reward: np.ndarray


@dataclass
class DayRecord:
    """Firm-level observables of one simulated day.

    Group tuples are ordered (C, O, SE, ST). NaN marks a missing value
    (e.g. homophily before any interaction, observation means on days the
    monitoring set was empty).
    """

    t: int
    sigma: float
    mu: float
    lam: float
    s_max: float
    ego: float
    profitability: float
    profitability_group: tuple[float, float, float, float]
    satisfaction_mean: float
    satisfaction_group: tuple[float, float, float, float]
    homophily_mean: float
    homophily_group: tuple[float, float, float, float]
    verbal_warnings: int
    written_warnings: int
    output_total: float
    reward_total: float
    obs_shirk: float
    obs_coop: float
    interactions_per_agent: float
    mean_shirk: float
    mean_coop: float
    mean_indiv: float
    agents: AgentDay | None = None


def _is_int(x) -> bool:
    return isinstance(x, (int, np.integer)) and not isinstance(x, bool)


def validate_config(cfg: SimConfig) -> list[str]:
    """Collect every invariant violation; an empty list means valid."""
    bad: list[str] = []
    if not _is_int(cfg.n) or cfg.n < 2:
        bad.append("n must be an integer of at least 2")
    if len(cfg.type_dist) != 4:
        bad.append("type distribution must have 4 entries")
    else:
        if any(f < 0 for f in cfg.type_dist):
            bad.append("type distribution entries must be non-negative")
        if abs(sum(cfg.type_dist) - 1.0) > 1e-9:
            bad.append("type distribution must sum to 1")
    if not 0.0 <= cfg.kappa <= 1.0:
        bad.append("kappa must be in [0, 1]")
    if cfg.wage_hourly <= 0:
        bad.append("wage_hourly must be positive")
    if not 0.0 < cfg.h < 1.0:
        bad.append("h must be in (0, 1)")
    if cfg.tau <= 0:
        bad.append("tau must be positive")
    if not 0.0 <= cfg.s_eff <= 1.0:
        bad.append("s_eff must be in [0, 1]")
    if not 0.0 <= cfg.eta <= 1.0 / 3.0:
        bad.append("eta must be in [0, 1/3]")
    if not _is_int(cfg.suf) or cfg.suf < 1:
        bad.append("suf must be a positive integer")
    if cfg.sui <= 0:
        bad.append("sui must be positive")
    if cfg.lookback_x is not None and (not _is_int(cfg.lookback_x) or cfg.lookback_x < 1):
        bad.append("lookback_x must be a positive integer")
    if not _is_int(cfg.steps) or cfg.steps < 0:
        bad.append("steps must be a non-negative integer")
    if not _is_int(cfg.replicates) or cfg.replicates < 1:
        bad.append("replicates must be a positive integer")
    if not _is_int(cfg.master_seed) or cfg.master_seed < 0:
        bad.append("master_seed must be a non-negative integer")
    if len(cfg.init_strategy) != 3 or any(not 0.0 <= v <= 1.0 for v in cfg.init_strategy):
        bad.append("init_strategy entries must be in [0, 1]")
    if cfg.time_init_method not in TIME_INIT_METHODS:
        bad.append(f"time_init_method must be one of {TIME_INIT_METHODS}")
    if len(cfg.cap_dist) != 2 or not 0.0 <= cfg.cap_dist[0] <= cfg.cap_dist[1]:
        bad.append("cap_dist must satisfy 0 <= lo <= hi")
    if cfg.norm_behavior_lag not in NORM_LAGS:
        bad.append(f"norm_behavior_lag must be one of {NORM_LAGS}")
    if cfg.obs_mean_divisor not in OBS_DIVISORS:
        bad.append(f"obs_mean_divisor must be one of {OBS_DIVISORS}")
    if cfg.sigma_guard not in SIGMA_GUARDS:
        bad.append(f"sigma_guard must be one of {SIGMA_GUARDS}")
    if cfg.monitoring_rounding not in MONITORING_ROUNDINGS:
        bad.append(f"monitoring_rounding must be one of {MONITORING_ROUNDINGS}")
    if cfg.scenario not in SCENARIOS:
        bad.append(f"scenario must be one of {sorted(SCENARIOS)}")
    return bad


def seed_replicate(master_seed: int, replicate_index: int) -> np.random.Generator:
    """Deterministic per-replicate stream: (master_seed, index) -> generator.

    The mapping is injective, so every replicate of a batch gets its own
    independent PCG64 stream and the same pair always reproduces the same
    trajectory bit for bit.
    """
    if replicate_index < 0:
        raise ValueError("replicate_index must be non-negative")
    return np.random.default_rng(np.random.SeedSequence((master_seed, replicate_index)))


def exact_type_counts(type_dist, n: int) -> list[int]:
    """Largest-remainder apportionment of n agents over the four groups."""
    raw = [f * n for f in type_dist]
    counts = [math.floor(r) for r in raw]
    short = n - sum(counts)
    order = sorted(range(4), key=lambda i: raw[i] - counts[i], reverse=True)
    for i in order[:short]:
        counts[i] += 1
    return counts
