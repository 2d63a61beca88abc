"""The day loop, scenario runner, and replicate batch executor.

Daily phase order (t = 1..steps):
  1. satisfaction recovery toward the base level
  2. interaction-cap draws and time allocation (norms from t-1, current style)
  3. interaction phase and edge update
  4. norm updates from today's partners
  5. monitoring: threshold update from yesterday's observation (adaptive
     threshold belongs to endogenous management; the constant-strategy
     baseline keeps tau/10), observation sample, warnings and shocks,
     today's observed means recorded
  6. productivity, outputs, bonuses, rewards, profitability
  7. strategy update every suf-th day (endogenous scenarios only), followed
     by a base-satisfaction refresh if anything changed
  8. metrics snapshot

Per-day randomness is consumed in a fixed order (cap draws, shirk uniforms,
coop uniforms, pair-draw matrix, tie-break keys, processing permutation,
monitoring sample), all from the single per-replicate stream, so trajectories
replay bit-exactly and are independent of host parallelism.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import behavior, economy, kernels, management, metrics, network, wellbeing
from .core import (AgentDay, DayRecord, Employee, ManagementState, SimConfig,
                   TimeAllocation, TYPE_NAMES, ValueType, exact_type_counts,
                   seed_replicate, validate_config)

SCALAR_COLUMNS = (
    "t", "sigma", "mu", "lambda", "s_max", "ego", "profitability",
    "satisfaction_mean", "homophily_mean", "verbal_warnings",
    "written_warnings", "output_total", "reward_total", "obs_shirk",
    "obs_coop", "interactions_per_agent", "mean_shirk", "mean_coop",
    "mean_indiv", "cumulated_profitability",
)
GROUP_COLUMNS = ("profitability", "satisfaction", "homophily")
AGENT_COLUMNS = ("s", "c", "p", "satisfaction", "output", "reward")


def all_column_names() -> list[str]:
    names = list(SCALAR_COLUMNS)
    for base in GROUP_COLUMNS:
        names.extend(f"{base}_{g}" for g in TYPE_NAMES)
    return names


@dataclass
class SimState:
    """Mutable state of one replicate (struct-of-arrays over agents)."""

    cfg: SimConfig
    vtypes: np.ndarray
    delta: np.ndarray
    s: np.ndarray
    c: np.ndarray
    p: np.ndarray
    prev_s: np.ndarray
    prev_c: np.ndarray
    s_norm: np.ndarray
    c_norm: np.ndarray
    satisfaction: np.ndarray
    base_sat: np.ndarray
    catch_count: np.ndarray
    ww_count: np.ndarray
    last_ww: np.ndarray
    ww_times: list[list[int]]
    last_beta: np.ndarray
    edges: np.ndarray
    sigma: float
    mu: float
    lam: float
    s_max: float
    obs_shirk: np.ndarray
    obs_coop: np.ndarray
    output_mean: np.ndarray
    group_masks: list[np.ndarray] = field(default_factory=list)

    def employees(self) -> list[Employee]:
        """Materialize the agent population as domain objects."""
        out = []
        for i in range(self.cfg.n):
            out.append(Employee(
                id=i,
                vtype=ValueType(int(self.vtypes[i])),
                alloc=TimeAllocation(float(self.s[i]), float(self.c[i]), float(self.p[i])),
                s_norm=float(self.s_norm[i]),
                c_norm=float(self.c_norm[i]),
                satisfaction=float(self.satisfaction[i]),
                base_satisfaction=float(self.base_sat[i]),
                catch_count=int(self.catch_count[i]),
                ww_times=list(self.ww_times[i]),
                beta=float(self.last_beta[i]),
                delta=float(self.delta[i]),
            ))
        return out

    def management(self) -> ManagementState:
        return ManagementState(
            sigma=self.sigma, mu=self.mu, lam=self.lam, s_max=self.s_max,
            obs_shirk_history=list(self.obs_shirk),
            obs_coop_history=list(self.obs_coop),
            output_history=list(self.output_mean),
        )


@dataclass
class RunResult:
    """Full day-record series (column-wise) plus the final state."""

    config: SimConfig
    replicate: int
    columns: dict[str, np.ndarray]
    agent_columns: dict[str, np.ndarray] | None
    final_state: SimState

    @property
    def steps(self) -> int:
        return len(self.columns["t"]) - 1

    def day(self, t: int) -> DayRecord:
        """Materialize one day's record from the column store."""
        cols = self.columns
        group = lambda base: tuple(float(cols[f"{base}_{g}"][t]) for g in TYPE_NAMES)
        agents = None
        if self.agent_columns is not None:
            agents = AgentDay(**{k: self.agent_columns[k][t] for k in AGENT_COLUMNS})
        return DayRecord(
            t=int(cols["t"][t]),
            sigma=float(cols["sigma"][t]),
            mu=float(cols["mu"][t]),
            lam=float(cols["lambda"][t]),
            s_max=float(cols["s_max"][t]),
            ego=float(cols["ego"][t]),
            profitability=float(cols["profitability"][t]),
            profitability_group=group("profitability"),
            satisfaction_mean=float(cols["satisfaction_mean"][t]),
            satisfaction_group=group("satisfaction"),
            homophily_mean=float(cols["homophily_mean"][t]),
            homophily_group=group("homophily"),
            verbal_warnings=int(cols["verbal_warnings"][t]),
            written_warnings=int(cols["written_warnings"][t]),
            output_total=float(cols["output_total"][t]),
            reward_total=float(cols["reward_total"][t]),
            obs_shirk=float(cols["obs_shirk"][t]),
            obs_coop=float(cols["obs_coop"][t]),
            interactions_per_agent=float(cols["interactions_per_agent"][t]),
            mean_shirk=float(cols["mean_shirk"][t]),
            mean_coop=float(cols["mean_coop"][t]),
            mean_indiv=float(cols["mean_indiv"][t]),
            agents=agents,
        )

    def records(self):
        return (self.day(t) for t in range(len(self.columns["t"])))


@dataclass
class AggregateResult:
    """Per-replicate results plus their element-wise mean columns."""

    config: SimConfig
    runs: list[RunResult]
    mean: dict[str, np.ndarray]


def init_state(cfg: SimConfig, rng: np.random.Generator) -> SimState:
    """Blank-slate firm: typed agents, initial allocations, no edges."""
    n = cfg.n
    counts = exact_type_counts(cfg.type_dist, n)
    vtypes = np.repeat(np.arange(4, dtype=np.int64), counts)
    rng.shuffle(vtypes)
    delta = np.array([behavior.deviation_delta(ValueType(v)) for v in range(4)])[vtypes]

    s_max0 = cfg.initial_s_max
    s, c, p = behavior.initial_allocations(cfg.time_init_method, cfg.kappa, cfg.tau,
                                           s_max0, n, rng)
    sigma0, mu0, lam0 = cfg.init_strategy
    base_sat = wellbeing.base_satisfaction(vtypes, sigma0, mu0, lam0)

    steps = cfg.steps
    nanvec = lambda: np.full(steps + 1, np.nan)
    state = SimState(
        cfg=cfg,
        vtypes=vtypes,
        delta=delta,
        s=np.asarray(s, dtype=float), c=np.asarray(c, dtype=float),
        p=np.asarray(p, dtype=float),
        prev_s=np.asarray(s, dtype=float).copy(),
        prev_c=np.asarray(c, dtype=float).copy(),
        s_norm=np.asarray(s, dtype=float).copy(),
        c_norm=np.asarray(c, dtype=float).copy(),
        satisfaction=np.asarray(base_sat, dtype=float).copy(),
        base_sat=np.asarray(base_sat, dtype=float),
        catch_count=np.zeros(n, dtype=np.int64),
        ww_count=np.zeros(n, dtype=np.int64),
        last_ww=np.full(n, -1, dtype=np.int64),
        ww_times=[[] for _ in range(n)],
        last_beta=np.ones(n),
        edges=np.zeros((n, n)),
        sigma=float(sigma0), mu=float(mu0), lam=float(lam0),
        s_max=float(s_max0),
        obs_shirk=nanvec(), obs_coop=nanvec(), output_mean=nanvec(),
    )
    state.group_masks = [vtypes == g for g in range(4)]
    return state


def _group_means(state: SimState, values: np.ndarray) -> tuple[float, ...]:
    out = []
    for mask in state.group_masks:
        vals = values[mask]
        good = ~np.isnan(vals)
        out.append(float(vals[good].mean()) if good.any() else math.nan)
    return tuple(out)


def _snapshot(state: SimState, t: int, *, profitability: float, prof_group,
              verbal: int, written: int, output_total: float, reward_total: float,
              ego: float, interactions: float, outputs=None, rewards=None,
              record_agents: bool = False) -> DayRecord:
    homs = metrics.homophily_all(state.edges, state.vtypes)
    good = ~np.isnan(homs)
    sat_group = _group_means(state, state.satisfaction)
    agents = None
    if record_agents:
        agents = AgentDay(
            s=state.s.copy(), c=state.c.copy(), p=state.p.copy(),
            satisfaction=state.satisfaction.copy(),
            output=outputs.copy() if outputs is not None else np.full(state.cfg.n, np.nan),
            reward=rewards.copy() if rewards is not None else np.full(state.cfg.n, np.nan),
        )
    return DayRecord(
        t=t, sigma=state.sigma, mu=state.mu, lam=state.lam,
        s_max=state.s_max, ego=ego,
        profitability=profitability, profitability_group=tuple(prof_group),
        satisfaction_mean=float(state.satisfaction.mean()),
        satisfaction_group=sat_group,
        homophily_mean=float(homs[good].mean()) if good.any() else math.nan,
        homophily_group=_group_means(state, homs),
        verbal_warnings=verbal, written_warnings=written,
        output_total=output_total, reward_total=reward_total,
        obs_shirk=float(state.obs_shirk[t]), obs_coop=float(state.obs_coop[t]),
        interactions_per_agent=interactions,
        mean_shirk=float(state.s.mean()), mean_coop=float(state.c.mean()),
        mean_indiv=float(state.p.mean()),
        agents=agents,
    )


def step_day(state: SimState, t: int, rng: np.random.Generator,
             record_agents: bool = False) -> DayRecord:
    """Advance the firm by one workday; t must be >= 1."""
    cfg = state.cfg
    n = cfg.n

    # 1. recovery
    state.satisfaction = wellbeing.recover_satisfaction(state.satisfaction, state.base_sat)

    # 2. caps and allocation
    caps = np.rint(rng.uniform(cfg.cap_dist[0], cfg.cap_dist[1], n)).astype(np.int64)
    beta = behavior.beta_factor(state.ww_count, state.last_ww, t)
    state.last_beta = np.asarray(beta, dtype=float)
    phi = behavior.autonomy_offset(state.vtypes, state.sigma, state.s_norm, state.delta)
    shift_c = (behavior.cooperativeness_offset(state.vtypes, state.c_norm, state.delta)
               + behavior.rewards_offset(state.vtypes, state.lam, state.mu, state.c_norm,
                                         state.delta, mu_scaling=cfg.rho_mu_scaling))
    u_s = rng.random(n)
    u_c = rng.random(n)
    state.prev_s, state.prev_c = state.s, state.c
    state.s, state.c, state.p = behavior.draw_allocations(
        state.s_norm, state.c_norm, state.delta, beta, phi, shift_c, cfg.tau, u_s, u_c)

    # 3. interactions and edge update
    sim = network.similarity_matrix(state.s, state.c, state.p, cfg.tau)
    draws = network.symmetrize_draws(rng.random((n, n)))
    keys = rng.random((n, n))
    cand = network.candidate_matrix(state.edges, keys)
    order = rng.permutation(n).astype(np.int64)
    delta_e = np.zeros((n, n))
    pair_count = kernels.interaction_walk(order, cand, np.ascontiguousarray(sim),
                                          draws, caps, delta_e)
    state.edges = network.update_edges(state.edges, delta_e, t)

    # 4. norm updates
    if cfg.norm_behavior_lag == "current":
        xs, xc = state.s, state.c
    else:
        xs, xc = state.prev_s, state.prev_c
    state.s_norm, state.c_norm = network.update_norms_all(
        state.s_norm, state.c_norm, delta_e, xs, xc, cfg.h)

    # 5. monitoring (threshold first: today's check uses today's threshold,
    # which is driven by yesterday's observation). The adaptive threshold
    # belongs to the endogenous-management machinery; the constant-strategy
    # baseline keeps the fixed tau/10 value.
    if cfg.endogenous_management:
        state.s_max = management.update_max_shirking(
            state.s_max, float(state.obs_shirk[t - 1]), cfg.h)
    ego = management.expected_group_output(state.s_max, cfg.kappa, cfg.tau)
    etc = management.draw_monitoring_set(state.sigma, n, rng,
                                         rounding=cfg.monitoring_rounding)
    verbal = written = 0
    if etc.size:
        caught = etc[state.s[etc] > state.s_max]
        if caught.size:
            state.catch_count[caught] += 1
            state.satisfaction[caught] *= 1.0 - cfg.eta
            verbal = int(caught.size)
            third = caught[state.catch_count[caught] == 3]
            if third.size:
                state.satisfaction[third] *= 1.0 - 3.0 * cfg.eta
                state.ww_count[third] += 1
                state.last_ww[third] = t
                state.catch_count[third] = 0
                written = int(third.size)
                for i in third:
                    state.ww_times[int(i)].append(t)
        denom = float(etc.size) if cfg.obs_mean_divisor == "etc" else float(n)
        state.obs_shirk[t] = state.s[etc].sum() / denom
        state.obs_coop[t] = state.c[etc].sum() / denom

    # 6. economy (productivity from post-shock satisfaction)
    pi = wellbeing.productivity(state.satisfaction, cfg.s_eff)
    cbar = economy.mean_coop_others(state.c)
    outputs = economy.individual_output(state.p, cbar, cfg.kappa, pi, cfg.wage_hourly)
    state.output_mean[t] = outputs.mean()
    bons = economy.bonuses(outputs, state.lam)
    rewards = economy.reward(cfg.base_wage_daily, state.mu, bons)
    output_total = float(outputs.sum())
    reward_total = float(rewards.sum())
    prof = output_total / reward_total
    prof_group = tuple(
        float(outputs[m].sum() / rewards[m].sum()) for m in state.group_masks)

    # 7. strategy update
    if cfg.endogenous_management and t % cfg.suf == 0:
        x = cfg.lookback
        lo = max(1, t - x)
        window = management.StrategyWindow(
            window_len=x,
            obs_shirk=state.obs_shirk[lo:t],
            obs_coop=state.obs_coop[lo:t],
            output=state.output_mean[lo:t],
        )
        snapshot = ManagementState(sigma=state.sigma, mu=state.mu, lam=state.lam,
                                   s_max=state.s_max)
        new = management.update_strategy(snapshot, window, cfg.sui, ego,
                                         cfg.kappa, cfg.tau,
                                         sigma_guard=cfg.sigma_guard)
        if new != (state.sigma, state.mu, state.lam):
            state.sigma, state.mu, state.lam = new
            state.base_sat = wellbeing.base_satisfaction(state.vtypes, state.sigma,
                                                         state.mu, state.lam)

    # 8. snapshot
    return _snapshot(
        state, t, profitability=prof, prof_group=prof_group, verbal=verbal,
        written=written, output_total=output_total, reward_total=reward_total,
        ego=ego, interactions=2.0 * pair_count / n, outputs=outputs,
        rewards=rewards, record_agents=record_agents,
    )


class _ColumnStore:
    def __init__(self, steps: int, record_agents: bool, n: int):
        self.cols = {name: np.full(steps + 1, np.nan) for name in all_column_names()}
        self.agent_cols = None
        if record_agents:
            self.agent_cols = {k: np.full((steps + 1, n), np.nan) for k in AGENT_COLUMNS}

    def put(self, rec: DayRecord) -> None:
        t = rec.t
        c = self.cols
        c["t"][t] = rec.t
        c["sigma"][t] = rec.sigma
        c["mu"][t] = rec.mu
        c["lambda"][t] = rec.lam
        c["s_max"][t] = rec.s_max
        c["ego"][t] = rec.ego
        c["profitability"][t] = rec.profitability
        c["satisfaction_mean"][t] = rec.satisfaction_mean
        c["homophily_mean"][t] = rec.homophily_mean
        c["verbal_warnings"][t] = rec.verbal_warnings
        c["written_warnings"][t] = rec.written_warnings
        c["output_total"][t] = rec.output_total
        c["reward_total"][t] = rec.reward_total
        c["obs_shirk"][t] = rec.obs_shirk
        c["obs_coop"][t] = rec.obs_coop
        c["interactions_per_agent"][t] = rec.interactions_per_agent
        c["mean_shirk"][t] = rec.mean_shirk
        c["mean_coop"][t] = rec.mean_coop
        c["mean_indiv"][t] = rec.mean_indiv
        for base, values in (("profitability", rec.profitability_group),
                             ("satisfaction", rec.satisfaction_group),
                             ("homophily", rec.homophily_group)):
            for g, v in zip(TYPE_NAMES, values):
                c[f"{base}_{g}"][t] = v
        if self.agent_cols is not None and rec.agents is not None:
            for k in AGENT_COLUMNS:
                self.agent_cols[k][t] = getattr(rec.agents, k)


def run_scenario(cfg: SimConfig, rng: np.random.Generator | None = None,
                 replicate: int = 0, record_agents: bool = False) -> RunResult:
    """Run one replicate of a scenario; rejects invalid configs."""
    problems = validate_config(cfg)
    if problems:
        raise ValueError("invalid config: " + "; ".join(problems))
    if rng is None:
        rng = seed_replicate(cfg.master_seed, replicate)

    state = init_state(cfg, rng)
    store = _ColumnStore(cfg.steps, record_agents, cfg.n)
    initial = _snapshot(state, 0, profitability=math.nan,
                        prof_group=(math.nan,) * 4, verbal=0, written=0,
                        output_total=math.nan, reward_total=math.nan,
                        ego=management.expected_group_output(state.s_max, cfg.kappa, cfg.tau),
                        interactions=math.nan, record_agents=record_agents)
    store.put(initial)
    for t in range(1, cfg.steps + 1):
        store.put(step_day(state, t, rng, record_agents=record_agents))
    store.cols["cumulated_profitability"] = metrics.cumulated_profitability(
        store.cols["output_total"], store.cols["reward_total"])
    return RunResult(config=cfg, replicate=replicate, columns=store.cols,
                     agent_columns=store.agent_cols, final_state=state)


def _worker(args) -> RunResult:
    cfg, k = args
    return run_scenario(cfg, seed_replicate(cfg.master_seed, k), replicate=k)


def run_replicates(cfg: SimConfig, threads: int = 1) -> AggregateResult:
    """Run cfg.replicates uniquely seeded replicates and their mean aggregate.

    Results and the aggregate are independent of `threads`: replicate k
    always uses stream (master_seed, k) and outputs are reduced in index
    order.
    """
    problems = validate_config(cfg)
    if problems:
        raise ValueError("invalid config: " + "; ".join(problems))
    jobs = [(cfg, k) for k in range(cfg.replicates)]
    if threads > 1 and cfg.replicates > 1:
        with ProcessPoolExecutor(max_workers=min(threads, cfg.replicates)) as pool:
            runs = list(pool.map(_worker, jobs))
    else:
        runs = [_worker(job) for job in jobs]
    mean = metrics.aggregate_replicates(runs)
    return AggregateResult(config=cfg, runs=runs, mean=mean)
