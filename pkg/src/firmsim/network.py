"""Similarity-based daily interactions and diffusion of behavioral norms.

Agents meet with a probability given by how similarly they split their day;
met pairs strengthen a long-run edge (a running average of daily interaction
weights), and each agent's perceived shirking/cooperation norms drift toward
the edge-weighted behavior of the day's partners.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import TimeAllocation


@dataclass
class EdgeMatrix:
    """Directed weighted long-run interaction history; zero diagonal."""

    weights: np.ndarray

    def validate(self) -> None:
        w = self.weights
        assert w.ndim == 2 and w.shape[0] == w.shape[1]
        assert np.all(np.diagonal(w) == 0.0)
        assert np.all((w >= 0.0) & (w <= 1.0))


@dataclass
class InteractionLog:
    """One day's symmetric interaction weights (0 means no interaction)."""

    delta_e: np.ndarray

    def interacted(self, i: int, j: int) -> bool:
        return self.delta_e[i, j] > 0.0

    def partners(self, i: int) -> np.ndarray:
        return np.nonzero(self.delta_e[i] > 0.0)[0]

    @property
    def pair_count(self) -> int:
        return int(np.count_nonzero(self.delta_e) // 2)


def activity_difference(a_i: TimeAllocation, a_j: TimeAllocation, tau: float) -> float:
    """Summed absolute allocation gap relative to the shared time budget."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    return (abs(a_i.s - a_j.s) + abs(a_i.c - a_j.c) + abs(a_i.p - a_j.p)) / tau


def activity_similarity(ad: float) -> float:
    """Interaction probability; clamped at 0 since the gap can exceed 1."""
    return max(0.0, 1.0 - ad)


def similarity_matrix(s: np.ndarray, c: np.ndarray, p: np.ndarray, tau: float) -> np.ndarray:
    """Pairwise similarity of today's allocations."""
    diff = (np.abs(s[:, None] - s[None, :])
            + np.abs(c[:, None] - c[None, :])
            + np.abs(p[:, None] - p[None, :])) / tau
    return np.clip(1.0 - diff, 0.0, None)


def interaction_candidates(i: int, edges: np.ndarray, rng: np.random.Generator,
                           keys: np.ndarray | None = None) -> list[int]:
    """Order in which agent i checks others for interaction.

    Known peers first, by descending edge weight with uniformly random
    tie-breaks, then the still-unknown agents in uniformly random order.
    """
    n = edges.shape[0]
    if keys is None:
        keys = rng.random(n)
    others = [j for j in range(n) if j != i]
    return sorted(others, key=lambda j: (-edges[i, j], keys[j]))


def candidate_matrix(edges: np.ndarray, keys: np.ndarray) -> np.ndarray:
    """All agents' candidate orderings at once (row i = agent i's walk).

    Two stable argsorts compose into a lexicographic sort by
    (descending edge weight, random key); the own-agent diagonal is forced
    to the end and sliced off.
    """
    work = edges.copy()
    np.fill_diagonal(work, -1.0)  # sorts strictly last under -weight
    by_key = np.argsort(keys, axis=1, kind="stable")
    primary = np.take_along_axis(-work, by_key, axis=1)
    by_weight = np.argsort(primary, axis=1, kind="stable")
    order = np.take_along_axis(by_key, by_weight, axis=1)
    return np.ascontiguousarray(order[:, :-1], dtype=np.int64)


def symmetrize_draws(full: np.ndarray) -> np.ndarray:
    """One symmetric uniform draw per unordered pair (upper triangle wins)."""
    upper = np.triu(np.ones_like(full, dtype=bool), k=1)
    return np.where(upper, full, full.T)


def run_interaction_phase(allocs, edges: np.ndarray, caps: np.ndarray,
                          rng: np.random.Generator, tau: float) -> InteractionLog:
    """Full daily pairing: draws, orderings, and the capped walk.

    Randomness is consumed in a fixed order (pair draws, tie-break keys,
    processing permutation) so replays are exact. `allocs` may be a list of
    TimeAllocation or a (s, c, p) array triple.
    """
    if isinstance(allocs, tuple):
        s, c, p = (np.asarray(x, dtype=float) for x in allocs)
    else:
        s = np.array([a.s for a in allocs])
        c = np.array([a.c for a in allocs])
        p = np.array([a.p for a in allocs])
    n = s.size
    sim = similarity_matrix(s, c, p, tau)
    draws = symmetrize_draws(rng.random((n, n)))
    keys = rng.random((n, n))
    cand = candidate_matrix(edges, keys)
    order = rng.permutation(n).astype(np.int64)
    delta_e = np.zeros((n, n))
    kernels.interaction_walk(order, cand, np.ascontiguousarray(sim), draws,
                             np.asarray(caps, dtype=np.int64), delta_e)
    return InteractionLog(delta_e)


def update_edges(edges: np.ndarray, log, t: int) -> np.ndarray:
    """Running average of daily interaction weights; decays when idle."""
    delta_e = log.delta_e if isinstance(log, InteractionLog) else log
    if t == 0:
        return edges.copy()
    return ((t - 1) * edges + delta_e) / t


def update_norms(emp, log: InteractionLog, current, previous, h: float,
                 lag: str = "current") -> tuple[float, float]:
    """One agent's norm update from today's partners.

    Norms stay put without any interaction; otherwise they move a step of
    size h toward the interaction-weighted mean of partner behavior (today's
    by default, yesterday's with lag="previous").
    """
    partners = log.partners(emp.id)
    if partners.size == 0:
        return emp.s_norm, emp.c_norm
    behav = current if lag == "current" else previous
    w = log.delta_e[emp.id, partners]
    s_j = np.array([behav[j].s for j in partners])
    c_j = np.array([behav[j].c for j in partners])
    s_new = (1.0 - h) * emp.s_norm + h * float(w @ s_j) / float(w.sum())
    c_new = (1.0 - h) * emp.c_norm + h * float(w @ c_j) / float(w.sum())
    return s_new, c_new


def update_norms_all(s_norm, c_norm, delta_e, s_behav, c_behav, h: float):
    """Vectorized norm update for every agent at once."""
    w_sum = delta_e.sum(axis=1)
    has = w_sum > 0.0
    s_new = s_norm.copy()
    c_new = c_norm.copy()
    if np.any(has):
        s_new[has] = (1.0 - h) * s_norm[has] + h * (delta_e @ s_behav)[has] / w_sum[has]
        c_new[has] = (1.0 - h) * c_norm[has] + h * (delta_e @ c_behav)[has] / w_sum[has]
    return s_new, c_new
