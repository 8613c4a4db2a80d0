"""Finite-population check of the continuum allocation dynamics.

Populations are drawn with ``numpy.random.default_rng(seed)`` (PCG64). For a
fixed numpy version the stream, and so every output, is identical across
platforms.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .model import AdProfile, ModelError, ModelParams


@dataclass(frozen=True)
class AgentPopulation:
    betas: np.ndarray
    qualities: np.ndarray
    seed: int | None = None

    @property
    def size(self) -> int:
        return int(self.betas.size)


def sample_population(
    params: ModelParams, n: int, seed: int | None = 0, noise_halfwidth: float = 0.0
) -> AgentPopulation:
    """Draw ``n`` user types uniformly on [0, 1] with qualities around ``q(beta)``."""
    if n < 2:
        raise ModelError(f"population needs at least 2 agents, got {n!r}")
    if not 0.0 <= noise_halfwidth <= params.q_m - params.lam:
        raise ModelError(
            f"noise half-width must lie in [0, q_m - lambda] = [0, {params.q_m - params.lam}], "
            f"got {noise_halfwidth!r}"
        )
    rng = np.random.default_rng(seed)
    betas = rng.random(n)
    qualities = params.q_m - params.lam * betas
    if noise_halfwidth > 0.0:
        qualities = qualities + rng.uniform(-noise_halfwidth, noise_halfwidth, n)
    return AgentPopulation(betas, qualities, seed)


@dataclass
class SimulationResult:
    final_share1: float
    empirical_cutoff: float
    rounds: int
    converged: bool
    on_platform1: np.ndarray = field(repr=False)
    history: list[tuple[int, float, float | None, float | None, int]] = field(default_factory=list, repr=False)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["round", "share1", "Q1", "Q2", "switches"])
        for rnd, share, q1, q2, switches in self.history:
            writer.writerow([rnd, repr(share), "" if q1 is None else repr(q1), "" if q2 is None else repr(q2), switches])
        return buf.getvalue()

    def summary(self) -> dict[str, Any]:
        return {
            "final_share1": self.final_share1,
            "empirical_cutoff": self.empirical_cutoff,
            "rounds": self.rounds,
            "converged": self.converged,
        }


def _empirical_cutoff(betas: np.ndarray, on1: np.ndarray) -> float:
    """Midpoint between the two groups' adjacent types; 0 if one group is empty."""
    n1 = int(on1.sum())
    if n1 == 0 or n1 == on1.size:
        return 0.0
    upper = on1 if n1 * 2 > on1.size else ~on1
    return float((betas[~upper].max() + betas[upper].min()) / 2.0)


def run_dynamics(
    population: AgentPopulation,
    params: ModelParams,
    ads: AdProfile,
    initial_share1: float,
    max_rounds: int = 1000,
) -> SimulationResult:
    """Synchronous best-response rounds starting from a threshold allocation.

    The ``initial_share1`` fraction of agents with the highest ``beta`` start
    on platform 1. Each round every agent compares ``Q_j + beta * n_j - a_j``
    using last round's shares and mean qualities, staying put on exact ties.
    An empty platform loses to any platform with users.
    """
    if not 0.0 <= initial_share1 <= 1.0:
        raise ModelError(f"initial share must lie in [0, 1], got {initial_share1!r}")
    betas, quals = population.betas, population.qualities
    n = population.size
    order = np.argsort(betas, kind="stable")
    k = int(round(initial_share1 * n))
    on1 = np.zeros(n, dtype=bool)
    on1[order[n - k:]] = True

    history: list[tuple[int, float, float | None, float | None, int]] = []
    converged = False
    rounds = 0
    while rounds < max_rounds:
        rounds += 1
        n1 = int(on1.sum())
        share1 = n1 / n
        if n1 == 0:
            q1, q2 = None, float(quals.mean())
            new = np.zeros(n, dtype=bool)
        elif n1 == n:
            q1, q2 = float(quals.mean()), None
            new = np.ones(n, dtype=bool)
        else:
            q1, q2 = float(quals[on1].mean()), float(quals[~on1].mean())
            u1 = q1 + betas * share1 - ads.a1
            u2 = q2 + betas * (1.0 - share1) - ads.a2
            new = (u1 > u2) | ((u1 == u2) & on1)
        switches = int(np.count_nonzero(new != on1))
        history.append((rounds, share1, q1, q2, switches))
        on1 = new
        if switches == 0:
            converged = True
            break

    return SimulationResult(
        final_share1=float(on1.sum()) / n,
        empirical_cutoff=_empirical_cutoff(betas, on1),
        rounds=rounds,
        converged=converged,
        on_platform1=on1,
        history=history,
    )
