"""Platform profits and the advertising games between the two platforms.

Profits follow the focal-platform selection: platform 1 keeps the larger
interior share while ``-lam/2 <= a1 - a2 <= 1/8 - lam/2``, holds the whole
market below that window and loses it above.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Literal

import numpy as np

from .model import AdProfile, ModelError, ModelParams

Branch = Literal["interior", "p1_monopoly", "p2_monopoly"]
Concept = Literal["nash", "stackelberg_leader1"]

DEFAULT_GRID_STEP = 1e-4
DEFAULT_A_MAX = 1.0
DEVIATION_TOL = 1e-9
# Gaps this close to a branch seam count as on it (seams belong to the interior branch).
SEAM_TOL = 1e-12


class InconsistencyError(RuntimeError):
    """A closed-form game solution failed its own numerical verification."""

    def __init__(self, message: str, solution: GameSolution) -> None:
        super().__init__(message)
        self.solution = solution


def profit_branch(params: ModelParams, gap: float) -> Branch:
    if gap < -params.half_lam - SEAM_TOL:
        return "p1_monopoly"
    if gap > params.interior_ceiling + SEAM_TOL:
        return "p2_monopoly"
    return "interior"


@dataclass(frozen=True)
class ProfitOutcome:
    pi1: float
    pi2: float
    branch: Branch

    def of(self, platform: int) -> float:
        return self.pi1 if platform == 1 else self.pi2

    def to_dict(self) -> dict[str, Any]:
        return {"pi1": self.pi1, "pi2": self.pi2, "branch": self.branch}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ProfitOutcome:
        return cls(float(data["pi1"]), float(data["pi2"]), data["branch"])


def profits(params: ModelParams, ads: AdProfile) -> ProfitOutcome:
    """Profits ``a_j * n_j`` under the focal equilibrium shares."""
    branch = profit_branch(params, ads.gap)
    if branch == "p1_monopoly":
        return ProfitOutcome(ads.a1, 0.0, branch)
    if branch == "p2_monopoly":
        return ProfitOutcome(0.0, ads.a2, branch)
    # u can dip a few ulps below zero on the upper seam.
    root = math.sqrt(max(0.0, 1.0 - 8.0 * (ads.gap + params.half_lam)))
    return ProfitOutcome(ads.a1 * (3.0 + root) / 4.0, ads.a2 * (1.0 - root) / 4.0, branch)


def profit_arrays(params: ModelParams, a1: Any, a2: Any) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized ``profits`` over broadcastable arrays of ad levels."""
    a1, a2 = np.broadcast_arrays(np.asarray(a1, dtype=float), np.asarray(a2, dtype=float))
    gap = a1 - a2
    root = np.sqrt(np.clip(1.0 - 8.0 * (gap + params.half_lam), 0.0, None))
    p1_mono = gap < -params.half_lam - SEAM_TOL
    p2_mono = gap > params.interior_ceiling + SEAM_TOL
    pi1 = np.where(p1_mono, a1, np.where(p2_mono, 0.0, a1 * (3.0 + root) / 4.0))
    pi2 = np.where(p1_mono, 0.0, np.where(p2_mono, a2, a2 * (1.0 - root) / 4.0))
    return pi1, pi2


@dataclass(frozen=True)
class FocCandidate:
    """Joint solution of both platforms' interior first-order conditions."""

    ads: AdProfile
    c_star: float


def interior_foc_candidate(params: ModelParams) -> FocCandidate:
    root = math.sqrt(9.0 - 20.0 * params.lam)
    c_star = (-2.0 + root) / 5.0
    a1 = (11.0 * root - 20.0 * params.lam - 17.0) / 100.0
    a2 = (9.0 * root + 20.0 * params.lam - 23.0) / 100.0
    return FocCandidate(AdProfile(a1, a2), c_star)


@dataclass(frozen=True)
class BestResponse:
    """Best reply of ``mover`` to a fixed opponent ad level.

    When ``attained`` is False, ``ad`` and ``profit`` describe a supremum
    approached from inside an open branch; no feasible ad earns ``profit``.
    """

    mover: int
    ad: float
    profit: float
    attained: bool
    branch: Branch


def _interior_foc_ads(params: ModelParams, mover: int, opponent_ad: float) -> list[float]:
    """Stationary points of the mover's interior-branch profit."""
    if mover == 1:
        # With s = sqrt(u): 3 s^2 + 6 s - k = 0, k = 1 + 8 a2 - 4 lam.
        k = 1.0 + 8.0 * opponent_ad - 4.0 * params.lam
        s = -1.0 + math.sqrt(1.0 + k / 3.0)
        return [(k - s * s) / 8.0]
    # 3 s^2 - 2 s + (8 x - 1) = 0 with x = a1 + lam/2; one root is a minimum.
    x = opponent_ad + params.half_lam
    disc = 4.0 - 24.0 * x
    if disc < 0.0:
        return []
    out = []
    for s in ((1.0 + math.sqrt(disc)) / 3.0, (1.0 - math.sqrt(disc)) / 3.0):
        if s >= 0.0:
            out.append((s * s - 1.0 + 8.0 * x) / 8.0)
    return out


def best_response(
    params: ModelParams,
    mover: int,
    opponent_ad: float,
    grid_step: float | None = DEFAULT_GRID_STEP,
    a_max: float = DEFAULT_A_MAX,
) -> BestResponse:
    """Maximize the mover's profit over ``[0, a_max]``.

    Candidates are the interior stationary points, every branch seam and,
    unless ``grid_step`` is None, a uniform grid. Platform 2's profit on the
    branch where it takes the whole market rises toward a seam it cannot
    reach; if that supremum beats every attained value it is reported with
    ``attained=False``.
    """
    if mover not in (1, 2):
        raise ModelError(f"mover must be 1 or 2, got {mover!r}")
    if opponent_ad < 0:
        raise ModelError(f"opponent ad level must be nonnegative, got {opponent_ad!r}")
    if mover == 1:
        seams = [opponent_ad - params.half_lam, opponent_ad + params.interior_ceiling]
    else:
        seams = [opponent_ad - params.interior_ceiling, opponent_ad + params.half_lam]
    candidates = [0.0, a_max, *seams, *_interior_foc_ads(params, mover, opponent_ad)]
    ads = np.array([a for a in candidates if 0.0 <= a <= a_max])
    if grid_step is not None:
        n = int(round(a_max / grid_step))
        ads = np.concatenate([ads, np.linspace(0.0, a_max, n + 1)])
    if mover == 1:
        values = profit_arrays(params, ads, opponent_ad)[0]
    else:
        values = profit_arrays(params, opponent_ad, ads)[1]
    best = float(values.max())
    # Lowest ad among the maximizers keeps the choice deterministic.
    ad = float(ads[values == best].min())
    branch = profit_branch(params, opponent_ad - ad if mover == 2 else ad - opponent_ad)
    if mover == 2:
        sup = opponent_ad - params.interior_ceiling
        if 0.0 < sup <= a_max and sup > best:
            return BestResponse(2, sup, sup, False, "p2_monopoly")
    return BestResponse(mover, ad, best, True, branch)


@dataclass(frozen=True)
class GameSolution:
    concept: Concept
    lam: float
    ads: AdProfile
    profits: ProfitOutcome
    verification: dict[str, Any] = field(default_factory=dict)

    @property
    def a1_star(self) -> float:
        return self.ads.a1

    @property
    def a2_star(self) -> float:
        return self.ads.a2

    @property
    def verified(self) -> bool:
        return (
            self.verification.get("p1_deviation_gap", 0.0) >= -DEVIATION_TOL
            and self.verification.get("p2_deviation_gap", 0.0) >= -DEVIATION_TOL
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "concept": self.concept,
            "lambda": self.lam,
            "a1": self.ads.a1,
            "a2": self.ads.a2,
            "pi1": self.profits.pi1,
            "pi2": self.profits.pi2,
            "branch": self.profits.branch,
            "verification": dict(self.verification),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> GameSolution:
        ads = AdProfile(float(data["a1"]), float(data["a2"]))
        return cls(
            concept=data["concept"],
            lam=float(data["lambda"]),
            ads=ads,
            profits=ProfitOutcome(float(data["pi1"]), float(data["pi2"]), data["branch"]),
            verification=dict(data.get("verification", {})),
        )


def blockade_profile(params: ModelParams) -> AdProfile:
    """``(1/8 - lam/2, 0)``: the largest ad level at which platform 1 keeps platform 2 out."""
    return AdProfile(params.interior_ceiling, 0.0)


def _deviation_gaps(
    params: ModelParams, ads: AdProfile, grid_step: float | None, a_max: float
) -> dict[str, Any]:
    base = profits(params, ads)
    br1 = best_response(params, 1, ads.a2, grid_step, a_max)
    br2 = best_response(params, 2, ads.a1, grid_step, a_max)
    return {
        "p1_deviation_gap": base.pi1 - br1.profit,
        "p2_deviation_gap": base.pi2 - br2.profit,
        "p1_best_deviation": br1.ad,
        "p2_best_deviation": br2.ad,
        "p2_deviation_attained": br2.attained,
    }


def nash_solve(
    params: ModelParams,
    grid_step: float | None = DEFAULT_GRID_STEP,
    a_max: float = DEFAULT_A_MAX,
    strict: bool = True,
) -> GameSolution:
    """Blockade profile as a simultaneous-move equilibrium, with deviation checks.

    The verification also records whether the joint interior first-order
    candidate survives platform 2's deviation to the market-capturing branch.

    Raises:
        InconsistencyError: if ``strict`` and either platform gains more than
            ``DEVIATION_TOL`` by deviating. The unverified solution is
            attached to the exception.
    """
    ads = blockade_profile(params)
    verification = _deviation_gaps(params, ads, grid_step, a_max)
    cand = interior_foc_candidate(params).ads
    cand_br2 = best_response(params, 2, cand.a1, grid_step, a_max)
    cand_gap = profits(params, cand).pi2 - cand_br2.profit
    verification["foc_candidate_p2_deviation_gap"] = cand_gap
    verification["foc_candidate_rejected"] = cand_gap < -DEVIATION_TOL
    solution = GameSolution("nash", params.lam, ads, profits(params, ads), verification)
    if strict and not solution.verified:
        raise InconsistencyError(
            "blockade profile admits a profitable deviation: "
            f"p1 gap {verification['p1_deviation_gap']:.6g} "
            f"(deviate to {verification['p1_best_deviation']:.6g}), "
            f"p2 gap {verification['p2_deviation_gap']:.6g} "
            f"(deviate to {verification['p2_best_deviation']:.6g})",
            solution,
        )
    return solution


def leader_payoff(
    params: ModelParams,
    a1: float,
    grid_step: float | None = None,
    a_max: float = DEFAULT_A_MAX,
) -> tuple[float, BestResponse]:
    """Platform 1's payoff when platform 2 best-responds to ``a1``.

    If platform 2's best reply is the unattained capture of the whole market,
    platform 1 is left with nothing.
    """
    br = best_response(params, 2, a1, grid_step, a_max)
    if not br.attained:
        return 0.0, br
    return profits(params, AdProfile(a1, br.ad)).pi1, br


def stackelberg_solve(
    params: ModelParams,
    grid_step: float | None = DEFAULT_GRID_STEP,
    a_max: float = DEFAULT_A_MAX,
) -> GameSolution:
    """Platform 1 commits first; returns the blockade profile with diagnostics.

    ``p1_deviation_gap`` compares the leader's closed-form payoff with the
    best payoff found over a grid of commitments, each met by platform 2's
    exact best reply. ``p2_deviation_gap`` checks that ``a2 = 0`` is a best
    reply to the committed ad level.
    """
    ads = blockade_profile(params)
    outcome = profits(params, ads)
    step = DEFAULT_GRID_STEP if grid_step is None else grid_step
    n = int(round(a_max / step))
    best_a1, best_payoff = ads.a1, outcome.pi1
    for a1 in np.linspace(0.0, a_max, n + 1):
        payoff, _ = leader_payoff(params, float(a1), None, a_max)
        if payoff > best_payoff:
            best_a1, best_payoff = float(a1), payoff
    br2 = best_response(params, 2, ads.a1, grid_step, a_max)
    verification = {
        "p1_deviation_gap": outcome.pi1 - best_payoff,
        "p2_deviation_gap": outcome.pi2 - br2.profit,
        "p1_best_deviation": best_a1,
        "p2_best_deviation": br2.ad,
        "p2_deviation_attained": br2.attained,
    }
    solution = GameSolution("stackelberg_leader1", params.lam, ads, outcome, verification)
    nash = nash_solve(params, grid_step, a_max, strict=False)
    if nash.ads != ads:
        raise InconsistencyError("leader commitment differs from the simultaneous-move profile", solution)
    return solution
