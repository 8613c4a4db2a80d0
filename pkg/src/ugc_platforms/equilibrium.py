"""Enumeration, stability classification and focal selection of equilibria."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Literal

from .allocation import ThresholdAllocation
from .model import AdProfile, ModelError, ModelParams

Kind = Literal["interior", "boundary"]
Stability = Literal["stable", "unstable"]

RESIDUAL_TOL = 1e-10
# Slack for c landing a few ulps past 1/8 when the gap is built from floats.
_DOUBLE_ROOT_SLACK = 1e-14


def orientation_constant(lam: float, gap: float, dominant: int) -> float:
    """Right-hand side ``c`` of the cutoff condition ``(1 - 2b) b = c``.

    ``gap`` is ``a1 - a2``. For platform 1 dominant, ``c = gap + lam/2``;
    for platform 2 dominant, ``c = -gap + lam/2``.
    """
    if dominant == 1:
        return gap + lam / 2.0
    if dominant == 2:
        return -gap + lam / 2.0
    raise ModelError(f"dominant must be 1 or 2, got {dominant!r}")


def cutoff_roots(c: float) -> tuple[float, ...]:
    """Roots of ``2 b**2 - b + c = 0`` lying strictly inside (0, 1/2).

    Two roots for 0 < c < 1/8, the double root 1/4 at c = 1/8, none otherwise.
    """
    if not 0.0 < c <= 0.125 + _DOUBLE_ROOT_SLACK:
        return ()
    disc = 1.0 - 8.0 * c
    if disc <= 0.0:
        return (0.25,)
    hi = (1.0 + math.sqrt(disc)) / 4.0
    # Product of roots is c/2; avoids cancellation in the small root.
    return (c / (2.0 * hi), hi)


def interior_window(lam: float, dominant: int) -> tuple[float, float]:
    """Range of ``a1 - a2`` admitting an interior equilibrium, as ``(lo, hi)``.

    For platform 1 dominant the window is ``(lo, hi]``; for platform 2 it is
    ``[lo, hi)``. Takes a bare ``lam`` so windows can be inspected outside the
    admissible parameter range.
    """
    if dominant == 1:
        return (-lam / 2.0, 0.125 - lam / 2.0)
    if dominant == 2:
        return (-0.125 + lam / 2.0, lam / 2.0)
    raise ModelError(f"dominant must be 1 or 2, got {dominant!r}")


def coexistence_window(lam: float) -> tuple[float, float] | None:
    """Gaps at which interior equilibria with either platform dominant both exist."""
    lo1, hi1 = interior_window(lam, 1)
    lo2, hi2 = interior_window(lam, 2)
    lo, hi = max(lo1, lo2), min(hi1, hi2)
    return (lo, hi) if lo < hi else None


def interior_cutoffs(params: ModelParams, ads: AdProfile, dominant: int) -> tuple[float, ...]:
    """Interior equilibrium cutoffs with ``dominant`` holding the upper interval."""
    return cutoff_roots(orientation_constant(params.lam, ads.gap, dominant))


def stability_multiplier(c: float, cutoff: float) -> float:
    """``|f'|`` of the cutoff iteration ``b -> c / (1 - 2b)`` at a fixed point.

    Evaluated as ``8c / (1 -+ sqrt(1 - 8c))**2`` for the smaller / larger root.
    """
    root = math.sqrt(max(0.0, 1.0 - 8.0 * c))
    denom = 1.0 + root if cutoff < 0.25 else 1.0 - root
    return 8.0 * c / denom**2


def classify_stability(
    params: ModelParams, ads: AdProfile, cutoff: float, dominant: int
) -> Stability:
    """Stable iff the cutoff iteration contracts at ``cutoff``.

    A neutral double root (multiplier exactly 1) counts as unstable.

    Raises:
        ModelError: if ``cutoff`` does not solve the cutoff condition.
    """
    c = orientation_constant(params.lam, ads.gap, dominant)
    residual = (1.0 - 2.0 * cutoff) * cutoff - c
    if not 0.0 < cutoff < 0.5 or abs(residual) > RESIDUAL_TOL:
        raise ModelError(f"{cutoff!r} is not an interior fixed point (residual {residual:.3g})")
    return "stable" if stability_multiplier(c, cutoff) < 1.0 else "unstable"


@dataclass(frozen=True)
class Equilibrium:
    kind: Kind
    allocation: ThresholdAllocation
    stability: Stability

    @property
    def dominant(self) -> int:
        return int(self.allocation.dominant)

    @property
    def share1(self) -> float:
        return self.allocation.share1

    @property
    def beta_tilde(self) -> float:
        return self.allocation.beta_tilde

    def share_of(self, platform: int) -> float:
        return self.share1 if platform == 1 else 1.0 - self.share1

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "dominant": self.dominant,
            "beta_tilde": self.beta_tilde,
            "share1": self.share1,
            "stability": self.stability,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Equilibrium:
        alloc = ThresholdAllocation(float(data["beta_tilde"]), int(data["dominant"]), float(data["share1"]))
        return cls(data["kind"], alloc, data["stability"])


@dataclass(frozen=True)
class EquilibriumSet:
    equilibria: tuple[Equilibrium, ...]
    selected: Equilibrium | None = None
    params: ModelParams | None = field(default=None, compare=False)
    ads: AdProfile | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.selected is not None:
            if self.selected not in self.equilibria or self.selected.stability != "stable":
                raise ModelError("selected equilibrium must be a stable member of the set")

    @property
    def stable(self) -> list[Equilibrium]:
        return [eq for eq in self.equilibria if eq.stability == "stable"]

    def to_dict(self) -> dict[str, Any]:
        return {
            "params": None if self.params is None else self.params.to_dict(),
            "ads": None if self.ads is None else self.ads.to_dict(),
            "equilibria": [eq.to_dict() for eq in self.equilibria],
            "selected": None if self.selected is None else self.selected.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> EquilibriumSet:
        return cls(
            equilibria=tuple(Equilibrium.from_dict(d) for d in data["equilibria"]),
            selected=None if data["selected"] is None else Equilibrium.from_dict(data["selected"]),
            params=None if data.get("params") is None else ModelParams.from_dict(data["params"]),
            ads=None if data.get("ads") is None else AdProfile.from_dict(data["ads"]),
        )


def boundary_equilibria(params: ModelParams, ads: AdProfile) -> list[Equilibrium]:
    """Both tipped allocations, each a fixed point of the share map.

    Platform 2's monopoly (share1 = 0) is stable once ``a1 - a2 >= lam/2``;
    platform 1's monopoly once ``a1 - a2 <= -lam/2``. At equality the share
    map sends every nearby expectation straight to the boundary.
    """
    gap = ads.gap
    p2_stable = gap >= params.half_lam
    p1_stable = gap <= -params.half_lam
    return [
        Equilibrium("boundary", ThresholdAllocation(0.0, 2, 0.0), "stable" if p2_stable else "unstable"),
        Equilibrium("boundary", ThresholdAllocation(0.0, 1, 1.0), "stable" if p1_stable else "unstable"),
    ]


def _interior_equilibria(params: ModelParams, ads: AdProfile, dominant: int) -> list[Equilibrium]:
    out = []
    for cutoff in interior_cutoffs(params, ads, dominant):
        share1 = 1.0 - cutoff if dominant == 1 else cutoff
        stability = classify_stability(params, ads, cutoff, dominant)
        out.append(Equilibrium("interior", ThresholdAllocation(cutoff, dominant, share1), stability))
    return out


def select_focal(equilibria: list[Equilibrium] | tuple[Equilibrium, ...], focal: int) -> Equilibrium | None:
    """The stable equilibrium giving ``focal`` its largest share; interior wins ties."""
    stable = [eq for eq in equilibria if eq.stability == "stable"]
    if not stable:
        return None
    return max(stable, key=lambda eq: (eq.share_of(focal), eq.kind == "interior"))


def solve_equilibria(params: ModelParams, ads: AdProfile, focal: int = 1) -> EquilibriumSet:
    if focal not in (1, 2):
        raise ModelError(f"focal platform must be 1 or 2, got {focal!r}")
    equilibria = (
        _interior_equilibria(params, ads, 1)
        + _interior_equilibria(params, ads, 2)
        + boundary_equilibria(params, ads)
    )
    return EquilibriumSet(tuple(equilibria), select_focal(equilibria, focal), params, ads)
