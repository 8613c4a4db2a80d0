"""Threshold allocations, the expected-to-realized share map and its iteration."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Any, Literal

from .model import EMPTY, AdProfile, ModelError, ModelParams, interval_avg_quality

Dominant = Literal[1, 2, "split"]

DEFAULT_TOL = 1e-12
DEFAULT_MAX_STEPS = 10_000


class SingularShareError(ModelError):
    """The share map is undefined at an expected share of exactly 1/2."""

    def __init__(self, message: str, step: int | None = None) -> None:
        super().__init__(message)
        self.step = step


@dataclass(frozen=True)
class ThresholdAllocation:
    """A cutoff allocation of user types between the two platforms.

    The dominant platform holds the upper interval ``[beta_tilde, 1]``; the
    other holds ``[0, beta_tilde]``.
    """

    beta_tilde: float
    dominant: Dominant
    share1: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.share1 <= 1.0:
            raise ModelError(f"share1 must lie in [0, 1], got {self.share1!r}")
        if not 0.0 <= self.beta_tilde <= 0.5:
            raise ModelError(f"beta_tilde must lie in [0, 1/2], got {self.beta_tilde!r}")
        expected = {1: 1.0 - self.beta_tilde, 2: self.beta_tilde, "split": 0.5}.get(self.dominant)
        if expected is None:
            raise ModelError(f"dominant must be 1, 2 or 'split', got {self.dominant!r}")
        if abs(expected - self.share1) > 1e-12:
            raise ModelError(
                f"share1={self.share1!r} inconsistent with cutoff {self.beta_tilde!r} "
                f"and dominant={self.dominant!r}"
            )

    @classmethod
    def from_share(cls, share1: float) -> ThresholdAllocation:
        if share1 > 0.5:
            return cls(1.0 - share1, 1, share1)
        if share1 < 0.5:
            return cls(share1, 2, share1)
        return cls(0.5, "split", 0.5)

    @property
    def share2(self) -> float:
        return 1.0 - self.share1

    def interval(self, platform: int) -> tuple[float, float]:
        """Types ``(lo, hi)`` held by ``platform``."""
        if self.dominant == "split":
            raise SingularShareError("split allocation has no dominant interval")
        upper = (self.beta_tilde, 1.0)
        lower = (0.0, self.beta_tilde)
        return upper if platform == self.dominant else lower

    def to_dict(self) -> dict[str, Any]:
        return {"beta_tilde": self.beta_tilde, "dominant": self.dominant, "share1": self.share1}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ThresholdAllocation:
        return cls(float(data["beta_tilde"]), data["dominant"], float(data["share1"]))


def _clamp(x: float) -> float:
    return min(1.0, max(0.0, x))


def gamma_map(params: ModelParams, ads: AdProfile, expected_share1: float) -> float:
    """Realized share of platform 1 given its expected share.

    Uses the closed form obtained for the affine quality schedule, where the
    lower-interval platform always has average quality higher by ``lam/2``.
    """
    n = expected_share1
    if not 0.0 <= n <= 1.0:
        raise ModelError(f"expected share must lie in [0, 1], got {n!r}")
    if n == 0.0:
        return 0.0
    if n == 1.0:
        return 1.0
    if n == 0.5:
        raise SingularShareError("expected share of exactly 1/2 is singular")
    diff = ads.a2 - ads.a1
    if n < 0.5:
        return _clamp((-params.half_lam - diff) / (2.0 * n - 1.0))
    return _clamp(1.0 - (params.half_lam - diff) / (2.0 * n - 1.0))


def realized_allocation(
    params: ModelParams, ads: AdProfile, expected: ThresholdAllocation
) -> ThresholdAllocation:
    """Best-response allocation of all types to an expected allocation.

    Computes average qualities of the expected user sets and finds the single
    indifferent type; the platform with the larger expected share attracts
    the types above it.
    """
    n1 = expected.share1
    if n1 == 0.5:
        raise SingularShareError("expected share of exactly 1/2 is singular")
    n2 = 1.0 - n1
    q1 = EMPTY if n1 == 0.0 else interval_avg_quality(params, *expected.interval(1))
    q2 = EMPTY if n2 == 0.0 else interval_avg_quality(params, *expected.interval(2))
    if q1 is EMPTY:
        return ThresholdAllocation.from_share(0.0)
    if q2 is EMPTY:
        return ThresholdAllocation.from_share(1.0)
    # Utility advantage of platform 1 is intercept + slope * beta.
    intercept = (q1 - ads.a1) - (q2 - ads.a2)
    slope = n1 - n2
    indifferent = _clamp(-intercept / slope)
    share1 = 1.0 - indifferent if slope > 0 else indifferent
    return ThresholdAllocation.from_share(share1)


@dataclass
class IterationTrace:
    shares: list[float] = field(default_factory=list)
    converged: bool = False
    limit: float | None = None

    @property
    def steps(self) -> int:
        return len(self.shares) - 1

    def csv_rows(self) -> list[tuple[int, float]]:
        return list(enumerate(self.shares))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["step", "share1"])
        for step, share in self.csv_rows():
            writer.writerow([step, repr(float(share))])
        return buf.getvalue()

    def to_dict(self, params: ModelParams, ads: AdProfile) -> dict[str, Any]:
        return {
            "params": params.to_dict(),
            "ads": ads.to_dict(),
            "trace": list(self.shares),
            "converged": self.converged,
            "limit": self.limit,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> IterationTrace:
        return cls(
            shares=[float(s) for s in data["trace"]],
            converged=bool(data["converged"]),
            limit=None if data["limit"] is None else float(data["limit"]),
        )


def iterate_to_fixed_point(
    params: ModelParams,
    ads: AdProfile,
    initial_share1: float,
    tol: float = DEFAULT_TOL,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> IterationTrace:
    """Iterate the share map from ``initial_share1`` until successive shares agree.

    Raises:
        SingularShareError: if the orbit starts at or lands exactly on 1/2.
    """
    if tol <= 0:
        raise ModelError(f"tol must be positive, got {tol!r}")
    if initial_share1 == 0.5:
        raise SingularShareError("orbit starts at the singular share 1/2", step=0)
    trace = IterationTrace(shares=[initial_share1])
    current = initial_share1
    for step in range(1, max_steps + 1):
        try:
            nxt = gamma_map(params, ads, current)
        except SingularShareError:
            raise SingularShareError(
                f"orbit hit the singular share 1/2 at step {step - 1}", step=step - 1
            ) from None
        trace.shares.append(nxt)
        if abs(nxt - current) < tol:
            trace.converged = True
            trace.limit = nxt
            break
        current = nxt
    return trace
