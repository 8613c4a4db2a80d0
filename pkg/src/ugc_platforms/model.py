"""Model primitives: parameters, ad profiles, the quality schedule and user utility.

User types are indexed by ``beta`` in [0, 1], the weight a user puts on
network size relative to content quality. Content quality contributed by a
type-``beta`` user is affine and decreasing, ``q(beta) = q_m - lam * beta``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import total_ordering
from typing import Any


class ModelError(ValueError):
    """Raised when model inputs fall outside their admissible domain."""


@total_ordering
class _EmptyPlatform:
    """Quality (and utility) of a platform with no users.

    Compares below every real number and equal only to itself. It supports
    no arithmetic, so it can't leak into numeric code by accident.
    """

    _instance: _EmptyPlatform | None = None

    def __new__(cls) -> _EmptyPlatform:
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __eq__(self, other: object) -> bool:
        return other is self

    def __lt__(self, other: object) -> bool:
        if other is self:
            return False
        if isinstance(other, (int, float)):
            return True
        return NotImplemented

    def __hash__(self) -> int:
        return hash("ugc_platforms.EMPTY")

    def __repr__(self) -> str:
        return "EMPTY"

    def __reduce__(self) -> str:
        return "EMPTY"


EMPTY = _EmptyPlatform()


def _check_unit(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ModelError(f"{name} must lie in [0, 1], got {value!r}")


@dataclass(frozen=True)
class ModelParams:
    """Structural constants of the model.

    Attributes:
        lam: Sensitivity of contributed quality to user type, 0 < lam < 1/4.
        q_m: Content quality of a type-0 user. Must exceed ``lam`` so that
            every type contributes positive quality.
    """

    lam: float
    q_m: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 < self.lam < 0.25:
            raise ModelError(f"lambda must satisfy 0 < lambda < 1/4, got {self.lam!r}")
        if not self.q_m > self.lam:
            raise ModelError(f"q_m must exceed lambda, got q_m={self.q_m!r}, lambda={self.lam!r}")

    @property
    def half_lam(self) -> float:
        return self.lam / 2.0

    @property
    def interior_ceiling(self) -> float:
        """Largest ad gap ``a1 - a2`` keeping platform 1 dominant (1/8 - lam/2)."""
        return 0.125 - self.lam / 2.0

    def to_dict(self) -> dict[str, Any]:
        return {"lambda": self.lam, "q_m": self.q_m}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ModelParams:
        return cls(lam=float(data["lambda"]), q_m=float(data.get("q_m", 1.0)))


@dataclass(frozen=True)
class AdProfile:
    """Advertising intensities of platforms 1 and 2."""

    a1: float
    a2: float

    def __post_init__(self) -> None:
        if not (self.a1 >= 0.0 and self.a2 >= 0.0):
            raise ModelError(f"ad levels must be nonnegative, got a1={self.a1!r}, a2={self.a2!r}")

    @property
    def gap(self) -> float:
        """``a1 - a2``."""
        return self.a1 - self.a2

    def of(self, platform: int) -> float:
        if platform == 1:
            return self.a1
        if platform == 2:
            return self.a2
        raise ModelError(f"platform must be 1 or 2, got {platform!r}")

    def with_ad(self, platform: int, value: float) -> AdProfile:
        if platform == 1:
            return AdProfile(value, self.a2)
        if platform == 2:
            return AdProfile(self.a1, value)
        raise ModelError(f"platform must be 1 or 2, got {platform!r}")

    def to_dict(self) -> dict[str, float]:
        return {"a1": self.a1, "a2": self.a2}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> AdProfile:
        return cls(float(data["a1"]), float(data["a2"]))


@dataclass(frozen=True)
class UserType:
    beta: float

    def __post_init__(self) -> None:
        _check_unit("beta", self.beta)

    def quality(self, params: ModelParams) -> float:
        return quality_schedule(params, self.beta)


def quality_schedule(params: ModelParams, beta: float) -> float:
    """Mean content quality ``q_m - lam * beta`` of a type-``beta`` user."""
    _check_unit("beta", beta)
    return params.q_m - params.lam * beta


def interval_avg_quality(params: ModelParams, lo: float, hi: float) -> float:
    """Average of the quality schedule over the user types in ``[lo, hi]``.

    Raises:
        ModelError: if the interval is degenerate (``lo >= hi``). A platform
            holding a measure-zero set of types has quality ``EMPTY``; callers
            decide that case before asking for an average.
    """
    _check_unit("lo", lo)
    _check_unit("hi", hi)
    if not lo < hi:
        raise ModelError(f"degenerate interval [{lo!r}, {hi!r}]")
    return params.q_m - params.lam * (lo + hi) / 2.0


def user_utility(
    params: ModelParams,
    beta: float,
    platform_quality: float | _EmptyPlatform,
    platform_share: float,
    ad_level: float,
) -> float | _EmptyPlatform:
    """Utility ``Q + beta * n - a`` of joining a platform.

    An ``EMPTY`` platform yields ``EMPTY`` utility, which loses every
    comparison against a platform with users.
    """
    _check_unit("beta", beta)
    _check_unit("platform_share", platform_share)
    if platform_quality is EMPTY:
        return EMPTY
    return platform_quality + beta * platform_share - ad_level
