"""Plot-ready curve data and the scripted advertising undercut process."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .game import profits
from .model import AdProfile, ModelError, ModelParams

FIGURE_COLUMNS = ("beta_tilde", "f_red", "f_blue", "y_line", "y_red_dashed", "y_blue_dashed")


def figure_rows(lam: float, gap: float, n_intervals: int = 1000) -> list[tuple[float, ...]]:
    """Parabolas and horizontal lines whose crossings locate interior cutoffs.

    Samples ``beta_tilde = i / (2 n_intervals)`` for ``0 < i < n_intervals``.
    ``lam`` is only required to be positive so that settings with
    ``lam >= 1/4`` can be drawn as well.
    """
    if not lam > 0:
        raise ModelError(f"lambda must be positive, got {lam!r}")
    if n_intervals < 4:
        raise ModelError("need at least 4 sampling intervals")
    rows = []
    for i in range(1, n_intervals):
        b = i / (2.0 * n_intervals)
        rows.append((b, (1.0 - 2.0 * b) * b, (2.0 * b - 1.0) * b, gap, gap + lam / 2.0, gap - lam / 2.0))
    return rows


def curve_intersections(xs: np.ndarray, f: np.ndarray, y: np.ndarray, atol: float = 1e-12) -> list[float]:
    """Abscissas where sampled smooth curves ``f`` and ``y`` meet.

    Sign changes of ``f - y`` and tangential touches (a local extremum of
    ``f - y`` within ``atol`` of zero) are refined by fitting a quadratic to
    the three nearest samples, which is exact when both curves are at most
    quadratic.
    """
    xs, d = np.asarray(xs, dtype=float), np.asarray(f, dtype=float) - np.asarray(y, dtype=float)
    roots: list[float] = []

    def fit(i: int) -> np.ndarray:
        j = min(max(i - 1, 0), len(xs) - 3)
        return np.polyfit(xs[j:j + 3], d[j:j + 3], 2)

    for i in range(len(xs)):
        if d[i] == 0.0:
            roots.append(float(xs[i]))
    for i in range(len(xs) - 1):
        if d[i] * d[i + 1] < 0.0:
            coeffs = fit(i if i + 2 < len(xs) else i - 1)
            cands = [r.real for r in np.roots(coeffs) if abs(r.imag) < 1e-12 and xs[i] <= r.real <= xs[i + 1]]
            roots.append(float(cands[0]) if cands else float(xs[i] - d[i] * (xs[i + 1] - xs[i]) / (d[i + 1] - d[i])))
    for i in range(1, len(xs) - 1):
        extremum = (d[i] - d[i - 1]) * (d[i + 1] - d[i]) <= 0.0
        if extremum and d[i] != 0.0 and abs(d[i]) < 1e-6:
            a, b, c = fit(i)
            if a != 0.0:
                vx = -b / (2.0 * a)
                if abs(c - b * b / (4.0 * a)) <= atol:
                    roots.append(float(vx))
    roots.sort()
    deduped: list[float] = []
    for r in roots:
        if not deduped or r - deduped[-1] > 1e-9:
            deduped.append(r)
    return deduped


@dataclass
class UndercutTrace:
    """Rows ``(round, a1, a2, pi1, pi2)``; row 0 is the starting profile."""

    rows: list[tuple[int, float, float, float, float]] = field(default_factory=list)

    @property
    def rounds(self) -> int:
        return len(self.rows) - 1

    @property
    def terminal(self) -> AdProfile:
        _, a1, a2, _, _ = self.rows[-1]
        return AdProfile(a1, a2)


def undercut_demo(
    params: ModelParams, start: AdProfile, grid_step: float = 1e-4, max_rounds: int = 1_000_000
) -> UndercutTrace:
    """Alternating undercutting on an ad grid of spacing ``grid_step``.

    Starting ad levels are rounded to the grid. Each round one platform
    moves. If platform 2 holds the market, platform 1 sets the largest grid
    ad that wins it back (``a1 - a2 <= 1/8 - lam/2``). Otherwise platform 2,
    if some nonnegative grid ad lets it take the whole market, sets the
    largest such ad. Failing both, platform 1 raises its ad to the largest
    level still keeping the market. The process stops when no move changes
    the profile.
    """
    h = grid_step
    # Everything below is in integer grid units; eps absorbs float rounding of the ceiling.
    ceiling = params.interior_ceiling / h
    eps = 1e-9
    i1, i2 = round(start.a1 / h), round(start.a2 / h)
    trace = UndercutTrace()

    def record(rnd: int) -> None:
        a1, a2 = round(i1 * h, 12), round(i2 * h, 12)
        out = profits(params, AdProfile(a1, a2))
        trace.rows.append((rnd, a1, a2, out.pi1, out.pi2))

    record(0)
    for rnd in range(1, max_rounds + 1):
        p1_best = math.floor(i2 + ceiling + eps)
        if i1 - i2 > ceiling + eps:
            i1 = p1_best
        else:
            capture = math.ceil(i1 - ceiling - eps) - 1
            if capture >= 0:
                i2 = capture
            elif i1 != p1_best:
                i1 = p1_best
            else:
                break
        record(rnd)
    return trace
