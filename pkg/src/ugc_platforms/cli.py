"""Command-line front end.

Every subcommand writes CSV or JSON to ``--out`` (stdout by default). Exit
codes: 0 success, 2 invalid input, 3 a closed-form game solution failed its
numerical verification.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .allocation import SingularShareError, iterate_to_fixed_point
from .equilibrium import solve_equilibria
from .game import InconsistencyError, best_response, nash_solve, profits, stackelberg_solve
from .model import AdProfile, ModelError, ModelParams
from .montecarlo import run_dynamics, sample_population
from .scenarios import FIGURE_COLUMNS, curve_intersections, figure_rows, undercut_demo

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_INCONSISTENT = 3


@dataclass
class RunConfig:
    lam: float = 0.1
    qm: float = 1.0
    a1: float = 0.0
    a2: float = 0.0
    focal: int = 1
    seed: int = 0
    n_agents: int = 100_000
    start_share: float = 0.99
    tol: float = 1e-12
    max_steps: int = 10_000
    grid_step: float = 1e-4
    a_max: float = 1.0
    mover: int = 2
    noise: float = 0.0
    axis: str = "a1"
    sweep_min: float = 0.0
    sweep_max: float = 0.2
    steps: int = 21
    workers: int = 1
    format: str = "json"
    out: str | None = None

    def params(self) -> ModelParams:
        return ModelParams(self.lam, self.qm)

    def ads(self) -> AdProfile:
        return AdProfile(self.a1, self.a2)

    def validate(self) -> None:
        self.params()
        self.ads()
        if self.focal not in (1, 2) or self.mover not in (1, 2):
            raise ModelError("focal and mover must be 1 or 2")
        if self.format not in ("csv", "json"):
            raise ModelError(f"format must be csv or json, got {self.format!r}")
        if self.grid_step <= 0 or self.tol <= 0 or self.max_steps < 1:
            raise ModelError("grid-step and tol must be positive, max-steps at least 1")
        if self.axis not in ("lambda", "a1", "a2") or self.steps < 1:
            raise ModelError("sweep axis must be lambda, a1 or a2 with at least one step")


# Flag name -> RunConfig field. Config files use the same names without dashes.
_FLAGS: dict[str, tuple[str, type]] = {
    "lambda": ("lam", float),
    "qm": ("qm", float),
    "a1": ("a1", float),
    "a2": ("a2", float),
    "focal": ("focal", int),
    "seed": ("seed", int),
    "n-agents": ("n_agents", int),
    "start-share": ("start_share", float),
    "tol": ("tol", float),
    "max-steps": ("max_steps", int),
    "grid-step": ("grid_step", float),
    "a-max": ("a_max", float),
    "mover": ("mover", int),
    "noise": ("noise", float),
    "axis": ("axis", str),
    "min": ("sweep_min", float),
    "max": ("sweep_max", float),
    "steps": ("steps", int),
    "workers": ("workers", int),
    "format": ("format", str),
    "out": ("out", str),
}


def read_config_file(path: str | Path) -> dict[str, Any]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values: dict[str, Any] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ModelError(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lstrip("-")
        if key not in _FLAGS:
            raise ModelError(f"{path}:{lineno}: unknown key {key!r}")
        name, kind = _FLAGS[key]
        try:
            values[name] = kind(value)
        except ValueError:
            raise ModelError(f"{path}:{lineno}: bad value {value!r} for {key}") from None
    return values


def fmt(x: Any) -> str:
    if isinstance(x, bool) or x is None:
        return "" if x is None else str(x).lower()
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def to_csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def to_json(obj: Any) -> str:
    return json.dumps(obj, indent=2) + "\n"


def cmd_equilibria(cfg: RunConfig) -> str:
    result = solve_equilibria(cfg.params(), cfg.ads(), cfg.focal)
    if cfg.format == "json":
        return to_json(result.to_dict())
    rows = [
        (eq.kind, eq.dominant, eq.beta_tilde, eq.share1, eq.stability, eq == result.selected)
        for eq in result.equilibria
    ]
    return to_csv(("kind", "dominant", "beta_tilde", "share1", "stability", "selected"), rows)


def cmd_dynamics(cfg: RunConfig) -> str:
    params, ads = cfg.params(), cfg.ads()
    trace = iterate_to_fixed_point(params, ads, cfg.start_share, cfg.tol, cfg.max_steps)
    if cfg.format == "json":
        return to_json(trace.to_dict(params, ads))
    return to_csv(("step", "share1"), trace.csv_rows())


def cmd_best_response(cfg: RunConfig) -> str:
    opponent = cfg.a2 if cfg.mover == 1 else cfg.a1
    br = best_response(cfg.params(), cfg.mover, opponent, cfg.grid_step, cfg.a_max)
    record = {
        "mover": br.mover,
        "opponent_ad": opponent,
        "ad": br.ad,
        "profit": br.profit,
        "attained": br.attained,
        "branch": br.branch,
    }
    if cfg.format == "json":
        return to_json(record)
    return to_csv(tuple(record), [tuple(record.values())])


def _solution_output(cfg: RunConfig, solution_dict: dict[str, Any]) -> str:
    if cfg.format == "json":
        return to_json(solution_dict)
    flat = {k: v for k, v in solution_dict.items() if k != "verification"}
    flat.update(solution_dict["verification"])
    return to_csv(tuple(flat), [tuple(flat.values())])


def cmd_nash_check(cfg: RunConfig) -> str:
    return _solution_output(cfg, nash_solve(cfg.params(), cfg.grid_step, cfg.a_max).to_dict())


def cmd_stackelberg(cfg: RunConfig) -> str:
    return _solution_output(cfg, stackelberg_solve(cfg.params(), cfg.grid_step, cfg.a_max).to_dict())


def _sweep_cell(args: tuple[int, float, RunConfig]) -> tuple[Any, ...]:
    index, value, cfg = args
    lam = value if cfg.axis == "lambda" else cfg.lam
    a1 = value if cfg.axis == "a1" else cfg.a1
    a2 = value if cfg.axis == "a2" else cfg.a2
    params, ads = ModelParams(lam, cfg.qm), AdProfile(a1, a2)
    eqs = solve_equilibria(params, ads, cfg.focal)
    out = profits(params, ads)
    selected = None if eqs.selected is None else eqs.selected.share1
    return (index, value, len(eqs.equilibria), len(eqs.stable), selected, out.pi1, out.pi2, out.branch)


def cmd_sweep(cfg: RunConfig) -> str:
    values = np.linspace(cfg.sweep_min, cfg.sweep_max, cfg.steps)
    cells = [(i, float(v), cfg) for i, v in enumerate(values)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            rows = list(pool.map(_sweep_cell, cells, chunksize=max(1, len(cells) // (4 * cfg.workers))))
    else:
        rows = [_sweep_cell(c) for c in cells]
    rows.sort(key=lambda r: r[0])
    header = ("cell", cfg.axis, "n_equilibria", "n_stable", "selected_share1", "pi1", "pi2", "branch")
    if cfg.format == "json":
        return to_json({"axis": cfg.axis, "rows": [dict(zip(header, r)) for r in rows]})
    return to_csv(header, rows)


def cmd_montecarlo(cfg: RunConfig) -> str:
    params, ads = cfg.params(), cfg.ads()
    pop = sample_population(params, cfg.n_agents, cfg.seed, cfg.noise)
    result = run_dynamics(pop, params, ads, cfg.start_share, cfg.max_steps)
    if cfg.format == "json":
        summary = {"params": params.to_dict(), "ads": ads.to_dict(), "n_agents": cfg.n_agents, "seed": cfg.seed}
        summary.update(result.summary())
        return to_json(summary)
    return to_csv(("round", "share1", "Q1", "Q2", "switches"), result.history)


def cmd_figure(cfg: RunConfig) -> str:
    # Figure data may be drawn for lambda >= 1/4, so only the ads are validated here.
    if not cfg.lam > 0:
        raise ModelError(f"lambda must be positive, got {cfg.lam!r}")
    gap = cfg.ads().gap
    rows = figure_rows(cfg.lam, gap)
    if cfg.format == "csv":
        return to_csv(FIGURE_COLUMNS, rows)
    arr = np.array(rows)
    return to_json(
        {
            "lambda": cfg.lam,
            "gap": gap,
            "columns": list(FIGURE_COLUMNS),
            "rows": [list(r) for r in rows],
            "red_intersections": curve_intersections(arr[:, 0], arr[:, 1], arr[:, 4]),
            "blue_intersections": curve_intersections(arr[:, 0], arr[:, 2], arr[:, 5]),
        }
    )


def cmd_undercut_demo(cfg: RunConfig) -> str:
    trace = undercut_demo(cfg.params(), cfg.ads(), cfg.grid_step)
    header = ("round", "a1", "a2", "pi1", "pi2")
    if cfg.format == "json":
        return to_json({"rounds": trace.rounds, "rows": [dict(zip(header, r)) for r in trace.rows]})
    return to_csv(header, trace.rows)


COMMANDS = {
    "equilibria": cmd_equilibria,
    "dynamics": cmd_dynamics,
    "best-response": cmd_best_response,
    "nash-check": cmd_nash_check,
    "stackelberg": cmd_stackelberg,
    "sweep": cmd_sweep,
    "montecarlo": cmd_montecarlo,
    "figure": cmd_figure,
    "undercut-demo": cmd_undercut_demo,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ugc-platforms",
        description="Equilibria, dynamics and advertising games of two competing UGC platforms.",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="flat key = value file; flags override it")
    for flag, (name, kind) in _FLAGS.items():
        extra: dict[str, Any] = {}
        if flag == "format":
            extra["choices"] = ("csv", "json")
        parser.add_argument(f"--{flag}", dest=name, type=kind, default=None, **extra)
    return parser


def resolve_config(ns: argparse.Namespace) -> RunConfig:
    """Defaults, then the config file, then explicit flags."""
    values: dict[str, Any] = {}
    if ns.config:
        values.update(read_config_file(ns.config))
    for f in fields(RunConfig):
        flag_value = getattr(ns, f.name, None)
        if flag_value is not None:
            values[f.name] = flag_value
    return RunConfig(**values)


def _error(kind: str, message: str, **extra: Any) -> str:
    return json.dumps({"error": kind, "message": message, **extra}) + "\n"


def main(argv: Sequence[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(ns)
        if ns.command != "figure":
            cfg.validate()
        text = COMMANDS[ns.command](cfg)
    except InconsistencyError as exc:
        sys.stderr.write(_error("internal_inconsistency", str(exc), solution=exc.solution.to_dict()))
        return EXIT_INCONSISTENT
    except (ModelError, SingularShareError, OSError) as exc:
        sys.stderr.write(_error("validation", str(exc)))
        return EXIT_VALIDATION
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
