"""Two-platform competition with user-generated content.

Equilibrium user allocations, their stability, platform profits and the
advertising games between the platforms.
"""

from .allocation import (
    IterationTrace,
    SingularShareError,
    ThresholdAllocation,
    gamma_map,
    iterate_to_fixed_point,
    realized_allocation,
)
from .equilibrium import (
    Equilibrium,
    EquilibriumSet,
    boundary_equilibria,
    classify_stability,
    coexistence_window,
    cutoff_roots,
    interior_cutoffs,
    interior_window,
    solve_equilibria,
    stability_multiplier,
)
from .game import (
    BestResponse,
    GameSolution,
    InconsistencyError,
    ProfitOutcome,
    best_response,
    interior_foc_candidate,
    nash_solve,
    profits,
    stackelberg_solve,
)
from .model import (
    EMPTY,
    AdProfile,
    ModelError,
    ModelParams,
    UserType,
    interval_avg_quality,
    quality_schedule,
    user_utility,
)
from .montecarlo import AgentPopulation, SimulationResult, run_dynamics, sample_population

__version__ = "0.1.0"
