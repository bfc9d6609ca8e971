"""Energy-optimal double-integrator trajectories with speed and acceleration limits.

Typical use::

    from mintraj import make_scenario, plan_scenario, evaluate

    s = make_scenario(v0=0, T=3, pT=2.7, u_min=-2, u_max=2, v_min=0, v_max=1)
    plan, problem, frame = plan_scenario(s)
    u, v, p = evaluate(plan, 1.0)
"""
from .classifier import (
    ProfileClass,
    Thresholds,
    classify,
    control_threshold,
    feasibility_check,
    state_threshold,
    thresholds,
)
from .core import (
    FrameMap,
    Limits,
    NormalizedProblem,
    Scenario,
    canonical_scenario,
    denormalize,
    make_scenario,
    normalize,
)
from .errors import (
    DegenerateDenominator,
    InfeasibleProblem,
    InitialSpeedOutOfBounds,
    JunctionOutOfRange,
    LimitOrderViolation,
    MintrajError,
    NegativeDiscriminant,
    NegativePsi,
    NegativeRadicand,
    NoFeasibleCandidate,
    NonpositiveHorizon,
    PlanningError,
    ScenarioError,
    TimeOutOfRange,
)
from .oracle import (
    ComparisonReport,
    GridSearchResult,
    OracleSolution,
    OracleStatus,
    compare,
    grid_search_switch,
    solve_qp,
)
from .planner import (
    Arc,
    ArcKind,
    SwitchQuantities,
    TrajectoryPlan,
    alpha_unconstrained,
    plan,
    plan_affine_coast,
    plan_bang,
    plan_bang_affine,
    plan_bang_affine_coast,
    plan_scenario,
    plan_unconstrained,
)
from .trajectory import Diagnostics, SamplePoint, energy, evaluate, sample, validate

__version__ = "0.1.0"
