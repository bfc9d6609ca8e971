"""Evaluation, sampling and post-hoc checking of trajectory plans."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import NormalizedProblem, Scenario
from .classifier import ProfileClass
from .errors import TimeOutOfRange
from .planner import TrajectoryPlan


@dataclass(frozen=True)
class SamplePoint:
    t: float
    u: float
    v: float
    p: float


@dataclass(frozen=True)
class Diagnostics:
    max_control_violation: float
    max_speed_violation: float
    terminal_position_error: float
    junction_discontinuity: float
    terminal_control: float
    terminal_control_expected: bool
    ok: bool


def _arc_index(plan: TrajectoryPlan, t: np.ndarray) -> np.ndarray:
    # a junction time belongs to the arc that starts there
    starts = np.array([arc.t_start for arc in plan.arcs])
    idx = np.searchsorted(starts, t, side="right") - 1
    return np.clip(idx, 0, len(plan.arcs) - 1)


def evaluate(plan: TrajectoryPlan, t):
    """Control, speed and position at ``t`` (scalar or array).

    Raises :class:`TimeOutOfRange` for times outside the plan's horizon.
    """
    t_arr = np.asarray(t, dtype=float)
    lo, hi = plan.t_start, plan.t_end
    if np.any(t_arr < lo) or np.any(t_arr > hi) or np.any(np.isnan(t_arr)):
        raise TimeOutOfRange(f"t outside [{lo!r}, {hi!r}]")
    if t_arr.ndim == 0:
        arc = plan.arcs[int(_arc_index(plan, t_arr))]
        return tuple(float(x) for x in arc.state(float(t_arr)))
    u = np.empty_like(t_arr)
    v = np.empty_like(t_arr)
    p = np.empty_like(t_arr)
    idx = _arc_index(plan, t_arr)
    for k, arc in enumerate(plan.arcs):
        mask = idx == k
        if mask.any():
            u[mask], v[mask], p[mask] = arc.state(t_arr[mask])
    return u, v, p


def energy(plan: TrajectoryPlan) -> float:
    """Integral of ``u**2`` over the horizon, summed arc by arc in closed form."""
    return math.fsum(arc.energy() for arc in plan.arcs)


def sample_times(plan: TrajectoryPlan, n: int) -> np.ndarray:
    if n < 2:
        raise ValueError("need at least two samples")
    grid = np.linspace(plan.t_start, plan.t_end, n)
    t = np.sort(np.concatenate([grid, plan.junctions]))
    keep = np.ones(t.size, dtype=bool)
    keep[1:] = np.diff(t) > 1e-15 * max(1.0, abs(plan.t_end))
    return t[keep]


def sample(plan: TrajectoryPlan, n: int) -> list[SamplePoint]:
    """``n`` uniform samples plus every junction, sorted and deduplicated."""
    t = sample_times(plan, n)
    u, v, p = evaluate(plan, t)
    return [SamplePoint(*row) for row in zip(t.tolist(), u.tolist(), v.tolist(), p.tolist())]


def _bounds(problem):
    """Horizon, terminal position and the box on ``(u, v)`` for either frame."""
    if isinstance(problem, NormalizedProblem):
        # accelerating case: 0 <= u <= u_max and v0 <= v <= v_max
        return (0.0, problem.T, problem.L,
                (0.0, problem.u_max), (problem.v0, problem.v_max))
    if isinstance(problem, Scenario):
        lim = problem.limits
        return (problem.t0, problem.T, problem.pT,
                (lim.u_min, lim.u_max), (lim.v_min, lim.v_max))
    raise TypeError(f"cannot validate against {type(problem).__name__}")


def junction_gaps(plan: TrajectoryPlan) -> list[tuple[float, float]]:
    """``(|dv|, |dp|)`` at each junction: end of one arc vs entry of the next."""
    gaps = []
    for left, right in zip(plan.arcs[:-1], plan.arcs[1:]):
        _, v_end, p_end = left.state(left.t_end)
        gaps.append((abs(v_end - right.v_entry), abs(p_end - right.p_entry)))
    return gaps


def validate(plan: TrajectoryPlan, problem, tol: float = 1e-9, n: int = 10_001) -> Diagnostics:
    """Check a plan against its problem on a dense grid plus all junctions.

    ``problem`` is either the canonical problem or the original scenario.
    Violations are absolute; ``ok`` uses ``tol`` scaled by the size of the
    relevant bound (at least 1).  Never raises for a bad plan.
    """
    t0, T, target, (u_lo, u_hi), (v_lo, v_hi) = _bounds(problem)
    t = sample_times(plan, n)
    ends = np.array([arc.t_end for arc in plan.arcs])
    t = np.concatenate([t, ends])
    u = np.empty(0)
    v = np.empty(0)
    # evaluate each arc on its own closed interval so junction limits from both
    # sides are checked
    for arc in plan.arcs:
        mask = (t >= arc.t_start) & (t <= arc.t_end)
        ua, va, _ = arc.state(t[mask])
        u = np.concatenate([u, np.atleast_1d(ua)])
        v = np.concatenate([v, np.atleast_1d(va)])
    u_viol = float(max(0.0, np.max(u - u_hi), np.max(u_lo - u)))
    v_viol = float(max(0.0, np.max(v - v_hi), np.max(v_lo - v)))

    last = plan.arcs[-1]
    u_T, _, p_T = last.state(last.t_end)
    pos_err = abs(p_T - target)
    gaps = junction_gaps(plan)
    disc = max((dv + dp for dv, dp in gaps), default=0.0)
    horizon_err = abs(plan.t_start - t0) + abs(plan.t_end - T)

    bang = plan.profile is ProfileClass.BANG
    u_scale = max(1.0, abs(u_lo), abs(u_hi))
    v_scale = max(1.0, abs(v_lo), abs(v_hi))
    ok = (
        u_viol <= tol * u_scale
        and v_viol <= tol * v_scale
        and pos_err <= tol * max(1.0, abs(target))
        and disc <= tol * max(1.0, v_scale, abs(target))
        and horizon_err <= tol * max(1.0, abs(T))
        and (bang or abs(u_T) <= tol * u_scale)
    )
    return Diagnostics(
        max_control_violation=u_viol,
        max_speed_violation=v_viol,
        terminal_position_error=pos_err,
        junction_discontinuity=disc,
        terminal_control=float(u_T),
        terminal_control_expected=bang or abs(u_T) <= tol * u_scale,
        ok=bool(ok),
    )


# the short name mirrors ``energy`` and ``sample``
eval = evaluate  # noqa: A001

__all__ = [
    "Diagnostics",
    "SamplePoint",
    "energy",
    "eval",
    "evaluate",
    "junction_gaps",
    "sample",
    "validate",
]
