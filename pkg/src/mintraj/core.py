"""Domain types and the map into the canonical accelerating frame.

Every scenario is reduced to a problem with ``t0 = 0``, ``p0 = 0`` and an
initial speed no larger than the average speed ``L / T``.  Decelerating
scenarios are mirrored (positions, speeds and controls negated, lower and
upper limits swapped) so that the planner only ever deals with
non-negative controls and non-decreasing speed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import (
    InitialSpeedOutOfBounds,
    LimitOrderViolation,
    NonpositiveHorizon,
    ScenarioError,
)


@dataclass(frozen=True)
class Limits:
    u_min: float
    u_max: float
    v_min: float
    v_max: float


@dataclass(frozen=True)
class Scenario:
    """Boundary data in the user's frame. ``T`` is the absolute terminal time."""

    t0: float
    p0: float
    v0: float
    T: float
    pT: float
    limits: Limits

    @property
    def horizon(self) -> float:
        return self.T - self.t0

    @property
    def distance(self) -> float:
        return self.pT - self.p0


@dataclass(frozen=True)
class FrameMap:
    """Affine map from the user's frame to the canonical frame.

    ``to_canonical`` subtracts the shifts and then negates ``p, v, u`` when
    ``mirrored`` is set; ``from_canonical`` is its exact inverse.
    """

    time_shift: float = 0.0
    position_shift: float = 0.0
    mirrored: bool = False

    @property
    def sign(self) -> float:
        return -1.0 if self.mirrored else 1.0

    @property
    def is_identity(self) -> bool:
        return self.time_shift == 0.0 and self.position_shift == 0.0 and not self.mirrored

    def to_canonical(self, t, p, v, u):
        s = self.sign
        return t - self.time_shift, s * (p - self.position_shift), s * v, s * u

    def from_canonical(self, t, p, v, u):
        s = self.sign
        return t + self.time_shift, s * p + self.position_shift, s * v, s * u


@dataclass(frozen=True)
class NormalizedProblem:
    """Canonical accelerating-case data: start at ``t = 0``, ``p = 0``.

    Only the upper limits matter here: the optimal control is non-negative
    and the speed non-decreasing, so ``u_min`` and ``v_min`` never bind.
    """

    v0: float
    L: float
    T: float
    u_max: float
    v_max: float

    @property
    def beta(self) -> float:
        """Speed headroom ``v_max - v0``."""
        return self.v_max - self.v0

    @property
    def excess_distance(self) -> float:
        """Distance beyond what coasting at ``v0`` covers, ``L - v0*T``."""
        return self.L - self.v0 * self.T


def _finite(name: str, value) -> float:
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise ScenarioError(f"{name} must be a number, got {value!r}") from None
    if not math.isfinite(x):
        raise ScenarioError(f"{name} must be finite, got {x!r}")
    return x


def make_scenario(
    *,
    v0,
    T,
    pT,
    u_min,
    u_max,
    v_min,
    v_max,
    t0=0.0,
    p0=0.0,
) -> Scenario:
    """Validate raw boundary data and limits and build a :class:`Scenario`.

    Raises
    ------
    LimitOrderViolation
        unless ``u_min < 0 < u_max`` and ``v_min < v_max``.
    NonpositiveHorizon
        if ``T <= t0``.
    InitialSpeedOutOfBounds
        if ``v0`` lies outside ``[v_min, v_max]``.
    """
    vals = {
        name: _finite(name, val)
        for name, val in dict(
            t0=t0, p0=p0, v0=v0, T=T, pT=pT,
            u_min=u_min, u_max=u_max, v_min=v_min, v_max=v_max,
        ).items()
    }
    if not vals["u_min"] < 0.0 < vals["u_max"]:
        raise LimitOrderViolation(
            f"need u_min < 0 < u_max, got u_min={vals['u_min']}, u_max={vals['u_max']}"
        )
    if not vals["v_min"] < vals["v_max"]:
        raise LimitOrderViolation(
            f"need v_min < v_max, got v_min={vals['v_min']}, v_max={vals['v_max']}"
        )
    if not vals["T"] > vals["t0"]:
        raise NonpositiveHorizon(f"terminal time T={vals['T']} must exceed t0={vals['t0']}")
    if not vals["v_min"] <= vals["v0"] <= vals["v_max"]:
        raise InitialSpeedOutOfBounds(
            f"v0={vals['v0']} outside [{vals['v_min']}, {vals['v_max']}]"
        )
    limits = Limits(vals["u_min"], vals["u_max"], vals["v_min"], vals["v_max"])
    return Scenario(vals["t0"], vals["p0"], vals["v0"], vals["T"], vals["pT"], limits)


def normalize(s: Scenario) -> tuple[NormalizedProblem, FrameMap]:
    """Shift to ``t0 = p0 = 0`` and mirror decelerating scenarios."""
    T = s.T - s.t0
    L = s.pT - s.p0
    lim = s.limits
    # v0 <= L/T without the division
    if s.v0 * T <= L:
        problem = NormalizedProblem(s.v0, L, T, lim.u_max, lim.v_max)
        return problem, FrameMap(s.t0, s.p0, False)
    problem = NormalizedProblem(-s.v0, -L, T, -lim.u_min, -lim.v_min)
    return problem, FrameMap(s.t0, s.p0, True)


def canonical_scenario(problem: NormalizedProblem) -> Scenario:
    """The scenario whose normal form is ``problem`` under the identity map.

    Lower limits are chosen so that they cannot bind in the accelerating case.
    """
    return make_scenario(
        v0=problem.v0,
        T=problem.T,
        pT=problem.L,
        u_min=-problem.u_max,
        u_max=problem.u_max,
        v_min=min(problem.v0, problem.v_max) - 1.0,
        v_max=problem.v_max,
    )


def denormalize(plan, frame: FrameMap):
    """Carry a plan from the canonical frame back through ``frame``.

    Arc intervals and switching times are shifted by ``time_shift``; entry
    positions by ``position_shift``.  With a mirrored map the controls,
    speeds and positions are negated, so Bang arcs sit on ``u_min`` and Coast
    arcs on ``v_min`` in the result.  Energy is invariant.
    """
    if frame.is_identity:
        return plan
    s = frame.sign
    arcs = tuple(
        replace(
            arc,
            t_start=arc.t_start + frame.time_shift,
            t_end=arc.t_end + frame.time_shift,
            slope=s * arc.slope,
            intercept=s * arc.intercept,
            v_entry=s * arc.v_entry,
            p_entry=s * arc.p_entry + frame.position_shift,
        )
        for arc in plan.arcs
    )

    def shift(tau):
        return None if tau is None else tau + frame.time_shift

    return replace(
        plan,
        arcs=arcs,
        tau_c=shift(plan.tau_c),
        tau_s=shift(plan.tau_s),
        mirrored=plan.mirrored != frame.mirrored,
    )
