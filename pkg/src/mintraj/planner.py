"""Closed-form construction of the optimal piecewise trajectory.

A plan is a tuple of :class:`Arc` objects tiling ``[0, T]``.  On each arc the
control is affine in the local time ``s = t - t_start``::

    u(s) = intercept + slope * s
    v(s) = v_entry + intercept * s + slope * s**2 / 2
    p(s) = p_entry + v_entry * s + intercept * s**2 / 2 + slope * s**3 / 6

Entry states are set from the closed-form kinematics of each profile rather
than by propagating the previous arc, so junction continuity is a genuine
check on the formulas.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

from . import classifier as clf
from .classifier import ProfileClass
from .core import NormalizedProblem, denormalize, normalize
from .errors import (
    InfeasibleProblem,
    JunctionOutOfRange,
    NegativeDiscriminant,
    NegativePsi,
)


class ArcKind(enum.Enum):
    BANG = "Bang"
    AFFINE = "Affine"
    COAST = "Coast"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Arc:
    kind: ArcKind
    t_start: float
    t_end: float
    slope: float
    intercept: float
    v_entry: float
    p_entry: float

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start

    def state(self, t):
        """``(u, v, p)`` at time ``t``; works on scalars and numpy arrays."""
        s = t - self.t_start
        a, b = self.slope, self.intercept
        u = b + a * s
        v = self.v_entry + s * (b + 0.5 * a * s)
        p = self.p_entry + s * (self.v_entry + s * (0.5 * b + a * s / 6.0))
        return u, v, p

    def energy(self) -> float:
        """Closed-form integral of ``u**2`` over the arc."""
        a, b, d = self.slope, self.intercept, self.duration
        if self.kind is ArcKind.COAST:
            return 0.0
        if self.kind is ArcKind.BANG:
            return b * b * d
        return d * (b * b + a * b * d + a * a * d * d / 3.0)


@dataclass(frozen=True)
class SwitchQuantities:
    """Scalar quantities shared by the closed-form constructors.

    ``alpha_unc`` is the slope of the unconstrained control; ``terminal_slack``
    is ``v_max T - L``, the distance lost against cruising at ``v_max``.
    """

    beta: float
    psi: float
    alpha_unc: float
    terminal_slack: float

    @classmethod
    def of(cls, np_: NormalizedProblem) -> "SwitchQuantities":
        return cls(
            beta=np_.beta,
            psi=clf.psi(np_),
            alpha_unc=alpha_unconstrained(np_),
            terminal_slack=np_.v_max * np_.T - np_.L,
        )


@dataclass(frozen=True)
class TrajectoryPlan:
    profile: ProfileClass
    arcs: tuple
    tau_c: Optional[float]
    tau_s: Optional[float]
    energy: float
    mirrored: bool = False

    @property
    def t_start(self) -> float:
        return self.arcs[0].t_start

    @property
    def t_end(self) -> float:
        return self.arcs[-1].t_end

    @property
    def junctions(self) -> tuple:
        return tuple(arc.t_start for arc in self.arcs[1:])


def _tol(np_: NormalizedProblem) -> float:
    return clf.TIE_RTOL * max(1.0, np_.T)


def _make_plan(profile, arcs, tau_c=None, tau_s=None) -> TrajectoryPlan:
    arcs = tuple(arcs)
    energy = math.fsum(arc.energy() for arc in arcs)
    return TrajectoryPlan(profile, arcs, tau_c, tau_s, energy)


def alpha_unconstrained(np_: NormalizedProblem) -> float:
    """Slope of the unconstrained optimal control ``u(t) = alpha (t - T)``."""
    T = np_.T
    return 3.0 * (np_.v0 * T - np_.L) / T ** 3


def plan_unconstrained(np_: NormalizedProblem) -> TrajectoryPlan:
    a = alpha_unconstrained(np_)
    arc = Arc(ArcKind.AFFINE, 0.0, np_.T, a, -a * np_.T, np_.v0, 0.0)
    return _make_plan(ProfileClass.UNCONSTRAINED, [arc])


def plan_affine_coast(np_: NormalizedProblem) -> TrajectoryPlan:
    """Affine ramp-down to zero control at ``tau_s``, then cruise at ``v_max``."""
    T, v0, vm = np_.T, np_.v0, np_.v_max
    beta = np_.beta
    tau_s = clf.affine_coast_junction(np_)
    if not (0.0 < tau_s <= T + _tol(np_)):
        raise JunctionOutOfRange(f"affine/coast junction {tau_s!r} outside (0, {T!r}]")
    tau_s = min(tau_s, T)
    u0 = clf.affine_coast_initial_control(np_, tau_s)
    arcs = [Arc(ArcKind.AFFINE, 0.0, tau_s, -u0 / tau_s, u0, v0, 0.0)]
    if tau_s < T:
        p_s = v0 * tau_s + 2.0 * beta * tau_s / 3.0
        arcs.append(Arc(ArcKind.COAST, tau_s, T, 0.0, 0.0, vm, p_s))
        return _make_plan(ProfileClass.AFFINE_COAST, arcs, tau_s=tau_s)
    return _make_plan(ProfileClass.AFFINE_COAST, arcs)


def _bang_arc(np_: NormalizedProblem, t_end: float) -> Arc:
    return Arc(ArcKind.BANG, 0.0, t_end, 0.0, np_.u_max, np_.v0, 0.0)


def _after_bang(np_: NormalizedProblem, tau: float) -> tuple[float, float]:
    return np_.v0 + np_.u_max * tau, np_.v0 * tau + 0.5 * np_.u_max * tau * tau


def plan_bang_affine(np_: NormalizedProblem) -> TrajectoryPlan:
    """Full throttle until ``tau_c``, then a linear ramp to zero at ``T``."""
    T, u = np_.T, np_.u_max
    disc = T * T - 2.0 * np_.excess_distance / u
    if disc < 0.0:
        raise NegativeDiscriminant(f"T^2 - 2(L - v0 T)/u_max = {disc!r} < 0")
    # the '+' root exceeds T and is never admissible
    tau_c = T - math.sqrt(3.0) * math.sqrt(disc)
    tol = _tol(np_)
    if not (-tol <= tau_c < T):
        raise JunctionOutOfRange(f"bang/affine junction {tau_c!r} outside [0, {T!r})")
    tau_c = max(tau_c, 0.0)
    arcs = []
    if tau_c > 0.0:
        arcs.append(_bang_arc(np_, tau_c))
    v_c, p_c = _after_bang(np_, tau_c)
    arcs.append(Arc(ArcKind.AFFINE, tau_c, T, -u / (T - tau_c), u, v_c, p_c))
    return _make_plan(
        ProfileClass.BANG_AFFINE, arcs, tau_c=tau_c if tau_c > 0.0 else None
    )


def plan_bang_affine_coast(np_: NormalizedProblem) -> TrajectoryPlan:
    """Bang, affine ramp-down, cruise at ``v_max``; bang-coast when ``psi == 0``."""
    T, v0, u, vm = np_.T, np_.v0, np_.u_max, np_.v_max
    beta = np_.beta
    psi = clf.psi(np_)
    if clf.psi_is_zero(np_, psi):
        psi = 0.0
    elif psi < 0.0:
        raise NegativePsi(f"psi = {psi!r} < 0")
    root = math.sqrt(psi)
    tau_c = (beta - root) / u
    tau_s = (beta + root) / u
    tol = _tol(np_)
    if not (-tol <= tau_c <= tau_s <= T + tol):
        raise JunctionOutOfRange(
            f"junctions ({tau_c!r}, {tau_s!r}) violate 0 <= tau_c <= tau_s <= {T!r}"
        )
    tau_c = max(tau_c, 0.0)
    tau_s = min(tau_s, T)

    arcs = []
    if tau_c > 0.0:
        arcs.append(_bang_arc(np_, tau_c))
    if psi == 0.0:
        profile = ProfileClass.BANG_COAST
        p_s = v0 * tau_s + 0.5 * u * tau_s * tau_s
    else:
        profile = ProfileClass.BANG_AFFINE_COAST
        v_c, p_c = _after_bang(np_, tau_c)
        width = tau_s - tau_c
        arcs.append(Arc(ArcKind.AFFINE, tau_c, tau_s, -u / width, u, v_c, p_c))
        p_s = (
            4.0 * beta * tau_s / 3.0
            - 2.0 * beta * beta / (3.0 * u)
            - u * tau_s * tau_s / 6.0
            + v0 * tau_s
        )
    if tau_s < T:
        arcs.append(Arc(ArcKind.COAST, tau_s, T, 0.0, 0.0, vm, p_s))
    has_bang = tau_c > 0.0 and len(arcs) > 1
    return _make_plan(
        profile,
        arcs,
        tau_c=tau_c if has_bang else None,
        tau_s=tau_s if tau_s < T else None,
    )


def plan_bang(np_: NormalizedProblem) -> TrajectoryPlan:
    return _make_plan(ProfileClass.BANG, [_bang_arc(np_, np_.T)])


_CONSTRUCTORS = {
    ProfileClass.UNCONSTRAINED: plan_unconstrained,
    ProfileClass.BANG_AFFINE: plan_bang_affine,
    ProfileClass.AFFINE_COAST: plan_affine_coast,
    ProfileClass.BANG_AFFINE_COAST: plan_bang_affine_coast,
    ProfileClass.BANG_COAST: plan_bang_affine_coast,
    ProfileClass.BANG: plan_bang,
}


def plan(np_: NormalizedProblem) -> TrajectoryPlan:
    """Classify ``np_`` and build the matching closed-form trajectory.

    Raises
    ------
    InfeasibleProblem
        if no admissible trajectory exists.
    """
    profile = clf.classify(np_)
    if profile is ProfileClass.UNCONSTRAINED and np_.excess_distance <= 0.0:
        # v0 == L/T: hold v0, u == 0 (emitted as a flat affine arc)
        arc = Arc(ArcKind.AFFINE, 0.0, np_.T, 0.0, 0.0, np_.v0, 0.0)
        return _make_plan(profile, [arc])
    return _CONSTRUCTORS[profile](np_)


def plan_scenario(scenario):
    """Normalize, plan in the canonical frame, and map back.

    Returns ``(plan, problem, frame)`` where ``plan`` is in the user's frame.
    """
    problem, frame = normalize(scenario)
    return denormalize(plan(problem), frame), problem, frame


__all__ = [
    "Arc",
    "ArcKind",
    "InfeasibleProblem",
    "SwitchQuantities",
    "TrajectoryPlan",
    "alpha_unconstrained",
    "plan",
    "plan_affine_coast",
    "plan_bang",
    "plan_bang_affine",
    "plan_bang_affine_coast",
    "plan_scenario",
    "plan_unconstrained",
]
