"""Constraint-activation thresholds, feasibility, and profile selection.

All functions take a canonical :class:`~mintraj.core.NormalizedProblem`.
The activation tests are written as ``3 (L - v0 T) >= 2 (v_max - v0) T`` and
``3 (L - v0 T) >= u_max T**2``.  For ``v0 >= 0`` these are exactly
``T <= state_threshold`` and ``T <= control_threshold``; unlike the threshold
quotients they stay valid when mirroring makes ``v0`` or ``L`` negative.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .core import NormalizedProblem
from .errors import DegenerateDenominator, InfeasibleProblem, NegativeRadicand

#: relative tolerance for ties against the measure-zero boundaries
TIE_RTOL = 1e-12


class ProfileClass(enum.Enum):
    UNCONSTRAINED = "Unconstrained"
    BANG_AFFINE = "BangAffine"
    AFFINE_COAST = "AffineCoast"
    BANG_AFFINE_COAST = "BangAffineCoast"
    BANG_COAST = "BangCoast"
    BANG = "Bang"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Thresholds:
    t_state: float | None
    t_control: float | None


def state_threshold(np_: NormalizedProblem) -> float:
    """Largest horizon at which the unconstrained solution reaches ``v_max``."""
    denom = np_.v0 + 2.0 * np_.v_max
    if not denom > 0.0:
        raise DegenerateDenominator(f"v0 + 2 v_max = {denom} is not positive")
    return 3.0 * np_.L / denom


def control_threshold(np_: NormalizedProblem) -> float:
    """Largest horizon at which the unconstrained solution starts above ``u_max``."""
    v0, u = np_.v0, np_.u_max
    radicand = 9.0 * v0 * v0 + 12.0 * u * np_.L
    if radicand < 0.0:
        raise NegativeRadicand(f"9 v0^2 + 12 u_max L = {radicand} < 0")
    return (-3.0 * v0 + math.sqrt(radicand)) / (2.0 * u)


def thresholds(np_: NormalizedProblem) -> Thresholds:
    """Both thresholds, with ``None`` where the quotient form is undefined."""
    try:
        ts = state_threshold(np_)
    except DegenerateDenominator:
        ts = None
    try:
        tc = control_threshold(np_)
    except NegativeRadicand:
        tc = None
    return Thresholds(ts, tc)


def feasibility_check(np_: NormalizedProblem) -> float:
    """Maximum distance reachable in ``T``: full throttle, then hold ``v_max``."""
    v0, T, u, vm = np_.v0, np_.T, np_.u_max, np_.v_max
    t_r = (vm - v0) / u
    if t_r >= T:
        return v0 * T + 0.5 * u * T * T
    return v0 * t_r + 0.5 * u * t_r * t_r + vm * (T - t_r)


def _scale(np_: NormalizedProblem) -> float:
    return max(1.0, abs(np_.L), abs(np_.v0 * np_.T), abs(np_.v_max * np_.T))


def is_feasible(np_: NormalizedProblem) -> bool:
    tol = TIE_RTOL * _scale(np_)
    return np_.v0 * np_.T - tol <= np_.L <= feasibility_check(np_) + tol


def check_feasible(np_: NormalizedProblem) -> float:
    """Return ``L_max`` or raise :class:`InfeasibleProblem`."""
    L_max = float(feasibility_check(np_))
    if not is_feasible(np_):
        if np_.L > L_max:
            msg = f"terminal distance L={float(np_.L)!r} exceeds L_max={L_max!r}"
        else:
            msg = f"terminal distance L={float(np_.L)!r} is below v0*T={float(np_.v0 * np_.T)!r}"
        raise InfeasibleProblem(msg, L=np_.L, L_max=L_max)
    return L_max


def speed_active(np_: NormalizedProblem) -> bool:
    """``T <= 3L/(v0 + 2 v_max)``: unconstrained terminal speed reaches ``v_max``."""
    return 3.0 * np_.excess_distance >= 2.0 * np_.beta * np_.T


def control_active(np_: NormalizedProblem) -> bool:
    """``T <= control_threshold``: unconstrained initial control reaches ``u_max``."""
    return 3.0 * np_.excess_distance >= np_.u_max * np_.T * np_.T


def psi(np_: NormalizedProblem) -> float:
    """Discriminant ``6 u_max (T v_max - L) - 3 beta**2`` of the three-arc profile."""
    b = np_.beta
    return 6.0 * np_.u_max * (np_.T * np_.v_max - np_.L) - 3.0 * b * b


def psi_is_zero(np_: NormalizedProblem, value: float | None = None) -> bool:
    value = psi(np_) if value is None else value
    return abs(value) <= TIE_RTOL * max(1.0, 3.0 * np_.beta ** 2)


def bang_affine_junction(np_: NormalizedProblem) -> float:
    """Junction of the two-arc bang/affine candidate (admissible root only).

    May be negative or NaN for problems where that candidate makes no sense;
    the planner validates, this helper does not.
    """
    T = np_.T
    disc = T * T - 2.0 * np_.excess_distance / np_.u_max
    if disc < 0.0:
        return math.nan
    return T - math.sqrt(3.0) * math.sqrt(disc)


def bang_affine_terminal_speed(np_: NormalizedProblem, tau_c: float) -> float:
    return np_.v0 + 0.5 * np_.u_max * (np_.T + tau_c)


def affine_coast_junction(np_: NormalizedProblem) -> float:
    """Junction of the two-arc affine/coast candidate."""
    return 3.0 * (np_.v_max * np_.T - np_.L) / np_.beta


def affine_coast_initial_control(np_: NormalizedProblem, tau_s: float) -> float:
    return 2.0 * np_.beta / tau_s


def _three_arc(np_: NormalizedProblem) -> ProfileClass:
    if psi_is_zero(np_):
        return ProfileClass.BANG_COAST
    return ProfileClass.BANG_AFFINE_COAST


def classify(np_: NormalizedProblem) -> ProfileClass:
    """Select the unique optimal profile for a feasible canonical problem.

    Order matters: the zero-excess and pure-bang boundary cases are caught
    before the threshold tests so that floating noise cannot route them into
    a two-arc profile with a zero-length arc.

    Raises
    ------
    InfeasibleProblem
        if ``L`` lies outside ``[v0 T, L_max(T)]``.
    """
    L_max = check_feasible(np_)
    scale = _scale(np_)
    if np_.excess_distance <= TIE_RTOL * scale:
        # coasting at v0 already arrives; u == 0
        return ProfileClass.UNCONSTRAINED
    t_r = np_.beta / np_.u_max
    if abs(np_.L - L_max) <= TIE_RTOL * scale and np_.T <= t_r * (1.0 + TIE_RTOL):
        return ProfileClass.BANG

    on_speed = speed_active(np_)
    on_control = control_active(np_)
    if not on_speed and not on_control:
        return ProfileClass.UNCONSTRAINED
    if on_speed and on_control:
        return _three_arc(np_)
    if on_control:
        tau_c = bang_affine_junction(np_)
        if bang_affine_terminal_speed(np_, tau_c) < np_.v_max:
            return ProfileClass.BANG_AFFINE
        return _three_arc(np_)
    tau_s = affine_coast_junction(np_)
    if affine_coast_initial_control(np_, tau_s) < np_.u_max:
        return ProfileClass.AFFINE_COAST
    return _three_arc(np_)
