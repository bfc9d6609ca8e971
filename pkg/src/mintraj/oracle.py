"""Independent numerical solvers used to cross-check the closed-form planner.

``solve_qp`` transcribes the problem on a uniform grid with piecewise-constant
control and solves the resulting convex QP exactly through its two
multipliers.  ``grid_search_switch`` sweeps
switching times of each arc family on a grid, solving the one remaining
coefficient from the terminal position.  Neither shares code with the
planner's closed forms.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .core import NormalizedProblem
from .errors import NoFeasibleCandidate
from .planner import TrajectoryPlan
from .trajectory import evaluate


class OracleStatus(enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    MAX_ITERATIONS = "MaxIterations"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class OracleSolution:
    grid_times: np.ndarray
    controls: np.ndarray
    speeds: np.ndarray
    positions: np.ndarray
    energy: float
    status: OracleStatus
    iterations: int = 0


# --------------------------------------------------------------------------
# direct transcription
# --------------------------------------------------------------------------


def _greedy_reach(np_: NormalizedProblem, dt: float, N: int):
    """Fastest admissible discrete speed profile and the distance it covers."""
    v = np.empty(N + 1)
    v[0] = np_.v0
    step = np_.u_max * dt
    for k in range(N):
        v[k + 1] = min(v[k] + step, np_.v_max)
    return v, dt * (0.5 * v[0] + v[1:-1].sum() + 0.5 * v[-1])


def _solution_from_controls(np_, dt, u, status, iterations=0):
    """Propagate the exact zero-order-hold recursion from cell controls."""
    N = u.size
    t = dt * np.arange(N + 1)
    v = np.empty(N + 1)
    v[0] = np_.v0
    v[1:] = np_.v0 + dt * np.cumsum(u)
    p = np.empty(N + 1)
    p[0] = 0.0
    p[1:] = np.cumsum(dt * v[:-1] + 0.5 * u * dt * dt)
    energy = float(np.sum(u * u) * dt)
    return OracleSolution(t, u, v, p, energy, status, iterations)


def _root(f, lo, hi, xtol, maxiter=500):
    """Bracket-growing Brent root of a non-decreasing scalar function."""
    f_lo = f(lo)
    if f_lo >= 0.0:
        return lo
    while f(hi) < 0.0:
        lo, hi = hi, 2.0 * hi
        if hi > 1e300:
            raise ArithmeticError("could not bracket the multiplier")
    # an unconverged root is returned as is; the caller's residual check
    # turns it into a MaxIterations status
    root, _ = brentq(f, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps,
                     maxiter=maxiter, full_output=True, disp=False)
    return root


def solve_qp(np_: NormalizedProblem, N: int = 2000, tol: float = 1e-6,
             max_iter: int = 500) -> OracleSolution:
    """Direct transcription with zero-order-hold control on ``N`` intervals.

    Minimizes ``sum(u_k**2) * dt`` subject to ``0 <= u_k <= u_max``,
    ``v_k <= v_max`` at every node and ``p_N = L``, where the states follow the
    exact recursion ``v_{k+1} = v_k + u_k dt``,
    ``p_{k+1} = p_k + v_k dt + u_k dt**2 / 2``.

    With ``u >= 0`` the node speeds are non-decreasing, so the speed bounds
    reduce to ``v_N <= v_max``.  Stationarity then gives
    ``u_k = clip((mu w_k - lam dt) / (2 dt), 0, u_max)`` with ``w_k`` the
    weight of ``u_k`` in ``p_N``; the multiplier ``mu`` of the terminal
    equality and ``lam >= 0`` of the speed budget are found by nested
    one-dimensional root finding (dual ascent to exact optimality).

    ``tol`` is the relative slack used when declaring infeasibility and the
    bound on the returned primal residual.
    """
    if N < 10:
        raise ValueError("N must be at least 10")
    T, L, v0, um = np_.T, np_.L, np_.v0, np_.u_max
    dt = T / N
    slack = tol * max(1.0, abs(L))
    v_fast, reach = _greedy_reach(np_, dt, N)
    if L > reach + slack or L < v0 * T - slack:
        nan = np.full(N + 1, np.nan)
        return OracleSolution(dt * np.arange(N + 1), nan[:-1], nan, nan, math.nan,
                              OracleStatus.INFEASIBLE)
    if L >= reach - 1e-13 * max(1.0, abs(L)):
        # the feasible set is (numerically) the single fastest profile
        u_fast = np.clip(np.diff(v_fast) / dt, 0.0, um)
        return _solution_from_controls(np_, dt, u_fast, OracleStatus.OPTIMAL)
    if L <= v0 * T + 1e-13 * max(1.0, abs(L)):
        return _solution_from_controls(np_, dt, np.zeros(N), OracleStatus.OPTIMAL)

    w = dt * dt * (N - np.arange(N) - 0.5)
    excess = L - v0 * T
    budget = np_.beta
    calls = 0

    def controls(mu, lam):
        return np.clip((mu * w - lam * dt) / (2.0 * dt), 0.0, um)

    def multiplier(lam):
        nonlocal calls

        def g(mu):
            nonlocal calls
            calls += 1
            return float(np.dot(w, controls(mu, lam))) - excess

        hi = 2.0 * dt * um / w[-1] + lam * dt / w[-1]
        return _root(g, 0.0, max(hi, 1e-300), xtol=1e-300, maxiter=max_iter)

    def headroom(lam):
        # unused speed budget; increasing in lam
        return budget - dt * float(np.sum(controls(multiplier(lam), lam)))

    try:
        lam = 0.0
        if headroom(0.0) < 0.0:
            lam = _root(headroom, 0.0, 2.0 * um, xtol=1e-300, maxiter=max_iter)
        mu = multiplier(lam)
    except ArithmeticError:
        # an unconverged inner solve can break the outer bracket
        nan = np.full(N + 1, np.nan)
        return OracleSolution(dt * np.arange(N + 1), nan[:-1], nan, nan, math.nan,
                              OracleStatus.MAX_ITERATIONS, calls)
    u = controls(mu, lam)
    residual = abs(float(np.dot(w, u)) - excess)
    ok = residual <= slack and v0 + dt * float(np.sum(u)) <= np_.v_max + slack
    status = OracleStatus.OPTIMAL if ok else OracleStatus.MAX_ITERATIONS
    return _solution_from_controls(np_, dt, u, status, calls)


# --------------------------------------------------------------------------
# switching-time grid search
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class GridSearchResult:
    profile: str
    tau_c: float | None
    tau_s: float | None
    energy: float
    cell: float
    per_family: dict = field(default_factory=dict)


_FAMILY_ORDER = ("Unconstrained", "AffineCoast", "BangAffine", "BangAffineCoast",
                 "BangCoast", "Bang")


def _best(mask, energy):
    if not np.any(mask):
        return None
    e = np.where(mask, energy, np.inf)
    k = int(np.argmin(e))
    return k, float(e.flat[k])


def grid_search_switch(np_: NormalizedProblem, resolution: int = 2000) -> GridSearchResult:
    """Exhaustive search over switching times on a uniform grid of ``[0, T]``.

    Each family fixes the arc pattern and one gridded switching time; the one
    remaining unknown (a control level, or the bang/affine junction in the
    three-arc family) is solved from ``p(T) = L``, and the candidate is kept
    only if it respects ``0 <= u <= u_max`` and ``v <= v_max``.  The
    lowest-energy candidate over all families wins; exact ties go to the
    simpler family.

    Raises :class:`NoFeasibleCandidate` if every candidate violates a bound.
    """
    if resolution < 100:
        raise ValueError("resolution must be at least 100")
    T, L, v0, um, vm = np_.T, np_.L, np_.v0, np_.u_max, np_.v_max
    h = T / resolution
    grid = h * np.arange(resolution + 1)
    grid[-1] = T
    D = L - v0 * T
    u_ok = um * (1 + 1e-12) + 1e-15
    v_ok = vm + 1e-12 * max(1.0, abs(vm))
    found = {}

    with np.errstate(divide="ignore", invalid="ignore"):
        # single affine ramp to zero at T
        c = 3.0 * D / T ** 3
        if 0.0 <= c * T <= u_ok and v0 + 0.5 * c * T * T <= v_ok:
            found["Unconstrained"] = (None, None, c * c * T ** 3 / 3.0)

        # ramp from u0 to zero at tau_s < T, then hold the speed reached
        ts = grid[1:-1]
        u0 = D / (ts * (0.5 * T - ts / 6.0))
        ok = (u0 >= 0) & (u0 <= u_ok) & (v0 + 0.5 * u0 * ts <= v_ok)
        hit = _best(ok, u0 * u0 * ts / 3.0)
        if hit:
            found["AffineCoast"] = (None, float(ts[hit[0]]), hit[1])

        # full throttle to tau_c, then a ramp from u1 to zero at T
        tc = grid[:-1]
        w = T - tc
        bang_dist = um * (0.5 * tc * tc + tc * w)
        u1 = (D - bang_dist) / (w * w / 3.0)
        ok = (u1 >= 0) & (u1 <= u_ok) & (v0 + um * tc + 0.5 * u1 * w <= v_ok)
        hit = _best(ok, um * um * tc + u1 * u1 * w / 3.0)
        if hit:
            found["BangAffine"] = (float(tc[hit[0]]), None, hit[1])

        # throttle to tau_c, ramp from u_max to zero at tau_s, hold the speed
        # reached; tau_s < T is gridded (tau_s == T is the two-arc family) and
        # tau_c is the root in [0, tau_s] of p(T) = L, quadratic in tau_c
        ts = grid[1:-1]
        c0 = 0.5 * (T - ts) * ts + ts * ts / 3.0
        q = 6.0 * (D / um - c0)
        b = 3.0 * T - ts
        disc = b * b - 4.0 * q
        tc = 2.0 * q / (b + np.sqrt(disc))
        v_s = v0 + 0.5 * um * (tc + ts)
        ok = (q >= 0) & (disc >= 0) & (tc <= ts) & (v_s <= v_ok)
        hit = _best(ok, um * um * (2.0 * tc + ts) / 3.0)
        if hit:
            found["BangAffineCoast"] = (float(tc[hit[0]]), float(ts[hit[0]]), hit[1])

        # full throttle until v_max, then hold: only meets p(T) = L on the
        # reachability boundary
        t_r = (vm - v0) / um
        if 0.0 < t_r < T:
            reach = v0 * t_r + 0.5 * um * t_r * t_r + vm * (T - t_r)
            if abs(reach - L) <= 1e-9 * max(1.0, abs(L)):
                found["BangCoast"] = (t_r, t_r, um * um * t_r)

        # full throttle over the whole horizon
        u1 = 2.0 * D / (T * T)
        if abs(u1 - um) <= 1e-9 * um and v0 + u1 * T <= v_ok:
            found["Bang"] = (None, None, u1 * u1 * T)

    if not found:
        raise NoFeasibleCandidate("no grid candidate satisfies the bounds")
    best_name = None
    for name in _FAMILY_ORDER:
        if name not in found:
            continue
        e = found[name][2]
        if best_name is None or e < found[best_name][2] * (1 - 1e-12) - 1e-15:
            best_name = name
    tau_c, tau_s, e = found[best_name]
    return GridSearchResult(best_name, tau_c, tau_s, e, h, found)


# --------------------------------------------------------------------------
# comparison
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ComparisonReport:
    energy_gap: float
    control_gap: float
    speed_gap: float
    position_gap: float

    @property
    def state_gap(self) -> float:
        return max(self.speed_gap, self.position_gap)


def compare(plan: TrajectoryPlan, sol: OracleSolution) -> ComparisonReport:
    """Gaps between a plan and an oracle solution on the oracle's grid.

    ``energy_gap`` is signed (oracle minus plan); the pointwise gaps compare
    the oracle's cell control with the plan's control at the cell midpoint and
    the states at the grid nodes.  Grid times past the plan's horizon are
    clipped, so mismatched problems produce large gaps rather than errors.
    """
    if sol.status is OracleStatus.INFEASIBLE:
        return ComparisonReport(math.nan, math.nan, math.nan, math.nan)
    t = np.clip(sol.grid_times + plan.t_start, plan.t_start, plan.t_end)
    mid = np.clip(0.5 * (t[:-1] + t[1:]), plan.t_start, plan.t_end)
    u_mid, _, _ = evaluate(plan, mid)
    _, v, p = evaluate(plan, t)
    p = p - plan.arcs[0].p_entry
    return ComparisonReport(
        energy_gap=sol.energy - plan.energy,
        control_gap=float(np.max(np.abs(u_mid - sol.controls))),
        speed_gap=float(np.max(np.abs(v - sol.speeds))),
        position_gap=float(np.max(np.abs(p - sol.positions))),
    )
