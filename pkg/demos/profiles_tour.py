"""
Six ways to arrive on time
==========================

One canonical problem per profile family: thresholds, the label the
classifier picks, and the switching times of the resulting plan.
"""
import numpy as np

from mintraj import InfeasibleProblem, NormalizedProblem, classify, plan, thresholds

# (v0, L, T, u_max, v_max)
cases = {
    "gentle": (0.0, 1.0, 1.0, 4.0, 2.0),
    "speed-capped": (0.0, 1.5, 2.0, 2.0, 1.0),
    "throttle-capped": (0.0, 1.5, 2.0, 1.0, 1.5),
    "both capped": (0.0, 2.7, 3.0, 2.0, 1.0),
    "just enough": (0.0, 2.75, 3.0, 2.0, 1.0),
    "flat out": (0.0, 1.0, 1.0, 2.0, 2.0),
}

print(f"{'case':16s} {'t_state':>8s} {'t_ctrl':>8s}  {'profile':16s} {'tau_c':>8s} {'tau_s':>8s} {'energy':>8s}")
for name, args in cases.items():
    problem = NormalizedProblem(*args)
    th = thresholds(problem)
    p = plan(problem)
    tc = np.nan if p.tau_c is None else p.tau_c
    ts = np.nan if p.tau_s is None else p.tau_s
    print(f"{name:16s} {th.t_state:8.4f} {th.t_control:8.4f}  {str(classify(problem)):16s} "
          f"{tc:8.5f} {ts:8.5f} {p.energy:8.5f}")

# Shrinking the horizon walks one problem through the families: long
# horizons need no limit, short ones hit both, and eventually the distance
# is out of reach.
L, v0, u_max, v_max = 2.5, 0.0, 2.0, 1.0
for T in np.linspace(4.0, 2.6, 8):
    try:
        print(f"T={T:5.3f}  {plan(NormalizedProblem(v0, L, T, u_max, v_max)).profile}")
    except InfeasibleProblem as exc:
        print(f"T={T:5.3f}  infeasible (L_max={exc.L_max:.3f})")
