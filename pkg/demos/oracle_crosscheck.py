"""
Checking the closed forms numerically
=====================================

Two solvers that share nothing with the planner: a direct transcription
QP on a uniform grid, and an exhaustive search over switching times.
"""
import numpy as np

from mintraj import NormalizedProblem, compare, grid_search_switch, plan, solve_qp

problem = NormalizedProblem(v0=0.0, L=2.7, T=3.0, u_max=2.0, v_max=1.0)
p = plan(problem)

g = grid_search_switch(problem, resolution=2000)
print(f"grid search: {g.profile}, tau_c={g.tau_c:.5f} (closed form {p.tau_c:.5f}), "
      f"tau_s={g.tau_s:.5f} (closed form {p.tau_s:.5f}), cell={g.cell:.5f}")

# The transcription error in energy shrinks with the square of the grid step.
Ns = np.array([250, 500, 1000, 2000, 4000])
gaps = []
for N in Ns:
    r = compare(p, solve_qp(problem, N=N))
    gaps.append(r.energy_gap)
    print(f"N={N:5d}  energy gap {r.energy_gap:.3e}  control gap {r.control_gap:.3e}")
slope = np.polyfit(np.log(Ns), np.log(np.abs(gaps)), 1)[0]
print(f"fitted log-log slope {slope:.3f}")
