"""
Inside a three-arc plan
=======================

Build the plan for a problem where both limits bind, look at its arcs, and
sample it densely enough to plot (junction rows included).
"""
import numpy as np

from mintraj import NormalizedProblem, evaluate, plan, sample, validate

problem = NormalizedProblem(v0=0.0, L=2.7, T=3.0, u_max=2.0, v_max=1.0)
p = plan(problem)
print(p.profile, "energy", p.energy)
for arc in p.arcs:
    print(f"  {str(arc.kind):7s} [{arc.t_start:.5f}, {arc.t_end:.5f}]  "
          f"u = {arc.intercept:+.4f} {arc.slope:+.4f}*(t - t_start)")

# closed-form values anywhere on the horizon
t = np.array([0.0, p.tau_c, 0.5, p.tau_s, 3.0])
u, v, pos = evaluate(p, t)
print(np.column_stack([t, u, v, pos]).round(6))

# the speed reaches v_max exactly where the coast begins
print("v(tau_s) - v_max =", evaluate(p, p.tau_s)[1] - problem.v_max)

pts = sample(p, 11)
print(len(pts), "rows (11 uniform + 2 junctions)")

d = validate(p, problem)
print("max control violation", d.max_control_violation, "ok:", d.ok)

# plot-ready columns
table = np.array([[q.t, q.u, q.v, q.p] for q in sample(p, 301)])
np.set_printoptions(suppress=True)
print(table[::60])
