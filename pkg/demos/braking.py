"""
Braking is acceleration in a mirror
===================================

A vehicle that is too fast for its slot is handled by negating positions,
speeds and controls, planning as usual, and mapping back.
"""
import numpy as np

from mintraj import evaluate, make_scenario, plan_scenario, validate

# 3 m/s at t=10, must be 12 m further along at t=16 and may not drop below 1 m/s
s = make_scenario(t0=10.0, p0=100.0, v0=3.0, T=16.0, pT=112.0,
                  u_min=-0.6, u_max=1.0, v_min=1.0, v_max=4.0)
p, canonical, frame = plan_scenario(s)
print("canonical problem:", canonical)
print("frame:", frame)
print(p.profile, "mirrored:", p.mirrored)
for arc in p.arcs:
    print(f"  {str(arc.kind):7s} [{arc.t_start:.4f}, {arc.t_end:.4f}]  u0={arc.intercept:+.4f}")

t = np.linspace(s.t0, s.T, 7)
u, v, pos = evaluate(p, t)
print(np.column_stack([t, u, v, pos]).round(4))

# checked against the original limits, not the canonical ones
print(validate(p, s))
