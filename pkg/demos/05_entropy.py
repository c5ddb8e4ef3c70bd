"""Bowen entropy ladders: zero for isometries, ln 2 for the doubling
suspension, and the nonsingular-part variant via X_delta sets."""

import math

import numpy as np

from expanse import (
    CircleUnion,
    entropy_estimate,
    exp_radii,
    h_star_estimate,
    interval_flow,
    rotation_flow,
    spanning_cardinality,
    suspension_doubling,
    x_delta_set,
)

# Isometric rotations: spanning numbers do not grow with the horizon.
rot = rotation_flow(CircleUnion(exp_radii(4)))
grid = rot.space.grid(16)
for t in (5.0, 20.0, 40.0):
    est = spanning_cardinality(rot, grid, t, eps=0.1)
    print(f"rotation r(t={t:4.0f}, eps=0.1) = {est.cardinality}")
est = entropy_estimate(rot, grid, [10.0, 20.0, 30.0], [0.1, 0.05])
print(f"rotation entropy slope: {est.h_estimate:+.4f}\n")

# Positive-entropy control: the doubling suspension should give ~ ln 2.
susp = suspension_doubling()
section = [np.array([k / 512, 0.5]) for k in range(512)]
pos = entropy_estimate(susp, section, [2.0, 3.0, 4.0, 5.0], [0.25, 0.2])
for t, e, r in pos.r_table:
    if e == 0.2:
        print(f"suspension r(t={t:.0f}, eps=0.2) = {r}")
print(f"suspension entropy slope: {pos.h_estimate:.4f} (ln 2 = {math.log(2):.4f})\n")

# X_delta: the rotation keeps exactly the circles of radius >= delta,
# while every interval-flow orbit eventually hugs an endpoint.
kept = x_delta_set(rot, 0.2, grid=grid, T_escape=20.0)
print(f"rotation X_0.2 keeps radii {sorted({round(math.hypot(*p), 4) for p in kept})}")
flow = interval_flow(1.0)
print(f"interval X_0.1 grid points: {len(x_delta_set(flow, 0.1, grid=flow.space.grid(64)))}")
hs = h_star_estimate(flow, [0.1, 0.2], [2.0, 4.0], [0.1], grid=flow.space.grid(32))
print(f"interval h* estimate: {hs.h_estimate} (all X_delta empty: {hs.all_empty})")
