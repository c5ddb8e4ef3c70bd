"""The interval flow's split personality: singular-equicontinuous, not
equicontinuous.

Relative to the distance from the endpoints, a ball of radius
delta * min(x, 1-x) is swept in time at most ln((1+delta)/(1-delta)), so
(eps, delta) = (0.85, 0.4) certifies the ball-inclusion condition. Plainly
close pairs, by contrast, drift apart by a fixed amount while they cross
the middle of the interval, no matter how close they start.
"""

import math

import numpy as np

from expanse import ball_inclusion_check, check_equicontinuity, interval_flow

flow = interval_flow(1.0)
grid = flow.space.grid(300)

ok = ball_inclusion_check(flow, eps=0.85, delta=0.4, x_grid=grid, ball_samples=60)
print(f"ball inclusion at (0.85, 0.4): {ok.verdict}")
print(f"  max transit time {ok.stats['max_transit_time']:.6f}"
      f" vs bound ln(1.4/0.6) = {math.log(1.4/0.6):.6f}")

bad = ball_inclusion_check(flow, eps=0.5, delta=0.4, x_grid=grid, ball_samples=60)
wx, wy = bad.witness.x.coords[0], bad.witness.y.coords[0]
print(f"ball inclusion at (0.50, 0.4): {bad.verdict}"
      f" (x={wx:.4f} needs t={bad.witness.alignment.cost:.4f} to reach {wy:.4f})")

print()
for delta in (1e-2, 1e-3, 1e-4):
    rep = check_equicontinuity(flow, False, eps=0.1, delta=delta)
    w = rep.witness
    print(f"plain equicontinuity, delta={delta:g}: {rep.verdict};"
          f" x={w.x.coords[0]:.2e}, y={w.y.coords[0]:.2e}"
          f" separate to {w.alignment.cost:.4f} at t={w.alignment.argmax_t:+.2f}")

sing = check_equicontinuity(flow, True, eps=0.85, delta=0.4)
print(f"singular equicontinuity at (0.85, 0.4): {sing.verdict}")
