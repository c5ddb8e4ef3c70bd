"""Falsifying singular expansivity on the harmonic circles.

Circles of radius 1/n accumulate at the singular origin. Adjacent circles
n and n+1 stay within distance 1/(n(n+1)) of each other forever, which is
1/(n+1) times the distance to the singular set: once 1/(n+1) drops below
delta, the pair defeats the definition, because the two orbits are
genuinely different. The exponential radii e^-n behave differently: their
adjacent-circle ratio is the constant 1 - 1/e, so no pair below that
threshold exists at all.
"""

import math

import numpy as np

from expanse import (
    CircleUnion,
    align,
    check_property,
    exp_radii,
    harmonic_radii,
    rotation_flow,
    sample_orbit,
)

harmonic_rot = rotation_flow(CircleUnion(harmonic_radii(16)))

report = check_property(harmonic_rot, "singular_expansive", eps=1.0, delta=0.1,
                        T=8.0, h=0.05, band_width=1.0)
print(f"harmonic circles: {report.verdict}")
w = report.witness
print(f"witness radii: {math.hypot(*w.x.coords):.6f}, {math.hypot(*w.y.coords):.6f}")
print(f"weighted alignment cost: {w.alignment.cost:.12f} (analytic 1/(n+1))")

# The alignment behind the witness: the rotation is an isometry, so the
# identity reparametrization is already optimal.
xs = sample_orbit(harmonic_rot, w.x.vec, T=8.0, h=0.05)
ys = sample_orbit(harmonic_rot, w.y.vec, T=8.0, h=0.05)
res = align(xs, ys, weight_kind="sing_dist", band_width=1.0)
print(f"re-aligned cost: {res.cost:.12f}, worst time {res.argmax_t:+.2f}")

exp_rot = rotation_flow(CircleUnion(exp_radii(8)))
report2 = check_property(exp_rot, "singular_expansive", eps=0.5, delta=0.45,
                         T=8.0, h=0.05, band_width=1.0)
ratio = 1.0 - math.exp(-1.0)
print(f"\nexponential circles: {report2.verdict}"
      f" (adjacent ratio {ratio:.6f} > delta 0.45 for every n)")
