"""The constants tying the hierarchy together, checked at desk scale.

B bounds the field norm by the singular distance, C the reverse; together
they let the rescaling-weighted and singular-weighted alignment costs
bound each other. The matched-scale implication (singular cost below
delta/diam forces unit cost below delta) holds pair by pair.
"""

import numpy as np

from expanse import (
    CircleUnion,
    comparability_constants,
    exp_radii,
    hierarchy_check,
    interval_flow,
    local_norm_constant,
    return_time_bound_check,
    rotation_flow,
)

for make, label in ((lambda: interval_flow(1.0), "logistic field"),
                    (lambda: rotation_flow(CircleUnion(exp_radii(6))),
                     "rotation field")):
    flow = make()
    rep = comparability_constants(flow)
    c, info = local_norm_constant(flow, n_pairs=2000)
    print(f"{label}: B={rep.B:.6f} (at {rep.argmax_B}),"
          f" C={rep.C:.6f} (at {rep.argmax_C}), c={c:.4f} (L={info['L_hat']:.3f})")

print()
flow = interval_flow(1.0)
rt = return_time_bound_check(flow, x_grid=[np.array([0.5])],
                             delta_grid=[0.05, 0.1], r_hi=1.0)
print(f"interval return-time bound: r0={rt['r0']:.3f}, violation={rt['violation']}")

print()
rep = hierarchy_check(rotation_flow(CircleUnion(exp_radii(6))), delta=0.25,
                      T=4.0, h=0.05, band_width=0.5)
print(f"hierarchy check on {rep['n_pairs']} pairs:"
      f" {len(rep['violations'])} violations (delta={rep['delta']},"
      f" diam={rep['diam']})")
below = sum(1 for _, _, cs, _ in rep["pairs"] if cs <= 0.25 / rep["diam"])
print(f"pairs with singular cost below delta/diam: {below}")
