"""
Convex linear but not linear
============================

The constant map sends every pure state to |0>. It cannot be used to signal
through a steering scenario, yet no operator implements it.
"""

import numpy as np

from loclab import linalg as la
from loclab.gisin import (
    build_steering_scenario,
    canonical_pair,
    constant_map,
    convex_linearity_gap,
    linear_map,
    nonlinearity_witness,
    renormalize_map,
    signaling_gap,
)

scenario = build_steering_scenario(*canonical_pair(2))
print("Alice's second basis:")
print(np.round(scenario.measurements[1][0], 3))

for label, f in [("hadamard", linear_map(np.array([[1, 1], [1, -1]]) / np.sqrt(2))),
                 ("constant", constant_map(2)),
                 ("renormalize", renormalize_map(2))]:
    gap = convex_linearity_gap(f, pairs=100, seed=0)
    report = nonlinearity_witness(f)
    print(f"{label:12s} convex gap={gap:.3f}  signaling={signaling_gap(f, scenario):.3f}  "
          f"linearizable={report.is_linearizable}")
    if report.witness:
        print(" " * 13 + report.witness["message"])

