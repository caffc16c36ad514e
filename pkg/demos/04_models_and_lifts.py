"""Affine coframe models: exact brackets, curvature, and horizontal lifts."""
import numpy as np

from fatdist.models import (
    bracket, holomorphic_liouville, lift_curve, make_holomorphic_contact_model, refinement_study,
)
from fatdist.suites import curvature_cross_residual

m = make_holomorphic_contact_model(1)
names = m.frame_names
x = np.random.default_rng(0).uniform(-2, 2, m.dim_m)

# Bracket table of the frame, written in the coordinate basis
for i, a in enumerate(names):
    for j, b in enumerate(names):
        if i < j:
            v = bracket(m.frame[i], m.frame[j])(x)
            terms = [f"{c:+g} d/d{m.coords[k]}" for k, c in enumerate(v) if c]
            print(f"[{a}, {b}] = {' '.join(terms) or '0'}")

print("coframe vs bracket curvature:", curvature_cross_residual(m, x))

# Lifting curves in R^4 to the corank-2 Liouville model
l = holomorphic_liouville()
line = lift_curve(l, ["t", "t**2 - 1", "0.5", "-2"], (0, 1), 30)
print("planar curve residual:", line.max_residual)

study = refinement_study(l, ["cos(t)", "0", "sin(t)", "0"], (0, 2 * np.pi), 33, 3)
print("circle residuals:", ["%.2e" % r for r in study["residuals"]])
print("ratios per halving:", ["%.4f" % r for r in study["ratios"]])
