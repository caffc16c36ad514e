"""Greedy construction of regular frames, checked by the independent verifier."""
import numpy as np

from fatdist.errors import ConstructionFailure
from fatdist.fat2 import random_fat_tuple
from fatdist.frames import REGIMES, build_frame, verify_frame
from fatdist.qcont import random_qcont

rng = np.random.default_rng(2024)

for regime in REGIMES:
    k = 2
    if regime.endswith("deg2"):
        ctx = random_fat_tuple(4 * k, rng)
    else:
        ctx = random_qcont(2 * k if regime.startswith("isocontact") else k, rng)
    frame = build_frame(regime, ctx, k, rng)
    rep = verify_frame(frame, ctx)
    print(f"{regime:18s} dim {ctx.dim:2d}: {len(frame)} vectors, verified={rep.passed}")

# Below the threshold the greedy step runs out of room
try:
    build_frame("horizontal_deg2", random_fat_tuple(4, rng), 2, rng)
except ConstructionFailure as exc:
    print("dim 4, k = 2:", exc)

# A full report for one frame
ctx = random_qcont(2, rng)
print(verify_frame(build_frame("isocontact_qcont", ctx, 1, rng), ctx))
