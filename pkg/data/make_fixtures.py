"""Regenerate the JSON fixtures in this directory.

Run from the repository root: ``python3 data/make_fixtures.py``.  Every random
choice is seeded, so the output is stable.
"""
from pathlib import Path

import numpy as np

from fatdist.fat2 import FatTuple2, holomorphic_tuple, random_fat_tuple
from fatdist.instances import dumps, encode
from fatdist.jets import holomorphic_system
from fatdist.models import holomorphic_liouville, make_holomorphic_contact_model
from fatdist.qcont import random_qcont

HERE = Path(__file__).resolve().parent


def write(name, doc):
    (HERE / name).write_text(dumps(doc))


def main():
    h = holomorphic_tuple(1)
    write("holomorphic_model_n1.json", encode(make_holomorphic_contact_model(1),
                                             description="holomorphic contact model, n=1"))
    write("holomorphic_tuple_n1.json", encode(h, description="pointwise holomorphic pair, dim 4"))
    write("equal_forms.json", encode(FatTuple2(h.omega1, h.omega1), description="omega2 = omega1"))
    write("tuple_dim8_deg2.json", encode(random_fat_tuple(8, 11, deg=2), description="random degree 2 tuple"))
    write("tuple_dim4_deg2.json", encode(random_fat_tuple(4, 12, deg=2), description="random degree 2 tuple"))
    write("qcont_dim8.json", encode(random_qcont(2, 13), description="random quaternionic triple, dim 8"))
    write("liouville_holomorphic.json", encode(holomorphic_liouville(),
                                               description="mu1 = x1 dy1 - x2 dy2, mu2 = x2 dy1 + x1 dy2"))
    write("grid_planar.json", encode({"curve": ["t", "t**2 - 1", "0.5", "-2"], "t_range": [0, 1], "n": 30},
                                     kind="grid", description="curve in the (x1, x2) plane"))
    write("grid_circle.json", encode({"curve": ["cos(t)", "0", "sin(t)", "0"], "t_range": [0, 2 * np.pi],
                                      "n": 33}, kind="grid", description="unit circle in the (x1, y1) plane"))
    th = np.linspace(0, np.pi, 40)
    f = np.column_stack([np.cos(th), 0 * th, np.sin(th), 0 * th])
    write("grid_nonexact.json", encode({"samples": f.tolist(), "primitives": np.zeros((40, 2)).tolist()},
                                       kind="grid", description="half circle with zero primitives"))
    write("jets_k2.json", encode(holomorphic_system(2, rhs="random", rng=14),
                                 description="k+1 = 2, holomorphic n=2 data, random right-hand side"))
    write("jets_homogeneous.json", encode(holomorphic_system(2, rng=14), description="homogeneous system"))
    write("jets_nonregular.json", encode(holomorphic_system(2, rng=15, regular=False),
                                         description="columns v, Av"))
    (HERE / "malformed.json").write_text('{"schema_version": "1.0",\n "kind": "fat_tuple",\n "payload": {\n')


if __name__ == "__main__":
    main()
