"""Quaternionic contact data: the induced pair and the g-orthogonal decomposition."""
import numpy as np

from fatdist.core import random_subspace
from fatdist.fat2 import connecting_automorphism, degree
from fatdist.qcont import decomposition_check, induced_fat_pair, random_qcont, validate_triple

rng = np.random.default_rng(7)
q = random_qcont(3, rng)  # dim 12, random change of basis
print(validate_triple(q))

pair = induced_fat_pair(q)
a = connecting_automorphism(pair).a
print("|A(omega2, omega3) + J1| =", np.abs(a + q.j1).max())
print("degree of the induced pair:", degree(pair))

for k in (1, 2, 3):
    w = random_subspace(q.dim, k, rng)
    rep = decomposition_check(q, w)
    print(f"k={k}: direct={rep.info['direct']}, dims {rep.info['dim_perp']} + {rep.info['dim_jspan']},",
          f"g-orthogonality {rep['g-orthogonal'].residual:.1e}")
