"""Fat pairs of symplectic forms and their connecting automorphism."""
import numpy as np

from fatdist.core import Subspace
from fatdist.fat2 import (
    FatTuple2, companion_tuple, connecting_automorphism, degree, holomorphic_tuple,
    is_fat, omega_perp, regularity_criteria,
)

np.set_printoptions(precision=3, suppress=True)

# The holomorphic contact pair on R^4 in the frame (X1, X2, Y1, Y2)
t = holomorphic_tuple(1)
ca = connecting_automorphism(t)
print("A =\n", ca.a)
print("A^2 =\n", ca.a @ ca.a)  # minus the identity, so degree 2
print("fat:", is_fat(t), " degree:", degree(t))

# Two equal forms give A = I, which has real eigenvalues
same = FatTuple2(t.omega1, t.omega1)
print("omega2 = omega1 fat:", is_fat(same))

# A tuple whose automorphism has minimal polynomial (t^2+1)(t^2+4)
print("companion degree:", degree(companion_tuple()))

# Regularity of a line is automatic for a fat pair
v = Subspace(np.array([1.0, 2.0, 0.0, -1.0]), 4)
print("line criteria:", regularity_criteria(t, v))
print("dim V^Omega:", omega_perp(t, v).dim)

# V + AV is never regular: it meets its own image
vav = Subspace(np.column_stack([v.basis[:, 0], ca.a @ v.basis[:, 0]]), 4)
print("V+AV criteria:", regularity_criteria(t, vav))
