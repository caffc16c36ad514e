"""The triangular jet solver against a dense least-squares solve."""
import numpy as np

from fatdist.errors import NotRegularError
from fatdist.jets import (
    _Trace, assemble_dense, fullrank_check, holomorphic_system, oracle_gap,
    system_residual, triangular_solve,
)

sys = holomorphic_system(2, rhs="random", rng=3)
print("unknown indices:", sys.indices(), " regular:", fullrank_check(sys))

trace = _Trace()
q = triangular_solve(sys, trace)
print("reads (current, earlier):", trace.reads)
print("residual:", system_residual(sys, q))

m, b, order = assemble_dense(sys)
print("dense system", m.shape, "rank", np.linalg.matrix_rank(m))
print("gap to the dense min-norm solution:", oracle_gap(sys, q))

bad = holomorphic_system(2, rng=3, regular=False)
try:
    triangular_solve(bad)
except NotRegularError as exc:
    print("columns v, Av:", exc)
