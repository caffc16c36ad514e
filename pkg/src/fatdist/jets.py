"""Triangular solver for the symmetric jet tensor of a regular first jet.

Given ``lambda`` (``p x n``), the constant curvature matrices ``d lambda^s``
and a first jet ``P1`` (``n x (k+1)``, columns in ``ker lambda``), find
``Q : Sym^(alpha+2) R^(k+1) -> R^n`` with

* ``lambda . Q(I) = r(lambda, I)`` for every multi-index ``I``;
* ``C_a . Q(J+b) - C_b . Q(J+a) = r(coupling, J, a, b)`` for every
  ``J`` of length ``alpha+1`` and ``a < b``,

where ``C_a`` stacks the covectors ``w -> d lambda^s(P1 e_a, w)``.  Since
``J+a`` precedes ``J+b`` lexicographically, each coupling equation is
assigned to ``I = J+b`` and the unknowns are solved in increasing order.
Multi-indices are 1-based nondecreasing tuples.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement
import numpy as np

from .core import DEFAULT_TOL, Tolerance, rank, rng_from
from .errors import DimensionMismatchError, InternalInconsistencyError, NotRegularError, NumericFailure, SizeError

__all__ = [
    "multi_indices", "SymTensorSystem", "SymTensor", "fullrank_check",
    "triangular_solve", "assemble_dense", "system_residual", "oracle_gap",
    "expected_rank", "stacked_covectors", "stage_blocks", "random_rhs", "rhs_from_tensor", "holomorphic_system",
]

RESIDUAL_BOUND = 1e-9
MAX_UNKNOWNS = 5000


def multi_indices(k_plus_1: int, length: int) -> list[tuple[int, ...]]:
    """Nondecreasing tuples over ``1..k_plus_1`` in lexicographic order."""
    return list(combinations_with_replacement(range(1, k_plus_1 + 1), length))


def _plus(j: tuple, a: int) -> tuple:
    return tuple(sorted(j + (a,)))


@dataclass
class SymTensorSystem:
    """Data of the affine system for ``Q``.

    ``rhs`` may be ``None`` (homogeneous), a mapping from equation tags to
    vectors in ``R^p``, or a callable on tags.  Tags are
    ``("lambda", I)`` and ``("coupling", J, a, b)``.
    """

    lam: np.ndarray
    dlams: list
    p1: np.ndarray
    rhs: object = None
    alpha: int = 0
    tol: Tolerance = DEFAULT_TOL

    def __post_init__(self):
        self.lam = np.atleast_2d(np.asarray(self.lam, dtype=float))
        self.dlams = [np.asarray(d, dtype=float) for d in self.dlams]
        self.p1 = np.asarray(self.p1, dtype=float)
        p, n = self.lam.shape
        if len(self.dlams) != p:
            raise DimensionMismatchError(f"{len(self.dlams)} curvature matrices for {p} forms")
        for d in self.dlams:
            if d.shape != (n, n) or np.abs(d + d.T).max() > 1e-12 * max(1.0, np.abs(d).max()):
                raise DimensionMismatchError(f"curvature matrices must be skew {n}x{n}")
        if self.p1.ndim != 2 or self.p1.shape[0] != n:
            raise DimensionMismatchError(f"p1 must have {n} rows")
        if rank(self.lam, self.tol) < p:
            raise NotRegularError("lambda does not have full rank")
        if self.alpha < 0:
            raise ValueError("alpha must be nonnegative")

    @property
    def p(self) -> int:
        return self.lam.shape[0]

    @property
    def n(self) -> int:
        return self.lam.shape[1]

    @property
    def k_plus_1(self) -> int:
        return self.p1.shape[1]

    def c(self, a: int) -> np.ndarray:
        """Rows ``d lambda^s(P1 e_a, .)`` for 1-based ``a``."""
        u = self.p1[:, a - 1]
        return np.vstack([u @ d for d in self.dlams])

    def indices(self) -> list[tuple]:
        return multi_indices(self.k_plus_1, self.alpha + 2)

    def rhs_for(self, tag) -> np.ndarray:
        if self.rhs is None:
            return np.zeros(self.p)
        val = self.rhs(tag) if callable(self.rhs) else self.rhs.get(tag, np.zeros(self.p))
        val = np.asarray(val, dtype=float).reshape(self.p)
        if not np.all(np.isfinite(val)):
            raise ValueError(f"non-finite right-hand side for {tag}")
        return val

    def equations(self):
        """Yield ``(tag, I, rows_I, I_prev, rows_prev)``; ``I_prev`` may be None."""
        for i in self.indices():
            yield ("lambda", i), i, self.lam, None, None
        for j in multi_indices(self.k_plus_1, self.alpha + 1):
            for a in range(1, self.k_plus_1 + 1):
                for b in range(a + 1, self.k_plus_1 + 1):
                    yield ("coupling", j, a, b), _plus(j, b), self.c(a), _plus(j, a), -self.c(b)


@dataclass
class SymTensor:
    values: dict

    def __getitem__(self, index) -> np.ndarray:
        return self.values[tuple(sorted(index))]

    def stacked(self, order) -> np.ndarray:
        return np.concatenate([self.values[i] for i in order])

    def to_dict(self) -> dict:
        return {"indices": [list(i) for i in self.values], "values": [v.tolist() for v in self.values.values()]}


def stacked_covectors(sys: SymTensorSystem) -> np.ndarray:
    """Rows ``lambda^s`` followed by ``d lambda^s(P1 e_a, .)`` for every column ``a``."""
    return np.vstack([sys.lam] + [sys.c(a) for a in range(1, sys.k_plus_1 + 1)])


def fullrank_check(sys: SymTensorSystem) -> bool:
    """Independence of ``lambda^s`` together with all ``d lambda^s(P1 e_a, .)``."""
    return rank(stacked_covectors(sys), sys.tol) == sys.p * (sys.k_plus_1 + 1)


def stage_blocks(sys: SymTensorSystem) -> dict:
    """Left-hand matrix acting on ``Q(I)`` at each stage, duplicate rows removed.

    Rows coming from the same column ``a`` coincide, so each stage uses
    ``lambda`` and ``C_a`` for ``a < max(I)``.
    """
    out = {}
    for i in sys.indices():
        cols = sorted({a for tag, j, *_ in sys.equations() if j == i and tag[0] == "coupling"
                       for a in [tag[2]]})
        out[i] = np.vstack([sys.lam] + [sys.c(a) for a in cols])
    return out


@dataclass
class _Trace:
    reads: list = field(default_factory=list)


def triangular_solve(sys: SymTensorSystem, trace: _Trace | None = None) -> SymTensor:
    """Solve ``Q`` index by index in lexicographic order.

    Each stage is a minimum-norm least-squares solve.  Reads of earlier
    components are checked to precede the current index.

    Raises
    ------
    NotRegularError
        If ``fullrank_check`` fails.
    NumericFailure
        If some stage leaves a residual above ``RESIDUAL_BOUND``.
    """
    if not fullrank_check(sys):
        raise NotRegularError("first jet is not regular: stacked covectors are dependent")
    by_index: dict[tuple, list] = {}
    for eq in sys.equations():
        by_index.setdefault(eq[1], []).append(eq)
    q: dict[tuple, np.ndarray] = {}
    for i in sys.indices():
        rows, vals = [], []
        for tag, _, a_rows, prev, p_rows in by_index[i]:
            r = sys.rhs_for(tag)
            if prev is not None:
                if not prev < i:
                    raise InternalInconsistencyError(f"index {i} reads {prev}, which does not precede it")
                if trace is not None:
                    trace.reads.append((i, prev))
                r = r - p_rows @ q[prev]
            rows.append(a_rows)
            vals.append(r)
        m = np.vstack(rows)
        v = np.concatenate(vals)
        x, *_ = np.linalg.lstsq(m, v, rcond=None)
        res = np.abs(m @ x - v).max()
        if res > RESIDUAL_BOUND * (1.0 + np.abs(v).max()):
            raise NumericFailure(f"stage {i} is inconsistent, residual {res:.3g}")
        q[i] = x
    return SymTensor(q)


def assemble_dense(sys: SymTensorSystem, max_unknowns: int = MAX_UNKNOWNS):
    """The whole system as one matrix over the stacked unknowns ``Q(I)``.

    Returns
    -------
    m : ndarray
    b : ndarray
    order : list of tuple
        Multi-index order of the unknown blocks.
    """
    order = sys.indices()
    n = sys.n
    size = len(order) * n
    if size > max_unknowns:
        raise SizeError(f"{size} unknowns exceed the limit {max_unknowns}")
    pos = {i: k * n for k, i in enumerate(order)}
    blocks, rhs = [], []
    for tag, i, a_rows, prev, p_rows in sys.equations():
        row = np.zeros((sys.p, size))
        row[:, pos[i]:pos[i] + n] += a_rows
        if prev is not None:
            row[:, pos[prev]:pos[prev] + n] += p_rows
        blocks.append(row)
        rhs.append(sys.rhs_for(tag))
    return np.vstack(blocks), np.concatenate(rhs), order


def expected_rank(sys: SymTensorSystem) -> int:
    """Rank of the dense system for a regular jet with ``k+1 <= 2``.

    Every equation is then independent, so this is the number of scalar
    equations.
    """
    return sum(sys.p for _ in sys.equations())


def system_residual(sys: SymTensorSystem, q: SymTensor) -> float:
    """Largest equation residual, scaled by the size of the data."""
    worst = 0.0
    for tag, i, a_rows, prev, p_rows in sys.equations():
        lhs = a_rows @ q[i]
        if prev is not None:
            lhs = lhs + p_rows @ q[prev]
        r = sys.rhs_for(tag)
        worst = max(worst, float(np.abs(lhs - r).max() / (1.0 + np.abs(r).max())))
    return worst


def oracle_gap(sys: SymTensorSystem, q: SymTensor) -> float:
    """Distance between the row-space part of ``Q`` and the dense min-norm solution.

    Any two solutions differ by a kernel element, so projecting the
    triangular solution onto the row space of the dense matrix must reproduce
    the global minimum-norm least-squares solution.
    """
    m, b, order = assemble_dense(sys)
    x_star, *_ = np.linalg.lstsq(m, b, rcond=None)
    x = q.stacked(order)
    proj = np.linalg.pinv(m, rcond=1e-10) @ (m @ x)
    return float(np.abs(proj - x_star).max() / (1.0 + np.abs(x_star).max()))


def random_rhs(sys: SymTensorSystem, rng=None, bound: float = 1.0) -> dict:
    """Uniform right-hand sides in ``[-bound, bound]`` for every equation tag."""
    rng = rng_from(rng)
    return {tag: rng.uniform(-bound, bound, sys.p) for tag, *_ in sys.equations()}


def rhs_from_tensor(sys: SymTensorSystem, q: SymTensor) -> dict:
    """Right-hand sides for which ``q`` solves the system exactly."""
    out = {}
    for tag, i, a_rows, prev, p_rows in sys.equations():
        val = a_rows @ q[i]
        if prev is not None:
            val = val + p_rows @ q[prev]
        out[tag] = val
    return out


def holomorphic_system(k_plus_1: int = 2, rhs=None, rng=None, regular: bool = True,
                       point=None) -> SymTensorSystem:
    """System built from the holomorphic contact model with ``n = 2``.

    ``D`` has rank 8 at every point.  A regular ``p1`` is a horizontal
    degree 2 frame pushed through the model frame; the non-regular choice
    uses columns ``v, Av`` with ``A`` the connecting automorphism.
    """
    from .fat2 import connecting_automorphism
    from .frames import build_horizontal_deg2
    from .models import make_holomorphic_contact_model, pointwise_tuple

    rng = rng_from(rng)
    model = make_holomorphic_contact_model(2)
    x = np.zeros(model.dim_m) if point is None else np.asarray(point, dtype=float)
    t = pointwise_tuple(model, x)
    if regular:
        coef = build_horizontal_deg2(t, k_plus_1, rng).vectors
    else:
        if k_plus_1 < 2:
            raise ValueError("a non-regular jet needs at least two columns")
        v = rng.standard_normal(t.dim)
        a = connecting_automorphism(t).a
        coef = np.column_stack([v, a @ v] + [rng.standard_normal(t.dim) for _ in range(k_plus_1 - 2)])
    p1 = model.frame_matrix(x) @ coef
    sys = SymTensorSystem(model.lambda_matrix(x), [lam.d for lam in model.lambdas], p1)
    if isinstance(rhs, str):
        if rhs != "random":
            raise ValueError(f"unknown rhs mode {rhs!r}")
        sys.rhs = random_rhs(sys, rng)
    else:
        sys.rhs = rhs
    return sys
