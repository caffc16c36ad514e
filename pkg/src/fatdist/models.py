"""Exact local models built from affine 1-forms and affine vector fields.

Coordinates on R^m are ``x``.  An affine covector ``lam = c + L x`` means
``lam_x(v) = (c + L x) . v``; its exterior derivative is the constant skew
matrix ``L^T - L`` (so ``d lam(u, v) = u @ (L.T - L) @ v``).  An affine
vector field is ``X(x) = a + B x``.  Brackets of affine fields are affine and
computed exactly.

Curvature is fixed as ``Omega(X, Y) = -lam([X, Y])``.  On horizontal fields
this equals ``d lam(X, Y)`` with the convention above, so the coframe and the
bracket evaluations agree with the same sign.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.integrate as si
import scipy.linalg as sla
import sympy as sp

from .core import DEFAULT_TOL, Tolerance, rank
from .errors import DimensionMismatchError, PreconditionError
from .fat2 import FatTuple2
from .frames import Frame
from .qcont import QContTriple, standard_qcont

__all__ = [
    "AffineVectorField", "AffineCovector", "AffineCoframeModel", "LiouvilleModel",
    "ExactnessError", "LiftResult", "bracket", "eval_curvature_coframe",
    "eval_curvature_bracket", "pointwise_forms", "pointwise_tuple", "qcont_at",
    "make_holomorphic_contact_model", "make_quaternionic_heisenberg_model",
    "make_liouville_model", "liouville_from_forms", "holomorphic_liouville",
    "lift_exact_lagrangian", "lift_curve", "refinement_study", "formal_lift",
]


class ExactnessError(PreconditionError):
    """Discrete exactness of the primitives fails on some grid edge."""


@dataclass(frozen=True)
class AffineVectorField:
    constant: np.ndarray
    linear: np.ndarray
    name: str = ""

    def __post_init__(self):
        c = np.array(self.constant, dtype=float).ravel()
        b = np.array(self.linear, dtype=float)
        if b.shape != (c.size, c.size) or not (np.all(np.isfinite(c)) and np.all(np.isfinite(b))):
            raise ValueError("affine field needs finite constant (n,) and linear (n, n) parts")
        object.__setattr__(self, "constant", c)
        object.__setattr__(self, "linear", b)

    @property
    def dim(self) -> int:
        return self.constant.size

    @classmethod
    def coordinate(cls, n: int, i: int, name: str = "") -> AffineVectorField:
        return cls(np.eye(n)[i], np.zeros((n, n)), name)

    def __call__(self, x) -> np.ndarray:
        return self.constant + self.linear @ np.asarray(x, dtype=float)

    def __add__(self, other):
        return AffineVectorField(self.constant + other.constant, self.linear + other.linear)

    def __mul__(self, s: float):
        return AffineVectorField(s * self.constant, s * self.linear)

    __rmul__ = __mul__

    def __sub__(self, other):
        return self + (-1.0) * other


@dataclass(frozen=True)
class AffineCovector:
    constant: np.ndarray
    linear: np.ndarray

    def __post_init__(self):
        c = np.array(self.constant, dtype=float).ravel()
        m = np.array(self.linear, dtype=float)
        if m.shape != (c.size, c.size):
            raise ValueError("affine covector needs constant (n,) and linear (n, n) parts")
        object.__setattr__(self, "constant", c)
        object.__setattr__(self, "linear", m)

    def at(self, x) -> np.ndarray:
        return self.constant + self.linear @ np.asarray(x, dtype=float)

    def __call__(self, x, v) -> float:
        return float(self.at(x) @ np.asarray(v, dtype=float))

    @property
    def d(self) -> np.ndarray:
        """Constant matrix of the exterior derivative."""
        return self.linear.T - self.linear


def bracket(x: AffineVectorField, y: AffineVectorField) -> AffineVectorField:
    """Exact Lie bracket ``[X, Y] = DY X - DX Y`` of affine fields."""
    if x.dim != y.dim:
        raise DimensionMismatchError(f"fields on R^{x.dim} and R^{y.dim}")
    return AffineVectorField(y.linear @ x.constant - x.linear @ y.constant,
                             y.linear @ x.linear - x.linear @ y.linear)


@dataclass
class AffineCoframeModel:
    """``D = intersection of ker lam^s`` on R^dim_m, with an optional frame.

    Parameters
    ----------
    dim_m : int
    lambdas : list of AffineCovector
    frame : list of AffineVectorField, optional
    coords, frame_names : list of str, optional
        Labels used in reports and bracket tables.
    probe_seed : int
        Seed for the probe points checked at construction.
    """

    dim_m: int
    lambdas: list
    frame: list | None = None
    coords: list = field(default_factory=list)
    frame_names: list = field(default_factory=list)
    complex_structure: np.ndarray | None = None
    tol: Tolerance = DEFAULT_TOL
    probe_seed: int = 0

    def __post_init__(self):
        for lam in self.lambdas:
            if lam.constant.size != self.dim_m:
                raise DimensionMismatchError("covector dimension differs from dim_m")
        for f in self.frame or []:
            if f.dim != self.dim_m:
                raise DimensionMismatchError("frame field dimension differs from dim_m")
        if not self.coords:
            self.coords = [f"x{i}" for i in range(self.dim_m)]
        if self.frame and not self.frame_names:
            self.frame_names = [f"F{i}" for i in range(len(self.frame))]
        for x in self.probe_points():
            lam = self.lambda_matrix(x)
            if rank(lam, self.tol) < self.p:
                raise PreconditionError("lambda rows are dependent at a probe point")
            if self.frame:
                res = np.abs(lam @ self.frame_matrix(x)).max()
                if res > 1e-10 * max(1.0, np.abs(lam).max()):
                    raise PreconditionError(f"frame is not annihilated by lambda (residual {res:.3g})")

    @property
    def p(self) -> int:
        return len(self.lambdas)

    @property
    def rank_d(self) -> int:
        return self.dim_m - self.p

    def probe_points(self, count: int = 4) -> list[np.ndarray]:
        g = np.random.default_rng(self.probe_seed)
        return [np.zeros(self.dim_m)] + [g.uniform(-2, 2, self.dim_m) for _ in range(count - 1)]

    def lambda_matrix(self, x) -> np.ndarray:
        return np.vstack([lam.at(x) for lam in self.lambdas])

    def frame_matrix(self, x) -> np.ndarray:
        if not self.frame:
            raise PreconditionError("model has no frame")
        return np.column_stack([f(x) for f in self.frame])

    def frame_coordinates(self, x, vectors) -> np.ndarray:
        """Coefficients of horizontal ``vectors`` in the frame at ``x``."""
        fm = self.frame_matrix(x)
        v = np.asarray(vectors, dtype=float).reshape(self.dim_m, -1)
        coef, *_ = np.linalg.lstsq(fm, v, rcond=None)
        res = np.linalg.norm(fm @ coef - v)
        if res > self.tol.loose * max(1.0, np.linalg.norm(v)):
            raise PreconditionError(f"vectors are not horizontal (residual {res:.3g})")
        return coef

    def annihilation_exact(self) -> float:
        """Largest coefficient of the quadratic polynomials ``lam^s(F_a)``.

        Zero means the frame is annihilated identically, not just at probes.
        """
        worst = 0.0
        for lam in self.lambdas:
            for f in self.frame or []:
                c0 = lam.constant @ f.constant
                c1 = lam.linear.T @ f.constant + f.linear.T @ lam.constant
                q = lam.linear.T @ f.linear
                worst = max(worst, abs(c0), np.abs(c1).max(), np.abs(q + q.T).max())
        return float(worst)


def _require_horizontal(m: AffineCoframeModel, x, vecs):
    lam = m.lambda_matrix(x)
    for v in vecs:
        v = np.asarray(v, dtype=float)
        res = np.abs(lam @ v).max() if v.size else 0.0
        if res > m.tol.loose * max(1.0, np.linalg.norm(v)) * max(1.0, np.abs(lam).max()):
            raise PreconditionError(f"vector is not horizontal at the point (|lam(v)| = {res:.3g})")


def eval_curvature_coframe(m: AffineCoframeModel, point, u, v) -> np.ndarray:
    """``(d lam^s(u, v))_s`` for horizontal ``u, v`` at ``point``."""
    _require_horizontal(m, point, (u, v))
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return np.array([u @ lam.d @ v for lam in m.lambdas])


def eval_curvature_bracket(m: AffineCoframeModel, fi: int, fj: int, point) -> np.ndarray:
    """``-lam_point([F_i, F_j])`` with the exact affine bracket."""
    if not m.frame:
        raise PreconditionError("model has no frame")
    br = bracket(m.frame[fi], m.frame[fj])(point)
    return -m.lambda_matrix(point) @ br


def pointwise_forms(m: AffineCoframeModel, point) -> list[np.ndarray]:
    """Curvature matrices ``d lam^s(F_a, F_b)`` in the frame basis at ``point``."""
    fm = m.frame_matrix(point)
    return [fm.T @ lam.d @ fm for lam in m.lambdas]


def pointwise_tuple(m: AffineCoframeModel, point) -> FatTuple2:
    if m.p != 2:
        raise PreconditionError(f"pointwise_tuple needs corank 2, got {m.p}")
    w1, w2 = pointwise_forms(m, point)
    return FatTuple2(w1, w2, m.tol)


def qcont_at(m: AffineCoframeModel, q: QContTriple, point) -> QContTriple:
    """Triple with ``q``'s ``J_i, g`` and the model's measured curvature forms."""
    return QContTriple(*q.js, g=q.g, omegas=pointwise_forms(m, point), tol=q.tol)


def make_holomorphic_contact_model(n: int = 1, tol: Tolerance = DEFAULT_TOL) -> AffineCoframeModel:
    """Real model of the standard holomorphic contact structure on C^(2n+1).

    Coordinates are ``(x_j1, x_j2, y_j1, y_j2)`` for ``j = 1..n`` followed by
    ``(z1, z2)``; the frame is ``(X_j1, X_j2, Y_j1, Y_j2)`` in the same order.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    m = 4 * n + 2
    z1, z2 = 4 * n, 4 * n + 1
    c1, c2 = np.eye(m)[z1], np.eye(m)[z2]
    l1, l2 = np.zeros((m, m)), np.zeros((m, m))
    frame, coords, names = [], [], []
    for j in range(n):
        x1, x2, y1, y2 = 4 * j, 4 * j + 1, 4 * j + 2, 4 * j + 3
        l1[x1, y1], l1[x2, y2] = -1.0, 1.0
        l2[x1, y2], l2[x2, y1] = -1.0, -1.0
        bx1 = np.zeros((m, m))
        bx1[z1, y1], bx1[z2, y2] = 1.0, 1.0
        bx2 = np.zeros((m, m))
        bx2[z1, y2], bx2[z2, y1] = -1.0, 1.0
        frame += [AffineVectorField(np.eye(m)[x1], bx1), AffineVectorField(np.eye(m)[x2], bx2),
                  AffineVectorField.coordinate(m, y1), AffineVectorField.coordinate(m, y2)]
        s = j + 1
        coords += [f"x{s}1", f"x{s}2", f"y{s}1", f"y{s}2"]
        names += [f"X{s}1", f"X{s}2", f"Y{s}1", f"Y{s}2"]
    coords += ["z1", "z2"]
    rot = np.array([[0.0, -1.0], [1.0, 0.0]])
    cx = sla.block_diag(*[sla.block_diag(rot, rot)] * n)
    return AffineCoframeModel(m, [AffineCovector(c1, l1), AffineCovector(c2, l2)], frame,
                              coords, names, complex_structure=cx, tol=tol)


@dataclass
class LiouvilleModel:
    """A p-tuple of affine 1-forms ``mu^i`` on R^n_dim with nondegenerate ``d mu^i``."""

    n_dim: int
    mus: list
    tol: Tolerance = DEFAULT_TOL

    def __post_init__(self):
        if self.n_dim % 2:
            raise PreconditionError(f"Liouville forms need even dimension, got {self.n_dim}")
        for i, mu in enumerate(self.mus, 1):
            if mu.constant.size != self.n_dim:
                raise DimensionMismatchError(f"mu{i} lives on R^{mu.constant.size}")
            if rank(mu.d, self.tol) < self.n_dim:
                raise PreconditionError(f"d mu{i} is degenerate")

    @property
    def p(self) -> int:
        return len(self.mus)

    @property
    def dmus(self) -> list[np.ndarray]:
        return [mu.d for mu in self.mus]

    def mu_matrix(self, x) -> np.ndarray:
        return np.vstack([mu.at(x) for mu in self.mus])


def liouville_from_forms(forms, tol: Tolerance = DEFAULT_TOL) -> LiouvilleModel:
    """Liouville forms ``mu = -(1/2) W x . dx`` with ``d mu = W``."""
    forms = [np.asarray(w, dtype=float) for w in forms]
    n = forms[0].shape[0]
    return LiouvilleModel(n, [AffineCovector(np.zeros(n), -0.5 * w) for w in forms], tol)


def holomorphic_liouville(tol: Tolerance = DEFAULT_TOL) -> LiouvilleModel:
    """``mu1 = x1 dy1 - x2 dy2``, ``mu2 = x2 dy1 + x1 dy2`` on R^4 = (x1, x2, y1, y2)."""
    l1, l2 = np.zeros((4, 4)), np.zeros((4, 4))
    l1[2, 0], l1[3, 1] = 1.0, -1.0
    l2[2, 1], l2[3, 0] = 1.0, 1.0
    return LiouvilleModel(4, [AffineCovector(np.zeros(4), l1), AffineCovector(np.zeros(4), l2)], tol)


def make_liouville_model(l: LiouvilleModel) -> AffineCoframeModel:
    """``lam^i = dz_i - pi^* mu^i`` on R^(n_dim + p) with frame ``F_a = d_a + mu^i(e_a) d_{z_i}``.

    With this convention ``d lam^i = -pi^* d mu^i``.
    """
    n, p = l.n_dim, l.p
    m = n + p
    lams, frame = [], []
    for i, mu in enumerate(l.mus):
        c = np.zeros(m)
        c[n + i] = 1.0
        c[:n] = -mu.constant
        lin = np.zeros((m, m))
        lin[:n, :n] = -mu.linear
        lams.append(AffineCovector(c, lin))
    for a in range(n):
        const = np.eye(m)[a]
        lin = np.zeros((m, m))
        for i, mu in enumerate(l.mus):
            const[n + i] = mu.constant[a]
            lin[n + i, :n] = mu.linear[a]
        frame.append(AffineVectorField(const, lin))
    coords = [f"x{a + 1}" for a in range(n)] + [f"z{i + 1}" for i in range(p)]
    names = [f"F{a + 1}" for a in range(n)]
    return AffineCoframeModel(m, lams, frame, coords, names, tol=l.tol)


def make_quaternionic_heisenberg_model(n: int = 1, tol: Tolerance = DEFAULT_TOL):
    """Corank-3 model on R^(4n+3) with pointwise data of the standard triple.

    Built as the Liouville model with ``d mu^i = -W_i`` so that the measured
    curvature is ``W_i = g(J_i ., .)`` in the frame basis.

    Returns
    -------
    model : AffineCoframeModel
    triple : QContTriple
        ``J_i`` and ``g`` of the standard triple with the curvature forms
        measured from the model at the origin.
    """
    q = standard_qcont(n, tol)
    model = make_liouville_model(liouville_from_forms([-w for w in q.derived], tol))
    return model, qcont_at(model, q, np.zeros(model.dim_m))


# lifting --------------------------------------------------------------------

@dataclass
class LiftResult:
    points: np.ndarray
    edge_residuals: list
    max_residual: float
    worst_edge: tuple | None


def _edges(shape):
    for axis in range(len(shape)):
        idx = np.indices(shape).reshape(len(shape), -1).T
        for i in idx:
            if i[axis] + 1 < shape[axis]:
                j = i.copy()
                j[axis] += 1
                yield tuple(int(x) for x in i), tuple(int(x) for x in j)


def _edge_residuals(l: LiouvilleModel, f, phi):
    grid = f.shape[:-1]
    out = []
    for a, b in _edges(grid):
        df = f[b] - f[a]
        h = np.linalg.norm(df)
        if h == 0:
            continue
        mid = 0.5 * (f[a] + f[b])
        r = np.abs(phi[b] - phi[a] - l.mu_matrix(mid) @ df).max() / h
        out.append(((a, b), float(r)))
    return out


def lift_exact_lagrangian(l: LiouvilleModel, f_samples, primitives, mesh_tol: float = 1e-2) -> LiftResult:
    """Lift ``f`` to ``(f, phi)`` in ``N x R^p``.

    Parameters
    ----------
    f_samples : array_like, shape ``(*grid, n_dim)``
    primitives : array_like, shape ``(*grid, p)``
        Samples of functions with ``d phi_i = f^* mu^i``.
    mesh_tol : float
        Largest allowed edge residual ``|dphi - mu(f_mid) df| / |df|``
        (midpoint rule; second order in the mesh size).

    Raises
    ------
    ExactnessError
        If some edge exceeds ``mesh_tol``; the message names the worst edge.
    """
    f = np.asarray(f_samples, dtype=float)
    phi = np.asarray(primitives, dtype=float)
    if f.shape[-1] != l.n_dim or phi.shape != f.shape[:-1] + (l.p,):
        raise DimensionMismatchError(f"grid shapes {f.shape} and {phi.shape} do not fit the model")
    res = _edge_residuals(l, f, phi)
    worst = max(res, key=lambda e: e[1]) if res else (None, 0.0)
    if worst[1] > mesh_tol:
        raise ExactnessError(f"edge {worst[0][0]}-{worst[0][1]} has residual {worst[1]:.3g} > {mesh_tol:g}")
    return LiftResult(np.concatenate([f, phi], axis=-1), res, worst[1], worst[0])


def lift_curve(l: LiouvilleModel, curve, t_range, n: int, mesh_tol: float = 1e-2) -> LiftResult:
    """Lift a parametric curve given as sympy expressions in ``t``.

    The primitives ``phi_i(t) = int f^* mu^i`` are computed with adaptive
    quadrature, independently of the midpoint pairing used for the residual.
    """
    t = sp.Symbol("t")
    exprs = [sp.sympify(e, locals={"t": t}) for e in curve]
    if len(exprs) != l.n_dim:
        raise DimensionMismatchError(f"curve has {len(exprs)} components, model needs {l.n_dim}")
    f_fn = sp.lambdify(t, exprs, "numpy")
    df_fn = sp.lambdify(t, [sp.diff(e, t) for e in exprs], "numpy")
    ts = np.linspace(float(t_range[0]), float(t_range[1]), n)
    f = np.array([np.broadcast_to(np.asarray(f_fn(s), dtype=float), (l.n_dim,)) for s in ts])

    def integrand(s, i):
        x = np.asarray(f_fn(s), dtype=float)
        return float(l.mus[i].at(x) @ np.asarray(df_fn(s), dtype=float))

    phi = np.zeros((n, l.p))
    for i in range(l.p):
        for k in range(1, n):
            val, _ = si.quad(integrand, ts[k - 1], ts[k], args=(i,), epsabs=1e-14, epsrel=1e-13)
            phi[k, i] = phi[k - 1, i] + val
    return lift_exact_lagrangian(l, f, phi, mesh_tol)


def refinement_study(l: LiouvilleModel, curve, t_range, n0: int, refinements: int = 3,
                     mesh_tol: float = 1e-2) -> dict:
    """Residuals of ``lift_curve`` on meshes with ``n0 - 1`` intervals halved repeatedly."""
    residuals = []
    for r in range(refinements + 1):
        n = (n0 - 1) * 2**r + 1
        residuals.append(lift_curve(l, curve, t_range, n, mesh_tol).max_residual)
    ratios = [residuals[i] / residuals[i + 1] for i in range(refinements)]
    return {"residuals": residuals, "ratios": ratios}


def formal_lift(l: LiouvilleModel, point, tangent_frame) -> Frame:
    """Canonical horizontal lift ``e -> e + sum_i mu^i(e) d_{z_i}`` of a frame.

    The frame must span a subspace of R^n_dim that is isotropic and regular
    for ``(d mu^i)``.  Corank 2 gives a ``horizontal_deg2`` frame, corank 3 a
    ``horizontal_qcont`` frame.
    """
    vec = tangent_frame.vectors if isinstance(tangent_frame, Frame) else np.asarray(tangent_frame, dtype=float)
    vec = vec.reshape(l.n_dim, -1)
    regime = {2: "horizontal_deg2", 3: "horizontal_qcont"}.get(l.p)
    if regime is None:
        raise PreconditionError(f"no frame regime for corank {l.p}")
    k = vec.shape[1]
    if rank(vec, l.tol) < k:
        raise PreconditionError("tangent frame is not independent")
    scale = max(1.0, np.abs(vec).max() ** 2)
    for i, w in enumerate(l.dmus, 1):
        if np.abs(vec.T @ w @ vec).max() > l.tol.loose * scale * np.abs(w).max():
            raise PreconditionError(f"tangent frame is not isotropic for d mu{i}")
    if rank(np.vstack([vec.T @ w for w in l.dmus]), l.tol) < l.p * k:
        raise PreconditionError("tangent frame is not regular for (d mu^i)")
    point = np.asarray(point, dtype=float)[: l.n_dim]
    lifted = np.vstack([vec, l.mu_matrix(point) @ vec])
    return Frame(l.n_dim + l.p, lifted, regime)
