"""Corank-2 fat tuples ``(D, omega1, omega2)``.

A pair of linear symplectic forms on an even-dimensional space is related by
its connecting automorphism ``A``, the unique map with::

    omega1(u, A v) == omega2(u, v)

In matrix terms ``W1 @ A == W2``.  The pair is fat iff ``A`` has no real
eigenvalue, and its degree is the degree of the minimal polynomial of ``A``.
The subspace operations below are the constructive steps behind frames of
regular isotropic subspaces in degree 2.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .core import (
    DEFAULT_TOL, Subspace, Tolerance, check_skew, distance, form_perp,
    has_real_eigenvalue, intersect, minpoly_degree, rank, rng_from,
    subspace_sum,
)
from .errors import (
    ConstructionFailure, DimensionMismatchError, InternalInconsistencyError,
    InvalidFormError, NoRoomError, NumericFailure, PreconditionError,
)
from .report import Report

__all__ = [
    "FatTuple2", "ConnectingAutomorphism", "FormalIsocontactJet",
    "connecting_automorphism", "is_fat", "degree", "omega_perp", "is_regular",
    "regularity_criteria", "is_isotropic", "isotropy_residual", "deg2_identities",
    "extend_regular", "extend_isotropic", "compatible_complex_structure", "isotropic_complement",
    "symplectic_complete", "check_isocontact_jet", "standard_form",
    "holomorphic_tuple", "companion_tuple", "random_fat_tuple", "random_pair",
    "random_invertible",
]

COND_LIMIT = 1e12
_RETRIES = 16


def standard_form(n: int) -> np.ndarray:
    """``[[0, I], [-I, 0]]`` on R^n."""
    if n % 2:
        raise InvalidFormError(f"symplectic forms need even dimension, got {n}")
    m = n // 2
    w = np.zeros((n, n))
    w[:m, m:] = np.eye(m)
    w[m:, :m] = -np.eye(m)
    return w


class FatTuple2:
    """A pair of nondegenerate skew forms on R^dim.

    Parameters
    ----------
    omega1, omega2 : array_like
        Skew-symmetric ``dim x dim`` matrices of full rank.
    tol : Tolerance, optional

    Notes
    -----
    Fatness is not required at construction; ``is_fat`` decides it.  The
    connecting automorphism is computed once and cached.
    """

    __slots__ = ("dim", "omega1", "omega2", "tol", "_a")

    def __init__(self, omega1, omega2, tol: Tolerance = DEFAULT_TOL):
        w1 = check_skew(omega1, tol=tol, name="omega1")
        w2 = check_skew(omega2, w1.shape[0], tol=tol, name="omega2")
        n = w1.shape[0]
        if n % 2:
            raise InvalidFormError(f"dimension must be even, got {n}")
        for name, w in (("omega1", w1), ("omega2", w2)):
            if rank(w, tol) < n:
                raise InvalidFormError(f"{name} is degenerate")
        w1 = 0.5 * (w1 - w1.T)
        w2 = 0.5 * (w2 - w2.T)
        w1.flags.writeable = False
        w2.flags.writeable = False
        self.dim = n
        self.omega1 = w1
        self.omega2 = w2
        self.tol = tol
        self._a = None

    @property
    def forms(self) -> tuple[np.ndarray, np.ndarray]:
        return self.omega1, self.omega2

    @property
    def a(self) -> np.ndarray:
        return connecting_automorphism(self).a

    def with_tol(self, tol: Tolerance) -> FatTuple2:
        return FatTuple2(self.omega1, self.omega2, tol)

    def __repr__(self):
        return f"FatTuple2(dim={self.dim})"


@dataclass(frozen=True)
class ConnectingAutomorphism:
    a: np.ndarray
    residual: float


def connecting_automorphism(t: FatTuple2) -> ConnectingAutomorphism:
    """Solve ``W1 A = W2`` by LU and assert the defining identity."""
    if t._a is not None:
        return t._a
    w1, w2 = t.omega1, t.omega2
    cond = np.linalg.cond(w1)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise NumericFailure(f"omega1 is ill-conditioned (cond = {cond:.3g})")
    a = sla.lu_solve(sla.lu_factor(w1), w2)
    res = float(np.linalg.norm(w1 @ a - w2))
    scale = np.linalg.norm(w1) * np.linalg.norm(a) + np.linalg.norm(w2)
    if res > t.tol.threshold(scale):
        raise InternalInconsistencyError(
            f"defining identity omega1(u, Av) = omega2(u, v) fails, residual {res:.3g}")
    ca = ConnectingAutomorphism(a, res / scale)
    t._a = ca
    return ca


def is_fat(t: FatTuple2) -> bool:
    return not has_real_eigenvalue(t.a, t.tol)


def degree(t: FatTuple2) -> int:
    if not is_fat(t):
        raise PreconditionError("degree is only defined for fat tuples")
    return minpoly_degree(t.a, t.tol)


def _require_degree2(t: FatTuple2):
    d = degree(t)
    if d != 2:
        raise PreconditionError(f"operation needs a degree 2 tuple, got degree {d}")


def _ambient(t: FatTuple2, v: Subspace):
    if v.ambient_dim != t.dim:
        raise DimensionMismatchError(f"subspace lives in R^{v.ambient_dim}, tuple in R^{t.dim}")


def _omega_perp_raw(t: FatTuple2, v: Subspace) -> Subspace:
    return intersect(form_perp(v, t.omega1, t.tol), form_perp(v, t.omega2, t.tol), t.tol)


def omega_perp(t: FatTuple2, v: Subspace) -> Subspace:
    """``V^Omega``, cross-checked against ``(V + AV)^perp1``."""
    _ambient(t, v)
    p = _omega_perp_raw(t, v)
    q = form_perp(subspace_sum(v, v.image(t.a), t.tol), t.omega1, t.tol)
    gap = distance(p, q)
    if gap > t.tol.loose:
        raise InternalInconsistencyError(
            f"V^Omega disagrees with (V+AV)^perp1 (distance {gap:.3g})")
    return p


def regularity_criteria(t: FatTuple2, v: Subspace) -> dict[str, bool]:
    """Three independent regularity tests.

    ``map_rank``: the map xi -> (omega1(., xi)|V, omega2(., xi)|V) has rank 2 dim V.
    ``trivial_intersection``: V and AV meet only in 0.
    ``codim``: codim V^Omega == 2 dim V.
    """
    _ambient(t, v)
    k = v.dim
    b = v.basis
    stacked = np.vstack([b.T @ t.omega1, b.T @ t.omega2])
    return {
        "map_rank": rank(stacked, t.tol) == 2 * k,
        "trivial_intersection": intersect(v, v.image(t.a), t.tol).dim == 0,
        "codim": _omega_perp_raw(t, v).codim == 2 * k,
    }


def is_regular(t: FatTuple2, v: Subspace) -> bool:
    crit = regularity_criteria(t, v)
    if crit["map_rank"] != crit["trivial_intersection"]:
        raise InternalInconsistencyError(f"regularity criteria disagree: {crit}")
    return crit["map_rank"]


def isotropy_residual(forms, v: Subspace) -> float:
    """Largest ``|B^T W B| / |W|`` over the given forms."""
    if v.dim == 0:
        return 0.0
    b = v.basis
    return max(float(np.linalg.norm(b.T @ w @ b, 2) / np.linalg.norm(w, 2)) for w in forms)


def is_isotropic(t: FatTuple2, v: Subspace) -> bool:
    _ambient(t, v)
    return isotropy_residual(t.forms, v) <= t.tol.threshold(1.0)


def deg2_identities(t: FatTuple2, v: Subspace, bound: float = 1e-8) -> Report:
    """Residuals of the degree-2 subspace identities for ``v``.

    Every residual is a projector distance, compared against ``bound``.
    """
    _require_degree2(t)
    _ambient(t, v)
    tol = t.tol
    a = t.a
    vav = subspace_sum(v, v.image(a), tol)
    vainv = subspace_sum(v, v.image(np.linalg.inv(a)), tol)
    vo = _omega_perp_raw(t, v)
    voo = _omega_perp_raw(t, vo)
    rep = Report("degree-2 identities")
    rep.add_residual("V+AV = V+A^-1V", distance(vav, vainv), bound)
    rep.add_residual("V^Omega = (V+AV)^perp1", distance(vo, form_perp(vav, t.omega1, tol)), bound)
    rep.add_residual("V^Omega = (V+AV)^perp2", distance(vo, form_perp(vav, t.omega2, tol)), bound)
    rep.add_residual("(V^Omega)^Omega = V+AV", distance(voo, vav), bound)
    if is_isotropic(t, v):
        rep.add_residual("(V^Omega)^Omega isotropic", isotropy_residual(t.forms, voo), bound)
    else:
        rep.add("(V^Omega)^Omega isotropic", True, 0.0, "vacuous: V not isotropic")
    return rep


def _sample_unit(basis: np.ndarray, rng) -> np.ndarray:
    x = basis @ rng.standard_normal(basis.shape[1])
    return x / np.linalg.norm(x)


def extend_regular(t: FatTuple2, v: Subspace, rng=None) -> Subspace:
    """Add one direction outside ``(V^Omega)^Omega`` keeping ``V`` regular."""
    _require_degree2(t)
    if not is_regular(t, v):
        raise PreconditionError("extend_regular needs a regular subspace")
    rng = rng_from(rng)
    closure = omega_perp(t, omega_perp(t, v))
    if closure.dim == t.dim:
        raise NoRoomError("(V^Omega)^Omega is the whole space")
    comp = closure.orthogonal_complement()
    for _ in range(_RETRIES):
        tau = _sample_unit(comp.basis, rng)
        w = subspace_sum(v, Subspace(tau, t.dim), t.tol)
        if w.dim == v.dim + 1 and is_regular(t, w):
            return w
    raise ConstructionFailure("no regular extension found after retries")


def extend_isotropic(t: FatTuple2, v: Subspace, rng=None) -> Subspace:
    """Add one direction of ``V^Omega`` outside ``(V^Omega)^Omega``.

    For a regular isotropic ``V`` in a degree 2 tuple the result is again
    regular and isotropic.
    """
    _require_degree2(t)
    if not (is_regular(t, v) and is_isotropic(t, v)):
        raise PreconditionError("extend_isotropic needs a regular isotropic subspace")
    rng = rng_from(rng)
    vo = omega_perp(t, v)
    meet = intersect(vo, omega_perp(t, vo), t.tol)
    comp = intersect(vo, meet.orthogonal_complement(), t.tol)
    if comp.dim == 0:
        raise NoRoomError("V^Omega is contained in (V^Omega)^Omega")
    for _ in range(_RETRIES):
        w = subspace_sum(v, Subspace(_sample_unit(comp.basis, rng), t.dim), t.tol)
        if w.dim == v.dim + 1 and is_regular(t, w) and is_isotropic(t, w):
            return w
    raise ConstructionFailure("no isotropic extension found after retries")


def compatible_complex_structure(omega, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """``J = -(-W^2)^(-1/2) W`` for the form matrix ``W``.

    Then ``W J = (-W^2)^(1/2)`` is symmetric positive definite, ``J^2 = -I``
    and ``J^T W J = W``.
    """
    w = check_skew(omega, tol=tol)
    n = w.shape[0]
    if n % 2 or rank(w, tol) < n:
        raise InvalidFormError("compatible_complex_structure needs a nondegenerate form")
    evals, q = np.linalg.eigh(w.T @ w)
    if evals.min() <= 0:
        raise NumericFailure("square-root factorization failed: -W^2 is not positive definite")
    inv_root = (q / np.sqrt(evals)) @ q.T
    j = -inv_root @ w
    res = np.linalg.norm(j @ j + np.eye(n))
    if not np.isfinite(res) or res > 1e-8:
        raise NumericFailure(f"J^2 = -I fails with residual {res:.3g}")
    return j


def isotropic_complement(t: FatTuple2, v: Subspace) -> Subspace:
    """``V' = V^perp2 & J((V^Omega)^Omega)`` with ``J`` compatible with omega2.

    For an Omega-isotropic, Omega-regular ``V`` the result satisfies
    ``V^perp2 = V^Omega + V'`` (direct), ``dim V' = dim V`` and ``V + V'`` is
    omega2-isotropic and omega1-symplectic.
    """
    _require_degree2(t)
    _ambient(t, v)
    if not is_isotropic(t, v):
        raise PreconditionError("isotropic_complement needs an Omega-isotropic subspace")
    if not is_regular(t, v):
        raise PreconditionError("isotropic_complement needs a regular subspace")
    j = compatible_complex_structure(t.omega2, t.tol)
    closure = omega_perp(t, omega_perp(t, v))
    vp = intersect(form_perp(v, t.omega2, t.tol), closure.image(j), t.tol)
    if vp.dim != v.dim:
        raise InternalInconsistencyError(f"complement has dim {vp.dim}, expected {v.dim}")
    return vp


def symplectic_complete(omega, x, s: Subspace | None = None,
                        tol: Tolerance = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Extend a Lagrangian frame ``x`` to a symplectic frame ``(x, y)``.

    Parameters
    ----------
    omega : array_like
        Form matrix on the ambient space.
    x : array_like
        ``n x k`` frame spanning a Lagrangian subspace of ``s``.
    s : Subspace, optional
        The ``2k``-dimensional symplectic subspace; the ambient space if omitted.

    Returns
    -------
    x, y : ndarray
        ``omega(x_i, x_j) = omega(y_i, y_j) = 0`` and ``omega(x_i, y_j) = delta_ij``.
    """
    w = check_skew(omega, tol=tol)
    n = w.shape[0]
    x = np.asarray(x, dtype=float).reshape(n, -1)
    k = x.shape[1]
    if s is None:
        s = Subspace.full(n)
    if s.dim != 2 * k:
        raise PreconditionError(f"S has dim {s.dim}, a Lagrangian frame needs dim {2 * k}")
    if not s.contains(x, Tolerance(tol.loose, tol.abs_eps)):
        raise PreconditionError("frame does not lie in S")
    q = s.basis
    ws = q.T @ w @ q
    if rank(ws, tol) < 2 * k:
        raise PreconditionError("omega is degenerate on S")
    xs = q.T @ x
    if rank(xs, tol) < k:
        raise PreconditionError("frame is not independent")
    scale = np.linalg.norm(ws, 2) * np.linalg.norm(xs, 2) ** 2
    if np.linalg.norm(xs.T @ ws @ xs) > tol.loose * scale:
        raise PreconditionError("frame does not span a Lagrangian subspace")
    z = ws.T @ xs
    y0 = z @ np.linalg.inv(xs.T @ ws @ z)
    m = y0.T @ ws @ y0
    ys = y0 + xs @ (0.5 * m)
    return q @ xs, q @ ys


@dataclass(frozen=True)
class FormalIsocontactJet:
    """Pointwise data of a formal map inducing a contact structure ``K``.

    ``f`` is ``F|_K`` (``dim D x dim K``), ``eta`` the curvature of ``K`` in a
    chosen cotrivialization and ``g_tilde`` the induced map ``TM/K -> TN/D``
    as a ``2 x 1`` matrix.  The normalized choice is ``g_tilde = (1, 0)``.
    """

    f: np.ndarray
    eta: np.ndarray
    g_tilde: np.ndarray = field(default_factory=lambda: np.array([[1.0], [0.0]]))


def check_isocontact_jet(t: FatTuple2, jet: FormalIsocontactJet) -> Report:
    """Curvature condition ``F* omega^i|_K = g_tilde[i] eta`` and regularity of im F."""
    tol = t.tol
    f = np.asarray(jet.f, dtype=float)
    eta = check_skew(jet.eta, f.shape[1], tol, name="eta")
    if rank(eta, tol) < eta.shape[0]:
        raise PreconditionError("eta must be nondegenerate")
    g = np.asarray(jet.g_tilde, dtype=float).reshape(2)
    rep = Report("isocontact jet")
    rep.add("injective", rank(f, tol) == f.shape[1], 0.0)
    scale = max(np.linalg.norm(f, 2) ** 2, 1.0)
    for i, w in enumerate(t.forms):
        res = np.linalg.norm(f.T @ w @ f - g[i] * eta) / (scale * np.linalg.norm(w, 2))
        rep.add_residual(f"curvature_omega{i + 1}", float(res), tol.loose)
    if rep.passed:
        regular = is_regular(t, Subspace(f, t.dim))
        rep.add("regular", regular, 0.0, "" if regular else "curvature condition holds but im F not regular")
    return rep


# constructors ---------------------------------------------------------------

def random_invertible(n: int, rng, cond: float = 10.0) -> np.ndarray:
    """Random ``n x n`` matrix with condition number at most ``cond``."""
    rng = rng_from(rng)
    u, _ = np.linalg.qr(rng.standard_normal((n, n)))
    v, _ = np.linalg.qr(rng.standard_normal((n, n)))
    s = np.exp(rng.uniform(0.0, np.log(cond), n))
    return (u * s) @ v.T


def _congruent(w1, w2, p, tol) -> FatTuple2:
    return FatTuple2(p.T @ w1 @ p, p.T @ w2 @ p, tol)


def _tuple_from_block(b: np.ndarray, rng, cond: float, tol: Tolerance) -> FatTuple2:
    """Pair ``(J0, J0 diag(B, B^T))`` moved by a random congruence."""
    m = b.shape[0]
    j0 = standard_form(2 * m)
    a0 = sla.block_diag(b, b.T)
    p = random_invertible(2 * m, rng, cond) if rng is not None else np.eye(2 * m)
    return _congruent(j0, j0 @ a0, p, tol)


def holomorphic_tuple(n: int = 1, tol: Tolerance = DEFAULT_TOL) -> FatTuple2:
    """Pointwise tuple of the holomorphic contact model in its frame basis.

    Each block uses the ordered basis ``(X_j1, X_j2, Y_j1, Y_j2)``.
    """
    w1 = np.array([[0, 0, 1, 0], [0, 0, 0, -1], [-1, 0, 0, 0], [0, 1, 0, 0]], dtype=float)
    w2 = np.array([[0, 0, 0, 1], [0, 0, 1, 0], [0, -1, 0, 0], [-1, 0, 0, 0]], dtype=float)
    return FatTuple2(sla.block_diag(*[w1] * n), sla.block_diag(*[w2] * n), tol)


def companion_tuple(tol: Tolerance = DEFAULT_TOL) -> FatTuple2:
    """Dim-8 tuple whose automorphism has minimal polynomial (t^2+1)(t^2+4)."""
    c1 = np.array([[0.0, -1.0], [1.0, 0.0]])
    c2 = np.array([[0.0, -4.0], [1.0, 0.0]])
    return _tuple_from_block(sla.block_diag(c1, c2), None, 1.0, tol)


def random_fat_tuple(n: int, rng=None, deg: int | None = 2, cond: float = 10.0,
                     tol: Tolerance = DEFAULT_TOL) -> FatTuple2:
    """Random fat tuple on R^n.

    ``deg=2`` needs ``n % 4 == 0``; ``deg=None`` draws distinct complex
    eigenvalue pairs, giving degree ``n/2`` generically (``n % 4 == 0`` again).
    """
    if n % 4:
        raise InvalidFormError(f"fat tuples built here need dim divisible by 4, got {n}")
    rng = rng_from(rng)
    m = n // 2
    s = random_invertible(m, rng, cond)
    if deg == 2:
        a, b = rng.uniform(-2, 2), rng.choice([-1, 1]) * rng.uniform(0.5, 2)
        core = a * np.eye(m) + b * standard_form(m)
    elif deg is None:
        blocks = [np.array([[x, -y], [y, x]]) for x, y in
                  zip(rng.uniform(-2, 2, m // 2), rng.uniform(0.5, 2, m // 2))]
        core = sla.block_diag(*blocks)
    else:
        raise ValueError("deg must be 2 or None")
    return _tuple_from_block(s @ core @ np.linalg.inv(s), rng, cond, tol)


def random_pair(n: int, rng=None, tol: Tolerance = DEFAULT_TOL) -> FatTuple2:
    """Two independent random symplectic forms (fatness not guaranteed)."""
    rng = rng_from(rng)
    j0 = standard_form(n)
    p1 = random_invertible(n, rng)
    p2 = random_invertible(n, rng)
    return FatTuple2(p1.T @ j0 @ p1, p2.T @ j0 @ p2, tol)
