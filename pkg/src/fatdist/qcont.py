"""Quaternionic contact pointwise models.

A triple ``(J1, J2, J3)`` of complex structures obeying the quaternion
relations, together with a compatible inner product ``g``, defines three
skew forms ``omega^i(u, v) = g(J_i u, v)``, i.e. ``W_i = J_i^T g``.  With
this convention the pair ``(omega^2, omega^3)`` has connecting automorphism
``-J1``.
"""
from __future__ import annotations

import numpy as np
import scipy.linalg as sla

from .core import (
    DEFAULT_TOL, Subspace, Tolerance, form_perp, intersect, rank, rng_from,
    subspace_sum,
)
from .errors import (
    ConstructionFailure, InternalInconsistencyError, InvalidFormError,
    NoRoomError, PreconditionError,
)
from .fat2 import FatTuple2, connecting_automorphism, isotropy_residual, random_invertible
from .report import Report

__all__ = [
    "QContTriple", "quaternion_units", "standard_qcont", "random_qcont",
    "validate_triple", "induced_fat_pair", "omega_perp3", "is_isotropic3",
    "is_regular3", "pansu_check", "decomposition_check", "pick_tau", "pick_eta",
]

_RETRIES = 16


def quaternion_units() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Left multiplication by i, j, k on H = R^4 in the basis (1, i, j, k)."""
    li = np.array([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]], dtype=float)
    lj = np.array([[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]], dtype=float)
    lk = np.array([[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]], dtype=float)
    return li, lj, lk


class QContTriple:
    """Pointwise quaternionic contact data on R^dim.

    Parameters
    ----------
    j1, j2, j3 : array_like
        Square matrices of size ``dim`` (a multiple of 4).
    g : array_like
        Symmetric positive-definite inner product.
    omegas : sequence of array_like, optional
        Curvature forms measured independently (e.g. from a coframe).  When
        omitted they are derived as ``J_i^T g``.

    Notes
    -----
    Only the shape, the multiple-of-4 dimension and positivity of ``g`` are
    enforced here.  The quaternion relations are reported by
    ``validate_triple`` so that corrupted triples can still be inspected.
    """

    def __init__(self, j1, j2, j3, g=None, omegas=None, tol: Tolerance = DEFAULT_TOL):
        js = [np.array(j, dtype=float) for j in (j1, j2, j3)]
        n = js[0].shape[0]
        if n % 4:
            raise InvalidFormError(f"quaternionic dimension must be divisible by 4, got {n}")
        g = np.eye(n) if g is None else np.array(g, dtype=float)
        for name, m in zip(("j1", "j2", "j3", "g"), js + [g]):
            if m.shape != (n, n) or not np.all(np.isfinite(m)):
                raise InvalidFormError(f"{name} must be a finite {n}x{n} matrix")
        if np.linalg.norm(g - g.T) > tol.threshold(np.linalg.norm(g)):
            raise InvalidFormError("g is not symmetric")
        try:
            np.linalg.cholesky(0.5 * (g + g.T))
        except np.linalg.LinAlgError as exc:
            raise InvalidFormError("g is not positive definite") from exc
        self.dim = n
        self.js = tuple(js)
        self.g = g
        self.tol = tol
        self.derived = tuple(j.T @ g for j in js)
        self.omegas = self.derived if omegas is None else tuple(np.array(w, dtype=float) for w in omegas)

    @property
    def j1(self):
        return self.js[0]

    def __repr__(self):
        return f"QContTriple(dim={self.dim})"


def standard_qcont(blocks: int = 1, tol: Tolerance = DEFAULT_TOL) -> QContTriple:
    """Block-diagonal model on R^(4 blocks) with ``g = I``."""
    units = quaternion_units()
    return QContTriple(*(sla.block_diag(*[u] * blocks) for u in units), tol=tol)


def random_qcont(blocks: int, rng=None, cond: float = 10.0, tol: Tolerance = DEFAULT_TOL) -> QContTriple:
    """Standard model moved by a random change of basis ``P``."""
    q = standard_qcont(blocks)
    p = random_invertible(q.dim, rng_from(rng), cond)
    pinv = np.linalg.inv(p)
    return QContTriple(*(pinv @ j @ p for j in q.js), g=p.T @ p, tol=tol)


def validate_triple(q: QContTriple) -> Report:
    n = q.dim
    eye = np.eye(n)
    bound = q.tol.loose
    j1, j2, j3 = q.js
    rep = Report("quaternionic triple")
    for i, j in enumerate(q.js, 1):
        rep.add_residual(f"J{i}^2 = -I", float(np.linalg.norm(j @ j + eye) / np.sqrt(n)), bound)
    rep.add_residual("J1 J2 J3 = -I", float(np.linalg.norm(j1 @ j2 @ j3 + eye) / np.sqrt(n)), bound)
    for i, w in enumerate(q.omegas, 1):
        scale = np.linalg.norm(w)
        rep.add_residual(f"omega{i} skew", float(np.linalg.norm(w + w.T) / max(scale, 1e-300)), bound)
        full = rank(w, q.tol) == n
        rep.add(f"omega{i} nondegenerate", full, 0.0, "" if full else "rank deficient")
        res = np.linalg.norm(w - q.derived[i - 1]) / max(scale, 1e-300)
        rep.add_residual(f"omega{i} = g(J{i}.,.)", float(res), bound)
    return rep


def induced_fat_pair(q: QContTriple) -> FatTuple2:
    """The corank-2 tuple ``(omega2, omega3)``; its automorphism is ``-J1``."""
    rep = validate_triple(q)
    if not rep.passed:
        raise PreconditionError(f"invalid triple: {[c.name for c in rep.failures]}")
    t = FatTuple2(q.omegas[1], q.omegas[2], q.tol)
    a = connecting_automorphism(t).a
    res = np.linalg.norm(a + q.j1) / np.linalg.norm(q.j1)
    if res > q.tol.loose:
        raise InternalInconsistencyError(f"automorphism differs from -J1 by {res:.3g}")
    return t


def omega_perp3(q: QContTriple, v: Subspace) -> Subspace:
    w1, w2, w3 = q.omegas
    tol = q.tol
    return intersect(intersect(form_perp(v, w1, tol), form_perp(v, w2, tol), tol),
                     form_perp(v, w3, tol), tol)


def is_isotropic3(q: QContTriple, v: Subspace) -> bool:
    return isotropy_residual(q.omegas, v) <= q.tol.threshold(1.0)


def is_regular3(q: QContTriple, v: Subspace) -> bool:
    b = v.basis
    stacked = np.vstack([b.T @ w for w in q.omegas])
    return rank(stacked, q.tol) == 3 * v.dim


def pansu_check(q: QContTriple, v: Subspace) -> bool:
    """Regularity verdict for an isotropic subspace (always true in theory)."""
    if not is_isotropic3(q, v):
        raise PreconditionError("pansu_check needs an isotropic subspace")
    return is_regular3(q, v)


def _j_span(q: QContTriple, v: Subspace, include_v: bool = False) -> Subspace:
    cols = [j @ v.basis for j in q.js]
    if include_v:
        cols.insert(0, v.basis)
    return Subspace(np.hstack(cols), q.dim, tol=q.tol)


def decomposition_check(q: QContTriple, w: Subspace, bound: float = 1e-10) -> Report:
    """``D = W^Omega (+)_g sum J_i W``, with directness iff regularity."""
    wo = omega_perp3(q, w)
    sj = _j_span(q, w)
    rep = Report("quaternionic decomposition")
    if wo.dim and sj.dim:
        res = np.linalg.norm(wo.basis.T @ q.g @ sj.basis, 2) / np.linalg.norm(q.g, 2)
    else:
        res = 0.0
    rep.add_residual("g-orthogonal", float(res), bound)
    rep.add("dims sum", wo.dim + sj.dim == q.dim, 0.0, f"{wo.dim} + {sj.dim}")
    direct = sj.dim == 3 * w.dim
    regular = is_regular3(q, w)
    rep.add("direct iff regular", direct == regular, 0.0, f"direct={direct} regular={regular}")
    rep.info.update(direct=direct, regular=regular, dim_perp=wo.dim, dim_jspan=sj.dim)
    return rep


def _sample_unit(basis, rng):
    x = basis @ rng.standard_normal(basis.shape[1])
    return x / np.linalg.norm(x)


def _isocontact_admissible(q: QContTriple, v: Subspace) -> bool:
    if v.dim == 0:
        return True
    b = v.basis
    return (isotropy_residual(q.omegas[1:], v) <= q.tol.threshold(1.0)
            and rank(b.T @ q.omegas[0] @ b, q.tol) == v.dim)


def pick_tau(q: QContTriple, v: Subspace, rng=None) -> np.ndarray:
    """Unit ``tau`` in ``V^Omega`` outside ``V + sum J_i V``.

    Sampling happens in the orthogonal complement, inside ``V^Omega``, of
    ``V^Omega & (V + sum J_i V)``; ``V + <tau>`` is checked to be regular.
    """
    rng = rng_from(rng)
    vo = omega_perp3(q, v)
    meet = intersect(vo, _j_span(q, v, include_v=True), q.tol)
    if _isocontact_admissible(q, v) and is_regular3(q, v) and meet.dim != v.dim:
        raise InternalInconsistencyError(
            f"dim(V^Omega & (V + sum J_i V)) = {meet.dim}, expected {v.dim}")
    comp = intersect(vo, meet.orthogonal_complement(), q.tol)
    if comp.dim == 0:
        raise NoRoomError("V^Omega is saturated by V + sum J_i V")
    for _ in range(_RETRIES):
        tau = _sample_unit(comp.basis, rng)
        w = subspace_sum(v, Subspace(tau, q.dim), q.tol)
        if w.dim == v.dim + 1 and is_regular3(q, w):
            return tau
    raise ConstructionFailure("no tau keeps V + <tau> regular")


def pick_eta(q: QContTriple, v_tau: Subspace, tau, rng=None, base: Subspace | None = None) -> np.ndarray:
    """``eta`` with ``omega1(tau, eta) = 1`` and ``omega2, omega3`` pairings zero.

    ``eta`` is drawn from ``V_tau^perp2 & V_tau^perp3`` and rejected when it
    falls in ``V_tau + J1 V_tau``.  If ``base`` is given (the subspace ``V``
    with ``V_tau = V + <tau>``), ``eta`` is shifted along ``base`` so that
    ``omega1(base, eta) = 0``, which keeps a growing frame symplectic.
    """
    rng = rng_from(rng)
    tau = np.asarray(tau, dtype=float)
    w1, w2, w3 = q.omegas
    tol = q.tol
    k = intersect(form_perp(v_tau, w2, tol), form_perp(v_tau, w3, tol), tol)
    c = tau @ w1 @ k.basis
    cn = np.linalg.norm(c)
    if k.dim == 0 or cn <= tol.loose * np.linalg.norm(w1, 2) * np.linalg.norm(tau):
        raise NoRoomError("the slice omega1(tau, .) = 1 is empty")
    null = np.eye(k.dim) - np.outer(c, c) / cn**2
    bad = Subspace(np.hstack([v_tau.basis, q.j1 @ v_tau.basis]), q.dim, tol=tol)
    for _ in range(_RETRIES):
        y = c / cn**2 + null @ rng.standard_normal(k.dim)
        eta = k.basis @ y
        if base is not None and base.dim:
            b = base.basis
            eta = eta - b @ np.linalg.solve(b.T @ w1 @ b, b.T @ w1 @ eta)
        eta = eta / (tau @ w1 @ eta)
        if bad.residual(eta) > tol.loose * np.linalg.norm(eta):
            return eta
    raise ConstructionFailure("eta keeps landing in V_tau + J1 V_tau")
