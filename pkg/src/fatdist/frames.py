"""Randomized greedy builders for regular frames, and an independent verifier.

Four regimes are supported:

``horizontal_deg2``
    ``k`` vectors spanning an Omega-regular, Omega-isotropic subspace of a
    degree 2 fat tuple.
``isocontact_deg2``
    ``(u1, v1, ..., uk, vk)``, an omega1-symplectic basis of an
    omega2-isotropic subspace.
``horizontal_qcont``
    ``k`` vectors spanning an isotropic subspace of a quaternionic triple.
``isocontact_qcont``
    ``(tau1, eta1, ...)``, an omega1-symplectic basis of an omega2- and
    omega3-isotropic, Omega-regular subspace.

Builders sample Gaussian vectors in explicit complements and retry a bounded
number of times.  ``verify_frame`` re-derives every predicate with plain
numpy and shares no subspace code with the builders.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Subspace, form_perp, intersect, rng_from, subspace_sum
from .errors import ConstructionFailure, FatDistError, PreconditionError
from .fat2 import FatTuple2, degree, is_isotropic, is_regular, omega_perp
from .qcont import QContTriple, is_isotropic3, omega_perp3, pick_eta, pick_tau
from .report import Report

__all__ = [
    "Frame", "REGIMES", "build_horizontal_deg2", "build_isocontact_deg2",
    "build_horizontal_qcont", "build_isocontact_qcont", "build_frame", "verify_frame",
]

REGIMES = ("horizontal_deg2", "isocontact_deg2", "horizontal_qcont", "isocontact_qcont")
RETRIES = 16
FRAME_BOUND = 1e-10


@dataclass(frozen=True)
class Frame:
    """Ordered vectors in R^ambient_dim, stored as the columns of ``vectors``."""

    ambient_dim: int
    vectors: np.ndarray
    regime: str

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise ValueError(f"unknown regime {self.regime!r}")
        v = np.array(self.vectors, dtype=float).reshape(self.ambient_dim, -1)
        v.flags.writeable = False
        object.__setattr__(self, "vectors", v)

    def __len__(self):
        return self.vectors.shape[1]

    def prefix(self, m: int) -> Frame:
        return Frame(self.ambient_dim, self.vectors[:, :m], self.regime)

    def span(self) -> Subspace:
        return Subspace(self.vectors, self.ambient_dim)

    def to_dict(self) -> dict:
        return {"ambient_dim": self.ambient_dim, "regime": self.regime,
                "vectors": self.vectors.T.tolist()}


def _gaussian(basis: np.ndarray, rng) -> np.ndarray:
    x = basis @ rng.standard_normal(basis.shape[1])
    return x / np.linalg.norm(x)


def _complement_in(outer: Subspace, inner: Subspace, tol) -> Subspace:
    """Orthogonal complement of ``outer & inner`` inside ``outer``."""
    return intersect(outer, intersect(outer, inner, tol).orthogonal_complement(), tol)


def _require_deg2(t: FatTuple2):
    if not isinstance(t, FatTuple2):
        raise PreconditionError("degree 2 regimes need a FatTuple2")
    d = degree(t)
    if d != 2:
        raise PreconditionError(f"degree 2 regimes need a degree 2 tuple, got degree {d}")


def build_horizontal_deg2(t: FatTuple2, k: int, rng=None) -> Frame:
    """Grow ``V`` by ``tau`` in ``V^Omega`` minus ``(V^Omega)^Omega``."""
    _require_deg2(t)
    rng = rng_from(rng)
    tol = t.tol
    vecs = []
    v = Subspace.zero(t.dim)
    for step in range(k):
        vo = omega_perp(t, v)
        comp = _complement_in(vo, omega_perp(t, vo), tol)
        if comp.dim == 0:
            raise ConstructionFailure(f"step {step + 1}: V^Omega lies in (V^Omega)^Omega")
        for _ in range(RETRIES):
            tau = _gaussian(comp.basis, rng)
            w = subspace_sum(v, Subspace(tau, t.dim), tol)
            if w.dim == step + 1 and is_regular(t, w) and is_isotropic(t, w):
                break
        else:
            raise ConstructionFailure(f"step {step + 1}: retries exhausted")
        vecs.append(tau)
        v = w
    return Frame(t.dim, np.column_stack(vecs) if vecs else np.zeros((t.dim, 0)), "horizontal_deg2")


def build_isocontact_deg2(t: FatTuple2, k: int, rng=None) -> Frame:
    """Pairs ``(u, v)`` in ``D_hat = V^Omega`` with ``omega1(u, v) = 1``, ``omega2(u, v) = 0``."""
    _require_deg2(t)
    rng = rng_from(rng)
    tol = t.tol
    w1 = t.omega1
    vecs = []
    v = Subspace.zero(t.dim)
    for step in range(k):
        dhat = omega_perp(t, v)
        if dhat.dim < 2:
            raise ConstructionFailure(f"step {step + 1}: V^Omega has dim {dhat.dim}")
        for _ in range(RETRIES):
            u = _gaussian(dhat.basis, rng)
            kk = intersect(dhat, form_perp(Subspace(u, t.dim), t.omega2, tol), tol)
            c = u @ w1 @ kk.basis
            cn = np.linalg.norm(c)
            if kk.dim == 0 or cn <= tol.loose * np.linalg.norm(w1, 2):
                continue
            y = c / cn**2 + (np.eye(kk.dim) - np.outer(c, c) / cn**2) @ rng.standard_normal(kk.dim)
            vv = kk.basis @ y
            vv = vv / (u @ w1 @ vv)
            w = subspace_sum(v, Subspace(np.column_stack([u, vv]), t.dim), tol)
            if w.dim == 2 * step + 2 and is_regular(t, w):
                break
        else:
            raise ConstructionFailure(f"step {step + 1}: retries exhausted")
        vecs += [u, vv]
        v = w
    return Frame(t.dim, np.column_stack(vecs) if vecs else np.zeros((t.dim, 0)), "isocontact_deg2")


def build_horizontal_qcont(q: QContTriple, k: int, rng=None) -> Frame:
    """Grow ``V`` by ``tau`` in ``V^Omega`` minus ``V``."""
    if not isinstance(q, QContTriple):
        raise PreconditionError("quaternionic regimes need a QContTriple")
    rng = rng_from(rng)
    tol = q.tol
    vecs = []
    v = Subspace.zero(q.dim)
    for step in range(k):
        comp = _complement_in(omega_perp3(q, v), v, tol)
        if comp.dim == 0:
            raise ConstructionFailure(f"step {step + 1}: V^Omega = V")
        for _ in range(RETRIES):
            tau = _gaussian(comp.basis, rng)
            w = subspace_sum(v, Subspace(tau, q.dim), tol)
            if w.dim == step + 1 and is_isotropic3(q, w):
                break
        else:
            raise ConstructionFailure(f"step {step + 1}: retries exhausted")
        vecs.append(tau)
        v = w
    return Frame(q.dim, np.column_stack(vecs) if vecs else np.zeros((q.dim, 0)), "horizontal_qcont")


def build_isocontact_qcont(q: QContTriple, k: int, rng=None) -> Frame:
    """Alternate ``pick_tau`` and ``pick_eta``.

    Success is guaranteed by dimension count for ``dim >= 8k - 2``; smaller
    dimensions are attempted and may raise ``ConstructionFailure``.
    """
    if not isinstance(q, QContTriple):
        raise PreconditionError("quaternionic regimes need a QContTriple")
    rng = rng_from(rng)
    tol = q.tol
    vecs = []
    v = Subspace.zero(q.dim)
    for step in range(k):
        try:
            tau = pick_tau(q, v, rng)
            v_tau = subspace_sum(v, Subspace(tau, q.dim), tol)
            eta = pick_eta(q, v_tau, tau, rng, base=v)
        except FatDistError as exc:
            raise ConstructionFailure(f"step {step + 1}: {exc}") from exc
        vecs += [tau, eta]
        v = subspace_sum(v_tau, Subspace(eta, q.dim), tol)
        if v.dim != 2 * step + 2:
            raise ConstructionFailure(f"step {step + 1}: eta fell into V + <tau>")
    return Frame(q.dim, np.column_stack(vecs) if vecs else np.zeros((q.dim, 0)), "isocontact_qcont")


_BUILDERS = {
    "horizontal_deg2": build_horizontal_deg2,
    "isocontact_deg2": build_isocontact_deg2,
    "horizontal_qcont": build_horizontal_qcont,
    "isocontact_qcont": build_isocontact_qcont,
}


def build_frame(regime: str, ctx, k: int, rng=None) -> Frame:
    if regime not in _BUILDERS:
        raise ValueError(f"unknown regime {regime!r}")
    return _BUILDERS[regime](ctx, k, rng)


# verifier -------------------------------------------------------------------

def _std_symplectic(m: int) -> np.ndarray:
    eta = np.zeros((2 * m, 2 * m))
    for i in range(m):
        eta[2 * i, 2 * i + 1] = 1.0
        eta[2 * i + 1, 2 * i] = -1.0
    return eta


def verify_frame(frame: Frame, ctx, bound: float = FRAME_BOUND, rel_rank: float = 1e-9) -> Report:
    """Check the regime predicates of ``frame`` from scratch.

    Residuals of form identities are ``max |F^T W F - target| / (|W| c^2)``
    with ``c`` the largest column norm, compared against ``bound``.
    """
    qc = frame.regime.endswith("qcont")
    if qc and not isinstance(ctx, QContTriple):
        raise PreconditionError(f"regime {frame.regime} needs a QContTriple")
    if not qc and not isinstance(ctx, FatTuple2):
        raise PreconditionError(f"regime {frame.regime} needs a FatTuple2")
    forms = list(ctx.omegas) if qc else [ctx.omega1, ctx.omega2]
    f = np.asarray(frame.vectors, dtype=float)
    n, m = f.shape
    rep = Report(f"frame {frame.regime}")
    rep.info.update(regime=frame.regime, size=m, ambient_dim=n)
    if n != (ctx.dim):
        rep.add("ambient dimension", False, 0.0, f"frame in R^{n}, context in R^{ctx.dim}")
        return rep
    if m == 0:
        rep.add("independent", True)
        return rep

    s = np.linalg.svd(f, compute_uv=False)
    rep.add("independent", bool(s[-1] > rel_rank * s[0]), float(s[-1] / s[0]),
            "smallest/largest singular value")
    c2 = float(np.max(np.sum(f * f, axis=0)))

    def form_residual(w, target):
        return float(np.max(np.abs(f.T @ w @ f - target)) / (np.linalg.norm(w, 2) * c2))

    zero = np.zeros((m, m))
    if frame.regime.startswith("horizontal"):
        for i, w in enumerate(forms, 1):
            rep.add_residual(f"isotropic omega{i}", form_residual(w, zero), bound)
    else:
        if m % 2:
            rep.add("even length", False, 0.0, f"{m} vectors")
            return rep
        rep.add_residual("symplectic basis omega1", form_residual(forms[0], _std_symplectic(m // 2)), bound)
        for i, w in enumerate(forms[1:], 2):
            rep.add_residual(f"isotropic omega{i}", form_residual(w, zero), bound)

    # regularity: rank of xi -> (omega^s(f_j, xi))_{s,j}
    stacked = np.vstack([f.T @ w for w in forms])
    sv = np.linalg.svd(stacked, compute_uv=False)
    need = len(forms) * m
    r = int(np.sum(sv > rel_rank * sv[0]))
    rep.add("regular", r == need, float(sv[need - 1] / sv[0]) if need <= sv.size else 0.0,
            f"rank {r} of {need}")
    return rep
