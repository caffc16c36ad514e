"""Tolerance-aware dense linear algebra.

Everything above this module talks about subspaces of a finite-dimensional
real vector space and about skew bilinear forms on it.  Subspaces are stored
by an orthonormal basis, so equality is a question about projectors rather
than about bases, and all rank decisions go through one singular value
threshold::

    sigma > rel_eps * sigma_max + abs_eps

A bilinear form ``omega`` is represented by a square matrix ``W`` with
``omega(u, v) = u @ W @ v``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, InvalidFormError, NumericFailure

__all__ = [
    "Tolerance", "DEFAULT_TOL", "Subspace", "as_matrix", "rank", "kernel",
    "subspace_sum", "intersect", "distance", "form_perp", "check_skew",
    "restrict_form", "minpoly_degree", "has_real_eigenvalue", "rng_from",
    "random_subspace",
]


@dataclass(frozen=True)
class Tolerance:
    """Thresholds for rank decisions.

    ``loose`` (the square root of ``rel_eps``) is used where an error is
    amplified like a square root, i.e. eigenvalues of defective matrices and
    cross-checks between two independent derivations of the same subspace.
    """

    rel_eps: float = 1e-9
    abs_eps: float = 1e-12

    def __post_init__(self):
        for name in ("rel_eps", "abs_eps"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")

    def threshold(self, scale: float) -> float:
        return self.rel_eps * scale + self.abs_eps

    @property
    def loose(self) -> float:
        return math.sqrt(self.rel_eps)


DEFAULT_TOL = Tolerance()


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Return ``m`` as a finite 2-D float array; raise ``ValueError`` otherwise."""
    arr = np.array(m, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1) if arr.size else arr.reshape(0, 0)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def rng_from(seed) -> np.random.Generator:
    """Accept an int seed, ``None`` or an existing Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _svd_rank(s: np.ndarray, tol: Tolerance) -> int:
    if s.size == 0:
        return 0
    return int(np.count_nonzero(s > tol.threshold(s[0])))


def rank(m, tol: Tolerance = DEFAULT_TOL) -> int:
    m = np.asarray(m, dtype=float)
    if m.size == 0:
        return 0
    return _svd_rank(np.linalg.svd(m, compute_uv=False), tol)


class Subspace:
    """A linear subspace of R^n, held as an orthonormal basis (n x k).

    Zero-dimensional subspaces are ordinary values with an ``(n, 0)`` basis.
    Instances are immutable; the basis array is marked read-only.
    """

    __slots__ = ("ambient_dim", "basis")

    def __init__(self, basis, ambient_dim: int | None = None, *, tol: Tolerance = DEFAULT_TOL,
                 orthonormal: bool = False):
        b = np.array(basis, dtype=float)
        if b.ndim == 1:
            b = b.reshape(-1, 1)
        if ambient_dim is None:
            ambient_dim = b.shape[0]
        if b.size == 0:
            b = np.zeros((ambient_dim, 0))
        if b.shape[0] != ambient_dim:
            raise DimensionMismatchError(
                f"basis has {b.shape[0]} rows, ambient dimension is {ambient_dim}")
        if not np.all(np.isfinite(b)):
            raise ValueError("subspace basis has non-finite entries")
        if not orthonormal and b.shape[1]:
            u, s, _ = np.linalg.svd(b, full_matrices=False)
            b = u[:, :_svd_rank(s, tol)]
        b = np.ascontiguousarray(b)
        b.flags.writeable = False
        object.__setattr__(self, "ambient_dim", int(ambient_dim))
        object.__setattr__(self, "basis", b)

    def __setattr__(self, key, value):
        raise AttributeError("Subspace is immutable")

    @classmethod
    def span(cls, vectors, ambient_dim: int | None = None, tol: Tolerance = DEFAULT_TOL) -> Subspace:
        """Span of the columns of ``vectors``."""
        return cls(vectors, ambient_dim, tol=tol)

    @classmethod
    def zero(cls, n: int) -> Subspace:
        return cls(np.zeros((n, 0)), n, orthonormal=True)

    @classmethod
    def full(cls, n: int) -> Subspace:
        return cls(np.eye(n), n, orthonormal=True)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def codim(self) -> int:
        return self.ambient_dim - self.dim

    @property
    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T

    def orthogonal_complement(self) -> Subspace:
        if self.dim == 0:
            return Subspace.full(self.ambient_dim)
        q, _ = np.linalg.qr(self.basis, mode="complete")
        return Subspace(q[:, self.dim:], self.ambient_dim, orthonormal=True)

    def residual(self, x) -> float:
        """Euclidean distance from ``x`` to the subspace."""
        x = np.asarray(x, dtype=float)
        return float(np.linalg.norm(x - self.basis @ (self.basis.T @ x)))

    def contains(self, x, tol: Tolerance = DEFAULT_TOL) -> bool:
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            return self.residual(x) <= tol.threshold(np.linalg.norm(x))
        return all(self.contains(col, tol) for col in x.T)

    def contains_subspace(self, other: Subspace, tol: Tolerance = DEFAULT_TOL) -> bool:
        _same_ambient(self, other)
        return self.contains(other.basis, tol) if other.dim else True

    def equals(self, other: Subspace, tol: Tolerance = DEFAULT_TOL) -> bool:
        """Mutual containment; bases are never compared directly."""
        return (self.dim == other.dim and self.contains_subspace(other, tol)
                and other.contains_subspace(self, tol))

    def image(self, a) -> Subspace:
        a = np.asarray(a, dtype=float)
        return Subspace(a @ self.basis, a.shape[0])

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient_dim})"


def _same_ambient(v: Subspace, w: Subspace):
    if v.ambient_dim != w.ambient_dim:
        raise DimensionMismatchError(
            f"ambient dimensions differ: {v.ambient_dim} vs {w.ambient_dim}")


def kernel(m, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2:
        raise ValueError(f"kernel expects a 2-D matrix, got shape {m.shape}")
    n = m.shape[1]
    if m.shape[0] == 0 or n == 0:
        return Subspace.full(n)
    _, s, vt = np.linalg.svd(m, full_matrices=True)
    r = _svd_rank(s, tol)
    return Subspace(vt[r:].T, n, orthonormal=True)


def subspace_sum(v: Subspace, w: Subspace, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    _same_ambient(v, w)
    return Subspace(np.hstack([v.basis, w.basis]), v.ambient_dim, tol=tol)


def intersect(v: Subspace, w: Subspace, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """Intersection through the kernel of ``[Qv, -Qw]``.

    ``[Qv, Qw]`` and ``[Qv, -Qw]`` share singular values, so
    ``dim(v + w) + dim(v & w) == dim v + dim w`` holds exactly at any tolerance.
    """
    _same_ambient(v, w)
    n = v.ambient_dim
    if v.dim == 0 or w.dim == 0:
        return Subspace.zero(n)
    null = kernel(np.hstack([v.basis, -w.basis]), tol)
    if null.dim == 0:
        return Subspace.zero(n)
    return Subspace(v.basis @ null.basis[: v.dim], n, tol=tol)


def distance(v: Subspace, w: Subspace) -> float:
    """Spectral norm of the projector difference (1.0 when dimensions differ)."""
    _same_ambient(v, w)
    if v.dim != w.dim:
        return 1.0
    if v.dim == 0:
        return 0.0
    return float(np.linalg.norm(v.projector - w.projector, 2))


def check_skew(omega, n: int | None = None, tol: Tolerance = DEFAULT_TOL, name: str = "form") -> np.ndarray:
    w = np.asarray(omega, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise InvalidFormError(f"{name} must be square, got shape {w.shape}")
    if n is not None and w.shape[0] != n:
        raise InvalidFormError(f"{name} has size {w.shape[0]}, expected {n}")
    if not np.all(np.isfinite(w)):
        raise InvalidFormError(f"{name} has non-finite entries")
    asym = np.linalg.norm(w + w.T)
    if asym > tol.threshold(np.linalg.norm(w)):
        raise InvalidFormError(f"{name} is not skew-symmetric (|W + W^T| = {asym:.3g})")
    return w


def restrict_form(omega, basis) -> np.ndarray:
    b = basis.basis if isinstance(basis, Subspace) else np.asarray(basis, dtype=float)
    return b.T @ np.asarray(omega, dtype=float) @ b


def form_perp(v: Subspace, omega, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """``{w : omega(x, w) = 0 for all x in v}`` as the kernel of ``B^T W``."""
    w = check_skew(omega, v.ambient_dim, tol)
    return kernel(v.basis.T @ w, tol)


def minpoly_degree(a, tol: Tolerance = DEFAULT_TOL) -> int:
    """Smallest d with I, A, ..., A^d linearly dependent in R^(n*n).

    Each power is normalized by its Frobenius norm before the rank test.
    """
    a = as_matrix(a, "a")
    n = a.shape[0]
    if a.shape != (n, n):
        raise DimensionMismatchError(f"minpoly_degree needs a square matrix, got {a.shape}")
    if n == 0:
        return 0
    power = np.eye(n)
    columns = [power.ravel() / np.linalg.norm(power)]
    for d in range(1, n + 1):
        power = power @ a
        nrm = np.linalg.norm(power)
        if nrm == 0.0:
            return d
        power = power / nrm
        columns.append(power.ravel())
        if rank(np.column_stack(columns), tol) < d + 1:
            return d
    return n  # Cayley-Hamilton; unreachable in exact arithmetic


def has_real_eigenvalue(a, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True iff some eigenvalue has |imag| <= tol.loose * spectral radius."""
    a = as_matrix(a, "a")
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got {a.shape}")
    if a.shape[0] == 0:
        return False
    try:
        eig = np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise NumericFailure(f"eigenvalue computation failed: {exc}") from exc
    scale = float(np.max(np.abs(eig)))
    if scale == 0.0:
        return True
    return bool(np.any(np.abs(eig.imag) <= tol.loose * scale))


def random_subspace(n: int, k: int, rng) -> Subspace:
    rng = rng_from(rng)
    return Subspace(rng.standard_normal((n, k)), n)
