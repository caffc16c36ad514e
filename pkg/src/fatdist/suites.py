"""Randomized property suites behind ``fatdist verify``.

A suite runs a trial function once per trial with the generator
``default_rng([seed, trial])`` and collects ``(name, residual, passed)``
triples.  The report aggregates them per name with min/median/max residuals,
so the result only depends on the seed and the trial count.
"""
from __future__ import annotations

import numpy as np

from .core import DEFAULT_TOL, Subspace, Tolerance, form_perp, random_subspace
from .errors import FatDistError, NotRegularError
from .fat2 import (
    FatTuple2, connecting_automorphism, deg2_identities, degree, extend_isotropic, is_fat,
    random_fat_tuple, random_pair, regularity_criteria,
)
from .frames import Frame, build_horizontal_qcont, verify_frame
from .jets import fullrank_check, holomorphic_system, oracle_gap, random_rhs, system_residual, triangular_solve
from .models import (
    AffineCoframeModel, LiouvilleModel, eval_curvature_bracket, eval_curvature_coframe,
    formal_lift, holomorphic_liouville, lift_exact_lagrangian, make_holomorphic_contact_model,
    make_liouville_model, make_quaternionic_heisenberg_model, pointwise_tuple,
)
from .qcont import QContTriple, decomposition_check, induced_fat_pair, pansu_check, random_qcont, validate_triple
from .report import Report

__all__ = ["SUITES", "run_suite", "curvature_cross_residual"]


def _fat2_props(rng, ctx, tol):
    out = []
    if isinstance(ctx, FatTuple2):
        t = ctx if tol is None else ctx.with_tol(tol)
    else:
        t = random_fat_tuple(int(rng.choice([4, 8, 12])), rng, deg=[2, None][rng.integers(2)],
                             tol=tol or DEFAULT_TOL)
    ca = connecting_automorphism(t)
    out.append(("connecting automorphism", ca.residual, ca.residual <= 1e-9))
    out.append(("fat", 0.0, is_fat(t)))
    v = random_subspace(t.dim, int(rng.integers(1, t.dim // 2 + 1)), rng)
    out.append(("regularity criteria agree", 0.0, len(set(regularity_criteria(t, v).values())) == 1))
    out.append(("dim V^perp1 = n - dim V", 0.0, form_perp(v, t.omega1, t.tol).dim == t.dim - v.dim))
    u = random_pair(2 * int(rng.integers(2, 7)), rng, tol=tol or DEFAULT_TOL)
    w = random_subspace(u.dim, int(rng.integers(1, u.dim // 2 + 1)), rng)
    out.append(("regularity criteria agree (random pair)", 0.0,
                len(set(regularity_criteria(u, w).values())) == 1))
    return out


def _deg2(rng, ctx, tol):
    if isinstance(ctx, FatTuple2):
        t = ctx if tol is None else ctx.with_tol(tol)
    else:
        t = random_fat_tuple(int(rng.choice([4, 8, 12])), rng, deg=2, tol=tol or DEFAULT_TOL)
    out = []
    generic = random_subspace(t.dim, int(rng.integers(1, t.dim // 2 + 1)), rng)
    iso = Subspace.zero(t.dim)
    for _ in range(int(rng.integers(1, t.dim // 4 + 1))):
        iso = extend_isotropic(t, iso, rng)
    for label, v in (("generic", generic), ("isotropic", iso)):
        for c in deg2_identities(t, v).checks:
            out.append((f"{c.name} [{label}]", c.residual, c.passed))
    out.append(("degree 2", 0.0, degree(t) == 2))
    return out


def _qcont(rng, ctx, tol):
    if isinstance(ctx, QContTriple):
        q = ctx
    else:
        q = random_qcont(int(rng.integers(2, 5)), rng, tol=tol or DEFAULT_TOL)
    out = [(c.name, c.residual, c.passed) for c in validate_triple(q).checks]
    try:
        t = induced_fat_pair(q)
        res = float(np.abs(t.a + q.j1).max())
        out.append(("A(omega2, omega3) = -J1", res, res <= 1e-9))
    except FatDistError:
        out.append(("A(omega2, omega3) = -J1", np.inf, False))
    k = int(rng.integers(1, q.dim // 4 + 1))
    try:
        v = build_horizontal_qcont(q, k, rng).span()
        out.append(("isotropic implies regular", 0.0, pansu_check(q, v)))
    except FatDistError:
        out.append(("isotropic implies regular", np.inf, False))
    w = random_subspace(q.dim, k, rng)
    rep = decomposition_check(q, w)
    out += [(c.name, c.residual, c.passed) for c in rep.checks]
    return out


def curvature_cross_residual(m: AffineCoframeModel, point) -> float:
    """Largest gap between the coframe and bracket evaluations over all frame pairs."""
    fm = m.frame_matrix(point)
    worst = 0.0
    for i in range(len(m.frame)):
        for j in range(i + 1, len(m.frame)):
            a = eval_curvature_coframe(m, point, fm[:, i], fm[:, j])
            b = eval_curvature_bracket(m, i, j, point)
            worst = max(worst, float(np.abs(a - b).max()))
    return worst


_SHIPPED = None


def _shipped_models():
    global _SHIPPED
    if _SHIPPED is None:
        _SHIPPED = [(f"holomorphic n={n}", make_holomorphic_contact_model(n)) for n in (1, 2, 3)]
        _SHIPPED.append(("liouville holomorphic", make_liouville_model(holomorphic_liouville())))
        for n in (1, 2):
            _SHIPPED.append((f"quaternionic heisenberg n={n}", make_quaternionic_heisenberg_model(n)[0]))
    return _SHIPPED


def _curvature(rng, ctx, tol):
    if isinstance(ctx, LiouvilleModel):
        models = [("file", make_liouville_model(ctx))]
    elif isinstance(ctx, AffineCoframeModel):
        models = [("file", ctx)]
    else:
        models = _shipped_models()
    out = []
    for name, m in models:
        if not m.frame:
            continue
        res = curvature_cross_residual(m, rng.uniform(-2, 2, m.dim_m))
        out.append((f"coframe = bracket [{name}]", res, res <= 1e-12))
    return out


def _jets(rng, ctx, tol):
    out = []
    if ctx is not None:
        ctx.rhs = random_rhs(ctx, rng)
        systems = [("file", ctx)]
    else:
        systems = [(f"k+1={k}", holomorphic_system(k, rhs="random", rng=rng)) for k in (1, 2)]
    for name, sys in systems:
        if tol is not None:
            sys.tol = tol
        try:
            q = triangular_solve(sys)
        except NotRegularError:
            out.append((f"solvable [{name}]", np.inf, False))
            continue
        r = system_residual(sys, q)
        out.append((f"residual [{name}]", r, r <= 1e-9))
        g = oracle_gap(sys, q)
        out.append((f"dense oracle [{name}]", g, g <= 1e-6))
    if ctx is None:
        bad = holomorphic_system(2, rng=rng, regular=False)
        if tol is not None:
            bad.tol = tol
        out.append(("non-regular p1 detected", 0.0, not fullrank_check(bad)))
    return out


def _liouville(rng, ctx, tol):
    l = ctx if isinstance(ctx, LiouvilleModel) else holomorphic_liouville(tol or DEFAULT_TOL)
    n, p = l.n_dim, l.p
    x0, d = rng.uniform(-1, 1, n), rng.standard_normal(n)
    ts = np.linspace(0.0, 1.0, 9)
    f = x0 + ts[:, None] * d
    # exact primitive of a linear form along a segment
    phi = np.array([[l.mus[i].at(x0) @ d * s + 0.5 * s * s * d @ l.mus[i].linear.T @ d for i in range(p)]
                    for s in ts])
    res = lift_exact_lagrangian(l, f, phi).max_residual
    out = [("straight line lift horizontal", res, res <= 1e-12)]
    m = make_liouville_model(l)
    pt = rng.uniform(-1, 1, m.dim_m)
    vec = rng.standard_normal((n, 1))
    try:
        lifted = formal_lift(l, pt, vec)
        coords = m.frame_coordinates(pt, lifted.vectors)
        if p == 2:
            rep = verify_frame(Frame(n, coords, lifted.regime), pointwise_tuple(m, pt))
            out += [(f"formal lift {c.name}", c.residual, c.passed) for c in rep.checks]
    except FatDistError:
        out.append(("formal lift", np.inf, False))
    return out


SUITES = {
    "fat2-props": _fat2_props,
    "deg2-identities": _deg2,
    "qcont-props": _qcont,
    "curvature-cross": _curvature,
    "jets-oracle": _jets,
    "liouville": _liouville,
}


def run_suite(name: str, trials: int, seed: int = 0, ctx=None, tol: Tolerance | None = None) -> Report:
    """Run ``trials`` seeded trials of suite ``name`` and aggregate per check."""
    if name not in SUITES:
        raise KeyError(name)
    fn = SUITES[name]
    rows: dict[str, list] = {}
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        try:
            results = fn(rng, ctx, tol)
        except FatDistError as exc:
            results = [(f"trial raised {type(exc).__name__}", np.inf, False)]
        for check, res, ok in results:
            rows.setdefault(check, []).append((float(res), bool(ok)))
    rep = Report(f"suite {name}")
    stats = {}
    for check, vals in rows.items():
        res = np.array([v[0] for v in vals])
        fails = sum(not v[1] for v in vals)
        stats[check] = {"count": len(vals), "failures": fails, "min": float(res.min()),
                        "median": float(np.median(res)), "max": float(res.max())}
        rep.add(check, fails == 0, float(res.max()),
                f"{fails}/{len(vals)} failed; min {res.min():.2e} median {np.median(res):.2e} max {res.max():.2e}")
    rep.info.update(suite=name, trials=trials, seed=seed, stats=stats)
    return rep
