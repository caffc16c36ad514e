"""``fatdist`` command-line front end.

Every command prints one JSON document on stdout and a human summary on
stderr.  Wall time only appears on stderr, so stdout is byte-identical for
identical inputs, flags and seed.

Exit codes
----------
0  success
1  a check failed
2  schema or usage error (malformed JSON reports line and column)
3  numeric failure
4  no frame found
5  exactness violation in a lift
6  first jet not regular
"""
from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from .core import Tolerance
from .errors import (
    ConstructionFailure, FatDistError, InternalInconsistencyError, NoRoomError, NotRegularError,
    NumericFailure, SchemaError, SizeError,
)
from .fat2 import FatTuple2, connecting_automorphism, degree, is_fat
from .frames import REGIMES, build_frame, verify_frame
from .instances import load_instance
from .jets import assemble_dense, oracle_gap, system_residual, triangular_solve
from .models import (
    ExactnessError, LiouvilleModel, lift_curve, lift_exact_lagrangian,
    make_liouville_model, pointwise_forms, pointwise_tuple, refinement_study,
)
from .qcont import QContTriple, induced_fat_pair, validate_triple
from .report import Report
from .suites import SUITES, curvature_cross_residual, run_suite

__all__ = ["main", "build_parser", "EXIT"]

EXIT = {"ok": 0, "check": 1, "usage": 2, "numeric": 3, "no_frame": 4, "exactness": 5, "not_regular": 6}
RATIO_BAND = (3.0, 5.0)


class _Usage(FatDistError):
    pass


def _load(path, kinds, tol):
    inst = load_instance(path, tol)
    if inst.kind not in kinds:
        raise _Usage(f"{path}: kind {inst.kind!r} not accepted here (expected one of {sorted(kinds)})")
    return inst


# commands -------------------------------------------------------------------

def _check_tuple(t: FatTuple2, rep: Report, prefix: str = ""):
    ca = connecting_automorphism(t)
    rep.add_residual(prefix + "connecting automorphism", ca.residual, 1e-9)
    fat = is_fat(t)
    rep.add(prefix + "fat", fat, 0.0, "A has no real eigenvalue" if fat else "A has a real eigenvalue")
    return fat, degree(t) if fat else None


def cmd_check(args, tol):
    inst = _load(args.files[0], {"fat_tuple", "qcont_triple", "affine_model", "liouville_model"}, tol)
    obj = inst.value
    rep = Report(f"check {inst.kind}")
    ctx = obj
    if isinstance(obj, FatTuple2):
        fat, deg = _check_tuple(obj, rep)
        rep.info.update(dim=obj.dim, fat=fat, degree=deg)
    elif isinstance(obj, QContTriple):
        rep.extend(validate_triple(obj))
        pair = induced_fat_pair(obj)
        res = float(np.abs(pair.a + obj.j1).max())
        rep.add_residual("A(omega2, omega3) = -J1", res, 1e-9)
        fat, deg = _check_tuple(pair, rep, "induced pair ")
        rep.info.update(dim=obj.dim, fat=fat, degree=deg)
    else:
        m = make_liouville_model(obj) if isinstance(obj, LiouvilleModel) else obj
        degrees = []
        for i, x in enumerate(m.probe_points()):
            if m.frame and m.p == 2:
                fat, deg = _check_tuple(pointwise_tuple(m, x), rep, f"probe {i} ")
                degrees.append(deg)
            elif m.frame:
                for s, w in enumerate(pointwise_forms(m, x), 1):
                    sv = np.linalg.svd(w, compute_uv=False)
                    rep.add(f"probe {i} curvature {s} nondegenerate", sv[-1] > m.tol.threshold(sv[0]),
                            float(sv[-1] / sv[0]))
            if m.frame:
                rep.add_residual(f"probe {i} coframe = bracket", curvature_cross_residual(m, x), 1e-12)
        rep.info.update(dim=m.dim_m, corank=m.p, fat=all(c.passed for c in rep.checks if c.name.endswith(" fat")),
                        degree=sorted(set(d for d in degrees if d is not None)))
        ctx = pointwise_tuple(m, m.probe_points()[0]) if m.frame and m.p == 2 else None
    if len(args.files) > 1:
        fr = _load(args.files[1], {"frame"}, tol).value
        if ctx is None:
            raise _Usage("frame verification needs a fat tuple, a triple or a corank-2 model with a frame")
        rep.extend(verify_frame(fr, ctx), "frame ")
    return rep, {}


def cmd_frame(args, tol):
    if args.regime is None or args.k is None:
        raise _Usage("frame needs --regime and --k")
    inst = _load(args.files[0], {"fat_tuple", "qcont_triple"}, tol)
    qc = args.regime.endswith("qcont")
    if qc != (inst.kind == "qcont_triple"):
        raise _Usage(f"regime {args.regime} is incompatible with kind {inst.kind}")
    rep = Report(f"frame {args.regime} k={args.k}")
    try:
        frame = build_frame(args.regime, inst.value, args.k, np.random.default_rng(args.seed))
    except (ConstructionFailure, NoRoomError) as exc:
        rep.add("frame found", False, 0.0, str(exc))
        return rep, {}
    rep.add("frame found", True)
    rep.extend(verify_frame(frame, inst.value))
    return rep, ({"frame": frame.to_dict()} if rep.passed else {})


def cmd_verify(args, tol):
    if args.suite is None:
        raise _Usage("verify needs --suite")
    ctx = None
    if args.files:
        ctx = _load(args.files[0], {"fat_tuple", "qcont_triple", "affine_model", "liouville_model",
                                    "jets_system"}, tol).value
    return run_suite(args.suite, args.trials, args.seed, ctx, tol), {}


def cmd_lift(args, tol):
    if len(args.files) != 2:
        raise _Usage("lift needs a model file and a grid file")
    l = _load(args.files[0], {"liouville_model"}, tol).value
    grid = _load(args.files[1], {"grid"}, tol).value
    mesh_tol = grid.get("mesh_tol", 1e-2)
    if args.refine and "curve" not in grid:
        raise _Usage("--refine needs a parametric curve grid")
    rep = Report("lift")
    if "curve" in grid:
        res = lift_curve(l, grid["curve"], grid["t_range"], grid["n"], mesh_tol)
    else:
        res = lift_exact_lagrangian(l, grid["samples"], grid["primitives"], mesh_tol)
    rep.add_residual("horizontal", res.max_residual, mesh_tol,
                     f"worst edge {list(map(list, res.worst_edge)) if res.worst_edge else None}")
    rep.info.update(max_residual=res.max_residual)
    if args.refine:
        study = refinement_study(l, grid["curve"], grid["t_range"], grid["n"], args.refine, mesh_tol)
        lo, hi = RATIO_BAND
        for i, r in enumerate(study["ratios"], 1):
            rep.add(f"refinement {i} ratio", lo <= r <= hi, r, "expected 4 within 25%")
        rep.info.update(refinement=study)
    return rep, {"lifted": res.points.tolist()}


def cmd_jets(args, tol):
    sys_ = _load(args.files[0], {"jets_system"}, tol).value
    q = triangular_solve(sys_)
    rep = Report("jets")
    rep.add_residual("residual", system_residual(sys_, q), 1e-9)
    if args.oracle:
        rep.add_residual("dense oracle", oracle_gap(sys_, q), 1e-6)
        m, _, _ = assemble_dense(sys_)
        rep.info.update(dense_shape=list(m.shape), dense_rank=int(np.linalg.matrix_rank(m)))
    return rep, {"solution": q.to_dict()}


COMMANDS = {"check": cmd_check, "frame": cmd_frame, "verify": cmd_verify, "lift": cmd_lift, "jets": cmd_jets}


# driver ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, help="relative rank tolerance (overrides files)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=int, default=100)
    common.add_argument("--refine", type=int, default=0, metavar="K")
    common.add_argument("--oracle", action="store_true")
    common.add_argument("--regime", choices=REGIMES)
    common.add_argument("--k", type=int)
    common.add_argument("--suite", choices=sorted(SUITES))

    parser = argparse.ArgumentParser(prog="fatdist", description="Fat distribution linear-algebra toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)
    nargs = {"check": "+", "frame": 1, "verify": "?", "lift": 2, "jets": 1}
    for name, n in nargs.items():
        p = sub.add_parser(name, parents=[common])
        p.add_argument("files", nargs=n, metavar="FILE")
    return parser


def _echo(args) -> dict:
    files = args.files if isinstance(args.files, list) else ([args.files] if args.files else [])
    flags = {k: getattr(args, k) for k in ("tol", "seed", "trials", "refine", "oracle", "regime", "k", "suite")}
    return {"name": args.command, "files": files, "flags": flags}


def _exit_for(exc) -> str:
    if isinstance(exc, NotRegularError):
        return "not_regular"
    if isinstance(exc, ExactnessError):
        return "exactness"
    if isinstance(exc, (NumericFailure, InternalInconsistencyError)):
        return "numeric"
    if isinstance(exc, (ConstructionFailure, NoRoomError)):
        return "no_frame"
    return "usage"


def _default(o):
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(type(o).__name__)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if not isinstance(args.files, list):
        args.files = [args.files] if args.files else []
    t0 = time.perf_counter()
    out = {"command": _echo(args), "seed": args.seed}
    try:
        tol = Tolerance(rel_eps=args.tol) if args.tol is not None else None
        rep, extra = COMMANDS[args.command](args, tol)
        if args.command == "frame" and "frame found" in rep and not rep["frame found"].passed:
            code = EXIT["no_frame"]
        elif args.command == "frame" and not rep.passed:
            code = EXIT["no_frame"]
        else:
            code = EXIT["ok"] if rep.passed else EXIT["check"]
        out["report"] = rep.to_dict()
        out.update(extra)
        summary = str(rep)
    except (FatDistError, ValueError) as exc:
        kind = _exit_for(exc) if isinstance(exc, FatDistError) and not isinstance(exc, (SchemaError, SizeError)) \
            else "usage"
        code = EXIT[kind]
        out["error"] = {"type": type(exc).__name__, "message": str(exc)}
        summary = f"error: {type(exc).__name__}: {exc}"
    out["exit_code"] = code
    sys.stdout.write(json.dumps(out, indent=1, default=_default) + "\n")
    sys.stderr.write(f"{summary}\n{args.command}: exit {code} in {time.perf_counter() - t0:.3f}s\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
