"""JSON instance files: schema validation, decoding to library objects, encoding back.

Every file has the shape ``{"schema_version": "1.0", "kind": ..., "payload":
{...}, "tol": {...}}``.  Matrices are row-major nested lists and frames list
their vectors one per row.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import jsonschema
import numpy as np

from .core import DEFAULT_TOL, Tolerance
from .errors import FatDistError, SchemaError
from .fat2 import FatTuple2
from .frames import Frame
from .jets import SymTensorSystem
from .models import AffineCoframeModel, AffineCovector, AffineVectorField, LiouvilleModel
from .qcont import QContTriple

__all__ = ["SCHEMA_VERSION", "Instance", "schema", "load_instance", "parse_instance", "encode", "dumps"]

SCHEMA_VERSION = "1.0"


@lru_cache(maxsize=1)
def schema() -> dict:
    return json.loads(resources.files("fatdist").joinpath("schema.json").read_text())


@dataclass
class Instance:
    kind: str
    value: object
    tol: Tolerance
    payload: dict
    source: str = ""


def _matrix(x, name, shape=None) -> np.ndarray:
    rows = {len(r) for r in x}
    if len(rows) != 1:
        raise SchemaError(f"{name}: rows have different lengths {sorted(rows)}")
    m = np.array(x, dtype=float)
    if not np.all(np.isfinite(m)):
        raise SchemaError(f"{name}: non-finite entry")
    if shape is not None and m.shape != shape:
        raise SchemaError(f"{name}: expected shape {shape}, got {m.shape}")
    return m


def _affine(obj, n, name, cls):
    c = np.array(obj["constant"], dtype=float)
    if c.shape != (n,):
        raise SchemaError(f"{name}.constant: expected length {n}, got {c.size}")
    return cls(c, _matrix(obj["linear"], f"{name}.linear", (n, n)))


def _tag(raw):
    if raw[0] == "lambda" and len(raw) == 2:
        return ("lambda", tuple(int(i) for i in raw[1]))
    if raw[0] == "coupling" and len(raw) == 4:
        return ("coupling", tuple(int(i) for i in raw[1]), int(raw[2]), int(raw[3]))
    raise SchemaError(f"bad equation tag {raw!r}")


def _decode(kind: str, p: dict, tol: Tolerance):
    if kind == "fat_tuple":
        return FatTuple2(_matrix(p["omega1"], "omega1"), _matrix(p["omega2"], "omega2"), tol)
    if kind == "qcont_triple":
        js = [_matrix(p[k], k) for k in ("j1", "j2", "j3")]
        g = _matrix(p["g"], "g") if "g" in p else None
        return QContTriple(*js, g=g, tol=tol)
    if kind == "affine_model":
        n = p["dim"]
        lams = [_affine(c, n, f"lambdas[{i}]", AffineCovector) for i, c in enumerate(p["lambdas"])]
        frame = [_affine(c, n, f"frame[{i}]", AffineVectorField) for i, c in enumerate(p.get("frame", []))]
        return AffineCoframeModel(n, lams, frame or None, list(p.get("coords", [])),
                                  list(p.get("frame_names", [])), tol=tol)
    if kind == "liouville_model":
        n = p["n_dim"]
        return LiouvilleModel(n, [_affine(c, n, f"mus[{i}]", AffineCovector) for i, c in enumerate(p["mus"])], tol)
    if kind == "frame":
        n = p["ambient_dim"]
        vec = np.array(p["vectors"], dtype=float).reshape(-1, n) if p["vectors"] else np.zeros((0, n))
        if vec.shape[1] != n:
            raise SchemaError(f"frame vectors must have length {n}")
        return Frame(n, vec.T, p["regime"])
    if kind == "grid":
        return dict(p)
    if kind == "jets_system":
        lam = _matrix(p["lambda"], "lambda")
        n = lam.shape[1]
        dl = [_matrix(d, f"dlambdas[{i}]", (n, n)) for i, d in enumerate(p["dlambdas"])]
        p1 = _matrix(p["p1"], "p1")
        rhs = None
        if p.get("rhs") is not None:
            rhs = {_tag(e["tag"]): np.array(e["value"], dtype=float) for e in p["rhs"]}
        return SymTensorSystem(lam, dl, p1, rhs=rhs, alpha=p.get("alpha", 0), tol=tol)
    raise SchemaError(f"unknown kind {kind!r}")


def parse_instance(doc: dict, source: str = "", tol: Tolerance | None = None) -> Instance:
    """Validate ``doc`` against the schema and decode its payload.

    ``tol`` overrides the tolerance stored in the file.
    """
    try:
        jsonschema.validate(doc, schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(x) for x in exc.absolute_path) or "<root>"
        raise SchemaError(f"{source}: {where}: {exc.message}") from None
    if tol is None:
        tol = Tolerance(**doc["tol"]) if "tol" in doc else DEFAULT_TOL
    try:
        value = _decode(doc["kind"], doc["payload"], tol)
    except SchemaError:
        raise
    except (FatDistError, ValueError) as exc:
        raise SchemaError(f"{source}: invalid {doc['kind']} payload: {exc}") from exc
    return Instance(doc["kind"], value, tol, doc["payload"], source)


def load_instance(path, tol: Tolerance | None = None) -> Instance:
    """Read and validate an instance file; malformed JSON reports line and column."""
    path = str(path)
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SchemaError(f"{path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}") from None
    return parse_instance(doc, path, tol)


# encoding -------------------------------------------------------------------

def _aff(obj) -> dict:
    return {"constant": obj.constant.tolist(), "linear": obj.linear.tolist()}


def _payload(obj) -> tuple[str, dict]:
    if isinstance(obj, FatTuple2):
        return "fat_tuple", {"omega1": obj.omega1.tolist(), "omega2": obj.omega2.tolist()}
    if isinstance(obj, QContTriple):
        j1, j2, j3 = obj.js
        return "qcont_triple", {"j1": j1.tolist(), "j2": j2.tolist(), "j3": j3.tolist(), "g": obj.g.tolist()}
    if isinstance(obj, AffineCoframeModel):
        out = {"dim": obj.dim_m, "lambdas": [_aff(c) for c in obj.lambdas]}
        if obj.frame:
            out["frame"] = [_aff(f) for f in obj.frame]
            out["frame_names"] = list(obj.frame_names)
        out["coords"] = list(obj.coords)
        return "affine_model", out
    if isinstance(obj, LiouvilleModel):
        return "liouville_model", {"n_dim": obj.n_dim, "mus": [_aff(m) for m in obj.mus]}
    if isinstance(obj, Frame):
        return "frame", obj.to_dict()
    if isinstance(obj, SymTensorSystem):
        rhs = None
        if obj.rhs is not None:
            rhs = [{"tag": [t[0], list(t[1]), *t[2:]], "value": obj.rhs_for(t).tolist()}
                   for t, *_ in obj.equations()]
        return "jets_system", {"lambda": obj.lam.tolist(), "dlambdas": [d.tolist() for d in obj.dlams],
                               "p1": obj.p1.tolist(), "alpha": obj.alpha, "rhs": rhs}
    raise TypeError(f"cannot encode {type(obj).__name__}")


def encode(obj, kind: str | None = None, tol: Tolerance | None = None, description: str = "") -> dict:
    """Instance document for a library object, or for a grid payload dict with ``kind="grid"``."""
    if kind == "grid":
        payload = dict(obj)
    else:
        kind, payload = _payload(obj)
    doc = {"schema_version": SCHEMA_VERSION, "kind": kind, "payload": payload}
    if description:
        doc["description"] = description
    if tol is not None:
        doc["tol"] = {"rel_eps": tol.rel_eps, "abs_eps": tol.abs_eps}
    return doc


def dumps(doc) -> str:
    return json.dumps(doc, indent=1, sort_keys=False) + "\n"
