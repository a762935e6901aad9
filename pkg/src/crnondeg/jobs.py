"""JSON job files: a source manifold, a target manifold and a polynomial map.

A manifold block is either extrinsic::

    {"type": "extrinsic", "vars": ["Z1", "Z2"], "rho": ["Z1*conj(Z1)+Z2*conj(Z2)-1"], "basepoint": ["1", "0"]}

or a graph ``Im w = phi(z, conj z, Re w)`` through the origin::

    {"type": "graph", "vars": ["z"], "w_vars": ["w"], "real_vars": ["s"], "phi": ["z^2*conj(z)^2"]}

``w_vars`` defaults to ``w`` (or ``w1..wd``) and ``real_vars`` to ``s`` (or
``s1..sd``).  Map components are written in the source ambient variables
(``vars`` then ``w_vars`` for a graph); missing map base points default to
the manifold base points.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

from .engine import DEFAULT_MAX_ORDER, Analysis
from .errors import CRError, JobError, ParseError
from .jets import VarSpace
from .manifolds import CRMap, ExtrinsicManifold, GraphManifold
from .parsing import degree, parse_expr, parse_scalar, to_jet

MAX_ORDER_ENV = "CRNONDEG_MAX_ORDER"


def default_max_order() -> int:
    raw = os.environ.get(MAX_ORDER_ENV)
    if raw is None or raw == "":
        return DEFAULT_MAX_ORDER
    try:
        k = int(raw)
    except ValueError:
        raise JobError(f"{MAX_ORDER_ENV} must be a nonnegative integer, got {raw!r}") from None
    if k < 0:
        raise JobError(f"{MAX_ORDER_ENV} must be a nonnegative integer, got {raw!r}")
    return k


def _names(block: dict, key: str, where: str, default=None) -> tuple:
    raw = block.get(key, default)
    if raw is None:
        raise JobError(f"{where}: missing {key!r}")
    if isinstance(raw, str) or not all(isinstance(x, str) for x in raw):
        raise JobError(f"{where}: {key!r} must be a list of variable names")
    return tuple(raw)


def _exprs(block: dict, key: str, where: str) -> list[str]:
    raw = block.get(key)
    if raw is None:
        raise JobError(f"{where}: missing {key!r}")
    if isinstance(raw, str):
        raw = [raw]
    if not raw or not all(isinstance(x, str) for x in raw):
        raise JobError(f"{where}: {key!r} must be a nonempty list of expression strings")
    return list(raw)


def _jet(text: str, space: VarSpace, where: str):
    try:
        e = parse_expr(text, space)
    except ParseError as exc:
        raise JobError(f"{where}: {exc}") from None
    return to_jet(e, space, max(degree(e), 1))


def _point(raw, arity: int, where: str) -> tuple:
    if raw is None:
        return (0,) * arity
    if isinstance(raw, (str, int)) or len(raw) != arity:
        raise JobError(f"{where}: base point must list {arity} coordinates")
    out = []
    for x in raw:
        try:
            out.append(parse_scalar(str(x)))
        except ParseError as exc:
            raise JobError(f"{where}: bad base point coordinate {x!r}: {exc}") from None
    return tuple(out)


def _default_seq(prefix: str, d: int) -> list[str]:
    return [prefix] if d == 1 else [f"{prefix}{k + 1}" for k in range(d)]


def manifold_from_block(block: dict, where: str):
    if not isinstance(block, dict):
        raise JobError(f"{where}: expected an object")
    kind = block.get("type")
    if kind == "extrinsic":
        space = VarSpace(_names(block, "vars", where))
        rho = [_jet(t, space, f"{where}.rho[{k}]") for k, t in enumerate(_exprs(block, "rho", where))]
        if "codim" in block and block["codim"] != len(rho):
            raise JobError(f"{where}: codim {block['codim']} but {len(rho)} defining functions")
        bp = _point(block.get("basepoint"), space.n_holo, where)
        return ExtrinsicManifold(space, rho, bp)
    if kind == "graph":
        phis = _exprs(block, "phi", where)
        d = len(phis)
        z = _names(block, "vars", where)
        w = _names(block, "w_vars", where, _default_seq("w", d))
        s = _names(block, "real_vars", where, _default_seq("s", d))
        if len(w) != d or len(s) != d:
            raise JobError(f"{where}: {d} graph functions need {d} w_vars and {d} real_vars")
        space = VarSpace(z, s)
        phi = [_jet(t, space, f"{where}.phi[{k}]") for k, t in enumerate(phis)]
        bp = block.get("basepoint")
        if bp is not None and any(_point(bp, len(z) + d, where)):
            raise JobError(f"{where}: a graph manifold is written at the origin; its base point must be 0")
        return GraphManifold(z, w, s, phi)
    raise JobError(f"{where}: 'type' must be 'graph' or 'extrinsic', got {kind!r}")


def _ambient(m) -> VarSpace:
    return m.ambient if isinstance(m, GraphManifold) else m.space


def _basepoint(m) -> tuple:
    if isinstance(m, GraphManifold):
        return (0,) * len(m.ambient.holo)
    return m.basepoint


@dataclass
class Job:
    name: str
    source: object
    target: object
    map: CRMap
    max_order: int | None = None

    def analysis(self, max_order: int | None = None, working_order: int | None = None) -> Analysis:
        k = max_order if max_order is not None else self.max_order
        if k is None:
            k = default_max_order()
        return Analysis(self.source, self.target, self.map, k, working_order)


def job_from_dict(data: dict, name: str = "job") -> Job:
    if not isinstance(data, dict):
        raise JobError("job file must contain a JSON object")
    for key in ("source", "target", "map"):
        if key not in data:
            raise JobError(f"job is missing the {key!r} block")
    try:
        source = manifold_from_block(data["source"], "source")
        target = manifold_from_block(data["target"], "target")
        mblock = data["map"]
        if not isinstance(mblock, dict):
            raise JobError("map: expected an object")
        src_space = _ambient(source)
        comps = [_jet(t, src_space, f"map.components[{k}]") for k, t in enumerate(_exprs(mblock, "components", "map"))]
        n_t = len(_ambient(target).holo)
        if len(comps) != n_t:
            raise JobError(f"map: {len(comps)} components but the target lives in C^{n_t}")
        p = _point(mblock["source_basepoint"], src_space.n_holo, "map.source_basepoint") \
            if "source_basepoint" in mblock else _basepoint(source)
        q = _point(mblock["target_basepoint"], n_t, "map.target_basepoint") \
            if "target_basepoint" in mblock else _basepoint(target)
        h = CRMap(comps, p, q)
    except JobError:
        raise
    except CRError as exc:
        raise JobError(str(exc)) from exc
    k = data.get("truncation_order")
    if k is not None and (not isinstance(k, int) or isinstance(k, bool) or k < 0):
        raise JobError("truncation_order must be a nonnegative integer")
    return Job(data.get("name", name), source, target, h, k)


def load_job(path: str | os.PathLike) -> Job:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise JobError(f"cannot read job file {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise JobError(f"{path}: invalid JSON: {exc}") from None
    return job_from_dict(data, path.stem)
