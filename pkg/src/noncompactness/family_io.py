"""FamilyFile JSON ingestion and export (the single file format of the CLI).

Schema (version 1):

    {
      "version": 1,
      "space": {"dim": 2, "norm": "l1"},
      "domain": [{"id": "a", "coords": [0.0]}, {"id": "b"}],
      "metric": "linf",                      # optional, with coords
      "functions": {"f": [[0,0], [1,0]]},    # one vector per domain entry
      "pools": {
        "gamma_centers": [[0.5, 0.0]],
        "phi_pool": ["f", {"name": "g", "values": [[...], [...]]}]
      },
      "grid": {"start": 0.0, "step": 0.1, "count": 33,
               "order": 1, "segments": [[0, 32]]}   # optional, CkFamily input
    }

With a ``grid`` block the domain is generated from the grid's active points
and the ``domain`` array must be omitted; function values then align with
the active points.  Validation errors carry the JSON path of the offending
entry; parse errors carry the line and column.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .ck import CkFamily, GridDomain, differentiate
from .core import SpaceTag, VALID_NORMS
from .errors import InputError
from .families import Domain, FunctionFamily

SCHEMA_VERSION = 1


@dataclass(frozen=True, eq=False)
class LoadedFamily:
    family: FunctionFamily
    phi_pool: FunctionFamily | None
    gamma_centers: np.ndarray | None
    grid: GridDomain | None
    ck: CkFamily | None
    raw: dict


def _fail(path: str, message: str) -> None:
    raise InputError(f"{path}: {message}")


def _require(cond: bool, path: str, message: str) -> None:
    if not cond:
        _fail(path, message)


def _as_matrix(obj, path: str, dim: int, rows: int | None = None) -> np.ndarray:
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError):
        _fail(path, "expected a list of numeric vectors")
    _require(arr.ndim == 2, path, f"expected a list of vectors, got shape {arr.shape}")
    _require(arr.shape[1] == dim, path, f"expected {dim} coordinates per vector, got {arr.shape[1]}")
    if rows is not None:
        _require(arr.shape[0] == rows, path, f"expected {rows} vectors, got {arr.shape[0]}")
    _require(bool(np.all(np.isfinite(arr))), path, "entries must be finite")
    return arr


def load_family_dict(doc: dict) -> LoadedFamily:
    _require(isinstance(doc, dict), "$", "family file must be a JSON object")
    version = doc.get("version", SCHEMA_VERSION)
    _require(version == SCHEMA_VERSION, "version", f"unsupported schema version {version}")

    space_doc = doc.get("space")
    _require(isinstance(space_doc, dict), "space", "missing or malformed space block")
    dim = space_doc.get("dim")
    norm = space_doc.get("norm")
    _require(isinstance(dim, int) and dim >= 1, "space.dim", "must be a positive integer")
    _require(norm in VALID_NORMS, "space.norm", f"must be one of {VALID_NORMS}")
    space = SpaceTag(dim, norm)

    grid = None
    if "grid" in doc:
        _require("domain" not in doc, "domain", "omit the domain array when a grid block is given")
        g = doc["grid"]
        _require(isinstance(g, dict), "grid", "must be an object")
        for key in ("start", "step", "count"):
            _require(key in g, f"grid.{key}", "missing")
        segments = tuple(tuple(seg) for seg in g.get("segments", []))
        try:
            grid = GridDomain(float(g["start"]), float(g["step"]), int(g["count"]), segments)
        except InputError as exc:
            _fail("grid", str(exc))
        domain = grid.to_domain()
    else:
        dom_doc = doc.get("domain")
        _require(isinstance(dom_doc, list) and dom_doc, "domain", "missing or empty domain array")
        labels = []
        coords = []
        has_coords = None
        for i, entry in enumerate(dom_doc):
            _require(isinstance(entry, dict) and "id" in entry, f"domain[{i}]", "needs an 'id'")
            labels.append(str(entry["id"]))
            entry_coords = entry.get("coords")
            if has_coords is None:
                has_coords = entry_coords is not None
            _require(
                (entry_coords is not None) == has_coords,
                f"domain[{i}]",
                "either every domain entry carries coords or none does",
            )
            if entry_coords is not None:
                coords.append(
                    [float(entry_coords)] if np.isscalar(entry_coords) else list(entry_coords)
                )
        _require(len(set(labels)) == len(labels), "domain", "ids must be unique")
        metric = doc.get("metric")
        if metric is not None:
            _require(metric in VALID_NORMS, "metric", f"must be one of {VALID_NORMS}")
        try:
            domain = Domain(
                tuple(labels),
                coords=np.asarray(coords, dtype=float) if coords else None,
                metric=metric,
            )
        except InputError as exc:
            _fail("domain", str(exc))

    funcs_doc = doc.get("functions")
    _require(isinstance(funcs_doc, dict) and funcs_doc, "functions", "missing or empty")
    names = []
    rows = []
    for name, vec_list in funcs_doc.items():
        arr = _as_matrix(vec_list, f"functions.{name}", dim, rows=len(domain))
        names.append(str(name))
        rows.append(arr)
    family = FunctionFamily(domain, space, tuple(names), np.asarray(rows))

    phi_pool = None
    gamma_centers = None
    pools_doc = doc.get("pools", {})
    _require(isinstance(pools_doc, dict), "pools", "must be an object")
    if "gamma_centers" in pools_doc:
        gamma_centers = _as_matrix(pools_doc["gamma_centers"], "pools.gamma_centers", dim)
    if "phi_pool" in pools_doc:
        entries = pools_doc["phi_pool"]
        _require(isinstance(entries, list) and entries, "pools.phi_pool", "must be a nonempty list")
        p_names = []
        p_rows = []
        for i, entry in enumerate(entries):
            if isinstance(entry, str):
                _require(
                    entry in family.names,
                    f"pools.phi_pool[{i}]",
                    f"references unknown function {entry!r}",
                )
                p_names.append(entry)
                p_rows.append(family.values[family.func_index(entry)])
            elif isinstance(entry, dict):
                _require("name" in entry and "values" in entry, f"pools.phi_pool[{i}]",
                         "inline pool functions need 'name' and 'values'")
                arr = _as_matrix(entry["values"], f"pools.phi_pool[{i}].values", dim, rows=len(domain))
                p_names.append(str(entry["name"]))
                p_rows.append(arr)
            else:
                _fail(f"pools.phi_pool[{i}]", "entries are names or inline function objects")
        _require(len(set(p_names)) == len(p_names), "pools.phi_pool", "names must be unique")
        phi_pool = FunctionFamily(domain, space, tuple(p_names), np.asarray(p_rows))

    ck = None
    if grid is not None:
        order = int(doc["grid"].get("order", 0))
        _require(order >= 0, "grid.order", "must be >= 0")
        try:
            ck = differentiate(family, order, grid)
        except InputError as exc:
            _fail("grid", str(exc))

    return LoadedFamily(family, phi_pool, gamma_centers, grid, ck, doc)


def load_family_file(path: str | Path) -> LoadedFamily:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read family file {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(
            f"{path}:{exc.lineno}:{exc.colno}: invalid JSON ({exc.msg})"
        ) from exc
    return load_family_dict(doc)


def family_to_dict(
    family: FunctionFamily,
    phi_pool: FunctionFamily | None = None,
    gamma_centers: np.ndarray | None = None,
    grid: GridDomain | None = None,
    order: int = 0,
) -> dict:
    """Serialize to the FamilyFile schema; inverse of ``load_family_dict``."""
    doc: dict = {
        "version": SCHEMA_VERSION,
        "space": {"dim": family.space.dim, "norm": family.space.norm},
    }
    if grid is not None:
        doc["grid"] = {
            "start": grid.start,
            "step": grid.step,
            "count": grid.count,
            "segments": [list(seg) for seg in grid.segments],
            "order": order,
        }
    else:
        entries = []
        for i, label in enumerate(family.domain.labels):
            entry: dict = {"id": label}
            if family.domain.coords is not None:
                entry["coords"] = family.domain.coords[i].tolist()
            entries.append(entry)
        doc["domain"] = entries
        if family.domain.coords is not None and family.domain.metric is not None:
            doc["metric"] = family.domain.metric
    doc["functions"] = {
        name: family.values[i].tolist() for i, name in enumerate(family.names)
    }
    pools: dict = {}
    if gamma_centers is not None:
        pools["gamma_centers"] = np.asarray(gamma_centers, dtype=float).tolist()
    if phi_pool is not None:
        pools["phi_pool"] = [
            {"name": name, "values": phi_pool.values[i].tolist()}
            for i, name in enumerate(phi_pool.names)
        ]
    if pools:
        doc["pools"] = pools
    return doc


def save_family_file(
    path: str | Path,
    family: FunctionFamily,
    phi_pool: FunctionFamily | None = None,
    gamma_centers: np.ndarray | None = None,
    grid: GridDomain | None = None,
    order: int = 0,
) -> None:
    doc = family_to_dict(family, phi_pool, gamma_centers, grid, order)
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
