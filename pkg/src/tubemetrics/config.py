"""Run configuration: JSON schema, validation, and object construction."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Union

import numpy as np

from .ambient import AmbientSpace
from .catalog import CATALOG, build_builtin
from .expressions import evaluate, max_variable, parse_expr
from .submanifold import Immersion


class ConfigError(ValueError):
    """Invalid run configuration."""


def _reject_unknown(obj: dict, allowed, where: str) -> None:
    unknown = set(obj) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in {where}")


@dataclass
class RunConfig:
    ambient: AmbientSpace
    immersion: Immersion
    base_points: List[np.ndarray]
    normals: Union[str, List[np.ndarray]]  # "all-frame" or explicit coefficient vectors
    radii: List[float]
    samples: int
    seed: int
    tol_ode: float
    tol_fd: float
    submanifold_name: str

    def normal_list(self, codim: int) -> List[np.ndarray]:
        if self.normals == "all-frame":
            return [np.eye(codim)[:, a] for a in range(codim)]
        for nc in self.normals:
            if len(nc) != codim:
                raise ConfigError(
                    f"normal coefficient vector {list(nc)} has length {len(nc)}, expected {codim}"
                )
        return [np.asarray(nc, dtype=float) for nc in self.normals]


def _build_ambient(spec: dict) -> AmbientSpace:
    _reject_unknown(spec, {"type", "k", "dim", "metric", "chart_bound", "fd_step"}, "ambient")
    kind = spec.get("type")
    if kind == "euclidean":
        dim = spec.get("dim")
        if dim is None:
            raise ConfigError("ambient.dim is required for type 'euclidean'")
        return AmbientSpace.euclidean(int(dim))
    if kind == "space_form":
        if "k" not in spec:
            raise ConfigError("ambient.k is required for type 'space_form'")
        dim = spec.get("dim")
        if dim is None:
            raise ConfigError("ambient.dim is required for type 'space_form'")
        return AmbientSpace.space_form(
            int(dim), float(spec["k"]), chart_bound=spec.get("chart_bound")
        )
    if kind == "custom":
        rows = spec.get("metric")
        if rows is None:
            raise ConfigError("ambient.metric (matrix of expressions) is required for type 'custom'")
        dim = int(spec.get("dim", len(rows)))
        if len(rows) != dim or any(len(r) != dim for r in rows):
            raise ConfigError(f"ambient.metric must be a {dim}x{dim} matrix of expressions")
        trees = [[parse_expr(cell) for cell in row] for row in rows]
        for row in trees:
            for tree in row:
                if max_variable(tree) > dim:
                    raise ConfigError(
                        f"metric expression uses variable t{max_variable(tree)} "
                        f"but the ambient dimension is {dim}"
                    )

        def metric_fn(x, _trees=trees, _d=dim):
            return np.array(
                [[evaluate(_trees[i][j], x) for j in range(_d)] for i in range(_d)]
            )

        return AmbientSpace.custom(
            dim,
            metric_fn,
            fd_step=float(spec.get("fd_step", 1e-5)),
            chart_bound=float(spec.get("chart_bound", np.inf)),
        )
    raise ConfigError(f"ambient.type must be euclidean | space_form | custom, got {kind!r}")


def _build_immersion(spec: dict, ambient: Optional[AmbientSpace], tol_fd: float):
    _reject_unknown(spec, {"builtin", "params", "custom", "n_params"}, "submanifold")
    if ("builtin" in spec) == ("custom" in spec):
        raise ConfigError("submanifold needs exactly one of 'builtin' or 'custom'")
    if "builtin" in spec:
        name = spec["builtin"]
        params = spec.get("params", {})
        imm = build_builtin(name, ambient, **params)
        return imm, name
    exprs = spec["custom"]
    trees = [parse_expr(t) for t in exprs]
    n_params = int(spec.get("n_params", max(max_variable(t) for t in trees) or 1))
    if ambient is None:
        raise ConfigError("an explicit ambient is required for a custom submanifold")
    if len(exprs) != ambient.dim:
        raise ConfigError(
            f"custom submanifold has {len(exprs)} coordinate expressions "
            f"but the ambient dimension is {ambient.dim}"
        )
    for t in trees:
        if max_variable(t) > n_params:
            raise ConfigError(
                f"coordinate expression uses t{max_variable(t)} but n_params is {n_params}"
            )

    def fmap(q, _trees=trees):
        return np.array([evaluate(t, q) for t in _trees])

    imm = Immersion(ambient, n_params, fmap, fd_step=tol_fd, name="custom")
    return imm, "custom"


_TOP_KEYS = {
    "ambient",
    "submanifold",
    "base_points",
    "normals",
    "radii",
    "samples",
    "seed",
    "tolerances",
}


def load_config(source: Union[str, dict]) -> RunConfig:
    """Build a RunConfig from a JSON file path or an already-parsed dict."""
    if isinstance(source, str):
        with open(source) as fh:
            raw = json.load(fh)
    else:
        raw = source
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    _reject_unknown(raw, _TOP_KEYS, "config")
    if "submanifold" not in raw:
        raise ConfigError("config.submanifold is required")

    tols = raw.get("tolerances", {})
    _reject_unknown(tols, {"ode", "fd"}, "tolerances")
    tol_ode = float(tols.get("ode", 1e-10))
    tol_fd = float(tols.get("fd", 1e-5))
    if tol_ode <= 0 or tol_fd <= 0:
        raise ConfigError("tolerances must be positive")

    ambient = _build_ambient(raw["ambient"]) if "ambient" in raw else None
    imm, name = _build_immersion(raw["submanifold"], ambient, tol_fd)
    ambient = imm.ambient

    entry = CATALOG.get(name)
    base_points = raw.get(
        "base_points", entry.default_base_points if entry else [[0.0] * imm.n_params]
    )
    base_points = [np.asarray(bp, dtype=float) for bp in base_points]
    for bp in base_points:
        if bp.shape != (imm.n_params,):
            raise ConfigError(
                f"base point {bp.tolist()} has length {bp.shape[0]}, expected {imm.n_params}"
            )

    normals = raw.get("normals", "all-frame")
    if normals != "all-frame" and not isinstance(normals, list):
        raise ConfigError("normals must be 'all-frame' or a list of coefficient vectors")

    radii = [float(r) for r in raw.get("radii", [0.05, 0.1, 0.2, 0.3])]
    if any(r <= 0.0 for r in radii):
        raise ConfigError("radii must be positive")

    samples = int(raw.get("samples", 10))
    if samples < 1:
        raise ConfigError("samples must be >= 1")

    return RunConfig(
        ambient=ambient,
        immersion=imm,
        base_points=base_points,
        normals=normals,
        radii=radii,
        samples=samples,
        seed=int(raw.get("seed", 0)),
        tol_ode=tol_ode,
        tol_fd=tol_fd,
        submanifold_name=name,
    )
