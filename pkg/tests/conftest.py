"""Shared helpers for the test suite."""

import numpy as np

from tubemetrics import AmbientSpace, build_builtin
from tubemetrics.catalog import CATALOG

EUCLIDEAN_BUILTINS = ["circle", "sphere", "torus", "helix", "line", "plane"]
SPACE_FORM_K = {"equator": 1.0, "latitude-circle": 1.0, "geodesic-line": -1.0}
TOTALLY_GEODESIC = {"line", "plane", "equator", "geodesic-line"}


def make_builtin(name, **params):
    """Build a catalog entry with its natural ambient."""
    k = SPACE_FORM_K.get(name)
    ambient = None
    if k is not None:
        ambient = AmbientSpace.space_form(CATALOG[name].ambient_dim, k=k)
    return build_builtin(name, ambient, **params)


def default_q(name):
    return np.array(CATALOG[name].default_base_points[0], dtype=float)


def first_normal(imm):
    codim = imm.ambient.dim - imm.n_params
    n = np.zeros(codim)
    n[0] = 1.0
    return n


def perturbed_plane(dim=2):
    """Conformally perturbed euclidean metric (1 + 0.1 e^{-|x|^2}) I."""

    def metric_fn(x):
        lam = 1.0 + 0.1 * np.exp(-float(np.dot(x, x)))
        return lam * np.eye(dim)

    return AmbientSpace.custom(dim, metric_fn)
