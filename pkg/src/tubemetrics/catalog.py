"""Builtin submanifold catalog consumed by the CLI and the test suite."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from .ambient import EUCLIDEAN, SPACE_FORM, AmbientSpace
from .submanifold import Immersion


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    description: str
    ambient_dim: int
    n_params: int
    ambient_req: str  # "euclidean", "space_form_pos", "space_form_neg", "any"
    param_domain: str
    params: Dict[str, float] = field(default_factory=dict)
    default_base_points: List[List[float]] = field(default_factory=list)
    _builder: Callable = None

    def build(self, ambient: Optional[AmbientSpace] = None, **params) -> Immersion:
        merged = dict(self.params)
        for key, val in params.items():
            if key not in merged:
                raise ValueError(f"builtin '{self.name}' has no parameter '{key}'")
            merged[key] = float(val)
        if ambient is None:
            ambient = self.default_ambient()
        self._check_ambient(ambient)
        return self._builder(ambient, **merged)

    def default_ambient(self) -> AmbientSpace:
        if self.ambient_req == "euclidean":
            return AmbientSpace.euclidean(self.ambient_dim)
        if self.ambient_req == "space_form_pos":
            return AmbientSpace.space_form(self.ambient_dim, 1.0)
        if self.ambient_req == "space_form_neg":
            return AmbientSpace.space_form(self.ambient_dim, -1.0)
        return AmbientSpace.euclidean(self.ambient_dim)

    def _check_ambient(self, ambient: AmbientSpace) -> None:
        if ambient.dim != self.ambient_dim:
            raise ValueError(
                f"builtin '{self.name}' needs an ambient of dimension {self.ambient_dim}"
            )
        if self.ambient_req == "euclidean" and ambient.kind == SPACE_FORM:
            raise ValueError(f"builtin '{self.name}' needs a euclidean-chart ambient")
        if self.ambient_req == "space_form_pos" and not (
            ambient.kind == SPACE_FORM and ambient.k > 0
        ):
            raise ValueError(f"builtin '{self.name}' needs a space_form ambient with k > 0")
        if self.ambient_req == "space_form_neg" and not (
            ambient.kind == SPACE_FORM and ambient.k < 0
        ):
            raise ValueError(f"builtin '{self.name}' needs a space_form ambient with k < 0")


def _circle(ambient, radius):
    rho = radius

    def fmap(q):
        return np.array([rho * math.cos(q[0]), rho * math.sin(q[0])])

    def fjac(q):
        return np.array([[-rho * math.sin(q[0])], [rho * math.cos(q[0])]])

    return Immersion(ambient, 1, fmap, fjac, name=f"circle({rho:g})",
                     probe_points=[np.array([0.0]), np.array([1.0])])


def _sphere(ambient, radius):
    rho = radius

    def fmap(q):
        u, v = q
        return rho * np.array([math.cos(u) * math.cos(v), math.sin(u) * math.cos(v), math.sin(v)])

    def fjac(q):
        u, v = q
        return rho * np.array(
            [
                [-math.sin(u) * math.cos(v), -math.cos(u) * math.sin(v)],
                [math.cos(u) * math.cos(v), -math.sin(u) * math.sin(v)],
                [0.0, math.cos(v)],
            ]
        )

    return Immersion(ambient, 2, fmap, fjac, name=f"sphere({rho:g})",
                     probe_points=[np.array([0.3, 0.2]), np.array([1.0, -0.4])])


def _torus(ambient, big_radius, small_radius):
    R, rho = big_radius, small_radius

    def fmap(q):
        u, v = q
        w = R + rho * math.cos(v)
        return np.array([w * math.cos(u), w * math.sin(u), rho * math.sin(v)])

    def fjac(q):
        u, v = q
        w = R + rho * math.cos(v)
        return np.array(
            [
                [-w * math.sin(u), -rho * math.sin(v) * math.cos(u)],
                [w * math.cos(u), -rho * math.sin(v) * math.sin(u)],
                [0.0, rho * math.cos(v)],
            ]
        )

    return Immersion(ambient, 2, fmap, fjac, name=f"torus({R:g},{rho:g})",
                     probe_points=[np.array([0.4, 0.3]), np.array([2.0, 1.0])])


def _helix(ambient, a, b):
    def fmap(q):
        return np.array([a * math.cos(q[0]), a * math.sin(q[0]), b * q[0]])

    def fjac(q):
        return np.array([[-a * math.sin(q[0])], [a * math.cos(q[0])], [b]])

    return Immersion(ambient, 1, fmap, fjac, name=f"helix({a:g},{b:g})",
                     probe_points=[np.array([0.0]), np.array([0.7])])


def _line(ambient):
    def fmap(q):
        return np.array([q[0], 0.0, 0.0])

    def fjac(q):
        return np.array([[1.0], [0.0], [0.0]])

    return Immersion(ambient, 1, fmap, fjac, name="line")


def _plane(ambient):
    def fmap(q):
        return np.array([q[0], q[1], 0.0, 0.0])

    def fjac(q):
        return np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0], [0.0, 0.0]])

    return Immersion(ambient, 2, fmap, fjac, name="plane")


def _equator(ambient):
    # great circle through the chart origin of the stereographic model:
    # the unit-speed radial map t -> (2/sqrt(k)) tan(sqrt(k) t / 2) e1
    rk = math.sqrt(ambient.k)

    def fmap(q):
        return np.array([(2.0 / rk) * math.tan(rk * q[0] / 2.0), 0.0])

    def fjac(q):
        c = math.cos(rk * q[0] / 2.0)
        return np.array([[1.0 / (c * c)], [0.0]])

    return Immersion(ambient, 1, fmap, fjac, name=f"equator(k={ambient.k:g})",
                     probe_points=[np.array([0.0]), np.array([0.4])])


def _latitude_circle(ambient, phi):
    # circle of constant latitude phi (geodesic polar distance from the
    # chart-center pole s0 = (pi/2 - phi)/sqrt(k)); chart radius 2/sqrt(k) tan((pi/2-phi)/2)
    rk = math.sqrt(ambient.k)
    chart_r = (2.0 / rk) * math.tan((math.pi / 2.0 - phi) / 2.0)

    def fmap(q):
        return chart_r * np.array([math.cos(q[0]), math.sin(q[0])])

    def fjac(q):
        return chart_r * np.array([[-math.sin(q[0])], [math.cos(q[0])]])

    return Immersion(ambient, 1, fmap, fjac, name=f"latitude-circle(phi={phi:g},k={ambient.k:g})",
                     probe_points=[np.array([0.0]), np.array([1.0])])


def _geodesic_line(ambient):
    # radial geodesic of the Poincare-ball chart, unit speed
    rk = math.sqrt(-ambient.k)

    def fmap(q):
        return np.array([(2.0 / rk) * math.tanh(rk * q[0] / 2.0), 0.0])

    def fjac(q):
        c = math.cosh(rk * q[0] / 2.0)
        return np.array([[1.0 / (c * c)], [0.0]])

    return Immersion(ambient, 1, fmap, fjac, name=f"geodesic-line(k={ambient.k:g})",
                     probe_points=[np.array([0.0]), np.array([0.4])])


CATALOG: Dict[str, CatalogEntry] = {
    e.name: e
    for e in [
        CatalogEntry(
            name="circle",
            description="circle of given radius in the plane",
            ambient_dim=2,
            n_params=1,
            ambient_req="any",
            param_domain="t1 in (-pi, pi)",
            params={"radius": 1.0},
            default_base_points=[[0.25]],
            _builder=lambda ambient, radius: _circle(ambient, radius),
        ),
        CatalogEntry(
            name="sphere",
            description="round sphere of given radius in R^3",
            ambient_dim=3,
            n_params=2,
            ambient_req="euclidean",
            param_domain="t1 in (-pi, pi), t2 in (-pi/2, pi/2) away from the poles",
            params={"radius": 1.0},
            default_base_points=[[0.3, 0.2]],
            _builder=lambda ambient, radius: _sphere(ambient, radius),
        ),
        CatalogEntry(
            name="torus",
            description="torus of revolution with radii (R, rho) in R^3",
            ambient_dim=3,
            n_params=2,
            ambient_req="euclidean",
            param_domain="t1, t2 in (-pi, pi)",
            params={"R": 2.0, "rho": 0.5},
            default_base_points=[[0.4, 0.3]],
            _builder=lambda ambient, R, rho: _torus(ambient, R, rho),
        ),
        CatalogEntry(
            name="helix",
            description="circular helix (a cos t, a sin t, b t) in R^3",
            ambient_dim=3,
            n_params=1,
            ambient_req="euclidean",
            param_domain="t1 in R",
            params={"a": 1.0, "b": 0.5},
            default_base_points=[[0.2]],
            _builder=lambda ambient, a, b: _helix(ambient, a, b),
        ),
        CatalogEntry(
            name="line",
            description="straight coordinate line in R^3",
            ambient_dim=3,
            n_params=1,
            ambient_req="euclidean",
            param_domain="t1 in R",
            default_base_points=[[0.0]],
            _builder=lambda ambient: _line(ambient),
        ),
        CatalogEntry(
            name="plane",
            description="flat coordinate 2-plane in R^4",
            ambient_dim=4,
            n_params=2,
            ambient_req="euclidean",
            param_domain="t1, t2 in R",
            default_base_points=[[0.1, -0.2]],
            _builder=lambda ambient: _plane(ambient),
        ),
        CatalogEntry(
            name="equator",
            description="great circle through the chart origin of the round sphere (k > 0)",
            ambient_dim=2,
            n_params=1,
            ambient_req="space_form_pos",
            param_domain="t1 in (-pi/(2 sqrt(k)), pi/(2 sqrt(k)))",
            default_base_points=[[0.3]],
            _builder=lambda ambient: _equator(ambient),
        ),
        CatalogEntry(
            name="latitude-circle",
            description="non-geodesic circle of constant latitude phi on the round sphere (k > 0)",
            ambient_dim=2,
            n_params=1,
            ambient_req="space_form_pos",
            param_domain="t1 in (-pi, pi); 0 < phi < pi/2",
            params={"phi": math.pi / 4.0},
            default_base_points=[[0.4]],
            _builder=lambda ambient, phi: _latitude_circle(ambient, phi),
        ),
        CatalogEntry(
            name="geodesic-line",
            description="geodesic through the chart origin of the hyperbolic plane (k < 0)",
            ambient_dim=2,
            n_params=1,
            ambient_req="space_form_neg",
            param_domain="t1 in R",
            default_base_points=[[0.2]],
            _builder=lambda ambient: _geodesic_line(ambient),
        ),
    ]
}


def build_builtin(name: str, ambient: Optional[AmbientSpace] = None, **params) -> Immersion:
    try:
        entry = CATALOG[name]
    except KeyError:
        raise ValueError(f"unknown builtin '{name}'; available: {', '.join(sorted(CATALOG))}")
    return entry.build(ambient, **params)
