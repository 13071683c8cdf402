"""Jacobi-field pullback of the ambient metric, against independent oracles."""

import numpy as np
import pytest

from conftest import default_q, first_normal, make_builtin, perturbed_plane
from tubemetrics import (
    TubePoint,
    TubeTangent,
    build_builtin,
    build_context,
    exp_tube,
    horizontal_lift,
    jacobi_field,
    pullback_metric,
    pullback_metric_fd,
    radial_vertical,
    sasaki,
)
from tubemetrics.exceptions import DegenerateRadiusError, PreconditionError
from tubemetrics.pullback import _initial_conditions
from tubemetrics.submanifold import frame_at, shape_operator


def tube_point(name, r, **kwargs):
    imm = make_builtin(name, **kwargs)
    return imm, TubePoint(imm, default_q(name), r, first_normal(imm))


def random_tangent(imm, at, rng):
    return TubeTangent(
        at=at, qdot=rng.normal(size=imm.n_params), ndot=rng.normal(size=imm.codim)
    )


# -- exponential map ----------------------------------------------------------


def test_exp_tube_circle():
    imm, at = tube_point("circle", 0.3)
    # outward normal at angle t: exp lands on the circle of radius 1.3
    x = exp_tube(imm, at)
    assert np.linalg.norm(x) == pytest.approx(1.3, abs=1e-11)


def test_exp_tube_zero_radius():
    imm = make_builtin("torus")
    at = TubePoint(imm, default_q("torus"), 0.0, np.array([1.0]))
    assert exp_tube(imm, at) == pytest.approx(imm.point(at.q), abs=1e-14)


# -- Jacobi fields ------------------------------------------------------------


def test_flat_jacobi_fields_are_affine():
    imm, at = tube_point("torus", 0.5)
    ctx = build_context(imm, at)
    rng = np.random.default_rng(3)
    Y0, Y0p = rng.normal(size=(2, 3))
    for s in (0.1, 0.3, 0.5):
        assert jacobi_field(ctx, Y0, Y0p, s) == pytest.approx(Y0 + s * Y0p, abs=1e-10)


def test_jacobi_rejects_out_of_range():
    imm, at = tube_point("circle", 0.2)
    ctx = build_context(imm, at)
    with pytest.raises(ValueError):
        jacobi_field(ctx, np.ones(2), np.zeros(2), 0.5)


# -- closed-form anchors ------------------------------------------------------


def test_circle_tube_anchor():
    # tube map (1+r)(cos t, sin t): exp^*g on the unit horizontal vector is (1+r)^2
    imm, at = tube_point("circle", 0.3)
    fr = frame_at(imm, at.q)
    u = horizontal_lift(at, fr.tangent[:, 0])
    assert pullback_metric(imm, u, u) == pytest.approx(1.69, abs=1e-9)


def test_equator_anchor():
    # distance sphere at radius r from a great circle scales lengths by cos r
    imm, at = tube_point("equator", 0.4)
    fr = frame_at(imm, at.q)
    w = fr.tangent[:, 0]
    h = float(w @ fr.metric @ w)
    u = horizontal_lift(at, w)
    assert pullback_metric(imm, u, u) == pytest.approx(h * np.cos(0.4) ** 2, abs=1e-8)


# -- structural invariants ----------------------------------------------------


@pytest.mark.parametrize("name", ["torus", "helix", "latitude-circle"])
def test_gauss_lemma(name):
    imm, at = tube_point(name, 0.35)
    u = radial_vertical(at)
    assert pullback_metric(imm, u, u) == pytest.approx(1.0, abs=1e-8)


def test_radial_component_affine_along_geodesic():
    # g(Y(s), xi'(s)) is affine in s for any Jacobi field
    imm, at = tube_point("latitude-circle", 0.5)
    ctx = build_context(imm, at)
    rng = np.random.default_rng(4)
    u = random_tangent(imm, at, rng)
    Y0, Y0p = _initial_conditions(ctx, u)
    ss = np.linspace(0.0, 0.5, 6)
    vals = []
    for s in ss:
        Y = jacobi_field(ctx, Y0, Y0p, s)
        g = imm.ambient.metric_at(ctx.record.position(s))
        vals.append(float(Y @ g @ ctx.record.velocity(s)))
    coef = np.polyfit(ss, vals, 1)
    assert np.polyval(coef, ss) == pytest.approx(vals, abs=1e-7)


def test_small_radius_derivative_matches_second_form():
    # (exp^*g - h)(w, w) ~ -2 r II_n(w, w) for horizontal w as r -> 0
    imm = make_builtin("torus")
    q = default_q("torus")
    n = np.array([1.0])
    fr = frame_at(imm, q)
    w = fr.tangent[:, 1] / np.sqrt(float(fr.tangent[:, 1] @ fr.metric @ fr.tangent[:, 1]))
    A = shape_operator(imm, q, n)
    ii = float((fr.tangent @ (A @ fr.tangent_coeffs(w))) @ fr.metric @ w)
    r = 1e-3
    at = TubePoint(imm, q, r, n)
    u = horizontal_lift(at, w)
    ratio = (pullback_metric(imm, u, u) - sasaki(u, u)) / r
    assert ratio == pytest.approx(-2.0 * ii, rel=0.1)


# -- independent finite-difference oracle -------------------------------------


@pytest.mark.parametrize("name", ["torus", "helix", "equator"])
def test_pullback_matches_fd_oracle(name):
    imm, at = tube_point(name, 0.25)
    rng = np.random.default_rng(10)
    ctx = build_context(imm, at)
    for _ in range(3):
        u1 = random_tangent(imm, at, rng)
        u2 = random_tangent(imm, at, rng)
        ode = pullback_metric(imm, u1, u2, ctx=ctx)
        fd = pullback_metric_fd(imm, u1, u2)
        assert fd == pytest.approx(ode, abs=1e-6)


def test_pullback_fd_oracle_perturbed_ambient():
    imm = build_builtin("circle", perturbed_plane(2))
    at = TubePoint(imm, np.array([0.25]), 0.2, np.array([1.0]))
    rng = np.random.default_rng(2)
    u1 = random_tangent(imm, at, rng)
    u2 = random_tangent(imm, at, rng)
    assert pullback_metric_fd(imm, u1, u2) == pytest.approx(
        pullback_metric(imm, u1, u2), abs=1e-6
    )


# -- preconditions ------------------------------------------------------------


def test_pullback_rejects_degenerate_radius():
    imm = make_builtin("circle")
    at = TubePoint(imm, np.array([0.25]), 0.0, np.array([1.0]))
    u = radial_vertical(at)
    with pytest.raises(DegenerateRadiusError):
        pullback_metric(imm, u, u)


def test_pullback_rejects_mismatched_points():
    imm = make_builtin("circle")
    u1 = radial_vertical(TubePoint(imm, np.array([0.25]), 0.2, np.array([1.0])))
    u2 = radial_vertical(TubePoint(imm, np.array([0.30]), 0.2, np.array([1.0])))
    with pytest.raises(PreconditionError):
        pullback_metric(imm, u1, u2)
