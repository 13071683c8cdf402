"""Tube points and tangents: the split into horizontal and vertical parts."""

import numpy as np
import pytest

from conftest import default_q, first_normal, make_builtin
from tubemetrics import (
    TubePoint,
    TubeTangent,
    decompose,
    horizontal_lift,
    radial_vertical,
    sasaki,
    vertical_lift,
)
from tubemetrics.exceptions import PreconditionError
from tubemetrics.submanifold import frame_at


def tube_point(name, r=0.3):
    imm = make_builtin(name)
    return imm, TubePoint(imm, default_q(name), r, first_normal(imm))


def test_tube_point_validation():
    imm = make_builtin("helix")
    q = default_q("helix")
    with pytest.raises(PreconditionError):
        TubePoint(imm, q, 0.1, np.array([0.5, 0.0]))
    with pytest.raises(PreconditionError):
        TubePoint(imm, q, -0.1, np.array([1.0, 0.0]))
    with pytest.raises(ValueError):
        TubeTangent(at=TubePoint(imm, q, 0.1, np.array([1.0, 0.0])), qdot=[1, 2], ndot=[0, 0])


@pytest.mark.parametrize("name", ["torus", "helix", "latitude-circle"])
def test_horizontal_lift_has_no_vertical_part(name):
    imm, at = tube_point(name)
    fr = frame_at(imm, at.q)
    w = fr.tangent @ np.ones(imm.n_params)
    u = horizontal_lift(at, w)
    pi_star, K = decompose(u)
    assert pi_star == pytest.approx(w, abs=1e-10)
    assert np.max(np.abs(K)) < 1e-10


@pytest.mark.parametrize("name", ["torus", "helix"])
def test_vertical_lift_has_no_horizontal_part(name):
    imm, at = tube_point(name)
    fr = frame_at(imm, at.q)
    eta = fr.normal @ (np.arange(1.0, 1.0 + imm.codim))
    u = vertical_lift(at, eta)
    pi_star, K = decompose(u)
    assert np.max(np.abs(pi_star)) == 0.0
    assert K == pytest.approx(eta, abs=1e-12)


def test_lifts_reject_wrong_inputs():
    imm, at = tube_point("torus")
    fr = frame_at(imm, at.q)
    normal = fr.normal[:, 0]
    tangent = fr.tangent[:, 0]
    with pytest.raises(PreconditionError):
        horizontal_lift(at, normal)
    with pytest.raises(PreconditionError):
        vertical_lift(at, tangent)


@pytest.mark.parametrize("name", ["torus", "helix"])
def test_split_exactness(name):
    imm, at = tube_point(name)
    rng = np.random.default_rng(6)
    u = TubeTangent(at=at, qdot=rng.normal(size=imm.n_params), ndot=rng.normal(size=imm.codim))
    pi_star, K = decompose(u)
    h = horizontal_lift(at, pi_star)
    v = vertical_lift(at, K)
    assert h.qdot + v.qdot == pytest.approx(u.qdot, abs=1e-8)
    assert h.ndot + v.ndot == pytest.approx(u.ndot, abs=1e-8)


@pytest.mark.parametrize("name", ["torus", "helix", "latitude-circle"])
def test_sasaki_submersion_identity(name):
    imm, at = tube_point(name)
    fr = frame_at(imm, at.q)
    rng = np.random.default_rng(1)
    w1 = fr.tangent @ rng.normal(size=imm.n_params)
    w2 = fr.tangent @ rng.normal(size=imm.n_params)
    value = sasaki(horizontal_lift(at, w1), horizontal_lift(at, w2))
    assert value == pytest.approx(float(w1 @ fr.metric @ w2), abs=1e-10)


def test_sasaki_orthogonal_split():
    imm, at = tube_point("helix")
    fr = frame_at(imm, at.q)
    h = horizontal_lift(at, fr.tangent[:, 0])
    v = vertical_lift(at, fr.normal[:, 1])
    assert sasaki(h, v) == pytest.approx(0.0, abs=1e-10)
    assert sasaki(v, v) == pytest.approx(1.0, abs=1e-10)


def test_radial_vertical_is_unit():
    imm, at = tube_point("torus")
    u = radial_vertical(at)
    assert sasaki(u, u) == pytest.approx(1.0, abs=1e-12)
    pi_star, K = decompose(u)
    assert np.max(np.abs(pi_star)) == 0.0
    assert K == pytest.approx(at.normal_vector(), abs=1e-12)


def test_vertical_part_is_affine_in_r():
    # K = sum_a (ndot_a + r [omega(qdot) n]_a) normal_a is affine in r
    imm = make_builtin("helix")
    q = default_q("helix")
    n = np.array([1.0, 0.0])
    rng = np.random.default_rng(12)
    qdot, ndot = rng.normal(size=(2, 1)), rng.normal(size=2)

    def K_at(r):
        u = TubeTangent(at=TubePoint(imm, q, r, n), qdot=qdot[0], ndot=ndot)
        return decompose(u)[1]

    k0, k1, k2 = K_at(0.0), K_at(0.1), K_at(0.2)
    assert k2 - k0 == pytest.approx(2.0 * (k1 - k0), abs=1e-8)


def test_sasaki_rejects_mismatched_points():
    imm = make_builtin("torus")
    at1 = TubePoint(imm, np.array([0.4, 0.3]), 0.3, np.array([1.0]))
    at2 = TubePoint(imm, np.array([0.4, 0.3]), 0.4, np.array([1.0]))
    u1 = radial_vertical(at1)
    u2 = radial_vertical(at2)
    with pytest.raises(PreconditionError):
        sasaki(u1, u2)
