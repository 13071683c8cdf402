"""Points and tangent vectors of the normal tube, and the Sasaki metric.

A tube point is (q, r, n): base parameters, radius and a unit normal given
by its coefficients in the local normal frame.  A tube tangent is stored as
a curve germ (qdot, ndot) where ndot is the t-derivative of the frame
coefficients of the scaled normal v(t) = r n(t); this keeps the r -> 0
limit nondegenerate and is exactly what the geodesic-variation code needs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from .exceptions import PreconditionError
from .submanifold import Immersion, frame_at, normal_connection_coeffs


@dataclass(frozen=True)
class TubePoint:
    """A point (q, r·n) of the normal tube."""

    imm: Immersion
    q: np.ndarray
    r: float
    n_coeffs: np.ndarray
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "q", np.atleast_1d(np.asarray(self.q, dtype=float)))
        nc = np.atleast_1d(np.asarray(self.n_coeffs, dtype=float))
        nrm = float(np.linalg.norm(nc))
        if abs(nrm - 1.0) > 1e-8:
            raise PreconditionError(f"n_coeffs must be unit length, got |n| = {nrm:.6g}")
        object.__setattr__(self, "n_coeffs", nc / nrm)
        if self.r < 0.0:
            raise PreconditionError("tube radius must be nonnegative")
        object.__setattr__(self, "r", float(self.r))

    def frame(self):
        return frame_at(self.imm, self.q, self.seed)

    def normal_vector(self) -> np.ndarray:
        """The unit normal n in ambient components."""
        return self.frame().normal @ self.n_coeffs

    def same_place(self, other: "TubePoint") -> bool:
        return (
            self.imm is other.imm
            and self.seed == other.seed
            and self.q.shape == other.q.shape
            and np.allclose(self.q, other.q, atol=1e-12)
            and abs(self.r - other.r) <= 1e-12
            and np.allclose(self.n_coeffs, other.n_coeffs, atol=1e-12)
        )


@dataclass(frozen=True)
class TubeTangent:
    """Curve germ (qdot, ndot) at a tube point."""

    at: TubePoint
    qdot: np.ndarray
    ndot: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "qdot", np.atleast_1d(np.asarray(self.qdot, dtype=float)))
        object.__setattr__(self, "ndot", np.atleast_1d(np.asarray(self.ndot, dtype=float)))
        if self.qdot.shape != (self.at.imm.n_params,):
            raise ValueError("qdot has the wrong length")
        if self.ndot.shape != (self.at.imm.codim,):
            raise ValueError("ndot has the wrong length")


def decompose(u: TubeTangent) -> Tuple[np.ndarray, np.ndarray]:
    """Split u into (pi_* u, K u) as ambient vectors at f(q).

    K u is the normal-connection derivative of v(t) = r n(t) along the base
    curve: K = sum_a (ndot_a + r [omega(qdot) n]_a) normal_a.
    """
    at = u.at
    fr = at.frame()
    pi_star = fr.tangent @ u.qdot
    omega = normal_connection_coeffs(at.imm, at.q, u.qdot, at.seed)
    k_coeffs = u.ndot + at.r * (omega @ at.n_coeffs)
    return pi_star, fr.normal @ k_coeffs


def sasaki(u1: TubeTangent, u2: TubeTangent) -> float:
    """Sasaki metric h(u1, u2) = g(Ku1, Ku2) + g(pi_* u1, pi_* u2)."""
    if not u1.at.same_place(u2.at):
        raise PreconditionError("tangents live at different tube points")
    g = u1.at.frame().metric
    p1, k1 = decompose(u1)
    p2, k2 = decompose(u2)
    return float(k1 @ g @ k2 + p1 @ g @ p2)


def horizontal_lift(at: TubePoint, w) -> TubeTangent:
    """The tangent with pi_* u = w and K u = 0."""
    w = np.asarray(w, dtype=float)
    fr = at.frame()
    qdot = fr.tangent_coeffs(w)
    resid = w - fr.tangent @ qdot
    scale = max(1.0, float(np.linalg.norm(w)))
    if float(np.linalg.norm(resid)) > 1e-8 * scale:
        raise PreconditionError("w is not tangent to the submanifold")
    omega = normal_connection_coeffs(at.imm, at.q, qdot, at.seed)
    ndot = -at.r * (omega @ at.n_coeffs)
    return TubeTangent(at=at, qdot=qdot, ndot=ndot)


def vertical_lift(at: TubePoint, eta) -> TubeTangent:
    """The tangent with qdot = 0 and K u = eta (a normal vector at f(q))."""
    eta = np.asarray(eta, dtype=float)
    fr = at.frame()
    ndot = fr.normal_coeffs(eta)
    resid = eta - fr.normal @ ndot
    scale = max(1.0, float(np.linalg.norm(eta)))
    if float(np.linalg.norm(resid)) > 1e-8 * scale:
        raise PreconditionError("eta is not normal to the submanifold")
    return TubeTangent(at=at, qdot=np.zeros(at.imm.n_params), ndot=ndot)


def radial_vertical(at: TubePoint) -> TubeTangent:
    """Vertical lift of the normal direction n itself (the radial tangent)."""
    return TubeTangent(at=at, qdot=np.zeros(at.imm.n_params), ndot=at.n_coeffs.copy())
