"""Parametric immersions and their extrinsic geometry.

An :class:`Immersion` maps intrinsic parameters q (length n) to ambient
coordinates f(q).  On top of it we compute tangent/normal frames, the shape
operator A_n, the second fundamental form II_n(X, Y) = g(A_n X, Y) and the
normal-connection coefficients of the local normal frame.

Normal frames come from Gram-Schmidt against a fixed ambient reference
basis; they are deterministic given the ``seed`` argument and smooth along
the short probe curves used for finite differencing, which is all the
derivative code needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .ambient import AmbientSpace, DEFAULT_FD_STEP
from .exceptions import DegenerateFrameError, NumericalError, PreconditionError


class Immersion:
    """A parametric embedding of an n-manifold into the ambient chart."""

    def __init__(
        self,
        ambient: AmbientSpace,
        n_params: int,
        map_fn: Callable[[np.ndarray], np.ndarray],
        jac_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None,
        fd_step: float = DEFAULT_FD_STEP,
        name: str = "custom",
        probe_points: Optional[Sequence[np.ndarray]] = None,
    ):
        if n_params < 1:
            raise ValueError("n_params must be at least 1")
        if ambient.dim - n_params < 1:
            raise ValueError(
                f"codimension must be >= 1 (ambient dim {ambient.dim}, n_params {n_params})"
            )
        self.ambient = ambient
        self.n_params = int(n_params)
        self.codim = ambient.dim - n_params
        self.map_fn = map_fn
        self.jac_fn = jac_fn
        self.fd_step = float(fd_step)
        self.name = name
        if probe_points is None:
            z = np.zeros(n_params)
            probe_points = [z, z + 0.1, z - 0.1]
        for q in probe_points:
            self._check_rank(np.asarray(q, dtype=float))

    def _check_rank(self, q: np.ndarray) -> None:
        J = self.jacobian(q)
        sv = np.linalg.svd(J, compute_uv=False)
        if sv[-1] < 1e-8 * max(1.0, sv[0]):
            raise NumericalError(
                f"immersion '{self.name}' is rank-deficient at q = {q} "
                f"(singular values {sv})"
            )

    def point(self, q) -> np.ndarray:
        q = np.atleast_1d(np.asarray(q, dtype=float))
        x = np.asarray(self.map_fn(q), dtype=float)
        if x.shape != (self.ambient.dim,):
            raise ValueError(
                f"map_fn returned shape {x.shape}, expected ({self.ambient.dim},)"
            )
        return x

    def jacobian(self, q) -> np.ndarray:
        """(dim, n_params) Jacobian of the immersion map."""
        q = np.atleast_1d(np.asarray(q, dtype=float))
        if self.jac_fn is not None:
            J = np.asarray(self.jac_fn(q), dtype=float)
            return J.reshape(self.ambient.dim, self.n_params)
        h = self.fd_step * max(1.0, float(np.linalg.norm(q)))
        cols = []
        for i in range(self.n_params):
            e = np.zeros(self.n_params)
            e[i] = h
            cols.append((self.point(q + e) - self.point(q - e)) / (2.0 * h))
        return np.column_stack(cols)

    def __repr__(self):
        return (
            f"Immersion({self.name}, n={self.n_params}, "
            f"ambient={self.ambient.kind}/{self.ambient.dim})"
        )


@dataclass(frozen=True)
class FrameAtPoint:
    """Tangent and normal frames of an immersion at one parameter point."""

    q: np.ndarray
    x: np.ndarray
    tangent: np.ndarray  # (dim, n) Jacobian columns
    normal: np.ndarray  # (dim, p) g-orthonormal, g-orthogonal to tangent
    metric: np.ndarray  # ambient Gram matrix at x
    induced: np.ndarray  # (n, n) first fundamental form J^T g J

    def tangent_coeffs(self, X: np.ndarray) -> np.ndarray:
        """Coefficients of the g-projection of X onto the tangent space."""
        return np.linalg.solve(self.induced, self.tangent.T @ self.metric @ X)

    def normal_coeffs(self, eta: np.ndarray) -> np.ndarray:
        return self.normal.T @ self.metric @ eta

    def project_tangent(self, X: np.ndarray) -> np.ndarray:
        return self.tangent @ self.tangent_coeffs(X)

    def project_normal(self, eta: np.ndarray) -> np.ndarray:
        return self.normal @ self.normal_coeffs(eta)


def _reference_basis(dim: int, seed: int) -> np.ndarray:
    if seed == 0:
        return np.eye(dim)
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    return q


def frame_at(imm: Immersion, q, seed: int = 0) -> FrameAtPoint:
    """Tangent frame (Jacobian columns) plus a Gram-Schmidt normal frame."""
    q = np.atleast_1d(np.asarray(q, dtype=float))
    x = imm.point(q)
    J = imm.jacobian(q)
    g = imm.ambient.metric_at(x)
    induced = J.T @ g @ J
    ref = _reference_basis(imm.ambient.dim, seed)
    normals = []
    for j in range(imm.ambient.dim):
        if len(normals) == imm.codim:
            break
        w = ref[:, j].copy()
        # project out the tangent space, then previously accepted normals
        w = w - J @ np.linalg.solve(induced, J.T @ g @ w)
        for nv in normals:
            w = w - float(nv @ g @ w) * nv
        nrm = math.sqrt(max(float(w @ g @ w), 0.0))
        if nrm > 1e-6:
            normals.append(w / nrm)
    if len(normals) < imm.codim:
        raise DegenerateFrameError(
            f"could not build a normal frame at q = {q}; re-seed the reference basis"
        )
    return FrameAtPoint(
        q=q, x=x, tangent=J, normal=np.column_stack(normals), metric=g, induced=induced
    )


def _check_unit(n_coeffs: np.ndarray) -> np.ndarray:
    n_coeffs = np.atleast_1d(np.asarray(n_coeffs, dtype=float))
    nrm = float(np.linalg.norm(n_coeffs))
    if abs(nrm - 1.0) > 1e-8:
        raise PreconditionError(f"normal coefficients must be unit length, |n| = {nrm:.6g}")
    return n_coeffs / nrm


def shape_operator(imm: Immersion, q, n_coeffs, seed: int = 0, step: Optional[float] = None) -> np.ndarray:
    """Shape operator A_n in the tangent frame, for the unit normal n.

    A_n X = -(tangential part of D_X n~), where n~ extends n with constant
    coefficients in the local normal frame and D is the ambient connection.
    """
    q = np.atleast_1d(np.asarray(q, dtype=float))
    n_coeffs = _check_unit(n_coeffs)
    fr = frame_at(imm, q, seed)
    h = (step or imm.fd_step) * max(1.0, float(np.linalg.norm(q)))
    gamma = imm.ambient.christoffel_at(fr.x)
    n_amb = fr.normal @ n_coeffs
    A = np.empty((imm.n_params, imm.n_params))
    for i in range(imm.n_params):
        e = np.zeros(imm.n_params)
        e[i] = h
        n_plus = frame_at(imm, q + e, seed).normal @ n_coeffs
        n_minus = frame_at(imm, q - e, seed).normal @ n_coeffs
        X = fr.tangent[:, i]
        Dn = (n_plus - n_minus) / (2.0 * h) + np.einsum("ijk,j,k->i", gamma, X, n_amb)
        A[:, i] = -fr.tangent_coeffs(Dn)
    return A


def second_fundamental_form(imm: Immersion, q, n_coeffs, X, Y, seed: int = 0) -> float:
    """II_n(X, Y) = g(A_n X, Y) for ambient tangent vectors X, Y at f(q)."""
    fr = frame_at(imm, q, seed)
    A = shape_operator(imm, q, n_coeffs, seed)
    ax = fr.tangent @ (A @ fr.tangent_coeffs(np.asarray(X, dtype=float)))
    return float(ax @ fr.metric @ np.asarray(Y, dtype=float))


def normal_connection_coeffs(imm: Immersion, q, qdot, seed: int = 0, step: Optional[float] = None) -> np.ndarray:
    """Connection coefficients omega_ab = g(nabla^perp_{pdot} normal_b, normal_a).

    Antisymmetric (the normal frame is g-orthonormal), computed by central
    differences of the frame field along the parameter curve q + t qdot.
    """
    q = np.atleast_1d(np.asarray(q, dtype=float))
    qdot = np.atleast_1d(np.asarray(qdot, dtype=float))
    fr = frame_at(imm, q, seed)
    p = imm.codim
    if float(np.linalg.norm(qdot)) < 1e-14:
        return np.zeros((p, p))
    h = (step or imm.fd_step) * max(1.0, float(np.linalg.norm(q)))
    N_plus = frame_at(imm, q + h * qdot, seed).normal
    N_minus = frame_at(imm, q - h * qdot, seed).normal
    xdot = fr.tangent @ qdot
    gamma = imm.ambient.christoffel_at(fr.x)
    omega = np.empty((p, p))
    for b in range(p):
        Dn = (N_plus[:, b] - N_minus[:, b]) / (2.0 * h) + np.einsum(
            "ijk,j,k->i", gamma, xdot, fr.normal[:, b]
        )
        omega[:, b] = fr.normal.T @ fr.metric @ Dn
    return omega
