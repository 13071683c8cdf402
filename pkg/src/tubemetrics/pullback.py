"""The normal exponential map and the pulled-back ambient metric.

For a tube tangent u at (q, r, n), the differential of the normal
exponential map is realized by the Jacobi field Y along the unit-speed
normal geodesic from f(q) with
    Y(0)  = pi_* u,
    Y'(0) = (1/r) K u - A_n pi_* u,
so that exp^* g(u1, u2) = g(Y1(r), Y2(r)).  The Jacobi equation
Y'' + R_op(Y, xi')xi' = 0 is integrated in the parallel-transported frame
of one shared geodesic record per tube point.  A finite-difference version
of the pullback (differentiating the exponential map directly) serves as an
independent cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import BarycentricInterpolator

from .ambient import ANALYTIC, DEFAULT_ODE_TOL, EUCLIDEAN, SPACE_FORM, GeodesicRecord
from .exceptions import DegenerateRadiusError, IntegrationError, PreconditionError
from .submanifold import FrameAtPoint, Immersion, frame_at, shape_operator
from .tube import TubePoint, TubeTangent, decompose


@dataclass
class PullbackContext:
    """Shared per-tube-point state: the normal geodesic and the base frame."""

    imm: Immersion
    at: TubePoint
    record: GeodesicRecord
    tol: float
    base_frame: FrameAtPoint
    n_ambient: np.ndarray
    _shape_op: Optional[np.ndarray] = field(default=None, repr=False)
    _curv: Optional[object] = field(default=None, repr=False)

    @property
    def shape_op(self) -> np.ndarray:
        if self._shape_op is None:
            self._shape_op = shape_operator(self.imm, self.at.q, self.at.n_coeffs, self.at.seed)
        return self._shape_op

    def curvature_matrix(self, s: float) -> np.ndarray:
        """M(s) from the cached interpolant along the record's geodesic."""
        if self._curv is None:
            self._curv = _curvature_interpolant(self)
        return self._curv(s)


def build_context(imm: Immersion, at: TubePoint, tol: float = DEFAULT_ODE_TOL) -> PullbackContext:
    if at.r <= 0.0:
        raise DegenerateRadiusError(
            "the normal geodesic needs r > 0; at r = 0 the pullback equals the Sasaki metric"
        )
    fr = frame_at(imm, at.q, at.seed)
    n_amb = fr.normal @ at.n_coeffs
    record = imm.ambient.geodesic(fr.x, n_amb, s_max=at.r, tol=tol)
    return PullbackContext(
        imm=imm, at=at, record=record, tol=tol, base_frame=fr, n_ambient=n_amb
    )


def exp_tube(imm: Immersion, at: TubePoint, tol: float = DEFAULT_ODE_TOL) -> np.ndarray:
    """exp(f(q), r n): endpoint of the unit-speed normal geodesic."""
    if at.r == 0.0:
        return imm.point(at.q)
    return build_context(imm, at, tol).record.position(at.r)


def _exp_normal(imm: Immersion, q, w_coeffs, seed: int, tol: float) -> np.ndarray:
    """exp of a general (not necessarily unit) normal vector given by frame coefficients."""
    fr = frame_at(imm, q, seed)
    V = fr.normal @ np.asarray(w_coeffs, dtype=float)
    length = float(np.sqrt(V @ fr.metric @ V))
    if length < 1e-14:
        return fr.x
    record = imm.ambient.geodesic(fr.x, V / length, s_max=length, tol=tol)
    return record.position(length)


def _jacobi_rhs_matrix(ctx: PullbackContext, s: float) -> np.ndarray:
    """M_ij(s) = g(R_op(E_j, xi')xi', E_i) in the parallel frame."""
    rec = ctx.record
    space = ctx.imm.ambient
    x = rec.position(s)
    E = rec.frame(s)
    g = space.metric_at(x)
    v = E[:, 0]
    if space.deriv_mode == ANALYTIC and space.kind == SPACE_FORM:
        gE = g @ E
        gv = g @ v
        return space.k * (float(v @ gv) * E.T @ gE - np.outer(E.T @ gv, v @ gE))
    Rm = space.riemann_mixed(x)
    cols = np.einsum("iakl,km,l,a->im", Rm, E, v, v)
    return E.T @ g @ cols


_CURV_NODES = 17


def _curvature_interpolant(ctx: PullbackContext):
    """Degree-(_CURV_NODES - 1) Chebyshev interpolant of M(s) on [0, s_max].

    M(s) is smooth along the geodesic, so a small fixed sample replaces one
    (much more expensive) curvature evaluation per right-hand-side call; with
    a finite-difference ambient it also smooths out differencing noise that
    would otherwise throttle the adaptive step control.
    """
    space = ctx.imm.ambient
    d = space.dim
    if space.deriv_mode == ANALYTIC and space.kind == EUCLIDEAN:
        zero = np.zeros((d, d))
        return lambda s: zero
    s_max = ctx.record.s_max
    idx = np.arange(_CURV_NODES)
    nodes = 0.5 * s_max * (1.0 - np.cos(np.pi * idx / (_CURV_NODES - 1)))
    vals = np.stack([_jacobi_rhs_matrix(ctx, s) for s in nodes])
    return BarycentricInterpolator(nodes, vals)


def _integrate_jacobi(
    ctx: PullbackContext,
    ics: Sequence,
    s_target: float,
    dense: bool = False,
):
    """Integrate one or more Jacobi fields in the parallel frame.

    ``ics`` is a sequence of (Y0, Y0p) ambient-vector pairs; all fields share
    the curvature matrix, so they are integrated as one linear system.
    Returns frame components y_k(s_target) per field, or the solve_ivp
    solution when ``dense``.
    """
    rec = ctx.record
    d = ctx.imm.ambient.dim
    E0 = rec.frame(0.0)
    g0 = ctx.base_frame.metric
    proj = E0.T @ g0
    z0 = np.concatenate([np.concatenate([proj @ Y0, proj @ Y0p]) for Y0, Y0p in ics])
    m = len(ics)

    def rhs(s, z):
        M = ctx.curvature_matrix(s)
        out = np.empty_like(z)
        for j in range(m):
            y = z[2 * d * j : 2 * d * j + d]
            yp = z[2 * d * j + d : 2 * d * (j + 1)]
            out[2 * d * j : 2 * d * j + d] = yp
            out[2 * d * j + d : 2 * d * (j + 1)] = -M @ y
        return out

    sol = solve_ivp(
        rhs,
        (0.0, s_target),
        z0,
        method="DOP853",
        rtol=ctx.tol,
        atol=ctx.tol * 1e-2,
        dense_output=dense,
    )
    if not sol.success:
        raise IntegrationError(f"Jacobi integration failed: {sol.message}")
    if dense:
        return sol
    zf = sol.y[:, -1]
    return [zf[2 * d * j : 2 * d * j + d] for j in range(m)]


def jacobi_field(ctx: PullbackContext, Y0, Y0p, s: float) -> np.ndarray:
    """Y(s) in ambient components from initial data (Y0, Y0p) at s = 0."""
    if s < 0.0 or s > ctx.record.s_max * (1.0 + 1e-12):
        raise ValueError(f"s = {s:.6g} outside the record range")
    if s == 0.0:
        return np.asarray(Y0, dtype=float)
    (y,) = _integrate_jacobi(ctx, [(np.asarray(Y0, float), np.asarray(Y0p, float))], s)
    return ctx.record.frame(s) @ y


def _initial_conditions(ctx: PullbackContext, u: TubeTangent):
    pi_star, K = decompose(u)
    r = ctx.at.r
    A = ctx.shape_op
    fr = ctx.base_frame
    An_pi = fr.tangent @ (A @ u.qdot)
    return pi_star, K / r - An_pi


def pullback_metric(
    imm: Immersion,
    u1: TubeTangent,
    u2: TubeTangent,
    tol: float = DEFAULT_ODE_TOL,
    ctx: Optional[PullbackContext] = None,
) -> float:
    """exp^* g(u1, u2) = g(Y1(r), Y2(r)) by Jacobi integration."""
    if not u1.at.same_place(u2.at):
        raise PreconditionError("tangents live at different tube points")
    if u1.at.r <= 0.0:
        raise DegenerateRadiusError(
            "pullback_metric needs r > 0; the r = 0 value is sasaki(u1, u2)"
        )
    if ctx is None:
        ctx = build_context(imm, u1.at, tol)
    r = ctx.at.r
    ic1 = _initial_conditions(ctx, u1)
    ic2 = _initial_conditions(ctx, u2)
    y1, y2 = _integrate_jacobi(ctx, [ic1, ic2], r)
    E = ctx.record.frame(r)
    g = imm.ambient.metric_at(ctx.record.position(r))
    return float((E @ y1) @ g @ (E @ y2))


def pullback_metric_fd(
    imm: Immersion,
    u1: TubeTangent,
    u2: TubeTangent,
    tol: float = DEFAULT_ODE_TOL,
    h_step: float = 1e-4,
) -> float:
    """Independent pullback oracle: central differences of the exponential map.

    Each tangent's curve germ (q(t), v(t)) is pushed through exp at t = +/-h
    and differenced; the ambient metric at the image point contracts the two
    difference quotients.
    """
    if not u1.at.same_place(u2.at):
        raise PreconditionError("tangents live at different tube points")
    at = u1.at
    if at.r <= 0.0:
        raise DegenerateRadiusError("pullback_metric_fd needs r > 0")
    x0 = exp_tube(imm, at, tol)
    g = imm.ambient.metric_at(x0)
    w0 = at.r * at.n_coeffs

    def push(u: TubeTangent) -> np.ndarray:
        xp = _exp_normal(imm, at.q + h_step * u.qdot, w0 + h_step * u.ndot, at.seed, tol)
        xm = _exp_normal(imm, at.q - h_step * u.qdot, w0 - h_step * u.ndot, at.seed, tol)
        return (xp - xm) / (2.0 * h_step)

    return float(push(u1) @ g @ push(u2))
