"""Ambient Riemannian manifold in a single coordinate chart.

Three chart kinds are supported: the flat Euclidean chart, the conformal
model of a constant-curvature space (Poincare ball for k < 0, stereographic
chart for k > 0, both with metric ``lambda(x)^2 * I`` where
``lambda(x) = 1/(1 + (k/4)|x|^2)``), and a user-supplied metric field.

Everything downstream (Christoffel symbols, curvature, geodesics with a
parallel-transported frame) is derived from ``metric_at``, analytically for
the two builtin kinds and by central finite differences otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp

from .exceptions import (
    ChartExitError,
    DomainError,
    IntegrationError,
    NumericalError,
)

EUCLIDEAN = "euclidean"
SPACE_FORM = "space_form"
CUSTOM = "custom"

ANALYTIC = "analytic"
FINITE_DIFFERENCE = "finite_difference"

#: default relative step for central differences, scaled by max(1, |x|)
DEFAULT_FD_STEP = 1e-5

#: default relative tolerance for geodesic / Jacobi integration
DEFAULT_ODE_TOL = 1e-10


def sin_k(k: float, s: float) -> float:
    """Generalized sine: sin(sqrt(k) s)/sqrt(k), s, or sinh(sqrt(-k) s)/sqrt(-k).

    Continuous in k at k = 0; a 4-term Taylor series is used when |k| s^2 is
    below 1e-8 to avoid 0/0.
    """
    z = k * s * s
    if abs(z) < 1e-8:
        return s * (1.0 - z / 6.0 + z * z / 120.0 - z ** 3 / 5040.0)
    if k > 0:
        rk = math.sqrt(k)
        return math.sin(rk * s) / rk
    rk = math.sqrt(-k)
    return math.sinh(rk * s) / rk


def cos_k(k: float, s: float) -> float:
    """s-derivative of :func:`sin_k`."""
    z = k * s * s
    if abs(z) < 1e-8:
        return 1.0 - z / 2.0 + z * z / 24.0 - z ** 3 / 720.0
    if k > 0:
        return math.cos(math.sqrt(k) * s)
    return math.cosh(math.sqrt(-k) * s)


@dataclass(frozen=True)
class AmbientSpace:
    """Immutable chart description of the ambient manifold.

    ``kind`` is one of ``euclidean``, ``space_form``, ``custom``.  For
    ``space_form`` the curvature is ``k``; for ``custom`` a ``metric_fn``
    mapping coordinates to a symmetric positive-definite matrix must be
    given.  ``chart_bound`` caps |x| (finite by construction for space
    forms, infinite otherwise unless overridden).
    """

    dim: int
    kind: str = EUCLIDEAN
    k: float = 0.0
    metric_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None
    deriv_mode: str = ANALYTIC
    fd_step: float = DEFAULT_FD_STEP
    chart_bound: float = math.inf

    # -- constructors ------------------------------------------------------

    @classmethod
    def euclidean(cls, dim: int) -> "AmbientSpace":
        return cls(dim=dim, kind=EUCLIDEAN)

    @classmethod
    def space_form(
        cls,
        dim: int,
        k: float,
        deriv_mode: str = ANALYTIC,
        chart_bound: Optional[float] = None,
        fd_step: float = DEFAULT_FD_STEP,
    ) -> "AmbientSpace":
        if k == 0.0:
            return cls(dim=dim, kind=EUCLIDEAN)
        if chart_bound is None:
            if k > 0:
                # stereographic chart; injective for all finite x, capped to
                # stay clear of the antipode
                chart_bound = 10.0 / math.sqrt(k)
            else:
                chart_bound = 2.0 / math.sqrt(-k)
        return cls(
            dim=dim,
            kind=SPACE_FORM,
            k=float(k),
            deriv_mode=deriv_mode,
            chart_bound=chart_bound,
            fd_step=fd_step,
        )

    @classmethod
    def custom(
        cls,
        dim: int,
        metric_fn: Callable[[np.ndarray], np.ndarray],
        fd_step: float = DEFAULT_FD_STEP,
        chart_bound: float = math.inf,
    ) -> "AmbientSpace":
        return cls(
            dim=dim,
            kind=CUSTOM,
            metric_fn=metric_fn,
            deriv_mode=FINITE_DIFFERENCE,
            fd_step=fd_step,
            chart_bound=chart_bound,
        )

    # -- chart domain ------------------------------------------------------

    def conformal_factor(self, x: np.ndarray) -> float:
        denom = 1.0 + 0.25 * self.k * float(np.dot(x, x))
        if denom <= 0.0:
            raise DomainError(f"point with |x| = {np.linalg.norm(x):.6g} is outside the conformal chart")
        return 1.0 / denom

    def chart_contains(self, x: np.ndarray) -> bool:
        x = np.asarray(x, dtype=float)
        r = float(np.linalg.norm(x))
        if r > self.chart_bound:
            return False
        if self.kind == SPACE_FORM and self.k < 0:
            return 1.0 + 0.25 * self.k * r * r > 0.0
        return True

    def _check_domain(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise ValueError(f"expected a coordinate vector of length {self.dim}, got shape {x.shape}")
        if not self.chart_contains(x):
            raise DomainError(f"point with |x| = {np.linalg.norm(x):.6g} is outside the chart domain")
        return x

    # -- metric and connection --------------------------------------------

    def metric_at(self, x: np.ndarray) -> np.ndarray:
        """Gram matrix g_ij(x); symmetric positive definite."""
        x = self._check_domain(x)
        if self.kind == EUCLIDEAN:
            return np.eye(self.dim)
        if self.kind == SPACE_FORM:
            lam = self.conformal_factor(x)
            return (lam * lam) * np.eye(self.dim)
        g = np.asarray(self.metric_fn(x), dtype=float)
        if g.shape != (self.dim, self.dim):
            raise ValueError(f"custom metric returned shape {g.shape}, expected {(self.dim, self.dim)}")
        return g

    def inner(self, x: np.ndarray, u: np.ndarray, v: np.ndarray) -> float:
        return float(u @ self.metric_at(x) @ v)

    def _metric_step(self, x: np.ndarray) -> float:
        return self.fd_step * max(1.0, float(np.linalg.norm(x)))

    def _metric_partials(self, x: np.ndarray) -> np.ndarray:
        """dg[l, i, j] = d g_ij / d x^l by central differences."""
        h = self._metric_step(x)
        dg = np.empty((self.dim, self.dim, self.dim))
        for l in range(self.dim):
            e = np.zeros(self.dim)
            e[l] = h
            dg[l] = (self.metric_at(x + e) - self.metric_at(x - e)) / (2.0 * h)
        return dg

    def christoffel_at(self, x: np.ndarray) -> np.ndarray:
        """Christoffel symbols Gamma[i, j, k] = Gamma^i_jk, symmetric in (j, k)."""
        x = self._check_domain(x)
        if self.deriv_mode == ANALYTIC and self.kind == EUCLIDEAN:
            return np.zeros((self.dim, self.dim, self.dim))
        if self.deriv_mode == ANALYTIC and self.kind == SPACE_FORM:
            # conformal metric: Gamma^i_jk = d_ij phi_k + d_ik phi_j - d_jk phi_i
            # with phi = log(lambda), grad phi = -(k/2) lambda x
            lam = self.conformal_factor(x)
            phi = -0.5 * self.k * lam * x
            eye = np.eye(self.dim)
            return (
                np.einsum("ij,k->ijk", eye, phi)
                + np.einsum("ik,j->ijk", eye, phi)
                - np.einsum("jk,i->ijk", eye, phi)
            )
        g = self.metric_at(x)
        dg = self._metric_partials(x)
        # rhs[l, j, k] = 1/2 (d_j g_lk + d_k g_lj - d_l g_jk)
        rhs = 0.5 * (
            np.einsum("jlk->ljk", dg) + np.einsum("klj->ljk", dg) - dg
        )
        try:
            gamma = np.linalg.solve(g, rhs.reshape(self.dim, -1)).reshape(
                self.dim, self.dim, self.dim
            )
        except np.linalg.LinAlgError as exc:
            cond = np.linalg.cond(g)
            raise NumericalError(
                f"metric matrix is numerically singular (condition number {cond:.3e})"
            ) from exc
        return gamma

    def _christoffel_partials(self, x: np.ndarray) -> np.ndarray:
        """dG[l, i, j, k] = d Gamma^i_jk / d x^l by central differences."""
        h = self._metric_step(x)
        dG = np.empty((self.dim, self.dim, self.dim, self.dim))
        for l in range(self.dim):
            e = np.zeros(self.dim)
            e[l] = h
            dG[l] = (self.christoffel_at(x + e) - self.christoffel_at(x - e)) / (2.0 * h)
        return dG

    # -- curvature ---------------------------------------------------------

    def riemann_op(self, x: np.ndarray, u: np.ndarray, v: np.ndarray, w: np.ndarray) -> np.ndarray:
        """Curvature operator R_op(u, v)w.

        The sign convention is fixed so that Jacobi fields along a geodesic
        with velocity v satisfy Y'' + R_op(Y, v)v = 0; on a constant-curvature
        space this reduces to R_op(u, v)w = k (g(v, w) u - g(u, w) v).
        """
        x = self._check_domain(x)
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        w = np.asarray(w, dtype=float)
        if self.deriv_mode == ANALYTIC and self.kind == EUCLIDEAN:
            return np.zeros(self.dim)
        if self.deriv_mode == ANALYTIC and self.kind == SPACE_FORM:
            g = self.metric_at(x)
            return self.k * (float(v @ g @ w) * u - float(u @ g @ w) * v)
        Rm = self.riemann_mixed(x)
        return np.einsum("ijkl,k,l,j->i", Rm, u, v, w)

    def riemann_mixed(self, x: np.ndarray) -> np.ndarray:
        """Full mixed curvature tensor Rm[i, j, k, l] with
        (R_op(u, v)w)^i = Rm[i, j, k, l] u^k v^l w^j."""
        x = self._check_domain(x)
        if self.deriv_mode == ANALYTIC and self.kind == EUCLIDEAN:
            return np.zeros((self.dim,) * 4)
        if self.deriv_mode == ANALYTIC and self.kind == SPACE_FORM:
            g = self.metric_at(x)
            eye = np.eye(self.dim)
            return self.k * (
                np.einsum("lj,ik->ijkl", g, eye) - np.einsum("kj,il->ijkl", g, eye)
            )
        gamma = self.christoffel_at(x)
        dG = self._christoffel_partials(x)
        # Rm^i_jkl = d_k G^i_lj - d_l G^i_kj + G^i_km G^m_lj - G^i_lm G^m_kj
        return (
            np.einsum("kilj->ijkl", dG)
            - np.einsum("likj->ijkl", dG)
            + np.einsum("ikm,mlj->ijkl", gamma, gamma)
            - np.einsum("ilm,mkj->ijkl", gamma, gamma)
        )

    def riemann4(self, x: np.ndarray, a, b, c, d) -> float:
        """(0,4) curvature tensor R(a, b, c, d) = g(R_op(a, b)c, d)."""
        g = self.metric_at(x)
        return float(self.riemann_op(x, a, b, c) @ g @ np.asarray(d, dtype=float))

    # -- geodesics ---------------------------------------------------------

    def geodesic(
        self,
        x0: np.ndarray,
        v0: np.ndarray,
        s_max: float,
        tol: float = DEFAULT_ODE_TOL,
    ) -> "GeodesicRecord":
        """Integrate the geodesic from x0 with initial direction v0.

        The velocity is normalized to unit g-length, so the record is
        parametrized by arclength.  An initially g-orthonormal frame with
        first vector equal to the velocity is parallel-transported alongside.
        """
        x0 = self._check_domain(x0)
        v0 = np.asarray(v0, dtype=float)
        if s_max <= 0.0:
            raise ValueError("s_max must be positive")
        if tol <= 0.0:
            raise ValueError("tol must be positive")
        g0 = self.metric_at(x0)
        speed = math.sqrt(float(v0 @ g0 @ v0))
        if speed < 1e-14:
            raise ValueError("initial velocity must be nonzero")
        frame0 = orthonormal_frame(g0, v0 / speed)
        d = self.dim

        bound = self.chart_bound
        margin = math.inf
        if math.isfinite(bound):
            margin = bound * (1.0 - (1e-9 if self.kind == SPACE_FORM and self.k < 0 else 1e-12))

        def rhs(_s, y):
            x = y[:d]
            # Runge-Kutta stages of the step that crosses the chart boundary
            # may land past it; clamp them onto the chart ball -- that part of
            # the step lies beyond the terminal event and is discarded anyway.
            nrm = float(np.linalg.norm(x))
            if nrm > margin:
                x = x * (margin / nrm)
            vel = y[d : 2 * d]
            fr = y[2 * d :].reshape(d, d)
            gamma = self.christoffel_at(x)
            acc = -np.einsum("ijk,j,k->i", gamma, vel, vel)
            dfr = -np.einsum("ijk,j,km->im", gamma, vel, fr)
            return np.concatenate([vel, acc, dfr.ravel()])

        events = []
        if math.isfinite(bound):

            def exit_event(_s, y):
                return margin ** 2 - float(np.dot(y[:d], y[:d]))

            exit_event.terminal = True
            exit_event.direction = -1.0
            events.append(exit_event)

        y0 = np.concatenate([x0, v0 / speed, frame0.ravel()])
        sol = solve_ivp(
            rhs,
            (0.0, s_max),
            y0,
            method="DOP853",
            rtol=tol,
            atol=tol * 1e-2,
            dense_output=True,
            events=events or None,
        )
        if sol.status == 1:
            raise ChartExitError(sol.t_events[0][0])
        if not sol.success:
            raise IntegrationError(f"geodesic integration failed: {sol.message}")
        return GeodesicRecord(space=self, s_max=float(s_max), tol=float(tol), _sol=sol)


def orthonormal_frame(g: np.ndarray, first: np.ndarray) -> np.ndarray:
    """g-orthonormal frame (columns) whose first column is ``first``.

    ``first`` must already have unit g-length.  The remaining columns come
    from Gram-Schmidt over the standard basis.
    """
    d = g.shape[0]
    cols = [np.asarray(first, dtype=float)]
    for j in range(d):
        if len(cols) == d:
            break
        w = np.zeros(d)
        w[j] = 1.0
        for c in cols:
            w = w - float(c @ g @ w) * c
        nrm = math.sqrt(max(float(w @ g @ w), 0.0))
        if nrm > 1e-8:
            cols.append(w / nrm)
    if len(cols) < d:
        raise NumericalError("failed to complete an orthonormal frame")
    return np.column_stack(cols)


@dataclass
class GeodesicRecord:
    """A geodesic with a parallel-transported orthonormal frame.

    Dense output supports interpolation at any s in [0, s_max].  Frame
    column 0 is the (unit) velocity.
    """

    space: AmbientSpace
    s_max: float
    tol: float
    _sol: object = field(repr=False)

    def _state(self, s: float) -> np.ndarray:
        if s < -1e-12 or s > self.s_max * (1.0 + 1e-12) + 1e-12:
            raise ValueError(f"s = {s:.6g} outside the record range [0, {self.s_max:.6g}]")
        return self._sol.sol(min(max(s, 0.0), self.s_max))

    def position(self, s: float) -> np.ndarray:
        return self._state(s)[: self.space.dim]

    def velocity(self, s: float) -> np.ndarray:
        d = self.space.dim
        return self._state(s)[d : 2 * d]

    def frame(self, s: float) -> np.ndarray:
        """(dim, dim) matrix whose columns are the parallel frame vectors."""
        d = self.space.dim
        return self._state(s)[2 * d :].reshape(d, d)

    @property
    def samples(self):
        """Solver steps as (s, x, velocity, frame) tuples."""
        d = self.space.dim
        out = []
        for i, s in enumerate(self._sol.t):
            y = self._sol.y[:, i]
            out.append((float(s), y[:d], y[d : 2 * d], y[2 * d :].reshape(d, d)))
        return out
