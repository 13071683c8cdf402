"""Closed-form models of the pulled-back metric and verification helpers.

Three models of exp^* g(u1, u2) at tube radius r:

* ``quadratic_expansion`` — valid in any ambient, exact through order r^2
  with an O(r^3) remainder; the curvature terms use the (0,4) tensor.
* ``euclidean_exact`` — exact for a flat ambient:
  h - 2 g(A w1, w2) r + g(A w1, A w2) r^2.
* ``space_form_exact`` — exact for constant curvature k, in two variants
  that differ only in the coefficient of g(Ku1, n) g(Ku2, n): the
  ``original`` published coefficient (sin_k(r)/r - 1)^2 and the
  ``corrected`` one 1 - sin_k(r)^2/r^2 obtained by contracting the explicit
  Jacobi fields.  The corrected variant is the one consistent with the
  radial (Gauss-lemma) value 1; the ODE integrator arbitrates.

Plus the explicit constant-curvature Jacobi field, the first-order tangency
test between the Sasaki and pulled-back metrics, and a log-log slope
estimator for convergence orders.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .ambient import DEFAULT_ODE_TOL, EUCLIDEAN, SPACE_FORM, cos_k, sin_k
from .exceptions import InsufficientDataError, PreconditionError
from .pullback import PullbackContext, build_context, pullback_metric, _integrate_jacobi
from .submanifold import Immersion, shape_operator
from .tube import TubePoint, TubeTangent, decompose, horizontal_lift

VARIANTS = ("original", "corrected")


@dataclass
class ExpansionReport:
    """Residuals of a model against the integrated pullback, with a fitted slope."""

    radii: List[float]
    residuals: List[float]
    fitted_slope: Optional[float]
    model_name: str


class _Pieces:
    """Shared scalar ingredients of the closed-form models."""

    def __init__(self, imm: Immersion, u1: TubeTangent, u2: TubeTangent):
        if not u1.at.same_place(u2.at):
            raise PreconditionError("tangents live at different tube points")
        at = u1.at
        fr = at.frame()
        g = fr.metric
        self.at = at
        self.fr = fr
        self.n_amb = fr.normal @ at.n_coeffs
        self.p1, self.k1 = decompose(u1)
        self.p2, self.k2 = decompose(u2)
        A = shape_operator(imm, at.q, at.n_coeffs, at.seed)
        self.a1 = fr.tangent @ (A @ u1.qdot)  # A_n pi_* u1, ambient
        self.a2 = fr.tangent @ (A @ u2.qdot)
        self.g_pp = float(self.p1 @ g @ self.p2)
        self.g_kk = float(self.k1 @ g @ self.k2)
        self.h = self.g_pp + self.g_kk
        # symmetrized; the operator is self-adjoint up to finite-difference noise
        self.g_Ap = 0.5 * float(self.a1 @ g @ self.p2 + self.p1 @ g @ self.a2)
        self.g_AA = float(self.a1 @ g @ self.a2)
        self.kn1 = float(self.k1 @ g @ self.n_amb)
        self.kn2 = float(self.k2 @ g @ self.n_amb)
        self.g = g


def quadratic_expansion(imm: Immersion, u1: TubeTangent, u2: TubeTangent) -> float:
    """Second-order model of exp^* g in a general ambient (remainder O(r^3))."""
    pc = _Pieces(imm, u1, u2)
    r = pc.at.r
    x = pc.fr.x
    n = pc.n_amb
    R4 = imm.ambient.riemann4
    curv = (
        R4(x, pc.p1, n, pc.p2, n)
        + (2.0 / 3.0) * R4(x, pc.p1, n, pc.k2, n)
        + (2.0 / 3.0) * R4(x, pc.p2, n, pc.k1, n)
        + (1.0 / 3.0) * R4(x, pc.k1, n, pc.k2, n)
    )
    return pc.h - 2.0 * pc.g_Ap * r + (pc.g_AA + curv) * r * r


def euclidean_exact(imm: Immersion, u1: TubeTangent, u2: TubeTangent) -> float:
    """Exact pullback for a flat ambient."""
    if imm.ambient.kind != EUCLIDEAN:
        raise PreconditionError("euclidean_exact requires a euclidean ambient")
    pc = _Pieces(imm, u1, u2)
    r = pc.at.r
    return pc.h - 2.0 * pc.g_Ap * r + pc.g_AA * r * r


def space_form_exact(
    imm: Immersion,
    u1: TubeTangent,
    u2: TubeTangent,
    variant: str = "corrected",
) -> float:
    """Exact pullback for a constant-curvature ambient (two last-term variants)."""
    if imm.ambient.kind != SPACE_FORM:
        raise PreconditionError("space_form_exact requires a space_form ambient")
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    pc = _Pieces(imm, u1, u2)
    r = pc.at.r
    k = imm.ambient.k
    if r == 0.0:
        return pc.h
    sk = sin_k(k, r)
    ck = cos_k(k, r)
    sk_r = sk / r
    if variant == "original":
        c_last = (sk_r - 1.0) ** 2
    else:
        c_last = 1.0 - sk_r * sk_r
    return (
        sk_r * sk_r * pc.h
        - 2.0 * sk * ck * pc.g_Ap
        + sk * sk * pc.g_AA
        + (ck * ck - sk_r * sk_r) * pc.g_pp
        + c_last * pc.kn1 * pc.kn2
    )


def space_form_jacobi_closed(
    imm: Immersion,
    u: TubeTangent,
    s: float,
    tol: float = DEFAULT_ODE_TOL,
    ctx: Optional[PullbackContext] = None,
) -> np.ndarray:
    """Explicit constant-curvature Jacobi field of the tube variation at arclength s.

    Y(s) = (s/r) g(Ku, n) xi'(s) + cos_k(s) tau_s(pi_* u)
         + sin_k(s) tau_s{ (1/r)Ku - A_n pi_* u - g((1/r)Ku, n) n },
    with tau_s read off the record's parallel frame.
    """
    if imm.ambient.kind != SPACE_FORM:
        raise PreconditionError("space_form_jacobi_closed requires a space_form ambient")
    if ctx is None:
        ctx = build_context(imm, u.at, tol)
    at = ctx.at
    if s < 0.0 or s > ctx.record.s_max * (1.0 + 1e-12):
        raise ValueError(f"s = {s:.6g} outside the record range")
    k = imm.ambient.k
    r = at.r
    fr = ctx.base_frame
    n = ctx.n_ambient
    pi_star, K = decompose(u)
    kn = float(K @ fr.metric @ n)
    A_pi = fr.tangent @ (ctx.shape_op @ u.qdot)
    B = K / r - A_pi - (kn / r) * n

    E0 = ctx.record.frame(0.0)
    Es = ctx.record.frame(s)
    proj = E0.T @ fr.metric

    def tau(w):
        return Es @ (proj @ w)

    xi_dot = ctx.record.velocity(s)
    return (s / r) * kn * xi_dot + cos_k(k, s) * tau(pi_star) + sin_k(k, s) * tau(B)


@dataclass
class TangencyResult:
    """First-order comparison of the pulled-back and Sasaki metrics at r = 0."""

    derivative: np.ndarray  # d/dr|_0 [exp^*g - h] on the probe vectors
    second_form: np.ndarray  # II_n on the probe vectors
    max_defect: float  # max |derivative - (-2 second_form)|

    @property
    def minus_two_ii(self) -> np.ndarray:
        return -2.0 * self.second_form

    @property
    def second_form_norm(self) -> float:
        return float(np.max(np.abs(self.second_form)))

    def is_tangent(self, threshold: float = 1e-6) -> bool:
        """True when the two metrics agree to first order (II vanishes)."""
        return self.second_form_norm <= threshold


def first_order_tangency(
    imm: Immersion,
    q,
    n_coeffs,
    probe_vectors: Optional[Sequence[np.ndarray]] = None,
    delta: float = 1e-4,
    tol: float = DEFAULT_ODE_TOL,
    seed: int = 0,
) -> TangencyResult:
    """Estimate d/dr|_0 [exp^*g - h] on horizontal probes and compare to -2 II_n.

    The radial derivative uses a symmetric difference through the antipodal
    normal: exp(p, r(-n)) = exp(p, (-r) n), so evaluating at (q, delta, n)
    and (q, delta, -n) gives a central difference that cancels the r^2 term.
    """
    from .submanifold import frame_at  # local import to avoid cycles at module load

    q = np.atleast_1d(np.asarray(q, dtype=float))
    fr = frame_at(imm, q, seed)
    if probe_vectors is None:
        probes = []
        for i in range(imm.n_params):
            w = fr.tangent[:, i]
            probes.append(w / float(np.sqrt(w @ fr.metric @ w)))
    else:
        probes = [np.asarray(w, dtype=float) for w in probe_vectors]
    m = len(probes)
    n_coeffs = np.atleast_1d(np.asarray(n_coeffs, dtype=float))

    def gram_at(nc):
        at = TubePoint(imm=imm, q=q, r=delta, n_coeffs=nc, seed=seed)
        ctx = build_context(imm, at, tol)
        lifts = [horizontal_lift(at, w) for w in probes]
        ics = [
            (decompose(u)[0], decompose(u)[1] / delta - fr.tangent @ (ctx.shape_op @ u.qdot))
            for u in lifts
        ]
        ys = _integrate_jacobi(ctx, ics, delta)
        E = ctx.record.frame(delta)
        g = imm.ambient.metric_at(ctx.record.position(delta))
        Y = np.column_stack([E @ y for y in ys])
        return Y.T @ g @ Y

    G_plus = gram_at(n_coeffs)
    G_minus = gram_at(-n_coeffs)
    # h on horizontal lifts is g(w_i, w_j), identical at both radii
    derivative = (G_plus - G_minus) / (2.0 * delta)

    A = shape_operator(imm, q, n_coeffs, seed)
    W = np.column_stack([fr.tangent @ (A @ fr.tangent_coeffs(w)) for w in probes])
    P = np.column_stack(probes)
    second_form = 0.5 * (W.T @ fr.metric @ P + P.T @ fr.metric @ W)
    defect = float(np.max(np.abs(derivative + 2.0 * second_form)))
    return TangencyResult(derivative=derivative, second_form=second_form, max_defect=defect)


def convergence_order(radii: Sequence[float], residuals: Sequence[float]) -> float:
    """Least-squares slope of log(residual) against log(r).

    Radii must be strictly decreasing; nonpositive residuals are dropped.
    Raises :class:`InsufficientDataError` with fewer than 3 usable points.
    """
    radii = np.asarray(list(radii), dtype=float)
    residuals = np.asarray(list(residuals), dtype=float)
    if radii.shape != residuals.shape:
        raise ValueError("radii and residuals must have matching lengths")
    if np.any(np.diff(radii) >= 0.0):
        raise ValueError("radii must be strictly decreasing")
    mask = residuals > 0.0
    if int(mask.sum()) < 3:
        raise InsufficientDataError(
            f"only {int(mask.sum())} usable (positive) residuals; need at least 3"
        )
    slope, _ = np.polyfit(np.log(radii[mask]), np.log(residuals[mask]), 1)
    return float(slope)


def expansion_report(
    imm: Immersion,
    germ,
    q,
    n_coeffs,
    radii: Sequence[float],
    model: str = "quadratic",
    tol: float = DEFAULT_ODE_TOL,
    seed: int = 0,
) -> ExpansionReport:
    """Residuals of a closed-form model across radii for one tangent germ.

    ``germ`` is a (qdot, ndot) pair reused at every radius.
    """
    qdot, ndot = germ
    resids = []
    for r in radii:
        at = TubePoint(imm=imm, q=q, r=float(r), n_coeffs=n_coeffs, seed=seed)
        u = TubeTangent(at=at, qdot=qdot, ndot=ndot)
        ctx = build_context(imm, at, tol)
        pb = pullback_metric(imm, u, u, tol, ctx=ctx)
        if model == "quadratic":
            mv = quadratic_expansion(imm, u, u)
        elif model == "euclidean":
            mv = euclidean_exact(imm, u, u)
        elif model in ("space_form_corrected", "space_form_original"):
            mv = space_form_exact(imm, u, u, variant=model.rsplit("_", 1)[1])
        else:
            raise ValueError(f"unknown model '{model}'")
        resids.append(abs(pb - mv))
    try:
        slope = convergence_order(list(radii), resids)
    except InsufficientDataError:
        slope = None
    return ExpansionReport(
        radii=[float(r) for r in radii],
        residuals=resids,
        fitted_slope=slope,
        model_name=model,
    )
