"""Acceptance suite: one criterion per test, one printed PASS/FAIL line each.

Two parametrizations of A3 (equator, geodesic-line) are expected failures:
for a totally geodesic submanifold of a space form, the quadratic model
agrees with the pullback through order r^3 as well, so the leading residual
is O(r^4) and the fitted slope sits near 4 instead of inside [2.8, 3.2].
"""

import json
import time

import numpy as np
import pytest

from conftest import (
    EUCLIDEAN_BUILTINS,
    TOTALLY_GEODESIC,
    default_q,
    first_normal,
    make_builtin,
)
from tubemetrics import (
    TubePoint,
    TubeTangent,
    build_context,
    convergence_order,
    euclidean_exact,
    first_order_tangency,
    horizontal_lift,
    jacobi_field,
    pullback_metric,
    quadratic_expansion,
    radial_vertical,
    sasaki,
    space_form_exact,
    space_form_jacobi_closed,
    vertical_lift,
)
from tubemetrics.catalog import CATALOG
from tubemetrics.cli import main
from tubemetrics.config import load_config
from tubemetrics.pullback import _initial_conditions
from tubemetrics.submanifold import frame_at

ODE_TOL = 1e-10
ALL_BUILTINS = EUCLIDEAN_BUILTINS + ["equator", "latitude-circle", "geodesic-line"]


def _check(criterion, ok, detail=""):
    line = f"{criterion}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f"  [{detail}]"
    print(line)
    assert ok, line


def _random_pair(imm, at, rng):
    def one():
        return TubeTangent(
            at=at, qdot=rng.normal(size=imm.n_params), ndot=rng.normal(size=imm.codim)
        )

    return one(), one()


def _perturbed_config():
    return load_config({
        "ambient": {
            "type": "custom",
            "dim": 2,
            "metric": [
                ["1 + 0.1*exp(-(t1^2 + t2^2))", "0"],
                ["0", "1 + 0.1*exp(-(t1^2 + t2^2))"],
            ],
        },
        "submanifold": {"builtin": "circle"},
        "base_points": [[0.25]],
    })


def test_a1_euclidean_exactness():
    radii = [0.05, 0.1, 0.2, 0.3]
    start = time.time()
    worst = 0.0
    for name in EUCLIDEAN_BUILTINS:
        imm = make_builtin(name)
        q = default_q(name)
        rng = np.random.default_rng([41, EUCLIDEAN_BUILTINS.index(name)])
        for r in radii:
            at = TubePoint(imm, q, r, first_normal(imm))
            ctx = build_context(imm, at, tol=ODE_TOL)
            for _ in range(25):  # 100 seeded pairs per entry across the radii
                u1, u2 = _random_pair(imm, at, rng)
                ode = pullback_metric(imm, u1, u2, ODE_TOL, ctx=ctx)
                worst = max(worst, abs(ode - euclidean_exact(imm, u1, u2)))
    elapsed = time.time() - start
    _check(
        "A1",
        worst <= 1e-8 and elapsed < 30.0,
        f"max residual {worst:.3e}, {elapsed:.1f}s",
    )


def test_a2_closed_form_anchors():
    imm = make_builtin("circle")
    at = TubePoint(imm, default_q("circle"), 0.3, np.array([1.0]))
    u = horizontal_lift(at, frame_at(imm, at.q).tangent[:, 0])
    circle_val = pullback_metric(imm, u, u, ODE_TOL)

    imm = make_builtin("equator")
    at = TubePoint(imm, default_q("equator"), 0.4, np.array([1.0]))
    fr = frame_at(imm, at.q)
    w = fr.tangent[:, 0]
    u = horizontal_lift(at, w / np.sqrt(float(w @ fr.metric @ w)))
    equator_val = pullback_metric(imm, u, u, ODE_TOL)

    ok1 = abs(circle_val - 1.69) <= 1e-9
    ok2 = abs(equator_val - np.cos(0.4) ** 2) <= 1e-8
    _check("A2", ok1 and ok2, f"circle {circle_val!r}, equator {equator_val!r}")


A3_CASES = [
    pytest.param(
        "equator",
        marks=pytest.mark.xfail(
            strict=True, reason="totally geodesic in a space form: residual is O(r^4)"
        ),
    ),
    "latitude-circle",
    pytest.param(
        "geodesic-line",
        marks=pytest.mark.xfail(
            strict=True, reason="totally geodesic in a space form: residual is O(r^4)"
        ),
    ),
    "perturbed-euclidean",
]


@pytest.mark.parametrize("entry", A3_CASES)
def test_a3_quadratic_expansion_order(entry):
    if entry == "perturbed-euclidean":
        imm = _perturbed_config().immersion
        q = np.array([0.25])
    else:
        imm = make_builtin(entry)
        q = default_q(entry)
    radii = [0.2, 0.1, 0.05, 0.025]
    rng = np.random.default_rng([43, len(entry)])
    slopes = []
    for _ in range(6):
        qdot = rng.normal(size=imm.n_params)
        ndot = rng.normal(size=imm.codim)
        residuals = []
        for r in radii:
            at = TubePoint(imm, q, r, first_normal(imm))
            u = TubeTangent(at=at, qdot=qdot, ndot=ndot)
            ctx = build_context(imm, at, tol=ODE_TOL)
            residuals.append(
                abs(pullback_metric(imm, u, u, ODE_TOL, ctx=ctx) - quadratic_expansion(imm, u, u))
            )
        if min(residuals) > 1e-12:
            slopes.append(convergence_order(radii, residuals))
    ok = bool(slopes) and all(2.8 <= s <= 3.2 for s in slopes)
    _check(f"A3[{entry}]", ok, "slopes " + ", ".join(f"{s:.3f}" for s in slopes))


def test_a4_first_order_tangency():
    defects, verdicts = {}, {}
    for name in ALL_BUILTINS:
        imm = make_builtin(name)
        res = first_order_tangency(imm, default_q(name), first_normal(imm))
        defects[name] = res.max_defect
        verdicts[name] = res.is_tangent()
    expected_yes = TOTALLY_GEODESIC
    ok_defect = max(defects.values()) <= 1e-6
    ok_verdict = all(verdicts[n] == (n in expected_yes) for n in ALL_BUILTINS)
    _check(
        "A4",
        ok_defect and ok_verdict,
        f"max defect {max(defects.values()):.2e}; yes on "
        + ",".join(sorted(n for n, v in verdicts.items() if v)),
    )


def test_a5_space_form_variant_arbitration():
    worst_corrected = 0.0
    for name in ("equator", "latitude-circle", "geodesic-line"):
        imm = make_builtin(name)
        q = default_q(name)
        rng = np.random.default_rng([47, len(name)])
        for r in (0.1, 0.3, 0.5):
            at = TubePoint(imm, q, r, np.array([1.0]))
            ctx = build_context(imm, at, tol=ODE_TOL)
            samples = [radial_vertical(at)]
            samples.extend(
                TubeTangent(at=at, qdot=rng.normal(size=1), ndot=rng.normal(size=1))
                for _ in range(3)
            )
            for u in samples:
                ode = pullback_metric(imm, u, u, ODE_TOL, ctx=ctx)
                worst_corrected = max(
                    worst_corrected, abs(ode - space_form_exact(imm, u, u, "corrected"))
                )
    imm = make_builtin("equator")
    at = TubePoint(imm, default_q("equator"), 0.2, np.array([1.0]))
    u = radial_vertical(at)
    original_defect = abs(
        pullback_metric(imm, u, u, ODE_TOL) - space_form_exact(imm, u, u, "original")
    )
    ok = worst_corrected <= 1e-7 and original_defect >= 1e-3
    _check(
        "A5",
        ok,
        f"corrected max {worst_corrected:.2e}, original radial defect {original_defect:.2e}",
    )


def test_a6_jacobi_closed_form():
    grid = np.linspace(0.0, 0.5, 11)
    worst = 0.0
    for name in ("equator", "geodesic-line"):  # k = +1 and k = -1
        imm = make_builtin(name)
        at = TubePoint(imm, default_q(name), 0.5, np.array([1.0]))
        ctx = build_context(imm, at, tol=ODE_TOL)
        rng = np.random.default_rng([53, len(name)])
        for _ in range(25):
            u = TubeTangent(at=at, qdot=rng.normal(size=1), ndot=rng.normal(size=1))
            Y0, Y0p = _initial_conditions(ctx, u)
            for s in grid:
                diff = jacobi_field(ctx, Y0, Y0p, float(s)) - space_form_jacobi_closed(
                    imm, u, float(s), ctx=ctx
                )
                worst = max(worst, float(np.max(np.abs(diff))))
    _check("A6", worst <= 1e-9, f"sup difference {worst:.2e}")


def test_a7_structural_invariants():
    details = []

    # Gauss lemma: the radial direction has pullback norm exactly 1
    gauss = 0.0
    for name in ("torus", "helix", "latitude-circle"):
        imm = make_builtin(name)
        at = TubePoint(imm, default_q(name), 0.35, first_normal(imm))
        u = radial_vertical(at)
        gauss = max(gauss, abs(pullback_metric(imm, u, u, ODE_TOL) - 1.0))
    ok_gauss = gauss <= 1e-8
    details.append(f"gauss {gauss:.1e}")

    # g(Y(s), xi'(s)) is affine in s
    imm = make_builtin("latitude-circle")
    at = TubePoint(imm, default_q("latitude-circle"), 0.5, np.array([1.0]))
    ctx = build_context(imm, at, tol=ODE_TOL)
    rng = np.random.default_rng(59)
    u = TubeTangent(at=at, qdot=rng.normal(size=1), ndot=rng.normal(size=1))
    Y0, Y0p = _initial_conditions(ctx, u)
    ss = np.linspace(0.0, 0.5, 6)
    vals = []
    for s in ss:
        Y = jacobi_field(ctx, Y0, Y0p, float(s))
        g = imm.ambient.metric_at(ctx.record.position(float(s)))
        vals.append(float(Y @ g @ ctx.record.velocity(float(s))))
    affine_defect = float(np.max(np.abs(np.polyval(np.polyfit(ss, vals, 1), ss) - vals)))
    ok_affine = affine_defect <= 1e-7
    details.append(f"affine {affine_defect:.1e}")

    # Sasaki submersion identity on horizontal pairs
    imm = make_builtin("torus")
    at = TubePoint(imm, default_q("torus"), 0.3, np.array([1.0]))
    fr = frame_at(imm, at.q)
    w1 = fr.tangent @ rng.normal(size=2)
    w2 = fr.tangent @ rng.normal(size=2)
    sub_defect = abs(
        sasaki(horizontal_lift(at, w1), horizontal_lift(at, w2)) - float(w1 @ fr.metric @ w2)
    )
    ok_sub = sub_defect <= 1e-10
    details.append(f"submersion {sub_defect:.1e}")

    # split exactness of tube tangents
    imm = make_builtin("helix")
    at = TubePoint(imm, default_q("helix"), 0.3, np.array([1.0, 0.0]))
    u = TubeTangent(at=at, qdot=rng.normal(size=1), ndot=rng.normal(size=2))
    from tubemetrics import decompose

    pi_star, K = decompose(u)
    h, v = horizontal_lift(at, pi_star), vertical_lift(at, K)
    split_defect = max(
        float(np.max(np.abs(h.qdot + v.qdot - u.qdot))),
        float(np.max(np.abs(h.ndot + v.ndot - u.ndot))),
    )
    ok_split = split_defect <= 1e-8
    details.append(f"split {split_defect:.1e}")

    # riemann4 symmetries in finite-difference mode
    amb = _perturbed_config().ambient
    x = np.array([0.3, -0.2])
    a, b, c, d = np.random.default_rng(61).normal(size=(4, 2))
    r4 = amb.riemann4
    sym_defect = max(
        abs(r4(x, a, b, c, d) + r4(x, b, a, c, d)),
        abs(r4(x, a, b, c, d) + r4(x, a, b, d, c)),
        abs(r4(x, a, b, c, d) - r4(x, c, d, a, b)),
        abs(r4(x, a, b, c, d) + r4(x, b, c, a, d) + r4(x, c, a, b, d)),
    )
    ok_sym = sym_defect <= 1e-6
    details.append(f"riemann4 {sym_defect:.1e}")

    _check(
        "A7",
        ok_gauss and ok_affine and ok_sub and ok_split and ok_sym,
        "; ".join(details),
    )


def test_a8_deterministic_csv(tmp_path):
    config = {
        "ambient": {"type": "euclidean", "dim": 3},
        "submanifold": {"builtin": "torus"},
        "base_points": [[0.4, 0.3]],
        "radii": [0.1, 0.2],
        "samples": 6,
        "seed": 7,
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(config))
    outputs = []
    for i in range(2):
        out = tmp_path / f"run{i}.csv"
        rc = main(["verify", "--theorem", "B", "--config", str(cfg_path),
                   "--format", "csv", "--out", str(out)])
        assert rc == 0
        outputs.append(out.read_bytes())
    _check("A8", outputs[0] == outputs[1], f"{len(outputs[0])} bytes")
