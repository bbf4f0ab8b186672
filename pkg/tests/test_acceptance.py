"""Acceptance gate.

Each test runs one binding requirement end to end at its stated tolerance
and prints a single pass/fail line (run with -s to see them all).
"""

import math
import random
import time
from fractions import Fraction

import numpy as np

from conflab.conformal import (
    FLOW_FACTOR_EXACT,
    SCALING_FACTOR_EXACT,
    ScalingExponents,
    conformal_factor,
    diagonal_scaling_map,
    essential_flow,
    pullback_metric,
)
from conflab.exact import ExactScalar, Polynomial, RationalFunction, parse_polynomial
from conflab.geodesic import (
    fit_mobius,
    integrate_geodesic,
    mobius_fit_residual,
    schwarzian_chain_residual,
    schwarzian_of_samples,
    solve_projective_parameter,
)
from conflab.quotient import (
    build_model,
    closed_lightlike_geodesics,
    essentiality_witness,
    holonomy_cross_check,
    models_equivalent,
)
from conflab.tensor import (
    build_g0,
    conformal_flatness,
    curvature_report,
    flat_metric,
    nonzero_entries,
    scale_metric,
    weyl_image_at,
)
from oracles import fd_curvature, random_perturbed_metric, sym_tensor_array

SIGNATURES = [(2, 2), (2, 3), (3, 3), (2, 4), (3, 4)]


def emit(num, ok, detail):
    print(f"[{num:>2}/10] {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, f"requirement {num}: {detail}"


def admissible_exponents(rng):
    alpha = rng.uniform(-3.0, -0.2)
    beta = alpha + rng.uniform(0.05, 0.95) * (alpha / 2 - alpha)
    return ScalingExponents(alpha, beta)


def test_01_flagship_curvature_exact_all_signatures():
    worst = 0.0
    ok = True
    for p, q in SIGNATURES:
        start = time.monotonic()
        rep = curvature_report(build_g0(p, q))
        elapsed = time.monotonic() - start
        worst = max(worst, elapsed)
        n = p + q
        x3 = RationalFunction.from_polynomial(Polynomial.variable(n, 2))
        one = RationalFunction.constant(n, 1)
        ok = ok and elapsed < 10.0
        ok = ok and rep.is_ricci_flat()
        ok = ok and nonzero_entries(rep.christoffel, 3) == {
            (2, 1, 3): x3,
            (2, 3, 1): x3,
            (4, 1, 1): -x3,
        }
        ok = ok and nonzero_entries(rep.riemann, 4) == {
            (2, 3, 3, 1): one,
            (2, 3, 1, 3): -one,
            (4, 1, 1, 3): one,
            (4, 1, 3, 1): -one,
        }
        ok = ok and rep.weyl == rep.riemann
    emit(
        1,
        ok,
        f"exact Christoffel/curvature/Ricci-flat/Weyl for {len(SIGNATURES)} "
        f"signatures, slowest {worst:.2f}s",
    )


def test_02_conformal_factors():
    start = time.monotonic()
    g0 = build_g0(2, 2)
    mapping = diagonal_scaling_map(4)
    factor = conformal_factor(mapping, g0)
    ok = factor == SCALING_FACTOR_EXACT
    pulled = pullback_metric(mapping, g0)
    ok = ok and all(
        pulled.components[i][j] == g0.components[i][j].scalar_mul(factor)
        for i in range(4)
        for j in range(4)
    )
    worst = 0.0
    for t in (0.5, 1.0, 2.0):
        flow = essential_flow(t, 4)
        ff = conformal_factor(flow, g0)
        ok = ok and ff == FLOW_FACTOR_EXACT
        err = abs(ff.evaluate(*flow.param_values) - math.exp(-3.0 * t))
        worst = max(worst, err)
        ok = ok and err < 1e-12
    elapsed = time.monotonic() - start
    ok = ok and elapsed < 1.0
    emit(
        2,
        ok,
        f"pullback factor E1^2 E2^2 exact, flow factor e^(-3t) err {worst:.2e}, "
        f"{elapsed:.2f}s",
    )


def test_03_weyl_image_is_plane_24():
    start = time.monotonic()
    rep = curvature_report(build_g0(2, 2))
    rng = random.Random(20240804)
    expected = [
        [Fraction(0), Fraction(1), Fraction(0), Fraction(0)],
        [Fraction(0), Fraction(0), Fraction(0), Fraction(1)],
    ]
    ok = True
    for _ in range(20):
        x = [
            Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(4)
        ]
        basis = weyl_image_at(rep, x)
        ok = ok and len(basis) == 2
        ok = ok and [list(map(Fraction, row)) for row in basis] == expected
    elapsed = time.monotonic() - start
    ok = ok and elapsed < 5.0
    emit(3, ok, f"Weyl image = span(e2,e4) at 20 rational points, {elapsed:.2f}s")


def test_04_finite_difference_oracle():
    rng = random.Random(20240803)
    worst = 0.0
    ok = True
    for trial in range(20):
        dim = 4 + trial % 3
        p = rng.randrange(1, dim)
        q = dim - p
        m = random_perturbed_metric(rng, p, q, rng.choice([2, 3]))
        rep = curvature_report(m)
        x = [rng.uniform(-0.4, 0.4) for _ in range(dim)]

        def mf(pt):
            return np.array(m.evaluate_float(list(pt)))

        gam_fd, riem_fd = fd_curvature(mf, x)
        gam = sym_tensor_array(nonzero_entries(rep.christoffel, 3), gam_fd.shape, x)
        riem = sym_tensor_array(nonzero_entries(rep.riemann, 4), riem_fd.shape, x)
        rel_g = np.max(np.abs(gam - gam_fd)) / max(1.0, np.max(np.abs(gam)))
        rel_r = np.max(np.abs(riem - riem_fd)) / max(1.0, np.max(np.abs(riem)))
        worst = max(worst, rel_g, rel_r)
        ok = ok and rel_g < 1e-6 and rel_r < 1e-6
    emit(
        4,
        ok,
        f"20 random metrics dim 4-6: symbolic vs finite differences, "
        f"worst rel err {worst:.2e}",
    )


def test_05_geodesic_conservation_and_order():
    g0 = build_g0(2, 2)
    path = integrate_geodesic(
        g0, [0.0, 0.0, 1.0, 0.0], [1.0, -1.5, 1.0, 1.0], 1e-3, 10_000
    )
    drift = path.null_drift
    ok = drift < 1e-9

    m = scale_metric(flat_metric(0, 2), parse_polynomial("1 + x2^2", 2))
    rep = curvature_report(m)
    x0, v0 = [0.2, 0.1], [0.7, 0.4]
    ref = integrate_geodesic(rep, x0, v0, 2.5e-5, 40_000).x[-1]
    e1 = np.max(np.abs(integrate_geodesic(rep, x0, v0, 1e-2, 100).x[-1] - ref))
    e2 = np.max(np.abs(integrate_geodesic(rep, x0, v0, 5e-3, 200).x[-1] - ref))
    ratio = e1 / e2
    ok = ok and 10.0 < ratio < 24.0
    emit(
        5,
        ok,
        f"null-norm drift {drift:.2e} over 10^4 steps, halving ratio {ratio:.1f}",
    )


def test_06_schwarzian_suite():
    step = 1e-3
    s = np.arange(0.0, 0.5 + 0.5 * step, step)
    mob = (2 * s + 1) / (s + 3)
    res_mob = float(np.max(np.abs(schwarzian_of_samples(mob, step))))
    ok = res_mob < 1e-5

    res_chain = schwarzian_chain_residual(np.exp(s), 2.0 * s, step)
    ok = ok and res_chain < 1e-4

    proj = solve_projective_parameter(
        lambda t: 0.0, 4, 0.0, 1.0, 1e-2, u_init=(1.0, 2.0, 1.0, 0.3)
    )
    fitted = fit_mobius(proj.s, proj.p)
    res_fit = mobius_fit_residual(fitted, proj.s, proj.p)
    ok = ok and res_fit < 1e-6
    emit(
        6,
        ok,
        f"Moebius Schwarzian {res_mob:.2e}, chain identity {res_chain:.2e}, "
        f"flat-potential Moebius fit {res_fit:.2e}",
    )


def test_07_holonomy_two_routes():
    rng = random.Random(20240807)
    worst = 0.0
    ok = True
    for _ in range(10):
        lam = admissible_exponents(rng)
        model = build_model(2, 2, lam)
        geods = {g.axis: g for g in closed_lightlike_geodesics(model)}
        for axis, expo in ((2, lam.alpha), (4, lam.beta)):
            chk = holonomy_cross_check(model, geods[axis])
            worst = max(worst, chk.discrepancy)
            ok = ok and chk.discrepancy < 1e-12
            ok = ok and abs(chk.generator_value - math.exp(3.0 * expo)) < 1e-15
        ok = ok and geods[2].multiplier_exact == ExactScalar.exp_term(3, 0)
        ok = ok and geods[4].multiplier_exact == ExactScalar.exp_term(0, 3)
    emit(
        7,
        ok,
        f"10 random exponent pairs: generator vs transported multiplier, "
        f"worst gap {worst:.2e}; formal values E1^3, E2^3",
    )


def test_08_classifier_injectivity():
    rng = random.Random(20240808)
    ok = True
    checked = 0
    while checked < 50:
        e1, e2 = admissible_exponents(rng), admissible_exponents(rng)
        if (e1.alpha, e1.beta) == (e2.alpha, e2.beta):
            continue
        m1, m2 = build_model(2, 2, e1), build_model(2, 2, e2)
        ok = ok and not models_equivalent(m1, m2)
        checked += 1
    same = build_model(2, 2, ScalingExponents(-2.0, -1.5))
    same2 = build_model(2, 2, ScalingExponents(-2.0, -1.5))
    ok = ok and models_equivalent(same, same2)
    emit(8, ok, "invariant pairs separate 50 random distinct exponent pairs")


def test_09_essentiality_witness():
    start = time.monotonic()
    model = build_model(2, 2, ScalingExponents(-2.0, -1.5))
    w = essentiality_witness(
        model, [0.0, 2.0, 4.0, 6.0, 8.0, 10.0], grid_per_axis=5, window=40
    )
    elapsed = time.monotonic() - start
    d = w.distances
    ok = w.strictly_decreasing() and d[0] > 0.1 and d[-1] < 0.05 and elapsed < 60.0
    emit(
        9,
        ok,
        f"Hausdorff series decreasing {d[0]:.3f} -> {d[-1]:.2e}, {elapsed:.1f}s",
    )


def test_10_conformal_flatness_contrast():
    flat = flat_metric(2, 2)
    ok = conformal_flatness(curvature_report(flat)).conformally_flat
    scaled = scale_metric(flat, parse_polynomial("1 + x2^2", 4))
    ok = ok and conformal_flatness(curvature_report(scaled)).conformally_flat
    verdict = conformal_flatness(curvature_report(build_g0(2, 2)))
    ok = ok and not verdict.conformally_flat
    l, k, i, j = verdict.witness_component
    value = verdict.witness_value
    ok = ok and value != 0
    emit(
        10,
        ok,
        f"flat and (1+x2^2)*flat conformally flat; flagship not, witness "
        f"W[{l}][{k}][{i}][{j}] = {value!r} at a rational point",
    )
