"""Quotient models: canonical representatives, orbit distances, closed
geodesics with projective holonomy, the classifier, and the shrinking-box
witness."""

import io
import math
import random

import numpy as np
import pytest

from conflab.conformal import ScalingExponents, essential_flow
from conflab.errors import (
    DimensionMismatch,
    InadmissibleExponents,
    InvalidSignature,
    SignatureMismatch,
    ZeroVector,
)
from conflab.exact import ExactScalar
from conflab.quotient import (
    box_samples,
    build_model,
    classify_model,
    closed_lightlike_geodesics,
    essentiality_witness,
    hausdorff_distance,
    holonomy_cross_check,
    holonomy_multiplier,
    invariant_leaf_check,
    model_description,
    models_equivalent,
    pairwise_quotient_distances,
    project_point,
    quotient_distance,
    segment_samples,
    worker_count,
)

EXP = ScalingExponents(-2.0, -1.5)


@pytest.fixture(scope="module")
def model():
    return build_model(2, 2, EXP)


def admissible_exponents(rng):
    alpha = rng.uniform(-3.0, -0.2)
    beta = alpha + rng.uniform(0.05, 0.95) * (alpha / 2 - alpha)
    return ScalingExponents(alpha, beta)


# -- construction -----------------------------------------------------------------


def test_build_model_validates_inputs():
    with pytest.raises(InvalidSignature):
        build_model(1, 3, EXP)
    with pytest.raises(InvalidSignature):
        build_model(3, 2, EXP)
    with pytest.raises(InadmissibleExponents):
        build_model(2, 2, ScalingExponents(-1.0, -2.0))


def test_model_shape(model):
    assert model.dim == 4
    assert model.signature == (2, 2)
    assert model.metric.dim == 4
    entries = model.generator.numeric_entries()
    assert all(0.0 < d < 1.0 for d in entries)
    want = [math.exp(-1.0), math.exp(-6.0), math.exp(-2.5), math.exp(-4.5)]
    assert np.allclose(entries, want, rtol=1e-15)


# -- canonical representatives ---------------------------------------------------


def brute_force_project(model, x, window=60):
    entries = np.asarray(model.generator.numeric_entries())
    arr = np.asarray(x, dtype=float)
    for k in range(-window, window + 1):
        cur = arr * entries**k
        prev = arr * entries ** (k - 1)
        if np.max(np.abs(cur)) < 1.0 <= np.max(np.abs(prev)):
            return cur, k
    raise AssertionError("no representative in scan window")


def test_project_point_against_scan(model):
    rng = random.Random(7)
    for _ in range(25):
        x = [rng.uniform(-1, 1) * 10 ** rng.randint(-3, 3) for _ in range(4)]
        if not any(x):
            continue
        got = project_point(model, x)
        want_pt, want_k = brute_force_project(model, x)
        assert got.shifts == want_k
        assert np.allclose(got.point, want_pt, rtol=1e-12, atol=0)


def test_project_point_orbit_soundness(model):
    x = np.array([0.3, -0.8, 0.4, 0.9])
    base = project_point(model, x)
    shifted = project_point(model, model.generator.apply(x))
    assert shifted.shifts == base.shifts - 1
    assert np.allclose(shifted.point, base.point, rtol=1e-14)


def test_project_point_rejects_bad_input(model):
    with pytest.raises(ZeroVector):
        project_point(model, [0.0, 0.0, 0.0, 0.0])
    with pytest.raises(DimensionMismatch):
        project_point(model, [1.0, 0.0])


# -- orbit distances ----------------------------------------------------------------


def test_quotient_distance_symmetric_and_zero_on_orbits(model):
    rng = random.Random(11)
    for _ in range(10):
        a = [rng.uniform(-1, 1) for _ in range(4)]
        b = [rng.uniform(-1, 1) for _ in range(4)]
        if not (any(a) and any(b)):
            continue
        dab = quotient_distance(model, a, b)
        dba = quotient_distance(model, b, a)
        assert dab == dba  # symmetric by construction, not by tolerance
        assert dab >= 0.0
    x = [0.3, -0.2, 0.55, 0.1]
    image = model.generator.power(2).apply(x)
    assert quotient_distance(model, x, image) < 1e-12
    assert quotient_distance(model, x, x) == 0.0


def test_quotient_distance_separates_orbits(model):
    d = quotient_distance(model, [0.5, 0.0, 0.0, 0.0], [0.0, 0.0, 0.5, 0.0])
    assert d > 0.05


def test_quotient_distance_checks_shape(model):
    with pytest.raises(DimensionMismatch):
        quotient_distance(model, [1.0, 0.0], [0.0, 1.0])


def test_pairwise_and_hausdorff_consistency(model):
    rng = np.random.default_rng(5)
    a = rng.uniform(-1, 1, size=(6, 4))
    b = rng.uniform(-1, 1, size=(5, 4))
    dm = pairwise_quotient_distances(model, a, b)
    assert dm.shape == (6, 5)
    for i in (0, 3):
        for j in (1, 4):
            assert dm[i, j] == pytest.approx(
                quotient_distance(model, a[i], b[j]), rel=1e-12
            )
    assert hausdorff_distance(model, a, a) == 0.0
    assert hausdorff_distance(model, a, b) == hausdorff_distance(model, b, a)


# -- invariant leaf ----------------------------------------------------------------


def test_invariant_leaf_check_passes(model):
    verdict = invariant_leaf_check(model)
    assert verdict.axes_preserved
    assert verdict.all_offsets_moved
    assert verdict.weyl_span_matches
    assert verdict.passed
    moved_axes = [axis for axis, _ in verdict.offsets_moved]
    assert moved_axes == [1, 3]


# -- closed geodesics and holonomy ----------------------------------------------------


def test_four_closed_geodesics(model):
    geods = closed_lightlike_geodesics(model)
    assert sorted(g.tag for g in geods) == ["delta+", "delta-", "gamma+", "gamma-"]
    by_tag = {g.tag: g for g in geods}
    assert by_tag["gamma+"].axis == 2
    assert by_tag["delta-"].axis == 4
    assert by_tag["gamma+"].direction == (0, 1, 0, 0)
    assert by_tag["delta-"].direction == (0, 0, 0, -1)
    assert by_tag["gamma+"].multiplier_exact == ExactScalar.exp_term(3, 0)
    assert by_tag["delta+"].multiplier_exact == ExactScalar.exp_term(0, 3)
    for g in geods:
        assert 0.0 < g.multiplier.multiplier < 1.0


def test_holonomy_two_routes_agree(model):
    for g in closed_lightlike_geodesics(model):
        check = holonomy_cross_check(model, g)
        assert check.discrepancy < 1e-12
        assert check.fit_residual < 1e-12
    gamma = closed_lightlike_geodesics(model)[0]
    cls = holonomy_multiplier(model, gamma)
    assert cls.multiplier == pytest.approx(math.exp(-6.0), rel=1e-15)


def test_holonomy_random_exponents():
    rng = random.Random(20240805)
    for _ in range(5):
        m = build_model(2, 2, admissible_exponents(rng))
        for g in closed_lightlike_geodesics(m):
            check = holonomy_cross_check(m, g)
            assert check.discrepancy < 1e-12
            assert check.fit_residual < 1e-12


# -- classification -------------------------------------------------------------------


def test_classifier_values(model):
    pair = classify_model(model)
    assert pair.mu_gamma == pytest.approx(math.exp(-6.0), rel=1e-15)
    assert pair.mu_delta == pytest.approx(math.exp(-4.5), rel=1e-15)
    assert pair.mu_gamma < pair.mu_delta
    assert pair.exact_gamma == ExactScalar.exp_term(3, 0)
    assert pair.exact_delta == ExactScalar.exp_term(0, 3)


def test_models_equivalent_reflexive_and_injective(model):
    same = build_model(2, 2, ScalingExponents(-2.0, -1.5))
    assert models_equivalent(model, same)
    other = build_model(2, 2, ScalingExponents(-2.0, -1.4))
    assert not models_equivalent(model, other)
    rng = random.Random(20240806)
    for _ in range(20):
        e1, e2 = admissible_exponents(rng), admissible_exponents(rng)
        if (e1.alpha, e1.beta) == (e2.alpha, e2.beta):
            continue
        assert not models_equivalent(build_model(2, 2, e1), build_model(2, 2, e2))


def test_models_equivalent_signature_guard(model):
    other = build_model(2, 3, EXP)
    with pytest.raises(SignatureMismatch):
        models_equivalent(model, other)


def test_model_description_payload(model):
    desc = model_description(model)
    assert desc["signature"] == [2, 2]
    assert desc["alpha"] == -2.0
    assert desc["beta"] == -1.5
    assert desc["multiplier_gamma"] == pytest.approx(math.exp(-6.0), rel=1e-15)
    assert len(desc["generator_entries"]) == 4


# -- witness -------------------------------------------------------------------------


def test_sample_grids():
    box = box_samples(4, 5)
    assert box.shape == (625, 4)
    assert box[:, 2].min() == 0.5 and box[:, 2].max() == 1.5
    assert box[:, 0].min() == -0.5 and box[:, 0].max() == 0.5
    seg = segment_samples(4, 5)
    assert seg.shape == (5, 4)
    assert np.all(seg[:, [0, 1, 3]] == 0.0)
    assert set(np.round(seg[:, 2], 12)) <= set(np.round(box[:, 2], 12))
    with pytest.raises(ValueError):
        box_samples(4, 2)


def test_witness_decays_to_segment(model):
    w = essentiality_witness(model, [0.0, 2.5, 5.0, 7.5, 10.0])
    assert w.resolution == pytest.approx(0.25)
    assert w.strictly_decreasing()
    assert w.distances[0] == pytest.approx(0.8660254037844386, abs=1e-12)
    assert w.distances[-1] == pytest.approx(2.1630560520754671e-07, rel=1e-9)
    assert w.distances[0] > 0.1
    assert w.distances[-1] < 0.05


def test_witness_flow_pushes_box_toward_segment(model):
    # direct cross-check at one t: flow the box by hand, canonicalize, measure
    t = 5.0
    flow = np.asarray(essential_flow(t, 4).numeric_entries())
    flowed = box_samples(4, 5) * flow
    canon = np.stack([project_point(model, row).point for row in flowed])
    target = np.stack(
        [project_point(model, row).point for row in segment_samples(4, 5)]
    )
    direct = hausdorff_distance(model, canon, target)
    w = essentiality_witness(model, [5.0])
    assert direct == pytest.approx(w.distances[0], rel=1e-12)


def test_witness_input_validation(model):
    with pytest.raises(ValueError):
        essentiality_witness(model, [])
    with pytest.raises(ValueError):
        essentiality_witness(model, [1.0, 1.0])
    with pytest.raises(ValueError):
        essentiality_witness(model, [2.0, 1.0])


def test_witness_csv_format(model):
    w = essentiality_witness(model, [0.0, 1.0])
    buf = io.StringIO()
    w.write_csv(buf)
    lines = buf.getvalue().strip().split("\n")
    assert lines[0] == "t,hausdorff,resolution"
    assert len(lines) == 3
    t, d, r = lines[1].split(",")
    assert float(t) == 0.0
    assert float(r) == w.resolution


def test_thread_cap_and_determinism(model, monkeypatch):
    monkeypatch.setenv("CONFLAB_THREADS", "3")
    assert worker_count() == 3
    assert worker_count(jobs=2) == 2
    monkeypatch.setenv("CONFLAB_THREADS", "0")
    with pytest.raises(ValueError):
        worker_count()
    monkeypatch.delenv("CONFLAB_THREADS")
    assert worker_count(explicit=2) == 2
    ts = [0.0, 2.0, 4.0]
    serial = essentiality_witness(model, ts, threads=1)
    threaded = essentiality_witness(model, ts, threads=3)
    assert serial.distances == threaded.distances
