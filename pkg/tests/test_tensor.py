"""Exact curvature pipeline: the flagship metric, identities, FD cross-checks."""

import random
from fractions import Fraction

import numpy as np
import pytest

from conflab.errors import (
    DegenerateAtPoint,
    DimensionMismatch,
    DimensionTooSmall,
    InvalidSignature,
    MetricParseError,
    SignatureMismatch,
)
from conflab.exact import Polynomial, RationalFunction, parse_polynomial
from conflab.tensor import (
    MetricSpec,
    build_g0,
    check_first_bianchi,
    check_gamma_symmetry,
    check_inverse,
    check_pair_symmetry,
    check_ricci_symmetry,
    check_riemann_antisymmetry,
    check_second_bianchi,
    check_weyl_traces,
    conformal_flatness,
    curvature_report,
    flat_metric,
    inertia,
    load_metric,
    metric_adjugate,
    metric_determinant,
    metric_to_text,
    nonzero_entries,
    parse_metric_text,
    scale_metric,
    signature_at,
    verify_signature,
    weyl_image_at,
)

from oracles import fd_curvature, random_perturbed_metric, sym_tensor_array

SIGNATURES = [(2, 2), (2, 3), (3, 3), (2, 4), (3, 4)]


def rf_poly(p):
    return RationalFunction.from_polynomial(p)


# -- the flagship metric --------------------------------------------------------


def test_g0_components():
    g = build_g0(2, 3)
    n = 5
    x3 = Polynomial.variable(n, 2)
    assert g.component(1, 1) == x3 * x3
    assert g.component(1, 2) == Polynomial.one(n)
    assert g.component(3, 4) == Polynomial.one(n)
    assert g.component(5, 5) == Polynomial.one(n)
    assert g.component(2, 3).is_zero
    assert signature_at(g, [0, 0, 0, 0, 0]) == (2, 3)
    assert signature_at(g, [1, Fraction(1, 2), -2, 0, 3]) == (2, 3)


def test_g0_epsilon_tail_signs():
    g = build_g0(3, 4)
    # q - 2 = 2 plus entries, then p - 2 = 1 minus entry
    assert g.component(5, 5) == Polynomial.one(7)
    assert g.component(6, 6) == Polynomial.one(7)
    assert g.component(7, 7) == Polynomial.constant(7, -1)


def test_g0_rejects_bad_signature():
    with pytest.raises(InvalidSignature):
        build_g0(1, 3)
    with pytest.raises(InvalidSignature):
        build_g0(3, 2)


@pytest.mark.parametrize("p,q", SIGNATURES)
def test_g0_curvature_exact(p, q):
    n = p + q
    rep = curvature_report(build_g0(p, q))
    x3 = rf_poly(Polynomial.variable(n, 2))
    one = RationalFunction.constant(n, 1)

    assert nonzero_entries(rep.christoffel, 3) == {
        (2, 1, 3): x3,
        (2, 3, 1): x3,
        (4, 1, 1): -one * x3,
    }
    assert nonzero_entries(rep.riemann, 4) == {
        (2, 3, 1, 3): -one,
        (2, 3, 3, 1): one,
        (4, 1, 1, 3): one,
        (4, 1, 3, 1): -one,
    }
    assert rep.is_ricci_flat()
    assert rep.scalar.is_zero
    # Weyl coincides with the full curvature because Ricci vanishes
    assert nonzero_entries(rep.weyl, 4) == nonzero_entries(rep.riemann, 4)


@pytest.mark.parametrize("p,q", [(2, 2), (2, 3)])
def test_g0_weyl_image_plane(p, q):
    n = p + q
    rep = curvature_report(build_g0(p, q))
    rng = random.Random(7)
    e2 = tuple(Fraction(1 if i == 1 else 0) for i in range(n))
    e4 = tuple(Fraction(1 if i == 3 else 0) for i in range(n))
    for _ in range(5):
        point = [Fraction(rng.randrange(-4, 5), rng.choice([1, 2, 3])) for _ in range(n)]
        assert weyl_image_at(rep, point) == [e2, e4]


def test_g0_not_conformally_flat():
    rep = curvature_report(build_g0(2, 2))
    verdict = conformal_flatness(rep)
    assert not verdict.conformally_flat
    l, k, i, j = verdict.witness_component
    value = rep.weyl[l - 1][k - 1][i - 1][j - 1].eval_exact(verdict.witness_point)
    assert value == verdict.witness_value
    assert not value.is_zero


def test_flat_metrics_conformally_flat():
    assert conformal_flatness(curvature_report(flat_metric(1, 3))).conformally_flat
    factor = parse_polynomial("1 + x2^2", 4)
    scaled = scale_metric(flat_metric(1, 3), factor)
    assert conformal_flatness(curvature_report(scaled)).conformally_flat


def test_weyl_conformal_invariance_exact():
    # the (1,3) Weyl tensor must not change under g -> f*g
    g = build_g0(2, 2)
    f = parse_polynomial("1 + x1^2", 4)
    w0 = curvature_report(g).weyl
    w1 = curvature_report(scale_metric(g, f)).weyl
    assert nonzero_entries(w0, 4) == nonzero_entries(w1, 4)


# -- signature bookkeeping -------------------------------------------------------


def test_inertia_counts():
    F = Fraction
    assert inertia([[F(2), F(0)], [F(0), F(-3)]]) == (1, 1, 0)
    assert inertia([[F(0), F(1)], [F(1), F(0)]]) == (1, 1, 0)
    assert inertia([[F(0), F(0)], [F(0), F(5)]]) == (0, 1, 1)


def test_signature_at_degenerate_point():
    x1 = Polynomial.variable(2, 0)
    one = Polynomial.one(2)
    zero = Polynomial.zero(2)
    g = MetricSpec(2, 0, 2, ((x1, zero), (zero, one)), name="deg")
    assert signature_at(g, [1, 0]) == (0, 2)
    assert signature_at(g, [-1, 0]) == (1, 1)
    with pytest.raises(DegenerateAtPoint):
        signature_at(g, [0, 0])


def test_verify_signature_mismatch():
    g = flat_metric(1, 3)
    relabeled = MetricSpec(4, 3, 1, g.components, name="bad")
    with pytest.raises(SignatureMismatch):
        verify_signature(relabeled, [0, 0, 0, 0])


def test_metric_requires_symmetry():
    one = Polynomial.one(2)
    zero = Polynomial.zero(2)
    with pytest.raises(DimensionMismatch):
        MetricSpec(2, 1, 1, ((zero, one), (zero, zero)), name="asym")


# -- exact linear algebra ---------------------------------------------------------


def test_adjugate_identity():
    rng = random.Random(3)
    m = random_perturbed_metric(rng, 1, 2, 2)
    det = metric_determinant(m)
    adj = metric_adjugate(m)
    n = m.dim
    for i in range(n):
        for j in range(n):
            acc = Polynomial.zero(n)
            for k in range(n):
                acc = acc + adj[i][k] * m.components[k][j]
            want = det if i == j else Polynomial.zero(n)
            assert acc == want


def test_inverse_on_report():
    rng = random.Random(4)
    rep = curvature_report(random_perturbed_metric(rng, 2, 2, 2))
    assert check_inverse(rep)


# -- identities on random metrics --------------------------------------------------


@pytest.mark.parametrize("seed,p,q,terms", [(11, 2, 2, 3), (12, 1, 4, 2), (13, 3, 3, 2)])
def test_curvature_identities_random(seed, p, q, terms):
    rng = random.Random(seed)
    rep = curvature_report(random_perturbed_metric(rng, p, q, terms))
    assert check_gamma_symmetry(rep)
    assert check_riemann_antisymmetry(rep)
    assert check_first_bianchi(rep)
    assert check_ricci_symmetry(rep)
    assert check_pair_symmetry(rep)
    assert check_weyl_traces(rep)


def test_second_bianchi_exact():
    assert check_second_bianchi(curvature_report(build_g0(2, 2)))
    rng = random.Random(14)
    rep = curvature_report(random_perturbed_metric(rng, 1, 3, 2))
    assert check_second_bianchi(rep)


def test_weyl_none_below_dim_four():
    rep = curvature_report(flat_metric(1, 2))
    assert rep.weyl is None
    with pytest.raises(DimensionTooSmall):
        conformal_flatness(rep)
    with pytest.raises(DimensionTooSmall):
        weyl_image_at(rep, [0, 0, 0])


# -- finite-difference cross-check --------------------------------------------------


def test_fd_matches_symbolic_curvature():
    rng = random.Random(20240803)
    for trial in range(6):
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
        assert rel_g < 1e-6
        assert rel_r < 1e-6


def test_fd_matches_g0():
    m = build_g0(2, 2)
    rep = curvature_report(m)
    x = [0.3, -0.2, 0.7, 0.1]

    def mf(pt):
        return np.array(m.evaluate_float(list(pt)))

    gam_fd, riem_fd = fd_curvature(mf, x)
    gam = sym_tensor_array(nonzero_entries(rep.christoffel, 3), gam_fd.shape, x)
    riem = sym_tensor_array(nonzero_entries(rep.riemann, 4), riem_fd.shape, x)
    assert np.max(np.abs(gam - gam_fd)) < 1e-9
    assert np.max(np.abs(riem - riem_fd)) < 1e-9


# -- text format -------------------------------------------------------------------


G0_TEXT = """\
# flagship metric, dim 4
dim 4
type 2 2
g 1 1 x3^2
g 1 2 1
g 3 4 1
"""


def test_parse_metric_text_roundtrip():
    m = parse_metric_text(G0_TEXT)
    g = build_g0(2, 2)
    assert m.components == g.components
    assert (m.p, m.q) == (2, 2)
    again = parse_metric_text(metric_to_text(m))
    assert again.components == m.components


def test_parse_metric_text_errors():
    with pytest.raises(MetricParseError) as exc:
        parse_metric_text("dim 4\ntype 2 2\ng 1 1 x9\n")
    assert exc.value.line == 3
    with pytest.raises(MetricParseError):
        parse_metric_text("type 2 2\ng 1 1 1\n")  # g before dim
    with pytest.raises(MetricParseError):
        parse_metric_text("dim 4\ntype 2 1\ng 1 1 1\n")  # type sum wrong
    with pytest.raises(MetricParseError) as exc:
        parse_metric_text("dim 2\ntype 1 1\nh 1 1 1\n")
    assert "unknown directive" in str(exc.value)
    with pytest.raises(MetricParseError):
        parse_metric_text("dim 2\ntype 1 1\ng 1 3 1\n")  # index range
    with pytest.raises(MetricParseError):
        parse_metric_text("dim 2\ntype 1 1\ng 1 1 1\ng 1 1 2\n")  # conflict


def test_load_metric_file(tmp_path):
    path = tmp_path / "m.metric"
    path.write_text(G0_TEXT)
    m = load_metric(path)
    assert m.dim == 4
    assert m.component(1, 1) == parse_polynomial("x3^2", 4)
