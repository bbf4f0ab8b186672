"""Quotients of punctured pseudo-Euclidean space by a diagonal scaling group.

A model is the punctured space R^{p+q} minus the origin, modulo the cyclic
group generated by an admissible diagonal scaling map.  All generator
entries lie strictly between 0 and 1, so forward iteration contracts the
sup-norm and every nonzero orbit meets the annulus
{ ||x||_oo < 1 <= ||generator^{-1} x||_oo } exactly once: that annulus is
our fundamental domain, and project_point computes the representative.

Distances in the quotient are measured by an ambient Euclidean proxy
minimized over a finite window of group shifts, symmetrized in the two
arguments.  This proxy induces the quotient topology on compact parts,
which is all the Hausdorff-contraction witness needs; no Riemannian
quotient metric is claimed.

The module also houses the geometric payload of the construction: the
scale-invariant coordinate plane spanned by axes 2 and 4 (the image of the
Weyl operator), the four closed lightlike geodesics living on its rays,
their projective holonomy computed two independent ways, the resulting
distinctness classifier, and the Hausdorff witness that the flow crushes
an open box onto a segment.
"""

from __future__ import annotations

import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np
from scipy.spatial.distance import cdist

from .conformal import (
    SCALING_FACTOR_EXACT,
    DiagonalMap,
    ScalingExponents,
    conformal_factor,
    diagonal_scaling_map,
    essential_flow,
    require_admissible,
)
from .errors import (
    DimensionMismatch,
    InvalidSignature,
    MismatchBetweenMethods,
    NonFinite,
    SignatureMismatch,
    ZeroVector,
)
from .exact import ExactScalar
from .geodesic import (
    CompiledRational,
    ProjectiveClass,
    fit_mobius,
    lightlike_norm_exact,
    mobius_fit_residual,
    mobius_multiplier,
    projective_parameter_on_grid,
)
from .tensor import CurvatureReport, MetricSpec, build_g0, curvature_report, weyl_image_at

_MAX_SHIFTS = 500


def worker_count(explicit: int | None = None, jobs: int | None = None) -> int:
    """Thread cap: explicit argument, else CONFLAB_THREADS, else cpu count."""
    if explicit is not None:
        cap = explicit
    else:
        env = os.environ.get("CONFLAB_THREADS", "").strip()
        cap = int(env) if env else (os.cpu_count() or 1)
    if cap < 1:
        raise ValueError("thread cap must be at least 1")
    return min(cap, jobs) if jobs else cap


# ---------------------------------------------------------------------------
# Model construction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuotientModel:
    p: int
    q: int
    exponents: ScalingExponents
    metric: MetricSpec
    generator: DiagonalMap
    report: CurvatureReport

    @property
    def dim(self) -> int:
        return self.p + self.q

    @property
    def signature(self) -> tuple[int, int]:
        return (self.p, self.q)


def build_model(p: int, q: int, exponents: ScalingExponents) -> QuotientModel:
    """Assemble and validate a quotient model.

    Construction re-verifies the invariants it depends on: admissible
    exponents, strictly contracting generator entries, and the exact
    conformality of the generator for the flagship metric with factor
    E1^2 E2^2.
    """
    if not (2 <= p <= q):
        raise InvalidSignature(f"need 2 <= p <= q, got ({p}, {q})")
    require_admissible(exponents)
    metric = build_g0(p, q)
    generator = diagonal_scaling_map(p + q, exponents)
    entries = generator.numeric_entries()
    if not all(0.0 < d < 1.0 for d in entries):
        raise InvalidSignature(
            f"generator entries {entries} are not all strictly contracting"
        )
    if conformal_factor(generator, metric) != SCALING_FACTOR_EXACT:
        raise MismatchBetweenMethods(
            "generator is not conformal with the expected exact factor"
        )
    return QuotientModel(
        p=p,
        q=q,
        exponents=exponents,
        metric=metric,
        generator=generator,
        report=curvature_report(metric),
    )


# ---------------------------------------------------------------------------
# Canonical representatives and quotient distances
# ---------------------------------------------------------------------------


class ProjectedPoint(NamedTuple):
    point: np.ndarray
    shifts: int


def project_point(model: QuotientModel, x: Sequence[float]) -> ProjectedPoint:
    """Canonical representative of a nonzero point.

    Returns generator^k(x) for the unique integer k with
    ||generator^k x||_oo < 1 <= ||generator^(k-1) x||_oo, together with k.
    Well defined because every generator entry is in ]0,1[: the sup-norm
    strictly decreases under forward iteration and increases backward.
    """
    arr = np.asarray(x, dtype=float)
    if arr.shape != (model.dim,):
        raise DimensionMismatch(
            f"point has shape {arr.shape}, model dimension is {model.dim}"
        )
    if not arr.any():
        raise ZeroVector("the origin has no quotient representative")
    entries = np.asarray(model.generator.numeric_entries())
    cur = arr.copy()
    k = 0
    while np.max(np.abs(cur)) >= 1.0:
        cur = cur * entries
        k += 1
        if k > _MAX_SHIFTS or not np.all(np.isfinite(cur)):
            raise NonFinite(f"no representative within {_MAX_SHIFTS} forward shifts")
    while True:
        prev = cur / entries
        if np.max(np.abs(prev)) >= 1.0:
            break
        cur = prev
        k -= 1
        if -k > _MAX_SHIFTS or not np.all(np.isfinite(cur)):
            raise NonFinite(f"no representative within {_MAX_SHIFTS} backward shifts")
    return ProjectedPoint(cur, k)


def _shift_powers(model: QuotientModel, window: int) -> np.ndarray:
    """Matrix of generator entry powers d_i^k for k in [-window, window].

    Overflowing powers are clamped to a large finite value so that points
    carried out of range by the expansion never win a distance minimum but
    also never poison it with non-finite arithmetic.
    """
    ks = np.arange(-window, window + 1, dtype=float)
    entries = np.asarray(model.generator.numeric_entries())
    with np.errstate(over="ignore"):
        pw = entries[None, :] ** ks[:, None]
    return np.clip(pw, 0.0, 1e300)


def _orbit_rows(points: np.ndarray, powers: np.ndarray) -> np.ndarray:
    """All shifted copies of the given rows, k-major: (k, point) -> row."""
    return (points[None, :, :] * powers[:, None, :]).reshape(-1, points.shape[1])


def quotient_distance(
    model: QuotientModel, a: Sequence[float], b: Sequence[float], window: int = 40
) -> float:
    """Ambient-proxy distance between orbits, symmetric by construction.

    The larger of the two anchored minima
    min_{|k|<=window} |a - phi^k b| and min_{|k|<=window} |phi^k a - b|.
    Anchoring each argument in turn keeps the value exactly symmetric even
    though the generator is not a Euclidean isometry; taking the larger
    minimum (not the smaller) matters, because deep shifts contract any
    point toward the deleted origin and the smaller minimum would collapse
    to the norm of the nearest inner-annulus point, losing all resolution.
    Zero exactly on equal orbits.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.shape != (model.dim,):
        raise DimensionMismatch("points do not match the model dimension")
    powers = _shift_powers(model, window)
    da = np.min(np.linalg.norm(a[None, :] - b[None, :] * powers, axis=1))
    db = np.min(np.linalg.norm(a[None, :] * powers - b[None, :], axis=1))
    return float(max(da, db))


def pairwise_quotient_distances(
    model: QuotientModel, set_a: np.ndarray, set_b: np.ndarray, window: int = 40
) -> np.ndarray:
    """Matrix of symmetrized orbit-proxy distances between two sample sets."""
    set_a = np.atleast_2d(np.asarray(set_a, dtype=float))
    set_b = np.atleast_2d(np.asarray(set_b, dtype=float))
    powers = _shift_powers(model, window)
    k2 = powers.shape[0]
    orbit_b = _orbit_rows(set_b, powers)
    d1 = cdist(set_a, orbit_b).reshape(len(set_a), k2, len(set_b)).min(axis=1)
    orbit_a = _orbit_rows(set_a, powers)
    d2 = cdist(orbit_a, set_b).reshape(k2, len(set_a), len(set_b)).min(axis=0)
    return np.maximum(d1, d2)


def hausdorff_distance(
    model: QuotientModel, set_a: np.ndarray, set_b: np.ndarray, window: int = 40
) -> float:
    """Symmetric Hausdorff distance between finite sample sets, measured
    with the quotient orbit proxy."""
    dm = pairwise_quotient_distances(model, set_a, set_b, window)
    return float(max(dm.min(axis=1).max(), dm.min(axis=0).max()))


# ---------------------------------------------------------------------------
# The scale-invariant null plane and its parallel leaves
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LeafCheckVerdict:
    axes_preserved: bool
    offsets_moved: tuple[tuple[int, float], ...]  # (1-based axis, entry scale)
    all_offsets_moved: bool
    weyl_span_matches: bool
    sample_points: tuple[tuple[Fraction, ...], ...]

    @property
    def passed(self) -> bool:
        return self.axes_preserved and self.all_offsets_moved and self.weyl_span_matches


def invariant_leaf_check(
    model: QuotientModel, samples: int = 4, seed: int = 20240802
) -> LeafCheckVerdict:
    """Checks that the coordinate plane of axes 2 and 4 is the distinguished
    invariant leaf.

    (a) the generator maps the plane to itself (axes 2 and 4 scale into
        themselves); (b) every parallel leaf offset in another coordinate
    is moved, because the offset coordinate is scaled by an entry != 1;
    (c) at random rational points of the plane, the image of the Weyl
        operator is exactly the span of e2 and e4.
    """
    n = model.dim
    entries = model.generator.numeric_entries()
    axes_preserved = True
    for axis in (2, 4):
        image = model.generator.apply([1.0 if i == axis - 1 else 0.0 for i in range(n)])
        on_axis = image[axis - 1] > 0.0
        off_axis = all(image[i] == 0.0 for i in range(n) if i != axis - 1)
        axes_preserved = axes_preserved and on_axis and off_axis

    offsets = tuple(
        (j + 1, entries[j]) for j in range(n) if j not in (1, 3)
    )
    all_moved = all(abs(scale - 1.0) > 1e-12 for _, scale in offsets)

    rng = random.Random(seed)
    expected = _plane_basis_rows(n)
    span_ok = True
    points = []
    for _ in range(samples):
        u = Fraction(rng.randint(1, 9), rng.randint(1, 9)) * rng.choice((1, -1))
        v = Fraction(rng.randint(1, 9), rng.randint(1, 9)) * rng.choice((1, -1))
        point = tuple(
            u if i == 1 else v if i == 3 else Fraction(0) for i in range(n)
        )
        points.append(point)
        basis = weyl_image_at(model.report, point)
        span_ok = span_ok and _rows_match(basis, expected)
    return LeafCheckVerdict(
        axes_preserved=axes_preserved,
        offsets_moved=offsets,
        all_offsets_moved=all_moved,
        weyl_span_matches=span_ok,
        sample_points=tuple(points),
    )


def _plane_basis_rows(n: int) -> list[list[Fraction]]:
    rows = []
    for axis in (2, 4):
        rows.append([Fraction(1) if i == axis - 1 else Fraction(0) for i in range(n)])
    return rows


def _rows_match(got, expected) -> bool:
    if len(got) != len(expected):
        return False
    return all(
        list(map(Fraction, row)) == exp for row, exp in zip(got, expected)
    )


# ---------------------------------------------------------------------------
# Closed lightlike geodesics and their projective holonomy
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClosedGeodesicDescriptor:
    tag: str  # gamma+/- for axis 2, delta+/- for axis 4
    axis: int  # 1-based coordinate axis
    sign: int
    base_point: tuple[int, ...]
    direction: tuple[int, ...]
    multiplier: ProjectiveClass
    multiplier_exact: ExactScalar


def closed_lightlike_geodesics(model: QuotientModel) -> list[ClosedGeodesicDescriptor]:
    """The four closed lightlike geodesics: the positive and negative rays
    of axes 2 and 4.

    Each descriptor is verified on construction: the direction is exactly
    null, every Christoffel symbol with both lower indices in {2, 4}
    vanishes identically (so the rays and all lines in the invariant plane
    are affinely parametrized geodesics), and the generator maps each ray
    to itself with a positive parameter scale, which closes the curve in
    the quotient.
    """
    n = model.dim
    gamma = model.report.christoffel
    for k in range(n):
        for a in (1, 3):
            for b in (1, 3):
                if not gamma[k][a][b].is_zero:
                    raise MismatchBetweenMethods(
                        "invariant-plane Christoffel symbols do not vanish"
                    )
    entries = model.generator.numeric_entries()
    out = []
    for axis, label, exact in (
        (2, "gamma", ExactScalar.exp_term(3, 0)),
        (4, "delta", ExactScalar.exp_term(0, 3)),
    ):
        scale = entries[axis - 1]
        if not (0.0 < scale < 1.0):
            raise InvalidSignature(f"axis-{axis} entry {scale} not contracting")
        for sign in (1, -1):
            direction = tuple(sign if i == axis - 1 else 0 for i in range(n))
            if lightlike_norm_exact(model.metric, direction, direction) != 0:
                raise MismatchBetweenMethods(f"axis-{axis} ray is not lightlike")
            out.append(
                ClosedGeodesicDescriptor(
                    tag=f"{label}{'+' if sign > 0 else '-'}",
                    axis=axis,
                    sign=sign,
                    base_point=direction,
                    direction=direction,
                    multiplier=ProjectiveClass(scale),
                    multiplier_exact=exact,
                )
            )
    return out


@dataclass(frozen=True)
class HolonomyCrossCheck:
    generator_value: float
    transport_value: float
    fit_residual: float

    @property
    def discrepancy(self) -> float:
        return abs(self.generator_value - self.transport_value)


def holonomy_cross_check(
    model: QuotientModel,
    geod: ClosedGeodesicDescriptor,
    transport_points: int = 256,
) -> HolonomyCrossCheck:
    """Projective holonomy of a closed geodesic, two independent ways.

    Route one reads the generator entry along the axis: the deck map scales
    the ray parameter by that entry, and an affine parameter is projective
    here, so the entry is the multiplier.

    Route two transports the projective parameter around the loop: it
    integrates u'' + (V/2) u = 0 with V built from the exact Ricci tensor
    along the ray (identically zero for the flagship metric, but evaluated,
    not assumed), over a geometric grid covering two fundamental periods,
    reads off the return map p(s) -> p(mu s) at matched grid points, fits a
    Moebius map to those pairs, and extracts its multiplier from the
    conjugation invariant trace^2/det.
    """
    mu_gen = model.generator.numeric_entries()[geod.axis - 1]
    n = model.dim
    m = int(transport_points)
    if m < 8:
        raise ValueError("transport needs at least 8 grid points per period")

    direction = np.asarray(geod.direction, dtype=float)
    ric = [
        [
            CompiledRational(model.report.ricci[i][j])
            if not model.report.ricci[i][j].is_zero
            else None
            for j in range(n)
        ]
        for i in range(n)
    ]
    factor = -2.0 / (n - 2)

    def potential(s: float) -> float:
        x = s * direction
        total = 0.0
        for i in range(n):
            for j in range(n):
                e = ric[i][j]
                if e is not None:
                    total += e(x) * direction[i] * direction[j]
        return factor * total

    # geometric grid from s = 1 down to s = mu^2; the deck map lands grid
    # point j on grid point j + m, so no interpolation enters the return map
    grid = mu_gen ** (np.arange(0, 2 * m + 1) / m)
    res = projective_parameter_on_grid(potential, grid)
    z = res.p[: m + 1]
    w = res.p[m : 2 * m + 1]
    keep = np.isfinite(z) & np.isfinite(w)
    if keep.sum() < 3:
        raise MismatchBetweenMethods("too few usable transport samples")
    fitted = fit_mobius(z[keep], w[keep])
    residual = mobius_fit_residual(fitted, z[keep], w[keep])
    mu_transport = mobius_multiplier(fitted).multiplier
    return HolonomyCrossCheck(
        generator_value=mu_gen,
        transport_value=mu_transport,
        fit_residual=residual,
    )


def holonomy_multiplier(
    model: QuotientModel,
    geod: ClosedGeodesicDescriptor,
    transport_points: int = 256,
    tol: float = 1e-12,
) -> ProjectiveClass:
    """Multiplier of the closed geodesic, cross-validated both ways; raises
    MismatchBetweenMethods when the two routes disagree beyond tol."""
    check = holonomy_cross_check(model, geod, transport_points)
    if check.discrepancy > tol or check.fit_residual > tol:
        raise MismatchBetweenMethods(
            f"generator entry {check.generator_value!r} vs transported "
            f"{check.transport_value!r} (fit residual {check.fit_residual:.3e})"
        )
    return ProjectiveClass(check.generator_value)


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InvariantPair:
    """Ordered pair of holonomy multipliers (axis-2 value, axis-4 value).

    The order is canonical: admissibility forces alpha < beta, hence the
    axis-2 multiplier e^{3 alpha} is strictly the smaller one.
    """

    mu_gamma: float
    mu_delta: float
    exact_gamma: ExactScalar
    exact_delta: ExactScalar

    def values(self) -> tuple[float, float]:
        return (self.mu_gamma, self.mu_delta)


def classify_model(model: QuotientModel) -> InvariantPair:
    geods = closed_lightlike_geodesics(model)
    by_axis = {g.axis: g for g in geods}
    pair = InvariantPair(
        mu_gamma=by_axis[2].multiplier.multiplier,
        mu_delta=by_axis[4].multiplier.multiplier,
        exact_gamma=by_axis[2].multiplier_exact,
        exact_delta=by_axis[4].multiplier_exact,
    )
    if not pair.mu_gamma < pair.mu_delta:
        raise MismatchBetweenMethods(
            "canonical multiplier order violated; exponents not admissible?"
        )
    return pair


def models_equivalent(
    m1: QuotientModel, m2: QuotientModel, tol: float = 1e-12
) -> bool:
    """Whether two admissible models carry the same invariant pair.

    The exponent-to-multiplier map is injective on the admissible region,
    so equal pairs mean equal parameters and genuinely equivalent models.
    """
    if m1.signature != m2.signature:
        raise SignatureMismatch(
            f"cannot compare signatures {m1.signature} and {m2.signature}"
        )
    if m1.exponents == m2.exponents:
        return True
    p1, p2 = classify_model(m1), classify_model(m2)
    return (
        abs(p1.mu_gamma - p2.mu_gamma) <= tol
        and abs(p1.mu_delta - p2.mu_delta) <= tol
    )


# ---------------------------------------------------------------------------
# Essentiality witness
# ---------------------------------------------------------------------------


def box_samples(dim: int, grid_per_axis: int) -> np.ndarray:
    """Regular grid on the open-box witness region: every coordinate in
    [-1/2, 1/2] except x3 in [1/2, 3/2]."""
    if grid_per_axis < 3:
        raise ValueError("grid must be at least 3 per axis")
    axes = [
        np.linspace(0.5, 1.5, grid_per_axis)
        if j == 2
        else np.linspace(-0.5, 0.5, grid_per_axis)
        for j in range(dim)
    ]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def segment_samples(dim: int, grid_per_axis: int) -> np.ndarray:
    """The target segment sampled at the same x3 stations as the box grid.

    The box and the segment share their x3 discretization on purpose: the
    flowed box samples can only accumulate on the sampled stations, so
    matching stations is what makes the sampled Hausdorff distance track
    the continuum limit instead of flooring at half the station spacing.
    """
    stations = np.linspace(0.5, 1.5, grid_per_axis)
    out = np.zeros((grid_per_axis, dim))
    out[:, 2] = stations
    return out


@dataclass(frozen=True)
class EssentialityWitness:
    samples: tuple[tuple[float, float], ...]  # (t, hausdorff distance)
    resolution: float
    window: int
    grid_per_axis: int

    @property
    def t_values(self) -> tuple[float, ...]:
        return tuple(t for t, _ in self.samples)

    @property
    def distances(self) -> tuple[float, ...]:
        return tuple(d for _, d in self.samples)

    def strictly_decreasing(self) -> bool:
        d = self.distances
        return all(b < a for a, b in zip(d, d[1:]))

    def write_csv(self, fh) -> None:
        fh.write("t,hausdorff,resolution\n")
        for t, d in self.samples:
            fh.write(
                f"{format(t, '.17g')},{format(d, '.17g')},"
                f"{format(self.resolution, '.17g')}\n"
            )


def essentiality_witness(
    model: QuotientModel,
    t_values: Sequence[float],
    grid_per_axis: int = 5,
    window: int = 40,
    threads: int | None = None,
) -> EssentialityWitness:
    """Hausdorff distance between the flowed box image and the segment.

    For each t: the box grid is pushed through the contraction flow at time
    t, every image point is canonicalized, and the symmetric Hausdorff
    distance to the canonicalized segment stations is computed with the
    orbit proxy.  The distances are reported as-is; any claim about their
    decay belongs to the caller.  The stated resolution is the covering
    radius of the box grid (half a cell diagonal): distances below it are
    indistinguishable from sampling error.
    """
    ts = [float(t) for t in t_values]
    if not ts:
        raise ValueError("need at least one t value")
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise ValueError("t values must be strictly increasing")
    if window < 1:
        raise ValueError("window must be at least 1")
    n = model.dim
    box = box_samples(n, grid_per_axis)
    stations = segment_samples(n, grid_per_axis)
    target = np.stack([project_point(model, row).point for row in stations])
    spacing = 1.0 / (grid_per_axis - 1)
    resolution = 0.5 * spacing * np.sqrt(n)

    def one(t: float) -> float:
        flow = np.asarray(essential_flow(t, n).numeric_entries())
        flowed = box * flow
        canon = np.stack([project_point(model, row).point for row in flowed])
        return hausdorff_distance(model, canon, target, window)

    workers = worker_count(threads, jobs=len(ts))
    if workers == 1 or len(ts) == 1:
        dists = [one(t) for t in ts]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            dists = list(pool.map(one, ts))
    return EssentialityWitness(
        samples=tuple(zip(ts, dists)),
        resolution=float(resolution),
        window=window,
        grid_per_axis=grid_per_axis,
    )


# ---------------------------------------------------------------------------
# Report payload
# ---------------------------------------------------------------------------


def model_description(model: QuotientModel) -> dict:
    """Plain-data description used by the command-line reports."""
    pair = classify_model(model)
    return {
        "signature": [model.p, model.q],
        "alpha": model.exponents.alpha,
        "beta": model.exponents.beta,
        "generator_entries": model.generator.numeric_entries(),
        "multiplier_gamma": pair.mu_gamma,
        "multiplier_delta": pair.mu_delta,
    }
