"""Numerical geodesics, Schwarzian derivatives, projective parameters.

The affine geodesic equation  x''^k = -Gamma^k_{ij} x'^i x'^j  is integrated
with the classical fixed-step fourth-order Runge-Kutta scheme; Christoffel
symbols come compiled from the exact pipeline, so the only approximation is
the time stepping.  Lightlike norms are monitored along the way: they are
conserved by the flow, so their drift measures integration error.

Projective parameters: a reparametrization p of a geodesic is projective
when its Schwarzian derivative satisfies {p, s} = V with
V = -2/(n-2) Ric(gamma', gamma').  Rather than integrating the third-order
Schwarzian equation directly, we use the classical reduction: if
u'' + (V/2) u = 0 and u1, u2 are the solutions with (u1, u1', u2, u2') =
(0, 1, 1, 0) at s0, then p = u1/u2 satisfies {p, s} = V with p(s0) = 0,
p'(s0) = 1.  Zeros of u2 are not failures: they are the boundaries of the
projective charts, and are reported as such.

Moebius maps are handled as 2x2 real matrices up to scale.  The multiplier
of a hyperbolic map is extracted from the conjugation invariant
trace^2/det = mu + 1/mu + 2, taking the root in ]0,1[.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DerivativeTooSmall,
    DimensionMismatch,
    NonFinite,
    NotHyperbolic,
    PoleOnPath,
    ZeroVector,
)
from .exact import Polynomial, RationalFunction
from .tensor import CurvatureReport, MetricSpec, curvature_report

_POLE_TOL = 1e-12


# ---------------------------------------------------------------------------
# Compiled float evaluators for the exact objects
# ---------------------------------------------------------------------------


class CompiledPolynomial:
    """Float-specialized polynomial: coefficients evaluated once."""

    __slots__ = ("terms",)

    def __init__(self, poly: Polynomial, params: tuple[float, float] | None = None):
        self.terms = []
        for e, c in poly.terms.items():
            coeff = float(c.as_fraction()) if params is None else c.evaluate(*params)
            monos = tuple((i, k) for i, k in enumerate(e) if k)
            self.terms.append((coeff, monos))

    def __call__(self, x: Sequence[float]) -> float:
        total = 0.0
        for c, monos in self.terms:
            m = c
            for i, k in monos:
                m *= x[i] ** k
            total += m
        return total


class CompiledRational:
    __slots__ = ("num", "den", "trivial_den")

    def __init__(self, rf: RationalFunction, params: tuple[float, float] | None = None):
        self.num = CompiledPolynomial(rf.num, params)
        self.den = CompiledPolynomial(rf.den, params)
        self.trivial_den = rf.is_polynomial()

    def __call__(self, x: Sequence[float]) -> float:
        nv = self.num(x)
        if self.trivial_den:
            return nv
        dv = self.den(x)
        if abs(dv) < _POLE_TOL:
            raise PoleOnPath(f"denominator {dv:.3e} at x = {list(x)}")
        return nv / dv


class MetricEvaluator:
    """Float metric matrix and quadratic form g(v, v) at a point."""

    def __init__(self, metric: MetricSpec, params: tuple[float, float] | None = None):
        self.dim = metric.dim
        self._entries = [
            [
                CompiledPolynomial(metric.components[i][j], params)
                if not metric.components[i][j].is_zero
                else None
                for j in range(metric.dim)
            ]
            for i in range(metric.dim)
        ]

    def matrix(self, x: Sequence[float]) -> np.ndarray:
        n = self.dim
        out = np.zeros((n, n))
        for i in range(n):
            for j in range(i, n):
                ent = self._entries[i][j]
                if ent is not None:
                    out[i, j] = out[j, i] = ent(x)
        return out

    def norm(self, x: Sequence[float], v: Sequence[float]) -> float:
        n = self.dim
        total = 0.0
        for i in range(n):
            for j in range(i, n):
                ent = self._entries[i][j]
                if ent is None:
                    continue
                contrib = ent(x) * v[i] * v[j]
                total += contrib if i == j else 2.0 * contrib
        return total


class ChristoffelEvaluator:
    """Compiled nonzero Christoffel components, for the geodesic RHS."""

    def __init__(self, report: CurvatureReport, params: tuple[float, float] | None = None):
        self.dim = report.metric.dim
        self._items: list[tuple[int, int, int, float, CompiledRational]] = []
        n = self.dim
        for k in range(n):
            for i in range(n):
                for j in range(i, n):
                    rf = report.christoffel[k][i][j]
                    if rf.is_zero:
                        continue
                    weight = 1.0 if i == j else 2.0
                    self._items.append((k, i, j, weight, CompiledRational(rf, params)))

    def acceleration(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        acc = np.zeros(self.dim)
        for k, i, j, w, rf in self._items:
            acc[k] -= w * rf(x) * v[i] * v[j]
        return acc


# ---------------------------------------------------------------------------
# Lightlike checks
# ---------------------------------------------------------------------------


def lightlike_norm_exact(metric: MetricSpec, x: Sequence[Fraction | int], v: Sequence[Fraction | int]) -> Fraction:
    """g_x(v, v) evaluated exactly at rational position and velocity."""
    gm = metric.evaluate_exact(x)
    n = metric.dim
    total = Fraction(0)
    for i in range(n):
        for j in range(n):
            if gm[i][j]:
                total += gm[i][j] * Fraction(v[i]) * Fraction(v[j])
    return total


def is_lightlike(
    metric: MetricSpec,
    x: Sequence,
    v: Sequence,
    tol: float = 0.0,
    params: tuple[float, float] | None = None,
) -> bool:
    """Whether v is null at x.  With rational inputs and tol == 0 the check
    is exact; otherwise the compiled float norm is compared against tol."""
    if not any(v):
        raise ZeroVector("the zero vector is not a lightlike direction")
    exactable = (
        tol == 0.0
        and metric.is_rational
        and all(isinstance(c, (int, Fraction)) for c in x)
        and all(isinstance(c, (int, Fraction)) for c in v)
    )
    if exactable:
        return lightlike_norm_exact(metric, x, v) == 0
    ev = MetricEvaluator(metric, params)
    return abs(ev.norm([float(c) for c in x], [float(c) for c in v])) <= tol


# ---------------------------------------------------------------------------
# Geodesic integration
# ---------------------------------------------------------------------------


@dataclass
class GeodesicPath:
    s: np.ndarray
    x: np.ndarray
    v: np.ndarray
    null_norm: np.ndarray
    # projective extension (present when requested)
    u1: np.ndarray | None = None
    u2: np.ndarray | None = None
    p: np.ndarray | None = None
    chart_ends: list[int] = field(default_factory=list)

    @property
    def null_drift(self) -> float:
        return float(np.max(np.abs(self.null_norm - self.null_norm[0])))


def integrate_geodesic(
    metric: MetricSpec | CurvatureReport,
    x0: Sequence[float],
    v0: Sequence[float],
    step: float,
    nsteps: int,
    params: tuple[float, float] | None = None,
    with_projective: bool = False,
    u_init: tuple[float, float, float, float] = (0.0, 1.0, 1.0, 0.0),
) -> GeodesicPath:
    """Fixed-step RK4 integration of the affine geodesic equation.

    With ``with_projective`` the linear system u'' + (V/2) u = 0 rides along
    in the same Runge-Kutta stages, V = -2/(n-2) Ric(gamma', gamma')
    evaluated from the exact Ricci tensor at the stage states, and the
    projective parameter p = u1/u2 plus its chart boundaries are attached to
    the result.
    """
    report = metric if isinstance(metric, CurvatureReport) else curvature_report(metric)
    spec = report.metric
    n = spec.dim
    if len(x0) != n or len(v0) != n:
        raise DimensionMismatch("initial state does not match metric dimension")
    if step <= 0 or nsteps < 1:
        raise ValueError("step must be positive and nsteps >= 1")

    chris = ChristoffelEvaluator(report, params)
    mev = MetricEvaluator(spec, params)
    ric = [
        [
            CompiledRational(report.ricci[i][j], params)
            if not report.ricci[i][j].is_zero
            else None
            for j in range(n)
        ]
        for i in range(n)
    ]
    ric_factor = -2.0 / (n - 2) if n > 2 else 0.0

    def potential(x: np.ndarray, v: np.ndarray) -> float:
        total = 0.0
        for i in range(n):
            for j in range(n):
                e = ric[i][j]
                if e is not None:
                    total += e(x) * v[i] * v[j]
        return ric_factor * total

    dim_state = 2 * n + (4 if with_projective else 0)

    def rhs(y: np.ndarray) -> np.ndarray:
        x, v = y[:n], y[n : 2 * n]
        out = np.empty(dim_state)
        out[:n] = v
        out[n : 2 * n] = chris.acceleration(x, v)
        if with_projective:
            u1, w1, u2, w2 = y[2 * n : 2 * n + 4]
            half_v = 0.5 * potential(x, v)
            out[2 * n : 2 * n + 4] = (w1, -half_v * u1, w2, -half_v * u2)
        return out

    y = np.empty(dim_state)
    y[:n] = np.asarray(x0, dtype=float)
    y[n : 2 * n] = np.asarray(v0, dtype=float)
    if with_projective:
        y[2 * n :] = u_init

    ss = np.empty(nsteps + 1)
    xs = np.empty((nsteps + 1, n))
    vs = np.empty((nsteps + 1, n))
    us = np.empty((nsteps + 1, 4)) if with_projective else None
    norms = np.empty(nsteps + 1)

    def record(idx: int, yv: np.ndarray) -> None:
        ss[idx] = idx * step
        xs[idx] = yv[:n]
        vs[idx] = yv[n : 2 * n]
        norms[idx] = mev.norm(yv[:n], yv[n : 2 * n])
        if with_projective:
            us[idx] = yv[2 * n :]

    record(0, y)
    h = step
    for m in range(1, nsteps + 1):
        try:
            k1 = rhs(y)
            k2 = rhs(y + 0.5 * h * k1)
            k3 = rhs(y + 0.5 * h * k2)
            k4 = rhs(y + h * k3)
        except PoleOnPath as exc:
            raise PoleOnPath(str(exc), step=m) from None
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(y)):
            raise NonFinite(f"non-finite state after step {m}", step=m)
        record(m, y)

    path = GeodesicPath(s=ss, x=xs, v=vs, null_norm=norms)
    if with_projective:
        path.u1 = us[:, 0]
        path.u2 = us[:, 2]
        with np.errstate(divide="ignore", invalid="ignore"):
            path.p = us[:, 0] / us[:, 2]
        path.chart_ends = _sign_changes(us[:, 2])
    return path


def _sign_changes(u: np.ndarray) -> list[int]:
    """Indices i such that u crosses zero at or between samples i and i+1."""
    out = []
    for i in range(len(u) - 1):
        if u[i] == 0.0 or (u[i] > 0) != (u[i + 1] > 0):
            out.append(i)
    if len(u) and u[-1] == 0.0:
        out.append(len(u) - 1)
    return out


def write_trajectory_csv(path: GeodesicPath, fh) -> None:
    """Delimited trajectory: s, coordinates, velocities, null norm."""
    n = path.x.shape[1]
    header = (
        ["s"]
        + [f"x{i + 1}" for i in range(n)]
        + [f"v{i + 1}" for i in range(n)]
        + ["nullnorm"]
    )
    fh.write(",".join(header) + "\n")
    for idx in range(len(path.s)):
        row = (
            [path.s[idx]]
            + list(path.x[idx])
            + list(path.v[idx])
            + [path.null_norm[idx]]
        )
        fh.write(",".join(format(val, ".17g") for val in row) + "\n")


def write_projective_csv(path: GeodesicPath, fh) -> None:
    """Delimited projective series: s, u1, u2, p (blank p at chart ends)."""
    if path.p is None:
        raise ValueError("path carries no projective data")
    fh.write("s,u1,u2,p\n")
    for idx in range(len(path.s)):
        u2 = path.u2[idx]
        pval = (
            format(path.p[idx], ".17g")
            if abs(u2) > _POLE_TOL and math.isfinite(path.p[idx])
            else ""
        )
        fh.write(
            f"{format(path.s[idx], '.17g')},{format(path.u1[idx], '.17g')},"
            f"{format(u2, '.17g')},{pval}\n"
        )


# ---------------------------------------------------------------------------
# Schwarzian machinery
# ---------------------------------------------------------------------------


def schwarzian_of_samples(
    values: np.ndarray, step: float, min_slope: float = 1e-8
) -> np.ndarray:
    """{p, s} on the interior of a uniform grid via central differences.

    Input has N samples; output has N - 4 values aligned with indices
    2..N-3.  Raises DerivativeTooSmall when |p'| falls under ``min_slope``,
    where the quotient is meaningless.
    """
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or len(v) < 5:
        raise ValueError("need at least 5 samples on a uniform grid")
    h = float(step)
    p1 = (v[3:-1] - v[1:-3]) / (2 * h)
    p2 = (v[3:-1] - 2 * v[2:-2] + v[1:-3]) / (h * h)
    p3 = (v[4:] - 2 * v[3:-1] + 2 * v[1:-3] - v[:-4]) / (2 * h**3)
    if np.min(np.abs(p1)) < min_slope:
        raise DerivativeTooSmall(
            f"|p'| dropped to {np.min(np.abs(p1)):.3e} (< {min_slope:.1e})"
        )
    r = p2 / p1
    return p3 / p1 - 1.5 * r * r


def _central_derivatives(v: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """First three s-derivatives on the common interior grid (indices 2..N-3)."""
    d1 = (v[3:-1] - v[1:-3]) / (2 * h)
    d2 = (v[3:-1] - 2 * v[2:-2] + v[1:-3]) / (h * h)
    d3 = (v[4:] - 2 * v[3:-1] + 2 * v[1:-3] - v[:-4]) / (2 * h**3)
    return d1, d2, d3


def schwarzian_chain_residual(
    p_samples: np.ndarray, u_samples: np.ndarray, step: float, min_slope: float = 1e-8
) -> float:
    """Max residual of the cocycle identity {p,u} = ({p,s} - {u,s}) (ds/du)^2.

    The left side is computed independently, by converting the s-grid
    derivatives of p into u-derivatives (quotient/Faa di Bruno formulas) and
    forming the Schwarzian in u; the right side uses the two grid
    Schwarzians.  Agreement is a differential-level consistency check of
    both code paths.
    """
    p = np.asarray(p_samples, dtype=float)
    u = np.asarray(u_samples, dtype=float)
    if p.shape != u.shape:
        raise DimensionMismatch("p and u sample arrays differ in shape")
    h = float(step)
    p1, p2, p3 = _central_derivatives(p, h)
    u1, u2, u3 = _central_derivatives(u, h)
    if np.min(np.abs(u1)) < min_slope or np.min(np.abs(p1)) < min_slope:
        raise DerivativeTooSmall("derivative too small for the chain-rule check")
    # direct Schwarzian of p with respect to u
    dp = p1 / u1
    d2p = (p2 * u1 - p1 * u2) / u1**3
    d3p = ((p3 * u1 - p1 * u3) * u1 - 3.0 * u2 * (p2 * u1 - p1 * u2)) / u1**5
    r = d2p / dp
    direct = d3p / dp - 1.5 * r * r
    # chain-rule form
    sp = p3 / p1 - 1.5 * (p2 / p1) ** 2
    su = u3 / u1 - 1.5 * (u2 / u1) ** 2
    chained = (sp - su) / u1**2
    return float(np.max(np.abs(direct - chained)))


# ---------------------------------------------------------------------------
# Projective parameter via the linear second-order reduction
# ---------------------------------------------------------------------------


@dataclass
class ProjectiveParameterResult:
    s: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    p: np.ndarray
    chart_ends: list[int]

    @property
    def crossed_chart(self) -> bool:
        return bool(self.chart_ends)


def projective_parameter_on_grid(
    potential: Callable[[float], float],
    s_grid: np.ndarray,
    u_init: tuple[float, float, float, float] = (0.0, 1.0, 1.0, 0.0),
) -> ProjectiveParameterResult:
    """Integrate u'' + (V/2) u = 0 over an explicit (possibly nonuniform)
    grid with RK4 and return p = u1/u2 with chart boundaries marked."""
    s_grid = np.asarray(s_grid, dtype=float)
    m = len(s_grid)
    if m < 2:
        raise ValueError("grid needs at least two points")
    ys = np.empty((m, 4))
    y = np.array(u_init, dtype=float)
    ys[0] = y

    def rhs(s: float, yv: np.ndarray) -> np.ndarray:
        half_v = 0.5 * potential(s)
        return np.array([yv[1], -half_v * yv[0], yv[3], -half_v * yv[2]])

    for idx in range(1, m):
        s_prev = s_grid[idx - 1]
        h = s_grid[idx] - s_prev
        k1 = rhs(s_prev, y)
        k2 = rhs(s_prev + 0.5 * h, y + 0.5 * h * k1)
        k3 = rhs(s_prev + 0.5 * h, y + 0.5 * h * k2)
        k4 = rhs(s_prev + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(y)):
            raise NonFinite(f"non-finite projective state after step {idx}", step=idx)
        ys[idx] = y
    u1, u2 = ys[:, 0], ys[:, 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        p = u1 / u2
    return ProjectiveParameterResult(
        s=s_grid, u1=u1, u2=u2, p=p, chart_ends=_sign_changes(u2)
    )


def solve_projective_parameter(
    ric_along: Callable[[float], float],
    dim: int,
    s0: float,
    s1: float,
    step: float,
    u_init: tuple[float, float, float, float] = (0.0, 1.0, 1.0, 0.0),
) -> ProjectiveParameterResult:
    """Projective parameter p with {p, s} = -2/(dim-2) Ric(gamma', gamma')
    along [s0, s1] (either direction), uniform step."""
    if dim < 3:
        raise DimensionMismatch("projective normalization needs dim >= 3")
    if step <= 0:
        raise ValueError("step must be positive")
    nsteps = max(1, round(abs(s1 - s0) / step))
    grid = np.linspace(s0, s1, nsteps + 1)
    factor = -2.0 / (dim - 2)
    return projective_parameter_on_grid(
        lambda s: factor * ric_along(s), grid, u_init
    )


# ---------------------------------------------------------------------------
# Moebius maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MobiusMap:
    """z -> (a z + b)/(c z + d), stored with |det| = 1 and a canonical sign."""

    a: float
    b: float
    c: float
    d: float

    @staticmethod
    def from_matrix(a: float, b: float, c: float, d: float) -> "MobiusMap":
        det = a * d - b * c
        if det == 0.0 or not math.isfinite(det):
            raise ValueError("singular or non-finite coefficient matrix")
        scale = 1.0 / math.sqrt(abs(det))
        a, b, c, d = a * scale, b * scale, c * scale, d * scale
        for lead in (a, b, c, d):
            if lead != 0.0:
                if lead < 0.0:
                    a, b, c, d = -a, -b, -c, -d
                break
        return MobiusMap(a, b, c, d)

    @staticmethod
    def identity() -> "MobiusMap":
        return MobiusMap(1.0, 0.0, 0.0, 1.0)

    @staticmethod
    def scaling(mu: float) -> "MobiusMap":
        if mu <= 0:
            raise ValueError("scaling maps of the positive ray need mu > 0")
        return MobiusMap.from_matrix(mu, 0.0, 0.0, 1.0)

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def apply(self, z: float) -> float:
        den = self.c * z + self.d
        if den == 0.0:
            return math.inf
        return (self.a * z + self.b) / den

    def compose(self, other: "MobiusMap") -> "MobiusMap":
        """self after other (matrix product self @ other)."""
        return MobiusMap.from_matrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "MobiusMap":
        return MobiusMap.from_matrix(self.d, -self.b, -self.c, self.a)

    def conjugate_by(self, h: "MobiusMap") -> "MobiusMap":
        return h.compose(self).compose(h.inverse())

    def trace_sq_over_det(self) -> float:
        return (self.a + self.d) ** 2 / self.det


def fit_mobius(z: Sequence[float], w: Sequence[float]) -> MobiusMap:
    """Least-squares Moebius map through sample pairs (z_i, w_i).

    Solves the homogeneous system  a z + b - c z w - d w = 0  for the
    smallest singular vector; needs at least three distinct pairs.
    """
    z = np.asarray(z, dtype=float)
    w = np.asarray(w, dtype=float)
    if z.shape != w.shape or z.ndim != 1 or len(z) < 3:
        raise ValueError("need at least three matched sample pairs")
    rows = np.stack([z, np.ones_like(z), -z * w, -w], axis=1)
    _, _, vt = np.linalg.svd(rows)
    a, b, c, d = vt[-1]
    return MobiusMap.from_matrix(a, b, c, d)


def mobius_fit_residual(m: MobiusMap, z: Sequence[float], w: Sequence[float]) -> float:
    return max(abs(m.apply(zi) - wi) for zi, wi in zip(z, w))


@dataclass(frozen=True)
class ProjectiveClass:
    """Conjugacy invariant of a hyperbolic parameter translation: the
    multiplier in ]0,1[."""

    multiplier: float

    def __post_init__(self):
        if not (0.0 < self.multiplier < 1.0):
            raise ValueError(
                f"multiplier {self.multiplier} outside the contracting range ]0,1["
            )


def mobius_multiplier(m: MobiusMap, tol: float = 1e-9) -> ProjectiveClass:
    """Multiplier of a hyperbolic Moebius map, via trace^2/det.

    trace^2/det is conjugation invariant and equals mu + 1/mu + 2 for the
    normal form z -> mu z; hyperbolic means trace^2/det > 4.  The returned
    multiplier is the root in ]0,1[.
    """
    tau = m.trace_sq_over_det()
    if not tau > 4.0 + tol:
        raise NotHyperbolic(
            f"trace^2/det = {tau:.12g} is not above 4: no contracting multiplier"
        )
    c = tau - 2.0
    mu = (c - math.sqrt(c * c - 4.0)) / 2.0
    return ProjectiveClass(multiplier=mu)
