"""Metrics and exact curvature: Christoffel, Riemann, Ricci, scalar, Weyl.

Conventions, fixed once and used everywhere:

* Curvature operator  R(X, Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z
  - nabla_[X,Y] Z, with components  R(e_i, e_j) e_k = R^l_{kij} e_l  and

      R^l_{kij} = d_i Gamma^l_{jk} - d_j Gamma^l_{ik}
                  + Gamma^l_{im} Gamma^m_{jk} - Gamma^l_{jm} Gamma^m_{ik}.

* Ricci is the contraction Ric_{jk} = R^i_{kij}; scalar = g^{jk} Ric_{jk}.
* The (0,4) curvature used for the Weyl decomposition is
  A_{ijkl} = g(R(e_i, e_j) e_k, e_l); with these orderings the Weyl part is

      W4 = A - (P (*) g),   P = (Ric - scal/(2(n-1)) g) / (n-2),

  where (h (*) k)_{ijkl} = h_{jk} k_{il} + h_{il} k_{jk} - h_{ik} k_{jl}
  - h_{jl} k_{ik}; raising the last index recovers the (1,3) Weyl tensor,
  which is invariant under conformal rescaling of the metric.

* Signatures are written (p, q) with p the number of negative squares and q
  the number of positive squares of the diagonalized metric.

Everything here is exact: components are polynomials over the exponential
scalar ring and all derived tensors are reduced rational functions.  The
inverse metric is assembled from the adjugate over the determinant so each
curvature component costs exactly one fraction reduction.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import (
    DegenerateAtPoint,
    DegenerateMetric,
    DimensionMismatch,
    DimensionTooSmall,
    InvalidSignature,
    MetricParseError,
    SignatureMismatch,
)
from .exact import (
    ExactScalar,
    Polynomial,
    RationalFunction,
    fraction_over_power,
    parse_polynomial,
)

_F0 = Fraction(0)


# ---------------------------------------------------------------------------
# Metric specification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MetricSpec:
    """Symmetric polynomial metric on R^dim with declared signature (p, q)."""

    dim: int
    p: int
    q: int
    components: tuple[tuple[Polynomial, ...], ...]
    name: str = "custom"

    def __post_init__(self):
        n = self.dim
        if self.p + self.q != n:
            raise InvalidSignature(f"p + q = {self.p + self.q} does not match dim {n}")
        if len(self.components) != n or any(len(r) != n for r in self.components):
            raise DimensionMismatch("metric component matrix is not dim x dim")
        for i in range(n):
            for j in range(n):
                gij = self.components[i][j]
                if gij.nvars != n:
                    raise DimensionMismatch(
                        f"component ({i + 1},{j + 1}) over wrong variable count"
                    )
                if gij != self.components[j][i]:
                    raise DimensionMismatch(
                        f"metric not symmetric at ({i + 1},{j + 1})"
                    )

    def component(self, i: int, j: int) -> Polynomial:
        """1-based component g_ij."""
        return self.components[i - 1][j - 1]

    def evaluate_exact(self, point: Sequence[Fraction | int]) -> list[list[Fraction]]:
        """Component matrix at a rational point; requires rational entries."""
        out = []
        for row in self.components:
            out.append([entry.eval_exact(point).as_fraction() for entry in row])
        return out

    def evaluate_float(
        self, point: Sequence[float], params: tuple[float, float] | None = None
    ) -> list[list[float]]:
        return [
            [entry.eval_float(point, params) for entry in row]
            for row in self.components
        ]

    @property
    def is_rational(self) -> bool:
        return all(e.is_rational for row in self.components for e in row)


def build_g0(p: int, q: int) -> MetricSpec:
    """The flagship split-signature metric of type (p, q), 2 <= p <= q.

    In coordinates x1..xn (n = p + q):

        g = 2 dx1 dx2 + x3^2 dx1^2 + 2 dx3 dx4 + sum_{j>=5} eps_j dxj^2,

    with eps_j = +1 for the first q-2 extra coordinates and -1 for the
    remaining p-2.  It is Ricci-flat with nonzero Weyl tensor, and every
    diagonal exponential scaling with matched exponents acts on it
    conformally.
    """
    if p < 2 or q < p:
        raise InvalidSignature(f"require 2 <= p <= q, got ({p}, {q})")
    n = p + q
    zero = Polynomial.zero(n)
    one = Polynomial.one(n)
    comp = [[zero for _ in range(n)] for _ in range(n)]
    x3 = Polynomial.variable(n, 2)
    comp[0][0] = x3 * x3
    comp[0][1] = comp[1][0] = one
    comp[2][3] = comp[3][2] = one
    for k in range(4, n):
        eps = 1 if k - 4 < q - 2 else -1
        comp[k][k] = Polynomial.constant(n, eps)
    metric = MetricSpec(
        dim=n, p=p, q=q, components=tuple(tuple(r) for r in comp), name="g0"
    )
    verify_signature(metric, [_F0] * n)
    return metric


def flat_metric(p: int, q: int) -> MetricSpec:
    """Constant diagonal metric with p entries -1 followed by q entries +1."""
    if p < 0 or q < 0 or p + q < 1:
        raise InvalidSignature(f"bad signature ({p}, {q})")
    n = p + q
    zero = Polynomial.zero(n)
    comp = [[zero] * n for _ in range(n)]
    for k in range(n):
        comp[k][k] = Polynomial.constant(n, -1 if k < p else 1)
    return MetricSpec(n, p, q, tuple(tuple(r) for r in comp), name="flat")


def scale_metric(metric: MetricSpec, factor: Polynomial) -> MetricSpec:
    """Pointwise conformal rescaling factor * g (factor a polynomial)."""
    comp = tuple(
        tuple(factor * entry for entry in row) for row in metric.components
    )
    return MetricSpec(
        metric.dim, metric.p, metric.q, comp, name=f"scaled({metric.name})"
    )


# ---------------------------------------------------------------------------
# Signature at a point (exact congruence diagonalization)
# ---------------------------------------------------------------------------


def inertia(matrix: list[list[Fraction]]) -> tuple[int, int, int]:
    """(negative, positive, zero) counts of a symmetric rational matrix,
    by exact symmetric Gaussian elimination."""
    n = len(matrix)
    m = [[Fraction(x) for x in row] for row in matrix]
    neg = pos = 0
    for k in range(n):
        # choose a nonzero diagonal pivot, creating one if necessary
        piv = next((j for j in range(k, n) if m[j][j]), None)
        if piv is None:
            pair = next(
                (
                    (i, j)
                    for i in range(k, n)
                    for j in range(i + 1, n)
                    if m[i][j]
                ),
                None,
            )
            if pair is None:
                return neg, pos, n - k  # remaining block is identically zero
            i, j = pair
            for c in range(n):
                m[i][c] += m[j][c]
            for r in range(n):
                m[r][i] += m[r][j]
            piv = i
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
            for r in range(n):
                m[r][k], m[r][piv] = m[r][piv], m[r][k]
        d = m[k][k]
        if d > 0:
            pos += 1
        else:
            neg += 1
        for r in range(k + 1, n):
            f = m[r][k] / d
            if f:
                for c in range(k, n):
                    m[r][c] -= f * m[k][c]
        for c in range(k + 1, n):
            m[k][c] = _F0
    return neg, pos, 0


def signature_at(metric: MetricSpec, point: Sequence[Fraction | int]) -> tuple[int, int]:
    """Exact signature (p, q) of the metric at a rational point."""
    values = metric.evaluate_exact(point)
    neg, pos, zero = inertia(values)
    if zero:
        raise DegenerateAtPoint(
            f"metric degenerate at {tuple(point)}: {zero} null directions"
        )
    return neg, pos


def verify_signature(metric: MetricSpec, point: Sequence[Fraction | int]) -> None:
    got = signature_at(metric, point)
    if got != (metric.p, metric.q):
        raise SignatureMismatch(
            f"declared ({metric.p}, {metric.q}) but computed {got} at {tuple(point)}"
        )


# ---------------------------------------------------------------------------
# Determinant, adjugate, inverse
# ---------------------------------------------------------------------------


def _minor_det(mat, rows: tuple[int, ...], cols: tuple[int, ...], memo) -> Polynomial:
    if not rows:
        return Polynomial.one(mat[0][0].nvars)
    key = (rows, cols)
    cached = memo.get(key)
    if cached is not None:
        return cached
    r0 = rows[0]
    rest = rows[1:]
    acc = Polynomial.zero(mat[0][0].nvars)
    for pos, c in enumerate(cols):
        entry = mat[r0][c]
        if entry.is_zero:
            continue
        sub = _minor_det(mat, rest, cols[:pos] + cols[pos + 1 :], memo)
        term = entry * sub
        acc = acc + term if pos % 2 == 0 else acc - term
    memo[key] = acc
    return acc


def metric_determinant(metric: MetricSpec) -> Polynomial:
    n = metric.dim
    idx = tuple(range(n))
    return _minor_det(metric.components, idx, idx, {})


def metric_adjugate(metric: MetricSpec) -> list[list[Polynomial]]:
    """adj(g) with g * adj(g) = det(g) * I, computed from exact cofactors."""
    n = metric.dim
    idx = tuple(range(n))
    memo: dict = {}
    adj = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            rows = idx[:j] + idx[j + 1 :]
            cols = idx[:i] + idx[i + 1 :]
            minor = _minor_det(metric.components, rows, cols, memo)
            cof = minor if (i + j) % 2 == 0 else -minor
            adj[i][j] = cof
            adj[j][i] = cof  # adjugate of a symmetric matrix is symmetric
    return adj  # type: ignore[return-value]


def metric_inverse(metric: MetricSpec) -> list[list[RationalFunction]]:
    det = metric_determinant(metric)
    if det.is_zero:
        raise DegenerateMetric("metric determinant is the zero polynomial")
    adj = metric_adjugate(metric)
    n = metric.dim
    return [
        [RationalFunction(adj[i][j], det) for j in range(n)] for i in range(n)
    ]


# ---------------------------------------------------------------------------
# Curvature pipeline
# ---------------------------------------------------------------------------


@dataclass
class CurvatureReport:
    """All curvature data of one metric, exact.

    Index layout: christoffel[k][i][j] = Gamma^k_{ij},
    riemann[l][k][i][j] = R^l_{kij} (so R(e_i,e_j)e_k = sum_l R^l_{kij} e_l),
    weyl with the same layout.  ``weyl`` is None when dim < 4, where the
    tensor vanishes identically and supports no conformal conclusions.
    """

    metric: MetricSpec
    determinant: Polynomial
    inverse: list[list[RationalFunction]]
    christoffel: list[list[list[RationalFunction]]]
    riemann: list[list[list[list[RationalFunction]]]]
    ricci: list[list[RationalFunction]]
    scalar: RationalFunction

    weyl: list[list[list[list[RationalFunction]]]] | None

    # raw Weyl numerators: lowered W4_{ijkl} over det^3 and raised W^l_{kij}
    # over det^4.  Trace checks run on these without any fraction reduction.
    weyl_lowered_raw: list[list[list[list[Polynomial]]]] | None = None
    weyl_raw: list[list[list[list[Polynomial]]]] | None = None

    def is_ricci_flat(self) -> bool:
        return all(e.is_zero for row in self.ricci for e in row)


def curvature_report(metric: MetricSpec) -> CurvatureReport:
    """Run the full exact pipeline on one metric."""
    n = metric.dim
    det = metric_determinant(metric)
    if det.is_zero:
        raise DegenerateMetric("metric determinant is the zero polynomial")
    adj = metric_adjugate(metric)
    inverse = [
        [fraction_over_power(adj[i][j], det, 1) for j in range(n)] for i in range(n)
    ]

    g = metric.components
    dg = [
        [[g[i][j].derivative(l) for j in range(n)] for i in range(n)]
        for l in range(n)
    ]

    # Gamma^k_{ij} = (1/2) g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)
    # Raw numerators over the common denominator det keep the downstream
    # algebra polynomial until the single final reduction per component.
    half = Fraction(1, 2)
    gamma_num = [[[None] * n for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            tv = [
                dg[i][j][l] + dg[j][i][l] - dg[l][i][j]
                for l in range(n)
            ]
            for k in range(n):
                acc = Polynomial.zero(n)
                for l in range(n):
                    a = adj[k][l]
                    t = tv[l]
                    if a.is_zero or t.is_zero:
                        continue
                    acc = acc + a * t
                acc = acc.scalar_mul(half)
                gamma_num[k][i][j] = acc
                gamma_num[k][j][i] = acc
    christoffel = [
        [
            [fraction_over_power(gamma_num[k][i][j], det, 1) for j in range(n)]
            for i in range(n)
        ]
        for k in range(n)
    ]

    # R^l_{kij} raw over det^2:
    #   (d_i N^l_{jk}) det - N^l_{jk} (d_i det) - (d_j N^l_{ik}) det
    #   + N^l_{ik} (d_j det) + sum_m (N^l_{im} N^m_{jk} - N^l_{jm} N^m_{ik})
    ddet = [det.derivative(i) for i in range(n)]
    zero = Polynomial.zero(n)
    riemann_num = [[[[zero] * n for _ in range(n)] for _ in range(n)] for _ in range(n)]
    det2 = det * det
    for l in range(n):
        for k in range(n):
            for i in range(n):
                for j in range(i + 1, n):
                    njk, nik = gamma_num[l][j][k], gamma_num[l][i][k]
                    acc = zero
                    if not njk.is_zero:
                        acc = acc + njk.derivative(i) * det - njk * ddet[i]
                    if not nik.is_zero:
                        acc = acc - nik.derivative(j) * det + nik * ddet[j]
                    for m in range(n):
                        a, b = gamma_num[l][i][m], gamma_num[m][j][k]
                        if not (a.is_zero or b.is_zero):
                            acc = acc + a * b
                        a, b = gamma_num[l][j][m], gamma_num[m][i][k]
                        if not (a.is_zero or b.is_zero):
                            acc = acc - a * b
                    riemann_num[l][k][i][j] = acc
                    riemann_num[l][k][j][i] = -acc
    riemann = [
        [
            [
                [
                    fraction_over_power(riemann_num[l][k][i][j], det, 2, det2)
                    for j in range(n)
                ]
                for i in range(n)
            ]
            for k in range(n)
        ]
        for l in range(n)
    ]

    # Ric_{jk} = R^i_{kij}, raw over det^2
    ricci_num = [
        [
            sum(
                (riemann_num[i][k][i][j] for i in range(n)),
                start=zero,
            )
            for k in range(n)
        ]
        for j in range(n)
    ]
    ricci = [
        [fraction_over_power(ricci_num[j][k], det, 2, det2) for k in range(n)]
        for j in range(n)
    ]

    # scalar = g^{jk} Ric_{jk}, raw over det^3
    scal_num = zero
    for j in range(n):
        for k in range(n):
            a, b = adj[j][k], ricci_num[j][k]
            if not (a.is_zero or b.is_zero):
                scal_num = scal_num + a * b
    scalar = fraction_over_power(scal_num, det, 3, det2 * det)

    if n >= 4:
        weyl, w4_raw, weyl_raw = _weyl_from_raw(
            metric, adj, det, riemann_num, ricci_num, scal_num
        )
    else:
        weyl = w4_raw = weyl_raw = None

    return CurvatureReport(
        metric=metric,
        determinant=det,
        inverse=inverse,
        christoffel=christoffel,
        riemann=riemann,
        ricci=ricci,
        scalar=scalar,
        weyl=weyl,
        weyl_lowered_raw=w4_raw,
        weyl_raw=weyl_raw,
    )


def _weyl_from_raw(metric, adj, det, riemann_num, ricci_num, scal_num):
    """(1,3) Weyl tensor from the raw (numerator, det-power) curvature data."""
    n = metric.dim
    g = metric.components
    zero = Polynomial.zero(n)

    # A_{ijkl} = sum_m R^m_{kij} g_{ml}, raw over det^2
    a_num = [[[[zero] * n for _ in range(n)] for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(n):
                for l in range(n):
                    acc = zero
                    for m in range(n):
                        r, gm = riemann_num[m][k][i][j], g[m][l]
                        if not (r.is_zero or gm.is_zero):
                            acc = acc + r * gm
                    a_num[i][j][k][l] = acc
                    a_num[j][i][k][l] = -acc

    # Schouten P_{jk} raw over det^3 with the rational prefactors folded in:
    # P = (Ric - scal/(2(n-1)) g) / (n-2)
    c1 = Fraction(1, n - 2)
    c2 = Fraction(1, 2 * (n - 1))
    p_num = [[zero] * n for _ in range(n)]
    for j in range(n):
        for k in range(n):
            acc = zero
            if not ricci_num[j][k].is_zero:
                acc = ricci_num[j][k] * det
            if not (scal_num.is_zero or g[j][k].is_zero):
                acc = acc - (scal_num * g[j][k]).scalar_mul(c2)
            p_num[j][k] = acc.scalar_mul(c1)

    # W4_{ijkl} = A_{ijkl} - (P_{jk} g_{il} + P_{il} g_{jk}
    #                         - P_{ik} g_{jl} - P_{jl} g_{ik}), raw over det^3
    det2 = det * det
    det4 = det2 * det2

    def kn(jk, il, ik, jl):
        acc = zero
        pj, gi = p_num[jk[0]][jk[1]], g[il[0]][il[1]]
        if not (pj.is_zero or gi.is_zero):
            acc = acc + pj * gi
        pj, gi = p_num[il[0]][il[1]], g[jk[0]][jk[1]]
        if not (pj.is_zero or gi.is_zero):
            acc = acc + pj * gi
        pj, gi = p_num[ik[0]][ik[1]], g[jl[0]][jl[1]]
        if not (pj.is_zero or gi.is_zero):
            acc = acc - pj * gi
        pj, gi = p_num[jl[0]][jl[1]], g[ik[0]][ik[1]]
        if not (pj.is_zero or gi.is_zero):
            acc = acc - pj * gi
        return acc

    w4_num = [[[[zero] * n for _ in range(n)] for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(n):
                for l in range(n):
                    acc = a_num[i][j][k][l] * det - kn((j, k), (i, l), (i, k), (j, l))
                    w4_num[i][j][k][l] = acc
                    w4_num[j][i][k][l] = -acc

    # W^l_{kij} = sum_m g^{lm} W4_{ijkm}, raw over det^4
    weyl = [
        [[[None] * n for _ in range(n)] for _ in range(n)] for _ in range(n)
    ]
    raised_num = [
        [[[zero] * n for _ in range(n)] for _ in range(n)] for _ in range(n)
    ]
    rf_zero = RationalFunction.zero(n)
    for l in range(n):
        for k in range(n):
            for i in range(n):
                for j in range(i + 1, n):
                    acc = zero
                    for m in range(n):
                        a, b = adj[l][m], w4_num[i][j][k][m]
                        if not (a.is_zero or b.is_zero):
                            acc = acc + a * b
                    rf = fraction_over_power(acc, det, 4, det4)
                    weyl[l][k][i][j] = rf
                    weyl[l][k][j][i] = -rf
                    raised_num[l][k][i][j] = acc
                    raised_num[l][k][j][i] = -acc
                weyl[l][k][i][i] = rf_zero
    return weyl, w4_num, raised_num


# ---------------------------------------------------------------------------
# Derived reports
# ---------------------------------------------------------------------------


def nonzero_entries(tensor, depth: int) -> dict[tuple[int, ...], RationalFunction]:
    """Flatten a nested component list; keys are 1-based index tuples."""
    out: dict[tuple[int, ...], RationalFunction] = {}

    def walk(node, prefix):
        if len(prefix) == depth:
            if not node.is_zero:
                out[tuple(i + 1 for i in prefix)] = node
            return
        for idx, child in enumerate(node):
            walk(child, prefix + (idx,))

    walk(tensor, ())
    return out


def rref(rows: list[list[Fraction]]) -> list[list[Fraction]]:
    """Reduced row echelon form over exact rationals; zero rows dropped."""
    m = [[Fraction(x) for x in row] for row in rows]
    cols = len(m[0]) if m else 0
    lead = 0
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        d = m[r][c]
        m[r] = [x / d for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return [row for row in m[:r] if any(row)]


def weyl_image_at(
    report: CurvatureReport, point: Sequence[Fraction | int]
) -> list[tuple[Fraction, ...]]:
    """Exact basis (reduced echelon rows) of span{ W(e_i, e_j) e_k } at a
    rational point."""
    if report.weyl is None:
        raise DimensionTooSmall("Weyl tensor undefined below dimension 4")
    n = report.metric.dim
    vectors = []
    seen = set()
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(n):
                vec = tuple(
                    report.weyl[l][k][i][j].eval_exact(point).as_fraction()
                    for l in range(n)
                )
                if any(vec) and vec not in seen:
                    seen.add(vec)
                    vectors.append(list(vec))
    return [tuple(row) for row in rref(vectors)]


@dataclass(frozen=True)
class ConformalFlatnessVerdict:
    conformally_flat: bool
    witness_component: tuple[int, int, int, int] | None = None
    witness_point: tuple[Fraction, ...] | None = None
    witness_value: ExactScalar | None = None


def conformal_flatness(report: CurvatureReport) -> ConformalFlatnessVerdict:
    """Decide W == 0 exactly; if not, exhibit a component and a rational
    point where it is nonzero."""
    if report.weyl is None:
        raise DimensionTooSmall(
            "conformal-flatness conclusions need dim >= 4 (Weyl vanishes identically below)"
        )
    nz = nonzero_entries(report.weyl, 4)
    if not nz:
        return ConformalFlatnessVerdict(conformally_flat=True)
    (l, k, i, j), rf = next(iter(sorted(nz.items())))
    rng = random.Random(20240801)
    n = report.metric.dim
    values = [Fraction(v) for v in (0, 1, -1, 2, -2)] + [
        Fraction(1, 2),
        Fraction(-1, 2),
        Fraction(3, 2),
    ]
    for _ in range(10_000):
        point = tuple(rng.choice(values) for _ in range(n))
        try:
            val = rf.eval_exact(point)
        except Exception:
            continue
        if not val.is_zero:
            return ConformalFlatnessVerdict(
                conformally_flat=False,
                witness_component=(l, k, i, j),
                witness_point=point,
                witness_value=val,
            )
    raise RuntimeError("failed to localize a nonzero Weyl component")  # pragma: no cover


# ---------------------------------------------------------------------------
# Identity checks (used by tests and CLI reports)
# ---------------------------------------------------------------------------


def check_inverse(report: CurvatureReport) -> bool:
    n = report.metric.dim
    g = report.metric.components
    for i in range(n):
        for j in range(n):
            acc = RationalFunction.zero(n)
            for k in range(n):
                acc = acc + report.inverse[i][k] * g[k][j]
            expected = 1 if i == j else 0
            if acc != RationalFunction.constant(n, expected):
                return False
    return True


def check_gamma_symmetry(report: CurvatureReport) -> bool:
    n = report.metric.dim
    c = report.christoffel
    return all(
        c[k][i][j] == c[k][j][i]
        for k in range(n)
        for i in range(n)
        for j in range(i + 1, n)
    )


def check_riemann_antisymmetry(report: CurvatureReport) -> bool:
    n = report.metric.dim
    r = report.riemann
    for l in range(n):
        for k in range(n):
            for i in range(n):
                if not r[l][k][i][i].is_zero:
                    return False
                for j in range(i + 1, n):
                    if r[l][k][i][j] != -r[l][k][j][i]:
                        return False
    return True


def check_first_bianchi(report: CurvatureReport) -> bool:
    """R^l_{kij} + R^l_{ijk} + R^l_{jki} == 0 exactly."""
    n = report.metric.dim
    r = report.riemann
    for l in range(n):
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    s = r[l][k][i][j] + r[l][i][j][k] + r[l][j][k][i]
                    if not s.is_zero:
                        return False
    return True


def check_ricci_symmetry(report: CurvatureReport) -> bool:
    n = report.metric.dim
    return all(
        report.ricci[j][k] == report.ricci[k][j]
        for j in range(n)
        for k in range(j + 1, n)
    )


def check_pair_symmetry(report: CurvatureReport) -> bool:
    """A_{ijkl} == A_{klij} for the lowered curvature."""
    n = report.metric.dim
    g = report.metric.components
    r = report.riemann

    def lowered(i, j, k, l):
        acc = RationalFunction.zero(n)
        for m in range(n):
            gm = g[m][l]
            if gm.is_zero or r[m][k][i][j].is_zero:
                continue
            acc = acc + r[m][k][i][j] * gm
        return acc

    for i in range(n):
        for j in range(i + 1, n):
            for k in range(n):
                for l in range(k + 1, n):
                    if lowered(i, j, k, l) != lowered(k, l, i, j):
                        return False
    return True


def check_second_bianchi(report: CurvatureReport) -> bool:
    """Cyclic sum over (a, i, j) of nabla_a R^l_{kij} == 0 exactly.

    Quadratically more work than the algebraic identities; intended for
    small dimensions.
    """
    n = report.metric.dim
    r = report.riemann
    c = report.christoffel

    def cov(a, l, k, i, j):
        acc = r[l][k][i][j].derivative(a)
        for m in range(n):
            if not (c[l][a][m].is_zero or r[m][k][i][j].is_zero):
                acc = acc + c[l][a][m] * r[m][k][i][j]
            if not (c[m][a][k].is_zero or r[l][m][i][j].is_zero):
                acc = acc - c[m][a][k] * r[l][m][i][j]
            if not (c[m][a][i].is_zero or r[l][k][m][j].is_zero):
                acc = acc - c[m][a][i] * r[l][k][m][j]
            if not (c[m][a][j].is_zero or r[l][k][i][m].is_zero):
                acc = acc - c[m][a][j] * r[l][k][i][m]
        return acc

    for l in range(n):
        for k in range(n):
            for a in range(n):
                for i in range(a + 1, n):
                    for j in range(i + 1, n):
                        s = cov(a, l, k, i, j) + cov(i, l, k, j, a) + cov(j, l, k, a, i)
                        if not s.is_zero:
                            return False
    return True


def check_weyl_traces(report: CurvatureReport) -> bool:
    """All metric traces of the Weyl tensor vanish exactly.

    Runs on the raw polynomial numerators when the report carries them, so a
    whole trace costs one polynomial zero test instead of a chain of reduced
    fraction operations.
    """
    if report.weyl is None:
        raise DimensionTooSmall("no Weyl tensor below dimension 4")
    n = report.metric.dim

    if report.weyl_raw is not None and report.weyl_lowered_raw is not None:
        raised = report.weyl_raw
        zero = Polynomial.zero(n)
        # Ricci-type trace sum_i W^i_{kij}, over the shared det^4 denominator
        for k in range(n):
            for j in range(n):
                acc = zero
                for i in range(n):
                    acc = acc + raised[i][k][i][j]
                if not acc.is_zero:
                    return False
        # trace of the lowered tensor over its (1st, 3rd) slots:
        # sum_{i,l} g^{il} W4_{ijkl}, with g^{il} = adj[i][l] / det
        adj = metric_adjugate(report.metric)
        w4 = report.weyl_lowered_raw
        for j in range(n):
            for k in range(n):
                acc = zero
                for i in range(n):
                    for l in range(n):
                        a, b = adj[i][l], w4[i][j][k][l]
                        if not (a.is_zero or b.is_zero):
                            acc = acc + a * b
                if not acc.is_zero:
                    return False
        return True

    # fallback for reports without raw data: reduced-fraction arithmetic
    w = report.weyl
    for k in range(n):
        for j in range(n):
            acc = RationalFunction.zero(n)
            for i in range(n):
                acc = acc + w[i][k][i][j]
            if not acc.is_zero:
                return False
    g = report.metric.components
    ginv = report.inverse

    def lowered(i, j, k, l):
        acc = RationalFunction.zero(n)
        for m in range(n):
            if g[m][l].is_zero or w[m][k][i][j].is_zero:
                continue
            acc = acc + w[m][k][i][j] * g[m][l]
        return acc

    for j in range(n):
        for k in range(n):
            acc = RationalFunction.zero(n)
            for i in range(n):
                for l in range(n):
                    if ginv[i][l].is_zero:
                        continue
                    lv = lowered(i, j, k, l)
                    if not lv.is_zero:
                        acc = acc + ginv[i][l] * lv
            if not acc.is_zero:
                return False
    return True


# ---------------------------------------------------------------------------
# Metric description text format
# ---------------------------------------------------------------------------

METRIC_FORMAT_DOC = """\
Metric description format (UTF-8 text, '#' starts a comment):

    dim 4            # number of coordinates, first line
    type 2 2         # signature: negative count p, positive count q
    g 1 1 x3^2       # components as polynomials in x1..xn
    g 1 2 1          # symmetric counterpart is filled in automatically
    g 3 4 1

Unlisted components are zero.  Repeating a component with a different
polynomial is an error.
"""


def parse_metric_text(text: str, name: str = "file") -> MetricSpec:
    dim: int | None = None
    sig: tuple[int, int] | None = None
    entries: dict[tuple[int, int], tuple[Polynomial, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split(None, 1)
        keyword = fields[0]
        rest = fields[1] if len(fields) > 1 else ""
        if keyword == "dim":
            if dim is not None:
                raise MetricParseError("duplicate dim directive", lineno)
            try:
                dim = int(rest.strip())
            except ValueError:
                raise MetricParseError(f"bad dimension {rest!r}", lineno) from None
            if dim < 1:
                raise MetricParseError("dimension must be positive", lineno)
        elif keyword == "type":
            if sig is not None:
                raise MetricParseError("duplicate type directive", lineno)
            parts = rest.split()
            if len(parts) != 2:
                raise MetricParseError("type needs two integers p q", lineno)
            try:
                sig = (int(parts[0]), int(parts[1]))
            except ValueError:
                raise MetricParseError(f"bad signature {rest!r}", lineno) from None
        elif keyword == "g":
            if dim is None:
                raise MetricParseError("component before dim directive", lineno)
            parts = rest.split(None, 2)
            if len(parts) != 3:
                raise MetricParseError("component line needs: g i j <poly>", lineno)
            try:
                i, j = int(parts[0]), int(parts[1])
            except ValueError:
                raise MetricParseError("component indices must be integers", lineno) from None
            if not (1 <= i <= dim and 1 <= j <= dim):
                raise MetricParseError(
                    f"component indices ({i},{j}) outside 1..{dim}", lineno
                )
            try:
                poly = parse_polynomial(parts[2], dim)
            except ValueError as exc:
                raise MetricParseError(str(exc), lineno) from None
            key = (min(i, j), max(i, j))
            if key in entries and entries[key][0] != poly:
                raise MetricParseError(
                    f"conflicting duplicate for component ({i},{j}); "
                    f"first given on line {entries[key][1]}",
                    lineno,
                )
            entries.setdefault(key, (poly, lineno))
        else:
            raise MetricParseError(f"unknown directive {keyword!r}", lineno)
    if dim is None:
        raise MetricParseError("missing dim directive")
    if sig is None:
        raise MetricParseError("missing type directive")
    if sig[0] + sig[1] != dim:
        raise MetricParseError(f"type {sig} does not sum to dim {dim}")
    zero = Polynomial.zero(dim)
    comp = [[zero] * dim for _ in range(dim)]
    for (i, j), (poly, _) in entries.items():
        comp[i - 1][j - 1] = poly
        comp[j - 1][i - 1] = poly
    return MetricSpec(
        dim, sig[0], sig[1], tuple(tuple(r) for r in comp), name=name
    )


def load_metric(path) -> MetricSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_metric_text(fh.read(), name=str(path))


def metric_to_text(metric: MetricSpec) -> str:
    lines = [f"dim {metric.dim}", f"type {metric.p} {metric.q}"]
    for i in range(metric.dim):
        for j in range(i, metric.dim):
            entry = metric.components[i][j]
            if not entry.is_zero:
                lines.append(f"g {i + 1} {j + 1} {entry!r}")
    return "\n".join(lines) + "\n"
