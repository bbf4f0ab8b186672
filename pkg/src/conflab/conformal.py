"""Diagonal conformal transformations of the flagship metric.

Two families act conformally on g0:

* the two-parameter scaling group generated by

      diag(e^{-a+2b}, e^{3a}, e^{2a-b}, e^{3b}, e^{a+b}, ..., e^{a+b}),

  which pulls g0 back to e^{2(a+b)} g0 for every (a, b); its admissible
  region  a < b < a/2 < 0  makes every diagonal entry lie in ]0,1[, so the
  generated cyclic group acts freely and properly discontinuously on
  R^n minus the origin;

* the one-parameter flow  diag(e^{-3t/2}, e^{-3t/2}, 1, e^{-3t},
  e^{-3t/2}, ..., e^{-3t/2})  with pullback factor e^{-3t}, which fixes the
  third axis while crushing every transverse direction.

Both are represented over the exact scalar ring: entries are single
exponential terms E1^m E2^n, with the numeric parameter values carried
alongside for evaluation.  The flow reuses the same representation through
the substitution E1 = e^{t/2} (so e.g. e^{-3t} is the term E1^{-6}); this
keeps one exact code path for pullbacks and conformal factors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DimensionMismatch, InadmissibleExponents, NotConformal
from .exact import ExactScalar, Polynomial
from .tensor import MetricSpec


@dataclass(frozen=True)
class ScalingExponents:
    """Parameter pair (alpha, beta) of the diagonal scaling group."""

    alpha: float
    beta: float

    def is_admissible(self) -> bool:
        return self.alpha < self.beta < self.alpha / 2 < 0

    def as_tuple(self) -> tuple[float, float]:
        return (self.alpha, self.beta)


@dataclass(frozen=True)
class AdmissibilityVerdict:
    admissible: bool
    alpha_lt_beta: bool
    beta_lt_half_alpha: bool
    half_alpha_negative: bool
    entry_exponents: tuple[float, ...]
    entries_contracting: bool


def validate_exponents(exponents: ScalingExponents, dim: int = 4) -> AdmissibilityVerdict:
    """Admissibility report: the chain a < b < a/2 < 0 and, equivalently,
    negativity of every diagonal log-entry."""
    a, b = exponents.alpha, exponents.beta
    logs = _entry_exponent_values(a, b, dim)
    return AdmissibilityVerdict(
        admissible=exponents.is_admissible(),
        alpha_lt_beta=a < b,
        beta_lt_half_alpha=b < a / 2,
        half_alpha_negative=a / 2 < 0,
        entry_exponents=tuple(logs),
        entries_contracting=all(v < 0 for v in logs),
    )


# exponent pattern of the scaling generator, as (m, n) with log-entry m*a + n*b
_GENERATOR_PATTERN = ((-1, 2), (3, 0), (2, -1), (0, 3))
_GENERATOR_TAIL = (1, 1)


def _entry_exponent_values(a: float, b: float, dim: int) -> list[float]:
    pat = list(_GENERATOR_PATTERN) + [_GENERATOR_TAIL] * (dim - 4)
    return [m * a + n * b for m, n in pat]


@dataclass(frozen=True)
class DiagonalMap:
    """Diagonal linear map x_i -> d_i x_i with exact exponential entries.

    ``entries`` are single-term exact scalars; ``param_values`` are the
    concrete (a, b) used when a numeric value of an entry is needed.  Maps
    built by :func:`essential_flow` store (t/2, 0) there, matching the
    E1 = e^{t/2} representation of their entries.
    """

    entries: tuple[ExactScalar, ...]
    param_values: tuple[float, float] | None = None

    def __post_init__(self):
        for d in self.entries:
            if not d.is_term:
                raise ValueError(f"diagonal entry {d} is not a single exponential term")
            _, c = d.leading()
            if c <= 0:
                raise ValueError(f"diagonal entry {d} must be positive")

    @property
    def dim(self) -> int:
        return len(self.entries)

    def numeric_entries(self) -> list[float]:
        if self.param_values is None:
            raise ValueError("map has no numeric parameter values attached")
        a, b = self.param_values
        return [d.evaluate(a, b) for d in self.entries]

    def apply(self, x):
        d = self.numeric_entries()
        if len(x) != self.dim:
            raise DimensionMismatch("point size does not match map dimension")
        return [di * xi for di, xi in zip(d, x)]

    def inverse(self) -> "DiagonalMap":
        return DiagonalMap(
            tuple(d.inverse() for d in self.entries), self.param_values
        )

    def power(self, k: int) -> "DiagonalMap":
        return DiagonalMap(tuple(d**k for d in self.entries), self.param_values)

    def compose_entries(self, other: "DiagonalMap") -> tuple[ExactScalar, ...]:
        """Entrywise product; meaningful when both maps share parameter
        semantics.  Diagonal maps always commute, which is checked
        structurally in the reports."""
        if self.dim != other.dim:
            raise DimensionMismatch("composed maps must share dimension")
        return tuple(a * b for a, b in zip(self.entries, other.entries))


def diagonal_scaling_map(dim: int, exponents: ScalingExponents | None = None) -> DiagonalMap:
    """The scaling-group generator in dimension dim >= 4.

    Entries are exact: (E1^-1 E2^2, E1^3, E1^2 E2^-1, E2^3, E1 E2, ...).
    When ``exponents`` is given its (alpha, beta) ride along for numeric
    evaluation; the symbolic entries are identical either way.
    """
    if dim < 4:
        raise DimensionMismatch("the scaling group needs at least 4 coordinates")
    pat = list(_GENERATOR_PATTERN) + [_GENERATOR_TAIL] * (dim - 4)
    entries = tuple(ExactScalar.exp_term(m, n) for m, n in pat)
    return DiagonalMap(entries, exponents.as_tuple() if exponents else None)


def essential_flow(t: float, dim: int) -> DiagonalMap:
    """Time-t map of the flow diag(e^{-3t/2}, e^{-3t/2}, 1, e^{-3t}, e^{-3t/2}, ...).

    Represented exactly with E1 = e^{t/2}: exponent -3 on axes 1, 2 and
    >= 5, exponent -6 on axis 4, exponent 0 on the fixed axis 3.
    """
    if dim < 4:
        raise DimensionMismatch("the flow needs at least 4 coordinates")
    exps = [-3, -3, 0, -6] + [-3] * (dim - 4)
    entries = tuple(ExactScalar.exp_term(m, 0) for m in exps)
    return DiagonalMap(entries, (t / 2.0, 0.0))


def flow_conformal_exponent(t: float) -> float:
    """log of the flow's conformal factor: -3t."""
    return -3.0 * t


def pullback_metric(mapping: DiagonalMap, metric: MetricSpec) -> MetricSpec:
    """(phi^* g)_{ij}(x) = d_i d_j g_{ij}(phi x), computed exactly.

    The result keeps the declared signature: the pullback of a metric by a
    positive diagonal map composed with a positive conformal factor cannot
    change inertia.
    """
    if mapping.dim != metric.dim:
        raise DimensionMismatch("map and metric dimension differ")
    n = metric.dim
    comp = []
    for i in range(n):
        row = []
        for j in range(n):
            entry = metric.components[i][j]
            if entry.is_zero:
                row.append(entry)
                continue
            substituted = entry.scale_coords(mapping.entries)
            row.append(substituted.scalar_mul(mapping.entries[i] * mapping.entries[j]))
        comp.append(tuple(row))
    return MetricSpec(
        n, metric.p, metric.q, tuple(comp), name=f"pullback({metric.name})"
    )


def conformal_factor(mapping: DiagonalMap, metric: MetricSpec) -> ExactScalar:
    """The exact scalar c with phi^* g = c * g, if one exists.

    Raises NotConformal with the first offending component pair when the
    pullback is not a single common rescaling of g.
    """
    pulled = pullback_metric(mapping, metric)
    n = metric.dim
    candidate: ExactScalar | None = None
    first_pair: tuple[int, int] | None = None
    for i in range(n):
        for j in range(i, n):
            base = metric.components[i][j]
            image = pulled.components[i][j]
            if base.is_zero:
                if not image.is_zero:
                    raise NotConformal(
                        f"pullback creates component ({i + 1},{j + 1}) absent from g",
                        pair=(i + 1, j + 1),
                    )
                continue
            if candidate is None:
                # solve image == c * base on the first nonzero component
                e, lc = base.leading()
                ic = image.terms.get(e, ExactScalar.zero())
                c = ic.divide_exact(lc)
                if c is None or image != base.scalar_mul(c):
                    raise NotConformal(
                        f"component ({i + 1},{j + 1}) is not a scalar multiple "
                        f"of the original",
                        pair=(i + 1, j + 1),
                    )
                candidate = c
                first_pair = (i + 1, j + 1)
            elif image != base.scalar_mul(candidate):
                raise NotConformal(
                    f"component ({i + 1},{j + 1}) scales differently from "
                    f"component {first_pair}",
                    pair=(i + 1, j + 1),
                )
    if candidate is None:
        raise NotConformal("metric has no nonzero components", pair=None)
    return candidate


def require_admissible(exponents: ScalingExponents) -> None:
    if not exponents.is_admissible():
        raise InadmissibleExponents(
            f"(alpha, beta) = ({exponents.alpha}, {exponents.beta}) violates "
            f"alpha < beta < alpha/2 < 0"
        )


def exponents_from_diagonal_conformal(entries: list[float]) -> ScalingExponents:
    """Recover (alpha, beta) from a numeric diagonal map conformal for g0.

    Any positive diagonal map that rescales g0 conformally must follow the
    generator's exponent pattern; alpha and beta are read off the second
    and fourth entries and the rest is cross-checked by the caller.
    """
    if len(entries) < 4:
        raise DimensionMismatch("need at least 4 diagonal entries")
    if any(d <= 0 for d in entries):
        raise ValueError("diagonal entries must be positive")
    alpha = math.log(entries[1]) / 3.0
    beta = math.log(entries[3]) / 3.0
    return ScalingExponents(alpha, beta)


def generator_entry_residual(entries: list[float]) -> float:
    """Max deviation of log-entries from the generator pattern at the
    exponents recovered by :func:`exponents_from_diagonal_conformal`."""
    exp = exponents_from_diagonal_conformal(entries)
    expected = _entry_exponent_values(exp.alpha, exp.beta, len(entries))
    return max(
        abs(math.log(d) - e) for d, e in zip(entries, expected)
    )


SCALING_FACTOR_EXACT = ExactScalar.exp_term(2, 2)
"""Pullback factor of the scaling generator: e^{2(alpha+beta)} = E1^2 E2^2."""

FLOW_FACTOR_EXACT = ExactScalar.exp_term(-6, 0)
"""Pullback factor of the flow in its E1 = e^{t/2} representation: e^{-3t}."""
