"""Certification of finite exit-time moments for comb domains.

The certificate rests on a per-passage survival factor theta0 derived from
the comb's gap/height aspect ratio: each passage between neighboring slit
abscissas ends the excursion with probability at least 1 - theta0, and the
j-th passage happens inside a strip of width at most sqrt(M_j). Summing the
resulting geometric-weighted widths,

    E[tau^p]^(1/p)  <=  sum_{j>=0} (theta0^(1/p))^j * M_{j+1},

so finiteness of E[tau^p] follows whenever the series converges. The checker
decides convergence from a declared growth class of the window maxima M_j and
reports the numeric value of the series (window partial sum plus a certified
tail) as ``bound_on_moment_root``.

The convergence test is stated with weights theta^(j/p) starting at j = 1
while the numeric bound starts at j = 0 with maxima shifted by one; the two
series converge together, and this module always reports the j = 0 form.

A verdict is never "infinite": the condition is sufficient only, so the
negative outcome is Inconclusive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import (
    CombDomain,
    ExplicitSlits,
    GeometricGaps,
    PolynomialGaps,
    UniformGaps,
    symmetrize,
)
from .series import SeriesParams, theta0

__all__ = [
    "GrowthClass",
    "WindowPolicy",
    "Verdict",
    "growth_class_of",
    "geometric_threshold",
    "check_theorem1",
    "check_refined_unit",
]

FINITE_CERTIFIED = "FiniteCertified"
INCONCLUSIVE = "Inconclusive"

_KINDS = ("bounded", "polynomial", "geometric", "window")


@dataclass(frozen=True)
class GrowthClass:
    """Declared growth model for the window maxima M_j.

    bounded: M_j eventually constant. polynomial: gaps grow like n^degree,
    so M_j grows polynomially. geometric: gap ratio r, so M_{j+1}/M_j -> r^2.
    window: no model; extrapolate from observed ratios only.
    """

    kind: str
    ratio: float | None = None
    degree: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown growth class {self.kind!r}; expected one of {_KINDS}")
        if self.kind == "geometric":
            if self.ratio is None or not (self.ratio > 1) or not math.isfinite(self.ratio):
                raise ValueError("geometric growth needs a finite ratio > 1")
        if self.kind == "polynomial":
            if self.degree is None or not (self.degree >= 1) or not math.isfinite(self.degree):
                raise ValueError("polynomial growth needs a finite degree >= 1")

    def tag(self) -> str:
        if self.kind == "geometric":
            return f"geometric(ratio={self.ratio:g})"
        if self.kind == "polynomial":
            return f"polynomial(degree={self.degree:g})"
        return self.kind


@dataclass(frozen=True)
class WindowPolicy:
    """How a bare window table is extrapolated beyond its last index.

    Ratios M_{j+1}/M_j are inspected for j >= start_index; their maximum rho
    is taken as a bound on all future growth, and certification additionally
    demands rho * theta0^(1/p) <= 1 - margin so that a single noisy ratio
    near the boundary cannot flip the verdict.
    """

    start_index: int = 1
    margin: float = 0.05

    def __post_init__(self) -> None:
        if self.start_index < 1:
            raise ValueError("start_index counts passages and must be >= 1")
        if not (0.0 < self.margin < 1.0):
            raise ValueError("margin must lie in (0, 1)")


@dataclass(frozen=True)
class Verdict:
    status: str
    p: float
    theta0_used: float
    bound_on_moment_root: float
    reason: str
    growth_class_used: str


def growth_class_of(comb: CombDomain) -> GrowthClass:
    """Infer the growth class from the comb's generator.

    Explicit slit lists carry no generative model and fall back to window
    extrapolation; pass a GrowthClass to the check functions to override.
    """
    gen = comb.spec.generator
    if isinstance(gen, UniformGaps):
        return GrowthClass("bounded")
    if isinstance(gen, PolynomialGaps):
        if gen.degree <= 1.0:
            # gaps c*(n^d - (n-1)^d) are nonincreasing, so the maxima freeze
            return GrowthClass("bounded")
        return GrowthClass("polynomial", degree=gen.degree)
    if isinstance(gen, GeometricGaps):
        return GrowthClass("geometric", ratio=gen.ratio)
    if isinstance(gen, ExplicitSlits):
        return GrowthClass("window")
    raise TypeError(f"no growth class for generator {type(gen).__name__}")


def geometric_threshold(p: float, theta: float) -> float:
    """Largest gap ratio r certifiable at exponent p: r < (1/theta)^(1/(2p))."""
    if not (p > 0) or not math.isfinite(p):
        raise ValueError("exponent p must be positive and finite")
    if not (0.0 < theta < 1.0):
        raise ValueError("theta must lie in (0, 1)")
    return (1.0 / theta) ** (1.0 / (2.0 * p))


def check_theorem1(
    comb: CombDomain,
    p: float,
    growth_class: GrowthClass | None = None,
    *,
    policy: WindowPolicy | None = None,
    series_params: SeriesParams | None = None,
) -> Verdict:
    """Certify E[tau^p] < infinity from the comb's aspect ratio.

    One-sided combs are symmetrized first: the one-sided domain is contained
    in its symmetrization, so any certified bound transfers.
    """
    comb, p, growth, policy, note = _common_setup(comb, p, growth_class, policy)
    if math.isinf(comb.ell):
        return Verdict(
            status=INCONCLUSIVE,
            p=p,
            theta0_used=1.0,
            bound_on_moment_root=math.inf,
            reason=note + (
                "aspect ratio ell is unbounded, so no single passage factor "
                "applies; removing slits from the complement only increases "
                "exit times, so deleting the offending slits to lower ell "
                "and re-checking is sound"
            ),
            growth_class_used=growth.tag(),
        )
    res = theta0(comb.ell, series_params)
    note += f"theta0({comb.ell:g})={res.theta0:.12g}; "
    return _certify(comb, p, res.theta0, growth, policy, note)


def check_refined_unit(
    comb: CombDomain,
    p: float,
    growth_class: GrowthClass | None = None,
    *,
    policy: WindowPolicy | None = None,
) -> Verdict:
    """Certify with the universal factor 3/4, valid for unit-height slits
    separated by gaps of at least 1."""
    if comb.kind != "comb":
        raise TypeError("a comb domain is required")
    if not np.all(comb.bs == 1.0) or comb.min_gap < 1.0 - 1e-12:
        raise ValueError(
            "refined proposition inapplicable: needs all heights exactly 1 "
            "and every gap at least 1"
        )
    comb, p, growth, policy, note = _common_setup(comb, p, growth_class, policy)
    note += "universal per-passage factor 3/4 for unit heights and gaps >= 1; "
    return _certify(comb, p, 0.75, growth, policy, note)


def _common_setup(comb, p, growth_class, policy):
    if comb.kind != "comb":
        raise TypeError("a comb domain is required")
    if not (p > 0) or not math.isfinite(p):
        raise ValueError("exponent p must be positive and finite")
    note = ""
    if comb.one_sided:
        comb = symmetrize(comb)
        note = "one-sided comb symmetrized (contained in the symmetric domain); "
    if len(comb.prefix_max) == 0:
        raise ValueError("empty window: the comb has no gaps to bound passages with")
    growth = growth_class or growth_class_of(comb)
    return comb, float(p), growth, policy or WindowPolicy(), note


def _certify(comb, p, theta, growth, policy, note) -> Verdict:
    q = theta ** (1.0 / p)
    maxima = comb.prefix_max
    if q >= 1.0:
        return _inconclusive(
            p, theta, growth,
            note + f"per-passage factor theta0^(1/p)={q:g} carries no decay",
        )

    if growth.kind == "bounded":
        bound = _window_partial(maxima, q) + maxima[-1] * q ** len(maxima) / (1.0 - q)
        reason = note + (
            f"gap maxima bounded by {maxima[-1]:g}; geometric tail with "
            f"weight {q:.6g} converges for any exponent"
        )
        return _certified(p, theta, bound, growth, reason)

    if growth.kind == "geometric":
        r2 = growth.ratio**2
        if q * r2 >= 1.0:
            return _inconclusive(
                p, theta, growth,
                note + (
                    f"gap ratio {growth.ratio:g} gives weight {q * r2:.6g} >= 1 "
                    f"per term; certifiable only below ratio "
                    f"{geometric_threshold(p, theta):.6g}"
                ),
            )
        j = len(maxima)
        bound = _window_partial(maxima, q) + maxima[-1] * q**j * r2 / (1.0 - q * r2)
        reason = note + (
            f"gap ratio {growth.ratio:g}: term weight {q * r2:.6g} < 1, below "
            f"the certifiable ratio {geometric_threshold(p, theta):.6g}"
        )
        return _certified(p, theta, bound, growth, reason)

    if growth.kind == "polynomial":
        gen = comb.spec.generator
        if isinstance(gen, PolynomialGaps):
            tail = _polynomial_tail_from_gaps(gen, len(maxima), q)
        else:
            tail = _polynomial_tail_from_model(
                float(maxima[-1]), len(maxima), q, 2.0 * (growth.degree - 1.0)
            )
        bound = _window_partial(maxima, q) + tail
        reason = note + (
            f"polynomial gap growth of degree {growth.degree:g} is beaten by "
            f"the geometric weight {q:.6g}"
        )
        return _certified(p, theta, bound, growth, reason)

    # bare window table
    j_total = len(maxima)
    if j_total < policy.start_index + 1:
        return _inconclusive(
            p, theta, growth,
            note + (
                f"window of {j_total} passage maxima is too short to observe "
                f"growth ratios from index {policy.start_index}"
            ),
        )
    ratios = maxima[policy.start_index:] / maxima[policy.start_index - 1 : -1]
    rho = float(np.max(ratios))
    if q * rho > 1.0 - policy.margin:
        return _inconclusive(
            p, theta, growth,
            note + (
                f"observed growth ratio {rho:.6g} gives weight {q * rho:.6g} "
                f"above the certification cutoff {1.0 - policy.margin:g} "
                f"(margin {policy.margin:g})"
            ),
        )
    bound = _window_partial(maxima, q) + maxima[-1] * q**j_total * rho / (1.0 - q * rho)
    reason = note + (
        f"window ratios bounded by {rho:.6g} from index {policy.start_index}; "
        f"tail extrapolated at that ratio with weight {q * rho:.6g} <= "
        f"{1.0 - policy.margin:g}"
    )
    return _certified(p, theta, bound, growth, reason)


def _certified(p, theta, bound, growth, reason) -> Verdict:
    return Verdict(FINITE_CERTIFIED, p, theta, float(bound), reason, growth.tag())


def _inconclusive(p, theta, growth, reason) -> Verdict:
    return Verdict(INCONCLUSIVE, p, theta, math.inf, reason, growth.tag())


def _window_partial(maxima: np.ndarray, q: float) -> float:
    return float(np.dot(q ** np.arange(len(maxima)), maxima))


def _polynomial_tail_from_gaps(gen: PolynomialGaps, start_j: int, q: float) -> float:
    """Sum q^j * gap(j+1)^2 for j >= start_j with exact generator gaps.

    Gap ratios decrease toward 1 for degree >= 1, so once summation stops the
    remainder is dominated by a geometric series at the current ratio.
    """
    total = 0.0
    j = start_j
    block = 4096
    for _ in range(20_000):
        labels = np.arange(j + 1, j + block + 1, dtype=float)
        gaps = gen.coefficient * (labels**gen.degree - (labels - 1.0) ** gen.degree)
        terms = q ** np.arange(j, j + block) * gaps**2
        total += float(terms.sum())
        j += block
        rho = (gaps[-1] / gaps[-2]) ** 2
        if q * rho < 1.0 and terms[-1] < 1e-17 * max(total, 1.0):
            return total + terms[-1] * q * rho / (1.0 - q * rho)
    raise RuntimeError("polynomial tail did not converge within the iteration budget")


def _polynomial_tail_from_model(last_max: float, start_j: int, q: float,
                                exponent: float) -> float:
    """Tail bound under the declared model M_{j+1} <= M_J * ((j+1)/J)^exponent."""
    total = 0.0
    j = start_j
    block = 4096
    scale = last_max / start_j**exponent
    for _ in range(20_000):
        js = np.arange(j, j + block, dtype=float)
        terms = q**js * scale * (js + 1.0) ** exponent
        total += float(terms.sum())
        j += block
        rho = ((j + 1.0) / j) ** exponent
        if q * rho < 1.0 and terms[-1] < 1e-17 * max(total, 1.0):
            return total + terms[-1] * q * rho / (1.0 - q * rho)
    raise RuntimeError("polynomial tail did not converge within the iteration budget")
