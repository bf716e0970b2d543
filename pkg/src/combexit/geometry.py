"""Comb domains and the other simulatable planar domains.

A comb domain is the plane minus a family of vertical slits
``{x_n} x ((-inf, -b_n] u [b_n, inf))``.  Heights ``b_n = 0`` are allowed
and encode full vertical lines, which lets vertical strips and strip-with-
teeth constructions reuse the comb machinery.  One-sided combs live in the
half plane ``Re z > x_0``; the line at ``x_0`` is then a full wall
regardless of the stored ``b_0`` (the stored height is still used when the
comb is symmetrized).

Infinite slit families are represented by a finite materialized window of
radius J.  Domains built from parametric generators are marked
``truncated``: simulated trajectories must exit strictly inside the window
and the engines flag a "window escape" otherwise.  Explicit slit lists are
taken as the complete, exact domain.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "UniformGaps",
    "PolynomialGaps",
    "GeometricGaps",
    "ExplicitSlits",
    "CombSpec",
    "CombDomain",
    "Rectangle",
    "VerticalStrip",
    "Wedge",
    "HalfPlane",
    "SimDomain",
    "build_comb",
    "distance_to_domain_boundary",
    "symmetrize",
    "slit_window",
    "domain_to_config",
    "domain_from_config",
    "domain_fingerprint",
    "comb_spec_to_config",
    "comb_spec_from_config",
]


# ---------------------------------------------------------------------------
# generators


@dataclass(frozen=True)
class UniformGaps:
    """Abscissas x_n = spacing * n, constant slit height."""

    spacing: float
    height: float

    def abscissa(self, n: int) -> float:
        return self.spacing * n


@dataclass(frozen=True)
class PolynomialGaps:
    """Abscissas x_n = sign(n) * coefficient * |n|**degree, constant height."""

    degree: float
    coefficient: float
    height: float

    def abscissa(self, n: int) -> float:
        return math.copysign(self.coefficient * abs(n) ** self.degree, n) if n else 0.0


@dataclass(frozen=True)
class GeometricGaps:
    """Abscissas x_n = sign(n) * (ratio**|n| - 1), constant height.

    Gap labels then satisfy a_{+-n} = ratio**(n-1) * (ratio - 1), so the
    gap sequence is geometric with the declared ratio.
    """

    ratio: float
    height: float

    def abscissa(self, n: int) -> float:
        return math.copysign(self.ratio ** abs(n) - 1.0, n) if n else 0.0


@dataclass(frozen=True)
class ExplicitSlits:
    """A finite, exact list of (abscissa, height) pairs.

    ``growth`` optionally declares how gaps would continue beyond the list
    ("bounded", "polynomial", "geometric", or None for window-only); the
    theorem checker consumes it, geometry does not.
    """

    slits: tuple[tuple[float, float], ...]
    growth: str | None = None


Generator = Union[UniformGaps, PolynomialGaps, GeometricGaps, ExplicitSlits]


@dataclass(frozen=True)
class CombSpec:
    generator: Generator
    window_radius: int | None = None
    one_sided: bool = False


# ---------------------------------------------------------------------------
# materialized domains


@dataclass(frozen=True, eq=False)
class CombDomain:
    spec: CombSpec
    xs: np.ndarray            # sorted abscissas, length 2J+1 (two-sided) or J+1
    bs: np.ndarray            # declared heights, aligned with xs
    line_heights: np.ndarray  # heights as seen by exit detection (wall at x0 zeroed)
    one_sided: bool
    window_radius: int        # J
    min_gap: float
    prefix_max: np.ndarray    # M_j = max over gap labels |n| <= j of a_n^2, j = 1..J
    ell: float                # aspect ratio; closed-form sup when the generator allows
    ell_is_window_only: bool  # True when ell could only be evaluated over the window
    truncated: bool           # True for parametric generators (finite window of an
                              # infinite comb); escape past the outer slits is an error

    @property
    def kind(self) -> str:
        return "comb"

    @property
    def n_lines(self) -> int:
        return len(self.xs)

    def center_index(self) -> int:
        return 0 if self.one_sided else self.window_radius

    def gap(self, label: int) -> float:
        """Gap by mirrored label: a_{+n} = x_n - x_{n-1}, a_{-n} = x_{-n+1} - x_{-n}."""
        J = self.window_radius
        if label == 0 or abs(label) > J:
            raise ValueError(f"gap label must have 1 <= |n| <= {J}, got {label}")
        if self.one_sided:
            if label < 0:
                raise ValueError("one-sided comb has no negative gap labels")
            return float(self.xs[label] - self.xs[label - 1])
        c = self.center_index()
        if label > 0:
            return float(self.xs[c + label] - self.xs[c + label - 1])
        return float(self.xs[c + label + 1] - self.xs[c + label])

    def scale(self) -> float:
        # Single-line combs have no gap; the slit half-height is then the
        # only intrinsic length (and 1.0 the last resort for a bare line).
        if math.isfinite(self.min_gap):
            return self.min_gap
        tallest = float(np.max(self.bs)) if len(self.bs) else 0.0
        return tallest if tallest > 0.0 else 1.0

    # -- geometry ----------------------------------------------------------

    def boundary_distance(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Distance to the nearest slit (vectorized), wall at x0 included."""
        return _slit_distance(self.xs, self.line_heights, np.asarray(u, float),
                              np.asarray(v, float))

    def nearest_boundary(self, u: np.ndarray, v: np.ndarray):
        u = np.asarray(u, float)
        v = np.asarray(v, float)
        idx = _nearest_slit_index(self.xs, self.line_heights, u, v)
        bx = self.xs[idx]
        bb = self.line_heights[idx]
        av = np.abs(v)
        # on the slit ray if |v| >= b, else snap to the nearer tip
        by = np.where(av >= bb, v, np.where(v >= 0.0, bb, -bb))
        return bx, by

    def contains(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        u = np.asarray(u, float)
        v = np.asarray(v, float)
        inside = self.boundary_distance(u, v) > 0.0
        if self.one_sided:
            inside = inside & (u > self.xs[0])
        return inside


@dataclass(frozen=True)
class Rectangle:
    """K^b_{-a,a}: the open box (-a, a) x (-b, b)."""

    half_width: float
    half_height: float

    @property
    def kind(self) -> str:
        return "rectangle"

    def scale(self) -> float:
        return min(self.half_width, self.half_height)

    def boundary_distance(self, u, v):
        u = np.asarray(u, float)
        v = np.asarray(v, float)
        return np.minimum(self.half_width - np.abs(u), self.half_height - np.abs(v))

    def nearest_boundary(self, u, v):
        u = np.asarray(u, float)
        v = np.asarray(v, float)
        du = self.half_width - np.abs(u)
        dv = self.half_height - np.abs(v)
        side_u = du <= dv
        bu = np.where(side_u, np.where(u >= 0, self.half_width, -self.half_width), u)
        bv = np.where(side_u, v, np.where(v >= 0, self.half_height, -self.half_height))
        return bu, bv

    def contains(self, u, v):
        return self.boundary_distance(u, v) > 0.0


@dataclass(frozen=True)
class VerticalStrip:
    """S_{c,d}: the open strip c < Re z < d."""

    left: float
    right: float

    @property
    def kind(self) -> str:
        return "vertical_strip"

    def scale(self) -> float:
        return (self.right - self.left) / 2.0

    def boundary_distance(self, u, v):
        u = np.asarray(u, float)
        return np.minimum(u - self.left, self.right - u)

    def nearest_boundary(self, u, v):
        u = np.asarray(u, float)
        v = np.asarray(v, float)
        left_closer = (u - self.left) <= (self.right - u)
        return np.where(left_closer, self.left, self.right), v

    def contains(self, u, v):
        return self.boundary_distance(u, v) > 0.0


@dataclass(frozen=True)
class Wedge:
    """W_alpha = {0 < arg z < alpha}, apex at the origin."""

    angle: float

    @property
    def kind(self) -> str:
        return "wedge"

    def scale(self) -> float:
        return 1.0

    def boundary_distance(self, u, v):
        u = np.asarray(u, float)
        v = np.asarray(v, float)
        a = self.angle
        # ray arg = 0: boundary {(x, 0): x >= 0}
        d0 = np.where(u >= 0.0, np.abs(v), np.hypot(u, v))
        # ray arg = a: rotate by -a, same test
        ca, sa = math.cos(a), math.sin(a)
        xr = u * ca + v * sa
        yr = -u * sa + v * ca
        d1 = np.where(xr >= 0.0, np.abs(yr), np.hypot(xr, yr))
        return np.minimum(d0, d1)

    def nearest_boundary(self, u, v):
        u = np.asarray(u, float)
        v = np.asarray(v, float)
        a = self.angle
        ca, sa = math.cos(a), math.sin(a)
        xr = u * ca + v * sa
        d0 = np.where(u >= 0.0, np.abs(v), np.hypot(u, v))
        yr = -u * sa + v * ca
        d1 = np.where(xr >= 0.0, np.abs(yr), np.hypot(xr, yr))
        on0 = d0 <= d1
        # projections: clamp the axial coordinate at the apex
        p0u = np.maximum(u, 0.0)
        p1r = np.maximum(xr, 0.0)
        bu = np.where(on0, p0u, p1r * ca)
        bv = np.where(on0, 0.0, p1r * sa)
        return bu, bv

    def contains(self, u, v):
        u = np.asarray(u, float)
        v = np.asarray(v, float)
        theta = np.arctan2(v, u)
        theta = np.where(theta < 0.0, theta + 2.0 * math.pi, theta)
        r = np.hypot(u, v)
        return (r > 0.0) & (theta > 0.0) & (theta < self.angle)


@dataclass(frozen=True)
class HalfPlane:
    """The open upper half plane Im z > 0."""

    @property
    def kind(self) -> str:
        return "half_plane"

    def scale(self) -> float:
        return 1.0

    def boundary_distance(self, u, v):
        return np.asarray(v, float).copy()

    def nearest_boundary(self, u, v):
        return np.asarray(u, float).copy(), np.zeros_like(np.asarray(v, float))

    def contains(self, u, v):
        return np.asarray(v, float) > 0.0


SimDomain = Union[CombDomain, Rectangle, VerticalStrip, Wedge, HalfPlane]


# ---------------------------------------------------------------------------
# comb construction


def build_comb(spec: CombSpec) -> CombDomain:
    """Materialize a comb window. Deterministic; validates all invariants."""
    gen = spec.generator
    if isinstance(gen, ExplicitSlits):
        xs, bs, J = _materialize_explicit(gen, spec)
        truncated = False
    else:
        xs, bs, J = _materialize_parametric(gen, spec)
        truncated = True

    if xs.size == 0:
        raise ValueError("empty slit window")
    if not np.all(np.isfinite(xs)) or not np.all(np.isfinite(bs)):
        raise ValueError("non-finite abscissa or height")
    if np.any(bs < 0.0):
        raise ValueError("negative slit height")
    if np.any(np.diff(xs) <= 0.0):
        raise ValueError("non-increasing abscissas")

    center = 0 if spec.one_sided else J
    if xs[center] != 0.0:
        raise ValueError(f"x_0 must be 0 (normalization), got {xs[center]}")

    line_heights = bs.copy()
    if spec.one_sided:
        line_heights[0] = 0.0  # the wall at x_0 is a full line

    phys_gaps = np.diff(xs)
    min_gap = float(phys_gaps.min()) if phys_gaps.size else math.inf
    prefix_max = _prefix_max(phys_gaps, J, spec.one_sided)
    ell, window_only = _aspect_ratio(gen, xs, bs, spec.one_sided)

    return CombDomain(
        spec=spec,
        xs=xs,
        bs=bs,
        line_heights=line_heights,
        one_sided=spec.one_sided,
        window_radius=J,
        min_gap=min_gap,
        prefix_max=prefix_max,
        ell=ell,
        ell_is_window_only=window_only,
        truncated=truncated,
    )


def _materialize_parametric(gen, spec: CombSpec):
    J = spec.window_radius
    if J is None:
        raise ValueError("window_radius is required for parametric generators")
    if J < 1:
        raise ValueError("window_radius must be >= 1")
    if isinstance(gen, UniformGaps):
        if gen.spacing <= 0 or gen.height <= 0:
            raise ValueError("uniform generator needs spacing > 0 and height > 0")
    elif isinstance(gen, PolynomialGaps):
        if gen.degree < 0 or gen.coefficient <= 0 or gen.height <= 0:
            raise ValueError("polynomial generator needs degree >= 0, coefficient > 0, height > 0")
    elif isinstance(gen, GeometricGaps):
        if gen.ratio <= 1 or gen.height <= 0:
            raise ValueError("geometric generator needs ratio > 1 and height > 0")
    ns = range(0, J + 1) if spec.one_sided else range(-J, J + 1)
    xs = np.array([gen.abscissa(n) for n in ns], dtype=float)
    bs = np.full(xs.shape, float(gen.height))
    return xs, bs, J


def _materialize_explicit(gen: ExplicitSlits, spec: CombSpec):
    if len(gen.slits) == 0:
        raise ValueError("empty slit window")
    xs = np.array([s[0] for s in gen.slits], dtype=float)
    bs = np.array([s[1] for s in gen.slits], dtype=float)
    if spec.one_sided:
        J = len(xs) - 1
    else:
        if len(xs) % 2 == 0:
            raise ValueError("two-sided explicit comb needs an odd number of slits "
                             "(center slit at x_0 = 0)")
        J = (len(xs) - 1) // 2
    if spec.window_radius is not None and spec.window_radius != J:
        raise ValueError(f"window_radius={spec.window_radius} inconsistent with "
                         f"{len(xs)} explicit slits (inferred J={J})")
    return xs, bs, J


def _prefix_max(phys_gaps: np.ndarray, J: int, one_sided: bool) -> np.ndarray:
    """M_j for j = 1..J under mirrored gap labels.

    Two-sided: label +n is the gap (x_{n-1}, x_n), label -n the mirror gap
    (x_{-n}, x_{-n+1}); M_j collects labels with |n| <= j.  This is the
    symmetric reading of "max over |n| <= j" and is exactly the set of gaps
    reachable within j grid passages from x_0.
    """
    if J == 0:
        return np.empty(0)
    out = np.empty(J)
    cur = 0.0
    for j in range(1, J + 1):
        if one_sided:
            g = phys_gaps[j - 1]
            cur = max(cur, g * g)
        else:
            gp = phys_gaps[J + j - 1]
            gm = phys_gaps[J - j]
            cur = max(cur, gp * gp, gm * gm)
        out[j - 1] = cur
    return out


def _window_aspect_ratio(xs: np.ndarray, bs: np.ndarray) -> float:
    """sup over interior slits of max(b_{n-1}, b_{n+1}) / min(a_n, a_{n+1})."""
    if len(xs) < 3:
        return 0.0
    gaps = np.diff(xs)
    num = np.maximum(bs[:-2], bs[2:])
    den = np.minimum(gaps[:-1], gaps[1:])
    return float(np.max(num / den))


def _aspect_ratio(gen, xs, bs, one_sided: bool):
    """(ell, window_only).  Closed-form sup for parametric generators.

    For uniform, geometric, and polynomial generators with degree >= 1 the
    ratio is maximized at the innermost gaps, so the sup over the infinite
    comb has a closed form.  Polynomial degree in (0, 1) makes gaps shrink
    to zero and the true sup is infinite.  Explicit lists get the literal
    window value (slits whose both neighbor heights are 0 contribute 0 to
    the sup; the degenerate all-walls case yields ell = 0).
    """
    if one_sided:
        mirror_xs = np.concatenate([-xs[:0:-1], xs])
        mirror_bs = np.concatenate([bs[:0:-1], bs])
    else:
        mirror_xs, mirror_bs = xs, bs

    if isinstance(gen, UniformGaps):
        return gen.height / gen.spacing, False
    if isinstance(gen, GeometricGaps):
        return gen.height / (gen.ratio - 1.0), False
    if isinstance(gen, PolynomialGaps):
        if gen.degree >= 1.0:
            return gen.height / gen.coefficient, False
        return math.inf, False
    return _window_aspect_ratio(mirror_xs, mirror_bs), True


def symmetrize(comb: CombDomain) -> CombDomain:
    """Two-sided extension by x_{-n} = -x_n, b_{-n} = b_n (errors if two-sided)."""
    if not comb.one_sided:
        raise ValueError("symmetrize expects a one-sided comb")
    gen = comb.spec.generator
    if isinstance(gen, ExplicitSlits):
        mirrored = tuple(
            (float(-comb.xs[i]), float(comb.bs[i]))
            for i in range(len(comb.xs) - 1, 0, -1)
        ) + tuple((float(x), float(b)) for x, b in zip(comb.xs, comb.bs))
        new_spec = CombSpec(ExplicitSlits(mirrored, growth=gen.growth), one_sided=False)
    else:
        new_spec = CombSpec(gen, window_radius=comb.window_radius, one_sided=False)
    return build_comb(new_spec)


def slit_window(comb: CombDomain, j: int):
    """(abscissas within |n| <= j, labeled gaps, M_j)."""
    J = comb.window_radius
    if not 1 <= j <= J:
        raise ValueError(f"window index must satisfy 1 <= j <= {J}, got {j}")
    c = comb.center_index()
    if comb.one_sided:
        xs = comb.xs[: j + 1]
        labels = range(1, j + 1)
    else:
        xs = comb.xs[c - j: c + j + 1]
        labels = [n for n in range(-j, j + 1) if n != 0]
    gaps = {n: comb.gap(n) for n in labels}
    return xs.copy(), gaps, float(comb.prefix_max[j - 1])


# ---------------------------------------------------------------------------
# slit distance kernel

_WINDOW = 4  # candidate slits kept on each side of the insertion index


def _slit_distance(xs, heights, u, v):
    u = np.atleast_1d(u)
    v = np.atleast_1d(v)
    n = len(xs)
    if n <= 2 * _WINDOW + 1:
        d = _slit_distance_full(xs, heights, u, v)
    else:
        d = _slit_distance_windowed(xs, heights, u, v)
    return d


def _slit_distance_full(xs, heights, u, v):
    du = u[:, None] - xs[None, :]
    dv = np.maximum(0.0, heights[None, :] - np.abs(v)[:, None])
    return np.min(np.hypot(du, dv), axis=1)


def _slit_distance_windowed(xs, heights, u, v):
    n = len(xs)
    k = np.searchsorted(xs, u)
    lo = np.clip(k - _WINDOW, 0, n - 1)
    cols = lo[:, None] + np.arange(2 * _WINDOW)[None, :]
    np.clip(cols, 0, n - 1, out=cols)
    du = u[:, None] - xs[cols]
    dv = np.maximum(0.0, heights[cols] - np.abs(v)[:, None])
    d = np.min(np.hypot(du, dv), axis=1)
    # guard: every slit outside the candidate range is horizontally at least
    # as far as the range edges, so the window minimum is global whenever it
    # does not exceed those edge offsets
    hi = np.minimum(lo + 2 * _WINDOW - 1, n - 1)
    ok = np.ones(len(u), dtype=bool)
    ok &= (lo == 0) | (d <= np.abs(u - xs[lo]))
    ok &= (hi == n - 1) | (d <= np.abs(u - xs[hi]))
    if not np.all(ok):
        bad = ~ok
        d[bad] = _slit_distance_full(xs, heights, u[bad], v[bad])
    return d


def _nearest_slit_index(xs, heights, u, v):
    u = np.atleast_1d(u)
    v = np.atleast_1d(v)
    du = u[:, None] - xs[None, :]
    dv = np.maximum(0.0, heights[None, :] - np.abs(v)[:, None])
    return np.argmin(np.hypot(du, dv), axis=1)


def distance_to_domain_boundary(domain: SimDomain, point) -> float:
    """Distance from an interior point to the domain boundary (scalar API)."""
    u, v = float(point[0]), float(point[1])
    if not bool(np.all(domain.contains(np.array([u]), np.array([v])))):
        raise ValueError(f"point {(u, v)} is not strictly inside the domain")
    return float(domain.boundary_distance(np.array([u]), np.array([v]))[0])


# ---------------------------------------------------------------------------
# JSON configs


def comb_spec_to_config(spec: CombSpec) -> dict:
    gen = spec.generator
    if isinstance(gen, UniformGaps):
        g = {"kind": "uniform", "spacing": gen.spacing, "height": gen.height}
    elif isinstance(gen, PolynomialGaps):
        g = {"kind": "polynomial", "degree": gen.degree,
             "coefficient": gen.coefficient, "height": gen.height}
    elif isinstance(gen, GeometricGaps):
        g = {"kind": "geometric", "ratio": gen.ratio, "height": gen.height}
    elif isinstance(gen, ExplicitSlits):
        g = {"kind": "explicit", "slits": [[x, b] for x, b in gen.slits]}
        if gen.growth is not None:
            g["growth"] = gen.growth
    else:  # pragma: no cover
        raise TypeError(f"unknown generator {gen!r}")
    cfg = {"generator": g, "one_sided": spec.one_sided}
    if spec.window_radius is not None:
        cfg["window_radius"] = spec.window_radius
    return cfg


def comb_spec_from_config(cfg: dict) -> CombSpec:
    try:
        g = cfg["generator"]
        kind = g["kind"]
        if kind == "uniform":
            gen = UniformGaps(float(g["spacing"]), float(g["height"]))
        elif kind == "polynomial":
            gen = PolynomialGaps(float(g["degree"]), float(g["coefficient"]),
                                 float(g["height"]))
        elif kind == "geometric":
            gen = GeometricGaps(float(g["ratio"]), float(g["height"]))
        elif kind == "explicit":
            gen = ExplicitSlits(tuple((float(x), float(b)) for x, b in g["slits"]),
                                growth=g.get("growth"))
        else:
            raise ValueError(f"unknown generator kind {kind!r}")
    except KeyError as exc:
        raise ValueError(f"comb spec missing field {exc.args[0]!r}") from None
    wr = cfg.get("window_radius")
    return CombSpec(gen, window_radius=None if wr is None else int(wr),
                    one_sided=bool(cfg.get("one_sided", False)))


def domain_to_config(domain: SimDomain) -> dict:
    if isinstance(domain, CombDomain):
        return {"type": "comb", "spec": comb_spec_to_config(domain.spec)}
    if isinstance(domain, Rectangle):
        return {"type": "rectangle", "half_width": domain.half_width,
                "half_height": domain.half_height}
    if isinstance(domain, VerticalStrip):
        return {"type": "vertical_strip", "left": domain.left, "right": domain.right}
    if isinstance(domain, Wedge):
        return {"type": "wedge", "angle": domain.angle}
    if isinstance(domain, HalfPlane):
        return {"type": "half_plane"}
    raise TypeError(f"unknown domain {domain!r}")


def domain_from_config(cfg: dict) -> SimDomain:
    try:
        kind = cfg["type"]
    except KeyError:
        raise ValueError("domain config missing field 'type'") from None
    if kind == "comb":
        return build_comb(comb_spec_from_config(cfg["spec"]))
    if kind == "rectangle":
        dom = Rectangle(float(cfg["half_width"]), float(cfg["half_height"]))
        if dom.half_width <= 0 or dom.half_height <= 0:
            raise ValueError("rectangle needs positive half sizes")
        return dom
    if kind == "vertical_strip":
        dom = VerticalStrip(float(cfg["left"]), float(cfg["right"]))
        if dom.left >= dom.right:
            raise ValueError("vertical strip needs left < right")
        return dom
    if kind == "wedge":
        dom = Wedge(float(cfg["angle"]))
        if not 0.0 < dom.angle < 2.0 * math.pi:
            raise ValueError("wedge angle must be in (0, 2*pi)")
        return dom
    if kind == "half_plane":
        return HalfPlane()
    raise ValueError(f"unknown domain type {kind!r}")


def domain_fingerprint(domain: SimDomain) -> str:
    """SHA-256 of the canonical JSON encoding of the domain config.

    Ties sample sets and report files to the exact domain they were drawn
    from.  Canonical means sorted keys, no whitespace, and ``repr``-style
    float formatting (shortest round-trip), so the digest is stable across
    runs and platforms.
    """
    payload = json.dumps(domain_to_config(domain), sort_keys=True,
                         separators=(",", ":"))
    return hashlib.sha256(payload.encode("ascii")).hexdigest()
