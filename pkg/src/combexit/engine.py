"""Monte Carlo samplers for planar Brownian exit times.

Two independent drivers share one sampling contract:

``EulerBridge``
    Fixed-step Euler scheme on the full plane with Brownian-bridge crossing
    tests against every nearby boundary line.  Between consecutive grid
    points the path is a Brownian bridge, so a line at signed distances
    ``d0, d1`` (same side) is crossed with probability ``exp(-2*d0*d1/h)``;
    sign changes are crossings with certainty.  The crossing fraction for a
    detected same-side excursion is drawn uniformly on (0, 1), a first-order
    approximation to the true argmin law that costs O(sqrt(h)) bias and is
    controlled by the step-halving cross checks.  Crossings within a step
    are resolved in fractional-time order, so multi-line events (comb teeth)
    are attributed to the first line actually hit.

``WosTime``
    Walk-on-spheres with clocks.  Each jump moves to a uniform point on the
    largest centered circle inside the domain and advances time by
    ``r**2 * T`` where ``T`` is an exact draw from the unit-disk exit-time
    law (inverse-CDF table from :mod:`combexit.series`).  The walk stops
    inside a ``shell_eps`` collar and snaps to the nearest boundary point
    with zero residual time, a bias of order ``shell_eps**2`` in the clock.

Sample ``i`` of a batch always consumes the generator seeded by
``SeedSequence((master_seed, i))`` and always draws the same block sequence
(sizes depend only on that sample's own lifetime), so results are
bit-identical for any worker count or batch partitioning and individual
samples can be replayed in isolation.

Passage counts are recorded for comb domains only: ``passages`` is the
number of distinct-line tooth crossings including the final exit crossing,
so ``passages > j`` exactly when the path survives ``j`` tooth passages.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .geometry import (
    CombDomain,
    HalfPlane,
    Rectangle,
    SimDomain,
    VerticalStrip,
    Wedge,
    domain_fingerprint,
)
from .series import DiskLawTable, default_disk_law

__all__ = [
    "SimParams",
    "ExitSample",
    "SampleSet",
    "WindowEscapeError",
    "simulate_exit",
    "run_batch",
]

_ENGINES = ("EulerBridge", "WosTime")

# Lockstep chunking: samples in a chunk advance together but draw from
# private substreams, so chunk size is a pure speed/memory knob.
_CHUNK = 4096
_BLOCK_START = 32
_BLOCK_CAP = 8192

# Crossing tests only see lines whose current slot window contains them.
# With step_h <= min_gap**2 / 25 a six-slot window reaches two full gaps
# (at least ten step standard deviations) past the current position on both
# sides, so the per-step probability of brushing an unseen line is below
# exp(-200); sub-slot combs just enumerate every line.
_COMB_SLOTS = 6
_SLOT_OFFSETS = np.arange(-3, 3, dtype=np.int64)

# Boundary-line exit rules for the bridge kernel.
_RULE_SLIT = 0      # exit iff |along| >= par, otherwise a tooth passage
_RULE_SEGMENT = 1   # always exit, along clamped to [-par, par]
_RULE_RAY = 2       # exit iff along >= 0; par = 1.0 snaps misses to the apex


class WindowEscapeError(RuntimeError):
    """A trajectory left the materialized window of a truncated comb.

    Samples beyond the outermost materialized slit would interact with
    teeth the window does not contain, so the whole batch is invalid
    rather than silently biased.
    """


@dataclass(frozen=True)
class SimParams:
    """Sampler configuration.

    ``step_h`` and ``shell_eps`` default to None and are resolved per
    domain at run time: ``step_h = min_gap**2 / 25`` and
    ``shell_eps = 1e-4 * scale``.  Resolved values are echoed back in the
    ``SampleSet`` so a run is reproducible from its report alone.
    """

    engine: str = "EulerBridge"
    step_h: float | None = None
    shell_eps: float | None = None
    time_cap: float = 1e4
    max_steps: int = 10_000_000
    master_seed: int = 0
    workers: int = 1

    def __post_init__(self) -> None:
        if self.engine not in _ENGINES:
            raise ValueError(f"engine must be one of {_ENGINES}, got {self.engine!r}")
        if self.step_h is not None and not self.step_h > 0.0:
            raise ValueError("step_h must be positive")
        if self.shell_eps is not None and not self.shell_eps > 0.0:
            raise ValueError("shell_eps must be positive")
        if not self.time_cap > 0.0:
            raise ValueError("time_cap must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        if not 0 <= int(self.master_seed) < 2**63:
            raise ValueError("master_seed must be a nonnegative 63-bit integer")


@dataclass(frozen=True)
class ExitSample:
    """One trajectory: exit time, exit point, and bookkeeping.

    ``censored`` marks trajectories stopped at ``time_cap`` or
    ``max_steps``; their ``tau`` is the cap value (a lower bound) and
    ``exit_point`` is the last interior position.  ``passages`` is None
    except for comb domains under EulerBridge.
    """

    tau: float
    exit_point: tuple[float, float]
    censored: bool
    passages: int | None
    steps: int
    engine: str


@dataclass(frozen=True)
class SampleSet:
    """A batch of samples plus everything needed to regenerate it."""

    samples: tuple[ExitSample, ...]
    domain_fingerprint: str
    params: SimParams
    total: int
    censored: int

    def taus(self) -> np.ndarray:
        return np.array([s.tau for s in self.samples])

    def censor_mask(self) -> np.ndarray:
        return np.array([s.censored for s in self.samples], dtype=bool)


# ---------------------------------------------------------------------------
# parameter resolution


def _resolve_step_h(params: SimParams, domain: SimDomain) -> float:
    scale = domain.scale()
    h = params.step_h if params.step_h is not None else scale * scale / 25.0
    if h > scale * scale / 4.0:
        raise ValueError(
            f"step_h={h:g} exceeds scale**2/4={scale * scale / 4.0:g}; "
            "crossing tests need several steps per gap width"
        )
    return h

def _resolve_shell_eps(params: SimParams, domain: SimDomain) -> float:
    scale = domain.scale()
    eps = params.shell_eps if params.shell_eps is not None else 1e-4 * scale
    if eps >= scale / 10.0:
        raise ValueError(
            f"shell_eps={eps:g} must stay below scale/10={scale / 10.0:g}; "
            "a wide stopping collar distorts small exit times"
        )
    return eps


def _substream(master_seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence((master_seed, index)))
    )


def _block_sizes():
    size = _BLOCK_START
    while True:
        yield size
        size = min(2 * size, _BLOCK_CAP)


# ---------------------------------------------------------------------------
# boundary lines for the bridge kernel


@dataclass(frozen=True)
class _LineModel:
    """Oriented boundary lines: unit normal n, unit along-direction a,
    offset c (the line is {z : <z, n> = c}), an exit rule, and a rule
    parameter (slit height or segment half-length)."""

    nx: np.ndarray
    ny: np.ndarray
    c: np.ndarray
    ax: np.ndarray
    ay: np.ndarray
    rule: np.ndarray
    par: np.ndarray
    vertical: bool          # all normals (1, 0): comb teeth and strip walls
    track_passages: bool
    escape_lo: float        # abort window for truncated combs
    escape_hi: float


def _line_model(domain: SimDomain) -> _LineModel:
    def pack(rows, vertical=False, track=False, lo=-np.inf, hi=np.inf):
        nx, ny, c, ax, ay, rule, par = (np.array(col, dtype=float) for col in zip(*rows))
        return _LineModel(nx, ny, c, ax, ay, rule.astype(np.int64), par,
                          vertical, track, lo, hi)

    if isinstance(domain, CombDomain):
        rows = [(1.0, 0.0, x, 0.0, 1.0, _RULE_SLIT, b)
                for x, b in zip(domain.xs, domain.line_heights)]
        lo = domain.xs[0] if domain.truncated or domain.one_sided else -np.inf
        hi = domain.xs[-1] if domain.truncated else np.inf
        return pack(rows, vertical=True, track=True, lo=lo, hi=hi)
    if isinstance(domain, VerticalStrip):
        rows = [(1.0, 0.0, domain.left, 0.0, 1.0, _RULE_SLIT, 0.0),
                (1.0, 0.0, domain.right, 0.0, 1.0, _RULE_SLIT, 0.0)]
        return pack(rows, vertical=True)
    if isinstance(domain, Rectangle):
        w, hh = domain.half_width, domain.half_height
        rows = [(1.0, 0.0, w, 0.0, 1.0, _RULE_SEGMENT, hh),
                (1.0, 0.0, -w, 0.0, 1.0, _RULE_SEGMENT, hh),
                (0.0, 1.0, hh, 1.0, 0.0, _RULE_SEGMENT, w),
                (0.0, 1.0, -hh, 1.0, 0.0, _RULE_SEGMENT, w)]
        return pack(rows)
    if isinstance(domain, HalfPlane):
        rows = [(0.0, 1.0, 0.0, 1.0, 0.0, _RULE_SEGMENT, np.inf)]
        return pack(rows)
    if isinstance(domain, Wedge):
        a = domain.angle
        # Snap sub-apex crossings to the apex only when the wedge is convex
        # enough that the segment from the crossing to the apex stays on the
        # boundary side; for reflex wedges a miss is not an exit at all.
        clamp = 1.0 if a <= math.pi else 0.0
        rows = [(0.0, 1.0, 0.0, 1.0, 0.0, _RULE_RAY, clamp),
                (math.sin(a), -math.cos(a), 0.0, math.cos(a), math.sin(a),
                 _RULE_RAY, clamp)]
        return pack(rows)
    raise TypeError(f"no line model for domain {domain!r}")


# ---------------------------------------------------------------------------
# EulerBridge kernel


def _euler_chunk(model: _LineModel, start, h, time_cap, max_steps,
                 master_seed, indices):
    """Advance one chunk of samples to exit or censoring.

    Returns (tau, eu, ev, censored, passages, steps) arrays aligned with
    ``indices``.  All randomness comes from per-sample substreams in fixed
    block order, so the result does not depend on chunk composition.
    """
    m = len(indices)
    n_lines = len(model.c)
    S = min(_COMB_SLOTS, n_lines) if model.vertical else n_lines
    dynamic = model.vertical and n_lines > _COMB_SLOTS
    sqrt_h = math.sqrt(h)

    gens = [_substream(master_seed, int(i)) for i in indices]
    schedule = _block_sizes()

    u = np.full(m, start[0], dtype=float)
    v = np.full(m, start[1], dtype=float)
    t = np.zeros(m)
    steps = np.zeros(m, dtype=np.int64)
    passages = np.zeros(m, dtype=np.int64)
    last_line = np.full(m, -1, dtype=np.int64)
    tau = np.zeros(m)
    eu = np.zeros(m)
    ev = np.zeros(m)
    censored = np.zeros(m, dtype=bool)
    alive = np.ones(m, dtype=bool)

    while True:
        act = np.flatnonzero(alive)
        if act.size == 0:
            break
        T = next(schedule)
        # Block sizes are fixed constants, so the number of draws a sample
        # consumes is a function of its own lifetime alone: one
        # standard_normal call then one random call per block it survives
        # into.  That keeps every sample bit-reproducible in isolation.
        normals = np.empty((act.size, T, 2 + S))
        uniforms = np.empty((act.size, T, 2 * S))
        for row, s in enumerate(act):
            g = gens[s]
            normals[row] = g.standard_normal((T, 2 + S))
            uniforms[row] = g.random((T, 2 * S))

        ua = u[act].copy()
        va = v[act].copy()
        ta = t[act].copy()
        stepsa = steps[act].copy()
        passa = passages[act].copy()
        lasta = last_line[act].copy()
        taua = np.zeros(act.size)
        eua = np.zeros(act.size)
        eva = np.zeros(act.size)
        censa = np.zeros(act.size, dtype=bool)
        run = np.ones(act.size, dtype=bool)

        for k in range(T):
            rows = np.flatnonzero(run)
            if rows.size == 0:
                break
            du = sqrt_h * normals[rows, k, 0]
            dv = sqrt_h * normals[rows, k, 1]
            u1 = ua[rows] + du
            v1 = va[rows] + dv

            if dynamic:
                cell = np.searchsorted(model.c, ua[rows])
                slot = cell[:, None] + _SLOT_OFFSETS[None, :]
                valid = (slot >= 0) & (slot < n_lines)
                slot = np.clip(slot, 0, n_lines - 1)
            else:
                slot = np.broadcast_to(np.arange(S, dtype=np.int64),
                                       (rows.size, S))
                valid = np.ones((rows.size, S), dtype=bool)

            if model.vertical:
                d0 = ua[rows, None] - model.c[slot]
                d1 = u1[:, None] - model.c[slot]
                along0 = va[rows, None]
                dalong = dv[:, None]
            else:
                d0 = (model.nx[slot] * ua[rows, None]
                      + model.ny[slot] * va[rows, None] - model.c[slot])
                d1 = (model.nx[slot] * u1[:, None]
                      + model.ny[slot] * v1[:, None] - model.c[slot])
                along0 = model.ax[slot] * ua[rows, None] + model.ay[slot] * va[rows, None]
                dalong = model.ax[slot] * du[:, None] + model.ay[slot] * dv[:, None]

            prod = d0 * d1
            sign_change = prod < 0.0
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                f_lin = d0 / (d0 - d1)
                p_cross = np.exp(-2.0 * prod / h)
            bern = uniforms[rows, k, 0:S]
            f_uni = uniforms[rows, k, S:2 * S]
            crossed = valid & (sign_change | (bern < p_cross))
            f = np.where(sign_change, f_lin, f_uni)
            bridge_sd = np.sqrt(np.maximum(h * f * (1.0 - f), 0.0))
            along_f = along0 + f * dalong + bridge_sd * normals[rows, k, 2:2 + S]

            rule = model.rule[slot]
            par = model.par[slot]
            is_exit = np.where(
                rule == _RULE_SLIT, np.abs(along_f) >= par,
                np.where(rule == _RULE_SEGMENT, True, along_f >= 0.0))
            ray_clamp = (rule == _RULE_RAY) & (along_f < 0.0) & (par > 0.0)
            is_exit = is_exit | ray_clamp

            # Resolve crossings in time order; the first exit freezes the
            # sample, earlier non-exit slit crossings count as passages.
            f_order = np.where(crossed, f, np.inf)
            order = np.argsort(f_order, axis=1)
            done = np.zeros(rows.size, dtype=bool)
            for r in range(S):
                sl = order[:, r]
                pick = np.take_along_axis(crossed, sl[:, None], 1)[:, 0] & ~done
                if not pick.any():
                    continue
                line_idx = slot[np.arange(rows.size), sl]
                f_here = np.take_along_axis(f, sl[:, None], 1)[:, 0]
                a_here = np.take_along_axis(along_f, sl[:, None], 1)[:, 0]
                exit_here = pick & np.take_along_axis(is_exit, sl[:, None], 1)[:, 0]
                clamp_here = pick & np.take_along_axis(ray_clamp, sl[:, None], 1)[:, 0]
                if exit_here.any():
                    w = np.flatnonzero(exit_here)
                    lw = line_idx[w]
                    a_exit = a_here[w]
                    if model.vertical:
                        px = model.c[lw]
                        py = a_exit
                    else:
                        seg = model.rule[lw] == _RULE_SEGMENT
                        lim = model.par[lw]
                        a_exit = np.where(seg, np.clip(a_exit, -lim, lim), a_exit)
                        a_exit = np.where(clamp_here[w], 0.0, a_exit)
                        px = model.c[lw] * model.nx[lw] + a_exit * model.ax[lw]
                        py = model.c[lw] * model.ny[lw] + a_exit * model.ay[lw]
                    taua[rows[w]] = ta[rows[w]] + f_here[w] * h
                    eua[rows[w]] = px
                    eva[rows[w]] = py
                    stepsa[rows[w]] += 1
                    if model.track_passages:
                        passa[rows[w]] += (lw != lasta[rows[w]]).astype(np.int64)
                    done |= exit_here
                    run[rows[w]] = False
                if model.track_passages:
                    passage = pick & ~exit_here & (model.rule[line_idx] == _RULE_SLIT)
                    w = np.flatnonzero(passage)
                    if w.size:
                        new_line = passage[w] & (line_idx[w] != lasta[rows[w]])
                        passa[rows[w]] += new_line.astype(np.int64)
                        lasta[rows[w]] = line_idx[w]

            alive_rows = rows[run[rows]]
            if alive_rows.size:
                keep = run[rows]
                ua[alive_rows] = u1[keep]
                va[alive_rows] = v1[keep]
                ta[alive_rows] += h
                stepsa[alive_rows] += 1

                if np.isfinite(model.escape_lo) or np.isfinite(model.escape_hi):
                    out = ((ua[alive_rows] < model.escape_lo)
                           | (ua[alive_rows] > model.escape_hi))
                    if out.any():
                        bad = indices[act[alive_rows[np.argmax(out)]]]
                        raise WindowEscapeError(
                            f"sample {int(bad)} left the materialized window "
                            f"[{model.escape_lo:g}, {model.escape_hi:g}]; rebuild "
                            "the comb with a larger window_radius before sampling"
                        )

                capped = ta[alive_rows] >= time_cap
                exhausted = stepsa[alive_rows] >= max_steps
                stop = capped | exhausted
                if stop.any():
                    w = alive_rows[stop]
                    taua[w] = np.minimum(ta[w], time_cap)
                    eua[w] = ua[w]
                    eva[w] = va[w]
                    censa[w] = True
                    run[w] = False

        u[act] = ua
        v[act] = va
        t[act] = ta
        steps[act] = stepsa
        passages[act] = passa
        last_line[act] = lasta
        fin = ~run
        done_idx = act[fin]
        tau[done_idx] = taua[fin]
        eu[done_idx] = eua[fin]
        ev[done_idx] = eva[fin]
        censored[done_idx] = censa[fin]
        alive[done_idx] = False

    if not model.track_passages:
        return tau, eu, ev, censored, None, steps
    return tau, eu, ev, censored, passages, steps


# ---------------------------------------------------------------------------
# WosTime kernel


def _wos_chunk(domain: SimDomain, start, eps, time_cap, max_steps,
               master_seed, indices, table: DiskLawTable):
    m = len(indices)
    gens = [_substream(master_seed, int(i)) for i in indices]
    schedule = _block_sizes()

    comb_window = isinstance(domain, CombDomain) and (domain.truncated
                                                      or domain.one_sided)
    lo = domain.xs[0] if comb_window else -np.inf
    hi = domain.xs[-1] if comb_window and domain.truncated else np.inf

    u = np.full(m, start[0], dtype=float)
    v = np.full(m, start[1], dtype=float)
    t = np.zeros(m)
    steps = np.zeros(m, dtype=np.int64)
    tau = np.zeros(m)
    eu = np.zeros(m)
    ev = np.zeros(m)
    censored = np.zeros(m, dtype=bool)
    alive = np.ones(m, dtype=bool)

    while True:
        act = np.flatnonzero(alive)
        if act.size == 0:
            break
        T = next(schedule)
        uniforms = np.empty((act.size, T, 2))
        for row, s in enumerate(act):
            uniforms[row] = gens[s].random((T, 2))

        ua = u[act].copy()
        va = v[act].copy()
        ta = t[act].copy()
        stepsa = steps[act].copy()
        taua = np.zeros(act.size)
        eua = np.zeros(act.size)
        eva = np.zeros(act.size)
        censa = np.zeros(act.size, dtype=bool)
        run = np.ones(act.size, dtype=bool)

        for k in range(T):
            rows = np.flatnonzero(run)
            if rows.size == 0:
                break
            r = domain.boundary_distance(ua[rows], va[rows])

            hit = r < eps
            if hit.any():
                w = rows[hit]
                bu, bv = domain.nearest_boundary(ua[w], va[w])
                taua[w] = ta[w]
                eua[w] = bu
                eva[w] = bv
                run[w] = False

            go = rows[~hit]
            if go.size:
                rg = r[~hit]
                ang = 2.0 * math.pi * uniforms[rows, k, 0][~hit]
                dt = rg * rg * table.times_from_uniform(uniforms[rows, k, 1][~hit])
                ua[go] += rg * np.cos(ang)
                va[go] += rg * np.sin(ang)
                ta[go] += dt
                stepsa[go] += 1

                out = (ua[go] < lo) | (ua[go] > hi)
                if out.any():
                    bad = indices[act[go[np.argmax(out)]]]
                    raise WindowEscapeError(
                        f"sample {int(bad)} left the materialized window "
                        f"[{lo:g}, {hi:g}]; rebuild the comb with a larger "
                        "window_radius before sampling"
                    )

                stop = (ta[go] >= time_cap) | (stepsa[go] >= max_steps)
                if stop.any():
                    w = go[stop]
                    taua[w] = np.minimum(ta[w], time_cap)
                    eua[w] = ua[w]
                    eva[w] = va[w]
                    censa[w] = True
                    run[w] = False

        u[act] = ua
        v[act] = va
        t[act] = ta
        steps[act] = stepsa
        fin = ~run
        done_idx = act[fin]
        tau[done_idx] = taua[fin]
        eu[done_idx] = eua[fin]
        ev[done_idx] = eva[fin]
        censored[done_idx] = censa[fin]
        alive[done_idx] = False

    return tau, eu, ev, censored, None, steps


# ---------------------------------------------------------------------------
# drivers


def _simulate_range(domain: SimDomain, start, params: SimParams,
                    lo: int, hi: int):
    """Run samples lo..hi-1 and return column arrays (top-level so worker
    processes can unpickle it)."""
    cols = []
    if params.engine == "EulerBridge":
        model = _line_model(domain)
        h = params.step_h
        for c0 in range(lo, hi, _CHUNK):
            idx = np.arange(c0, min(c0 + _CHUNK, hi), dtype=np.int64)
            cols.append(_euler_chunk(model, start, h, params.time_cap,
                                     params.max_steps, params.master_seed, idx))
    else:
        table = default_disk_law()
        eps = params.shell_eps
        for c0 in range(lo, hi, _CHUNK):
            idx = np.arange(c0, min(c0 + _CHUNK, hi), dtype=np.int64)
            cols.append(_wos_chunk(domain, start, eps, params.time_cap,
                                   params.max_steps, params.master_seed, idx,
                                   table))
    tau = np.concatenate([c[0] for c in cols])
    eu = np.concatenate([c[1] for c in cols])
    ev = np.concatenate([c[2] for c in cols])
    cen = np.concatenate([c[3] for c in cols])
    if cols[0][4] is None:
        passages = None
    else:
        passages = np.concatenate([c[4] for c in cols])
    steps = np.concatenate([c[5] for c in cols])
    return tau, eu, ev, cen, passages, steps


def _resolve(domain: SimDomain, start, params: SimParams) -> SimParams:
    u0, v0 = float(start[0]), float(start[1])
    if not bool(domain.contains(u0, v0)):
        raise ValueError(f"start point ({u0:g}, {v0:g}) is not inside the domain")
    if params.engine == "EulerBridge":
        return replace(params, step_h=_resolve_step_h(params, domain))
    return replace(params, shell_eps=_resolve_shell_eps(params, domain))


def simulate_exit(domain: SimDomain, start, params: SimParams,
                  sample_index: int = 0) -> ExitSample:
    """Simulate a single trajectory.

    ``sample_index`` selects the substream, so
    ``simulate_exit(..., sample_index=i)`` reproduces sample ``i`` of
    ``run_batch`` with the same parameters, bit for bit.
    """
    resolved = _resolve(domain, start, params)
    tau, eu, ev, cen, passages, steps = _simulate_range(
        domain, (float(start[0]), float(start[1])), resolved,
        sample_index, sample_index + 1)
    return ExitSample(
        tau=float(tau[0]),
        exit_point=(float(eu[0]), float(ev[0])),
        censored=bool(cen[0]),
        passages=None if passages is None else int(passages[0]),
        steps=int(steps[0]),
        engine=resolved.engine,
    )


def run_batch(domain: SimDomain, start, n: int, params: SimParams) -> SampleSet:
    """Simulate ``n`` independent trajectories from ``start``.

    Work is split over ``params.workers`` processes by contiguous index
    range; the per-sample substreams make the output identical for every
    worker count.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    resolved = _resolve(domain, start, params)
    start = (float(start[0]), float(start[1]))

    if resolved.workers == 1 or n < 2 * _CHUNK:
        parts = [_simulate_range(domain, start, resolved, 0, n)]
    else:
        bounds = np.linspace(0, n, resolved.workers + 1).astype(int)
        ranges = [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:])
                  if b > a]
        with ProcessPoolExecutor(max_workers=resolved.workers) as pool:
            futures = [pool.submit(_simulate_range, domain, start, resolved,
                                   lo, hi) for lo, hi in ranges]
            parts = [f.result() for f in futures]

    tau = np.concatenate([p[0] for p in parts])
    eu = np.concatenate([p[1] for p in parts])
    ev = np.concatenate([p[2] for p in parts])
    cen = np.concatenate([p[3] for p in parts])
    has_passages = parts[0][4] is not None
    passages = (np.concatenate([p[4] for p in parts]) if has_passages else None)
    steps = np.concatenate([p[5] for p in parts])

    samples = tuple(
        ExitSample(
            tau=float(tau[i]),
            exit_point=(float(eu[i]), float(ev[i])),
            censored=bool(cen[i]),
            passages=int(passages[i]) if has_passages else None,
            steps=int(steps[i]),
            engine=resolved.engine,
        )
        for i in range(n)
    )
    return SampleSet(
        samples=samples,
        domain_fingerprint=domain_fingerprint(domain),
        params=resolved,
        total=n,
        censored=int(cen.sum()),
    )
