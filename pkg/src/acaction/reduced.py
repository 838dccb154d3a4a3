"""Sharp-interface action functionals on front evolutions.

Fronts are either points moving on a 1D interval or concentric circles
in 2D, each carrying an integer multiplicity.  The action of an
evolution is

    propagation + 4 * (sum of nucleation-event masses),

where per front the propagation rate is (multiplicity) * c0 * |v - H|^2
integrated over the front (points: H = 0; circles: v = dr/dt, scalar
curvature -1/r, so |v - H|^2 = (dr/dt + 1/r)^2).  Event masses are in
energy units: c0 x multiplicity x created interface measure, with a
point birth of a front pair in 1D carrying mass 2 c0 (each interface
point holds mass c0).  Annihilations are free.

The convention is pinned by the hidden-boundary worked example: one
interior 1D nucleation costs exactly 8 c0 after the factor 4.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .potential import SURFACE_TENSION

_TRAJECTORY_KINDS = ("point_1d", "circle_2d")


@dataclass(frozen=True)
class FrontTrajectory:
    """One sampled front: a 1D point path x(t) or a circle radius path r(t)."""

    kind: str
    times: np.ndarray
    positions: np.ndarray
    multiplicity: int = 1
    center: tuple = (0.0, 0.0)

    def __post_init__(self):
        if self.kind not in _TRAJECTORY_KINDS:
            raise ValueError(f"unknown trajectory kind {self.kind!r}")
        t = np.asarray(self.times, dtype=float)
        p = np.asarray(self.positions, dtype=float)
        if t.ndim != 1 or t.size < 2 or t.shape != p.shape:
            raise ValueError("times and positions must be matching 1D arrays (>= 2 samples)")
        if np.any(np.diff(t) <= 0):
            raise ValueError("trajectory times must be strictly increasing")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(p))):
            raise ValueError("trajectory samples must be finite")
        if self.kind == "circle_2d":
            if np.any(p < 0.0):
                raise ValueError("circle radius must be nonnegative")
            if np.any(p[1:-1] <= 0.0):
                raise ValueError("circle radius may vanish only at birth or death")
        if int(self.multiplicity) != self.multiplicity or self.multiplicity < 1:
            raise ValueError("multiplicity must be a positive integer")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "positions", p)
        object.__setattr__(self, "multiplicity", int(self.multiplicity))

    @property
    def birth_time(self):
        return float(self.times[0])

    @property
    def death_time(self):
        return float(self.times[-1])


@dataclass(frozen=True)
class NucleationEvent:
    time: float
    mass: float  # created measure mass, energy units (c0 x multiplicity x measure)

    def __post_init__(self):
        if not (np.isfinite(self.mass) and self.mass > 0):
            raise ValueError(
                "nucleation mass must be positive; split mixed creation/destruction "
                "events into one of each"
            )


@dataclass(frozen=True)
class AnnihilationEvent:
    time: float
    mass: float

    def __post_init__(self):
        if not (np.isfinite(self.mass) and self.mass > 0):
            raise ValueError(
                "annihilation mass must be positive; split mixed creation/destruction "
                "events into one of each"
            )


@dataclass(frozen=True)
class ReducedEvolution:
    trajectories: tuple
    nucleations: tuple = ()
    annihilations: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "trajectories", tuple(self.trajectories))
        object.__setattr__(self, "nucleations", tuple(self.nucleations))
        object.__setattr__(self, "annihilations", tuple(self.annihilations))


@dataclass(frozen=True)
class ReducedActionParts:
    propagation: float
    nucleation: float

    @property
    def total(self):
        return self.propagation + self.nucleation

    def as_dict(self):
        return {
            "propagation": self.propagation,
            "nucleation": self.nucleation,
            "total": self.total,
        }


def nucleation_cost(ev):
    """Raw sum of positive measure-mass jumps (before the factor 4)."""
    return float(sum(e.mass for e in ev.nucleations))


def _point_propagation(traj):
    xdot = np.gradient(traj.positions, traj.times, edge_order=2)
    return traj.multiplicity * SURFACE_TENSION * float(np.trapezoid(xdot**2, traj.times))


def reduced_action_1d(ev):
    """Action parts of a 1D point-front evolution.

    Velocities come from second-order differences of the samples; for a
    straight-line schedule the propagation equals
    multiplicity * c0 * displacement^2 / duration exactly.
    """
    propagation = 0.0
    for traj in ev.trajectories:
        if traj.kind != "point_1d":
            raise ValueError("reduced_action_1d needs point_1d trajectories")
        propagation += _point_propagation(traj)
    return ReducedActionParts(propagation, 4.0 * nucleation_cost(ev))


def _sqrt_segment_cost(r_positive, dt, growing):
    """Exact cost of one circle segment touching r = 0.

    Uses the linear-in-area profile r(t) ~ sqrt(t), whose cost integral
    is finite; it reproduces the reverse-curvature-flow growth cost
    8 pi r when dt = r^2/2 and a free collapse at the curvature-flow
    pace.  Multiplicity and surface tension are applied by the caller.
    """
    phidot = 0.5 * r_positive**2 / dt
    dr = r_positive if growing else -r_positive
    return 2.0 * math.pi * (2.0 * dr + (phidot**2 + 1.0) * 2.0 * dt / r_positive)


def reduced_action_circle(ev):
    """Action parts of a 2D concentric-circle evolution.

    Sign convention: v = dr/dt (outward positive), scalar curvature
    -1/r, so curvature flow dr/dt = -1/r has zero propagation.  Interior
    samples must have r > 0; a vanishing radius at birth or death is
    integrated exactly on that segment along the square-root-in-time
    profile (a point birth at r = 0 therefore costs nothing extra).
    """
    propagation = 0.0
    for traj in ev.trajectories:
        if traj.kind != "circle_2d":
            raise ValueError("reduced_action_circle needs circle_2d trajectories")
        t = traj.times
        r = traj.positions
        lo = 0
        hi = r.size
        head = tail = 0.0
        if r[0] == 0.0:
            head = _sqrt_segment_cost(r[1], t[1] - t[0], growing=True)
            lo = 1
        if r[-1] == 0.0:
            tail = _sqrt_segment_cost(r[-2], t[-1] - t[-2], growing=False)
            hi = r.size - 1
        ts = t[lo:hi]
        rs = r[lo:hi]
        if rs.size >= 2:
            rdot = np.gradient(rs, ts, edge_order=2 if rs.size > 2 else 1)
            integrand = 2.0 * math.pi * rs * (rdot + 1.0 / rs) ** 2
            core = float(np.trapezoid(integrand, ts))
        else:
            core = 0.0
        propagation += traj.multiplicity * SURFACE_TENSION * (core + head + tail)
    return ReducedActionParts(propagation, 4.0 * nucleation_cost(ev))


def reduced_action(ev):
    """Dispatch on trajectory kinds; mixed evolutions sum both parts."""
    points = [t for t in ev.trajectories if t.kind == "point_1d"]
    circles = [t for t in ev.trajectories if t.kind == "circle_2d"]
    propagation = sum(_point_propagation(t) for t in points)
    if circles:
        circ_ev = ReducedEvolution(trajectories=circles)
        propagation += reduced_action_circle(circ_ev).propagation
    return ReducedActionParts(float(propagation), 4.0 * nucleation_cost(ev))


# -- the hidden-boundary worked example -------------------------------------


@dataclass(frozen=True)
class HiddenBoundaryComparison:
    """Cost difference between re-nucleating a phase and keeping a hidden front.

    ``action_u`` is the nucleation cost (8 c0) paid by the phase-only
    description when the phase reappears at x2; ``action_mu`` is the
    propagation cost 2 c0 (x2-x1)^2/(t2-t1) of instead carrying a
    doubled (hidden) front from the annihilation point to the
    re-nucleation point.  Terms the two descriptions share are omitted.
    """

    action_u: float
    action_mu: float
    difference: float
    threshold_satisfied: bool


def example_hidden_boundary(x1, x2, t1, t2):
    """Evaluate the hidden-boundary comparison at given space-time points.

    ``difference = 8 c0 - 2 c0 (x2-x1)^2 / (t2-t1)`` and
    ``threshold_satisfied`` is equivalent to ``difference > 0``, i.e.
    |x2-x1| < 2 sqrt(t2-t1): below the threshold the doubled-front
    (hidden boundary) evolution is strictly cheaper.
    """
    if not (np.isfinite(x1) and np.isfinite(x2) and np.isfinite(t1) and np.isfinite(t2)):
        raise ValueError("inputs must be finite")
    if not t2 > t1:
        raise ValueError("need t2 > t1")
    action_u = 8.0 * SURFACE_TENSION
    action_mu = 2.0 * SURFACE_TENSION * (x2 - x1) ** 2 / (t2 - t1)
    return HiddenBoundaryComparison(
        action_u=action_u,
        action_mu=action_mu,
        difference=action_u - action_mu,
        threshold_satisfied=bool(abs(x2 - x1) < 2.0 * math.sqrt(t2 - t1)),
    )


# -- brute-force schedule oracles -------------------------------------------


def optimal_circle_growth(radius, duration, n_radius=201, n_time=201):
    """Dynamic-programming minimizer of the circle growth cost.

    Minimizes the propagation of growing a circle from r = 0 at t = 0 to
    the given radius at t = duration over schedules that are piecewise
    linear in the enclosed area (which makes every segment cost exact,
    including segments starting at r = 0).  Returns
    ``(times, radii, cost)`` with the cost in energy units (multiplicity
    one, c0 included).
    """
    phis = np.linspace(0.0, 0.5 * radius**2, n_radius)
    rs = np.sqrt(2.0 * phis)
    times = np.linspace(0.0, duration, n_time)
    dt = times[1] - times[0]

    dphi = phis[None, :] - phis[:, None]  # [from, to]
    dr = rs[None, :] - rs[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        phidot = dphi / dt
        move = 2.0 * math.pi * (2.0 * dr + (phidot**2 + 1.0) * dr / phidot)
    # diagonal: static circle, cost rate 2 pi dt / r (infinite at r = 0
    # means "no circle yet", which is free)
    static = np.full(n_radius, np.inf)
    static[1:] = 2.0 * math.pi * dt / rs[1:]
    static[0] = 0.0
    np.fill_diagonal(move, static)
    move[np.tril_indices(n_radius, k=-1)] = np.inf  # monotone growth only

    cost = np.full(n_radius, np.inf)
    cost[0] = 0.0
    choice = np.zeros((n_time - 1, n_radius), dtype=np.intp)
    for k in range(n_time - 1):
        stage = cost[:, None] + move
        choice[k] = np.argmin(stage, axis=0)
        cost = stage[choice[k], np.arange(n_radius)]
    best = float(SURFACE_TENSION * cost[-1])
    # backtrack the schedule
    idx = np.empty(n_time, dtype=np.intp)
    idx[-1] = n_radius - 1
    for k in range(n_time - 2, -1, -1):
        idx[k] = choice[k][idx[k + 1]]
    return times, rs[idx], best


def optimal_switching_1d(length, duration, max_fronts=6, n_random_splits=40, seed=0):
    """Brute-force reduced-action optimum for 1D switching.

    Enumerates wall-front / interior-bubble counts (every created
    interface point costs 4 c0 via its nucleation mass c0; a bubble
    creates two points), with straight-line schedules sweeping the
    domain in the full duration.  Randomized unequal splits of the
    domain double-check that the equal split is optimal.  Returns
    ``(evolution, parts)`` for the best strategy.
    """
    rng = np.random.default_rng(seed)
    best = None
    for walls in (0, 1, 2):
        max_bubbles = (max_fronts - walls) // 2
        for bubbles in range(0, max_bubbles + 1):
            n_fronts = walls + 2 * bubbles
            if n_fronts < 1:
                continue
            splits = [np.full(n_fronts, length / n_fronts)]
            for _ in range(n_random_splits):
                parts = rng.dirichlet(np.ones(n_fronts)) * length
                if np.all(parts > 1e-6):
                    splits.append(parts)
            for widths in splits:
                ev = _switching_evolution(length, duration, walls, bubbles, widths)
                parts = reduced_action_1d(ev)
                if best is None or parts.total < best[1].total:
                    best = (ev, parts)
    return best


def _switching_evolution(length, duration, walls, bubbles, widths, samples=33):
    """Straight-line front schedules tiling [0, length] with given widths.

    Width order: left wall (if any), then (left, right) per bubble, then
    the right wall (if any).  Every front sweeps its own segment over
    the full duration.
    """
    times = np.linspace(0.0, duration, samples)
    frac = times / duration
    trajectories = []
    nucleations = []

    def straight(x_from, x_to):
        return x_from + (x_to - x_from) * frac

    widths = list(widths)
    cursor = 0.0
    k = 0
    if walls >= 1:
        w = widths[k]
        k += 1
        trajectories.append(FrontTrajectory("point_1d", times, straight(0.0, w)))
        nucleations.append(NucleationEvent(0.0, SURFACE_TENSION))
        cursor = w
    for _ in range(bubbles):
        w_left, w_right = widths[k], widths[k + 1]
        k += 2
        center = cursor + w_left
        trajectories.append(FrontTrajectory("point_1d", times, straight(center, center - w_left)))
        trajectories.append(FrontTrajectory("point_1d", times, straight(center, center + w_right)))
        nucleations.append(NucleationEvent(0.0, 2.0 * SURFACE_TENSION))
        cursor = center + w_right
    if walls == 2:
        w = widths[k]
        trajectories.append(FrontTrajectory("point_1d", times, straight(length, length - w)))
        nucleations.append(NucleationEvent(0.0, SURFACE_TENSION))
    return ReducedEvolution(trajectories=trajectories, nucleations=nucleations)


# -- JSON serialization ------------------------------------------------------


def evolution_to_dict(ev):
    return {
        "schema_version": 1,
        "trajectories": [
            {
                "kind": t.kind,
                "times": t.times.tolist(),
                "positions": t.positions.tolist(),
                "multiplicity": t.multiplicity,
                "center": list(t.center),
            }
            for t in ev.trajectories
        ],
        "nucleations": [{"time": e.time, "mass": e.mass} for e in ev.nucleations],
        "annihilations": [{"time": e.time, "mass": e.mass} for e in ev.annihilations],
    }


def evolution_from_dict(data):
    try:
        trajectories = [
            FrontTrajectory(
                kind=t["kind"],
                times=np.asarray(t["times"], dtype=float),
                positions=np.asarray(t["positions"], dtype=float),
                multiplicity=int(t.get("multiplicity", 1)),
                center=tuple(t.get("center", (0.0, 0.0))),
            )
            for t in data["trajectories"]
        ]
        nucleations = [NucleationEvent(e["time"], e["mass"]) for e in data.get("nucleations", [])]
        annihilations = [
            AnnihilationEvent(e["time"], e["mass"]) for e in data.get("annihilations", [])
        ]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed evolution data: {exc}") from exc
    return ReducedEvolution(trajectories, nucleations, annihilations)


def save_evolution(path, ev):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(evolution_to_dict(ev), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_evolution(path):
    with open(path, encoding="utf-8") as fh:
        return evolution_from_dict(json.load(fh))
