"""Sharp-interface observables computed from diffuse space-time paths.

Per time interval the fields are evaluated at the midpoint state (the
same state the action's curvature term uses) with the forward time
difference, so the pointwise algebraic identity

    action_density = eps |grad u|^2 (V - H_n)^2      off the mask

holds exactly, where V = -du/dt / |grad u| and H_n = w / (eps |grad u|).
Nodes with |grad u| <= delta are masked and carry zero velocity and
curvature by convention; delta = 1e-8 * max |grad u| per interval.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree
from skimage import measure as _sk_measure

from .functionals import (
    _interval_terms,
    _raw_chemical_potential,
    _raw_energy_density,
    check_interface_resolution,
    discrepancy_density,
    energy,
)
from .mesh import raw_gradient
from .potential import SURFACE_TENSION

MASK_RELATIVE_THRESHOLD = 1e-8

#: Energy jump between consecutive snapshots flagged as a candidate nucleation.
NUCLEATION_JUMP_THRESHOLD = 0.5 * SURFACE_TENSION


@dataclass(frozen=True)
class DiffuseObservables:
    """Per-interval interface fields of a path.

    ``velocity`` and ``curvature`` have shape (M, dim, *grid.shape);
    the scalar fields and ``mask`` have shape (M, *grid.shape).
    """

    times: np.ndarray  # interval midpoints
    velocity: np.ndarray
    curvature: np.ndarray
    normal_velocity: np.ndarray
    normal_curvature: np.ndarray
    mask: np.ndarray


def observables(path, eps):
    """Compute all diffuse observables of a path in one pass."""
    check_interface_resolution(eps, path.grid)
    grid = path.grid
    m_count = path.num_intervals
    dim = grid.dim
    vel = np.zeros((m_count, dim) + grid.shape)
    cur = np.zeros((m_count, dim) + grid.shape)
    nv = np.zeros((m_count,) + grid.shape)
    nc = np.zeros((m_count,) + grid.shape)
    masks = np.zeros((m_count,) + grid.shape, dtype=bool)
    dts = path.interval_widths
    for m in range(m_count):
        u_theta = 0.5 * (path.values[m] + path.values[m + 1])
        ut = (path.values[m + 1] - path.values[m]) / dts[m]
        grads = raw_gradient(u_theta, grid)
        gnorm = np.sqrt(sum(g * g for g in grads))
        delta = MASK_RELATIVE_THRESHOLD * float(gnorm.max())
        mask = gnorm <= delta
        masks[m] = mask
        safe = np.where(mask, 1.0, gnorm)
        w = _raw_chemical_potential(u_theta, grid, eps)
        nv[m] = np.where(mask, 0.0, -ut / safe)
        nc[m] = np.where(mask, 0.0, w / (eps * safe))
        for a in range(dim):
            vel[m, a] = np.where(mask, 0.0, -ut * grads[a] / safe**2)
            cur[m, a] = np.where(mask, 0.0, w * grads[a] / (eps * safe**2))
    mid = 0.5 * (path.times[:-1] + path.times[1:])
    return DiffuseObservables(mid, vel, cur, nv, nc, masks)


def diffuse_velocity(path, eps):
    """Per-interval velocity vector field v = -(du/dt) grad u / |grad u|^2."""
    return observables(path, eps).velocity


def diffuse_curvature(path, eps):
    """Per-interval curvature vector field H = w grad u / (eps |grad u|^2)."""
    return observables(path, eps).curvature


def equipartition_residual(u, eps):
    """Integral of |discrepancy| over the energy; 0 is perfect equipartition."""
    num = float(np.sum(u.grid.quadrature_weights * np.abs(discrepancy_density(u, eps).values)))
    return num / max(energy(u, eps), 1e-30)


# -- interface extraction --------------------------------------------------


@dataclass(frozen=True)
class InterfaceLocus:
    """A connected piece of the zero level set.

    1D: a single crossing point (measure 1 by convention).
    2D: a polyline with its arc length as measure.
    """

    vertices: np.ndarray  # (k, dim) physical coordinates
    measure: float
    closed: bool = False


def extract_interface(u):
    """Zero level set loci of a field: crossings in 1D, polylines in 2D."""
    grid = u.grid
    if grid.dim == 1:
        x = grid.coords()
        v = u.values
        loci = []
        for i in range(v.size - 1):
            a, b = v[i], v[i + 1]
            if a == 0.0:
                loci.append(InterfaceLocus(np.array([[x[i]]]), 1.0))
            elif a * b < 0.0:
                t = a / (a - b)
                loci.append(InterfaceLocus(np.array([[x[i] + t * (x[i + 1] - x[i])]]), 1.0))
        if v[-1] == 0.0:
            loci.append(InterfaceLocus(np.array([[x[-1]]]), 1.0))
        return loci
    contours = _sk_measure.find_contours(u.values, 0.0)
    hx, hy = grid.spacings
    loci = []
    for c in contours:
        verts = np.column_stack([c[:, 0] * hx, c[:, 1] * hy])
        seg = np.linalg.norm(np.diff(verts, axis=0), axis=1)
        closed = bool(np.allclose(verts[0], verts[-1]))
        loci.append(InterfaceLocus(verts, float(seg.sum()), closed))
    return loci


@dataclass(frozen=True)
class MultiplicityEstimate:
    value: float
    tube_energy: float
    locus_measure: float
    ambiguous: bool = False


def _tube_mask(grid, locus, tube_radius):
    if grid.dim == 1:
        x = grid.coords()
        return np.abs(x - locus.vertices[0, 0]) <= tube_radius
    xx, yy = grid.coords()
    pts = np.column_stack([xx.ravel(), yy.ravel()])
    dist, _ = cKDTree(locus.vertices).query(pts)
    return (dist <= tube_radius).reshape(grid.shape)


def multiplicity(u, eps, locus, tube_radius, others=()):
    """Tube-energy multiplicity of one interface locus.

    The energy inside the tube of the given radius around the locus is
    divided by (surface tension) x (locus measure).  A well-separated
    single transition layer gives 1; collapsing pairs give 2.  If the
    tube overlaps the tube of any locus in ``others`` the estimate is
    flagged ambiguous.
    """
    check_interface_resolution(eps, u.grid)
    grid = u.grid
    tube = _tube_mask(grid, locus, tube_radius)
    dens = _raw_energy_density(u.values, grid, eps)
    tube_energy = float(np.sum(grid.quadrature_weights[tube] * dens[tube]))
    ambiguous = False
    for other in others:
        if other is locus:
            continue
        if np.any(tube & _tube_mask(grid, other, tube_radius)):
            ambiguous = True
            break
    return MultiplicityEstimate(
        value=tube_energy / (SURFACE_TENSION * locus.measure),
        tube_energy=tube_energy,
        locus_measure=locus.measure,
        ambiguous=ambiguous,
    )


@dataclass
class InterfaceTrack:
    """Per-snapshot interface loci with multiplicities and tube energies."""

    times: list = field(default_factory=list)
    loci: list = field(default_factory=list)  # list (per snapshot) of InterfaceLocus
    multiplicities: list = field(default_factory=list)  # list of MultiplicityEstimate

    def as_dict(self):
        return {
            "times": [float(t) for t in self.times],
            "snapshots": [
                [
                    {
                        "vertices": locus.vertices.tolist(),
                        "measure": locus.measure,
                        "closed": locus.closed,
                        "multiplicity": est.value,
                        "tube_energy": est.tube_energy,
                        "ambiguous": est.ambiguous,
                    }
                    for locus, est in zip(snap_loci, snap_mult)
                ]
                for snap_loci, snap_mult in zip(self.loci, self.multiplicities)
            ],
        }


def track_interfaces(path, eps, tube_radius=None):
    """Extract and weigh the interface in every snapshot of a path."""
    if tube_radius is None:
        tube_radius = 5.0 * eps
    track = InterfaceTrack()
    for m in range(path.times.size):
        u = path.snapshot(m)
        loci = extract_interface(u)
        ests = [multiplicity(u, eps, locus, tube_radius, others=loci) for locus in loci]
        track.times.append(float(path.times[m]))
        track.loci.append(loci)
        track.multiplicities.append(ests)
    return track


# -- lower bound ------------------------------------------------------------


@dataclass(frozen=True)
class LowerBoundGap:
    """Action versus its interface part.

    ``lhs`` is the discrete action; ``rhs`` restricts the integrand to
    nodes with resolved gradient via eps |grad u|^2 |v - H|^2; ``gap``
    is the masked remainder and is nonnegative up to rounding.
    """

    gap: float
    lhs: float
    rhs: float
    interval_lhs: np.ndarray
    interval_rhs: np.ndarray


def lower_bound_gap(path, eps):
    check_interface_resolution(eps, path.grid)
    grid = path.grid
    wq = grid.quadrature_weights
    dts = path.interval_widths
    obs = observables(path, eps)
    lhs_parts = np.empty(path.num_intervals)
    rhs_parts = np.empty(path.num_intervals)
    for m in range(path.num_intervals):
        _, _, _, _, r = _interval_terms(
            path.values[m], path.values[m + 1], dts[m], eps, grid, wq
        )
        u_theta = 0.5 * (path.values[m] + path.values[m + 1])
        grads = raw_gradient(u_theta, grid)
        gsq = sum(g * g for g in grads)
        diff_sq = sum((obs.velocity[m, a] - obs.curvature[m, a]) ** 2 for a in range(grid.dim))
        integrand = eps * gsq * diff_sq
        off = ~obs.mask[m]
        lhs_parts[m] = dts[m] * float(np.sum(wq * r * r))
        rhs_parts[m] = dts[m] * float(np.sum((wq * integrand)[off]))
    lhs = float(lhs_parts.sum())
    rhs = float(rhs_parts.sum())
    return LowerBoundGap(lhs - rhs, lhs, rhs, lhs_parts, rhs_parts)


# -- nucleation detection and reduced-evolution extraction -----------------


def detect_nucleations(path, eps, threshold=NUCLEATION_JUMP_THRESHOLD):
    """Times where the total energy jumps up by more than the threshold."""
    energies = [energy(path.snapshot(m), eps) for m in range(path.times.size)]
    events = []
    for m in range(1, len(energies)):
        jump = energies[m] - energies[m - 1]
        if jump > threshold:
            events.append((float(path.times[m]), float(jump)))
    return events


def extract_reduced_evolution(path, eps, tube_radius=None):
    """Distill a diffuse path into a sharp-interface evolution.

    1D: zero crossings are tracked across snapshots into point-front
    trajectories (nearest-neighbour matching); front births are recorded
    as nucleation events with mass c0 per created crossing, deaths as
    annihilations.  2D: supports the single-closed-contour case, turned
    into one circle trajectory via radius = length / (2 pi).
    """
    from .reduced import AnnihilationEvent, FrontTrajectory, NucleationEvent, ReducedEvolution

    if tube_radius is None:
        tube_radius = 5.0 * eps
    grid = path.grid
    times = path.times
    if grid.dim == 1:
        snapshots = [extract_interface(path.snapshot(m)) for m in range(times.size)]
        grace = 3  # snapshots a front may vanish for before counting a death
        active = {}  # id -> dict(times=[], positions=[], missing=int)
        done = []
        nucleations = []
        annihilations = []
        next_id = 0
        for m, loci in enumerate(snapshots):
            positions = [float(l.vertices[0, 0]) for l in loci]
            matched = {}
            used = set()
            for fid, rec in active.items():
                last = rec["positions"][-1]
                best, best_d = None, np.inf
                for j, p in enumerate(positions):
                    if j in used:
                        continue
                    d = abs(p - last)
                    if d < best_d:
                        best, best_d = j, d
                if best is not None and best_d < 0.25 * grid.extents[0]:
                    matched[fid] = best
                    used.add(best)
            for fid, rec in list(active.items()):
                if fid in matched:
                    j = matched[fid]
                    rec["times"].append(float(times[m]))
                    rec["positions"].append(positions[j])
                    rec["missing"] = 0
                else:
                    rec["missing"] += 1
                    if rec["missing"] > grace or m == times.size - 1:
                        done.append(rec)
                        annihilations.append((float(times[m]), SURFACE_TENSION))
                        del active[fid]
            for j, p in enumerate(positions):
                if j not in used:
                    active[next_id] = {
                        "times": [float(times[m])],
                        "positions": [p],
                        "missing": 0,
                    }
                    if m > 0:
                        nucleations.append((float(times[m]), SURFACE_TENSION))
                    next_id += 1
        done.extend(active.values())
        trajectories = [
            FrontTrajectory(
                kind="point_1d",
                times=np.asarray(rec["times"]),
                positions=np.asarray(rec["positions"]),
                multiplicity=1,
            )
            for rec in done
            if len(rec["times"]) >= 2
        ]
        return ReducedEvolution(
            trajectories=trajectories,
            nucleations=[NucleationEvent(t, m_) for t, m_ in nucleations],
            annihilations=[AnnihilationEvent(t, m_) for t, m_ in annihilations],
        )
    # 2D: single shrinking/growing circle
    radii = []
    kept_times = []
    center = None
    for m in range(times.size):
        loci = extract_interface(path.snapshot(m))
        if len(loci) != 1 or not loci[0].closed:
            continue
        radii.append(loci[0].measure / (2.0 * np.pi))
        kept_times.append(float(times[m]))
        center = tuple(loci[0].vertices.mean(axis=0))
    if len(radii) < 2:
        return ReducedEvolution(trajectories=[], nucleations=[], annihilations=[])
    traj = FrontTrajectory(
        kind="circle_2d",
        times=np.asarray(kept_times),
        positions=np.asarray(radii),
        multiplicity=1,
        center=center,
    )
    return ReducedEvolution(trajectories=[traj], nucleations=[], annihilations=[])


# -- weak-flow pairing ------------------------------------------------------


def velocity_flow_pairing(path, eps, test_functions=None):
    """Discrete pairing |integral of (dphi/dt + grad phi . v) d(energy measure)|.

    Evaluated for a dictionary of compactly-in-time supported test
    functions.  Small values indicate the measure-velocity pair behaves
    like a weak evolution without hidden singular drift.  Each test
    function is a triple ``(f, ft, fgrads)`` of callables of (t, *X).
    """
    grid = path.grid
    if test_functions is None:
        test_functions = _default_test_functions(grid, path.times)
    obs = observables(path, eps)
    wq = grid.quadrature_weights
    dts = path.interval_widths
    coords = grid.coords() if grid.dim > 1 else (grid.coords(),)
    results = []
    for f, ft, fgrads in test_functions:
        total = 0.0
        for m in range(path.num_intervals):
            tm = 0.5 * (path.times[m] + path.times[m + 1])
            u_theta = 0.5 * (path.values[m] + path.values[m + 1])
            dens = _raw_energy_density(u_theta, grid, eps)
            term = ft(tm, *coords)
            for a in range(grid.dim):
                term = term + fgrads[a](tm, *coords) * obs.velocity[m, a]
            total += dts[m] * float(np.sum(wq * term * dens))
        results.append(abs(total))
    return results


def _default_test_functions(grid, times):
    t0, t1 = float(times[0]), float(times[-1])
    span = t1 - t0

    def bump(t):
        s = (t - t0) / span
        return np.sin(np.pi * s) ** 2

    def bump_t(t):
        s = (t - t0) / span
        return 2.0 * np.sin(np.pi * s) * np.cos(np.pi * s) * np.pi / span

    funcs = []
    for k in (1, 2):
        ell = grid.extents[0]
        wave = np.pi * k / ell

        if grid.dim == 1:

            def f(t, x, wave=wave):
                return bump(t) * np.cos(wave * x)

            def ft(t, x, wave=wave):
                return bump_t(t) * np.cos(wave * x)

            def fx(t, x, wave=wave):
                return -wave * bump(t) * np.sin(wave * x)

            funcs.append((f, ft, (fx,)))
        else:

            def f(t, x, y, wave=wave):
                return bump(t) * np.cos(wave * x)

            def ft(t, x, y, wave=wave):
                return bump_t(t) * np.cos(wave * x)

            def fx(t, x, y, wave=wave):
                return -wave * bump(t) * np.sin(wave * x)

            def fy(t, x, y, wave=wave):
                return np.zeros_like(x)

            funcs.append((f, ft, (fx, fy)))
    return funcs
