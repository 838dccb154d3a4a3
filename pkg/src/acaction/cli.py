"""Batch command-line front end.

Subcommands: ``simulate`` (run the deterministic or noisy flow),
``minimize`` (minimum-action switching path), ``diagnose`` (interface
observables of a stored path), ``reduced`` (sharp-interface action of an
evolution file), ``compare`` (diffuse action of a path against the
reduced action of an evolution).

Exit codes: 0 success, 2 configuration/validation error, 3 numerical
failure.  Outputs are byte-deterministic for a fixed config and seed.
"""

import argparse
import hashlib
import json
import os
import sys
from importlib import resources

import numpy as np

from . import diagnostics, dynamics, minimizer, reduced, runtime, storage
from .errors import ConfigError, NumericalFailure
from .functionals import action
from .kernels import backend_name
from .mesh import Grid, ScalarField
from .potential import optimal_profile

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


# -- config handling ---------------------------------------------------------


def _load_config(spec):
    """Read a JSON config from a file path or a shipped preset name."""
    if os.path.exists(spec):
        text = open(spec, encoding="utf-8").read()
    else:
        candidate = resources.files("acaction").joinpath("presets", f"{spec}.json")
        if candidate.is_file():
            text = candidate.read_text(encoding="utf-8")
        else:
            raise ConfigError("config", f"no such file or preset: {spec}")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"malformed JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config", "top level must be an object")
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError("schema_version", f"expected {SCHEMA_VERSION}, got {version!r}")
    return data


def _require(cfg, key, kind=None):
    if key not in cfg:
        raise ConfigError(key, "missing required key")
    value = cfg[key]
    if kind is not None and not isinstance(value, kind):
        raise ConfigError(key, f"expected {kind.__name__}, got {type(value).__name__}")
    return value


def _grid_from_config(cfg):
    gspec = _require(cfg, "grid", dict)
    try:
        return Grid(
            tuple(_require(gspec, "extents", list)),
            tuple(_require(gspec, "counts", list)),
            gspec.get("bc", "neumann"),
        )
    except ValueError as exc:
        raise ConfigError("grid", str(exc)) from exc


def _eps_from_config(cfg):
    eps = _require(cfg, "eps")
    if not isinstance(eps, (int, float)) or not np.isfinite(eps) or eps <= 0:
        raise ConfigError("eps", "must be a positive number")
    return float(eps)


def _initial_field(cfg, grid, eps):
    spec = _require(cfg, "initial", dict)
    kind = _require(spec, "kind", str)
    if kind == "constant":
        return ScalarField.constant(grid, _require(spec, "value"))
    if kind == "tanh_front":
        position = float(_require(spec, "position"))
        x = grid.coords() if grid.dim == 1 else grid.coords()[0]
        return ScalarField(grid, optimal_profile((x - position) / eps))
    if kind == "tanh_circle":
        if grid.dim != 2:
            raise ConfigError("initial.kind", "tanh_circle needs a 2D grid")
        radius = float(_require(spec, "radius"))
        cx, cy = spec.get("center", [e / 2 for e in grid.extents])
        xx, yy = grid.coords()
        dist = np.hypot(xx - cx, yy - cy)
        return ScalarField(grid, optimal_profile((radius - dist) / eps))
    if kind == "cosine":
        amplitude = float(spec.get("amplitude", 0.01))
        mode = int(spec.get("mode", 1))
        base = float(spec.get("base", 0.0))
        x = grid.coords() if grid.dim == 1 else grid.coords()[0]
        return ScalarField(grid, base + amplitude * np.cos(mode * np.pi * x / grid.extents[0]))
    raise ConfigError("initial.kind", f"unknown initial state {kind!r}")


def _times_from_config(cfg):
    spec = _require(cfg, "times", dict)
    if "values" in spec:
        times = np.asarray(spec["values"], dtype=float)
    else:
        total = float(_require(spec, "total"))
        slices = int(_require(spec, "slices"))
        if total <= 0 or slices < 1:
            raise ConfigError("times", "need total > 0 and slices >= 1")
        grading = spec.get("grading", "uniform")
        s = np.linspace(0.0, 1.0, slices + 1)
        if grading == "uniform":
            times = total * s
        elif grading == "quadratic":
            times = total * s**2
        elif grading == "nucleation":
            # geometric head resolving the barrier climb, then uniform steps;
            # `slices` is ignored in favor of the step sizes
            step = float(spec.get("step", total / slices))
            head_step = float(spec.get("head_step", step / 12.0))
            growth = float(spec.get("head_growth", 1.35))
            if not (0 < head_step <= step and growth > 1.0):
                raise ConfigError("times", "need 0 < head_step <= step and head_growth > 1")
            head = [0.0]
            dt = head_step
            while dt < step and head[-1] < total / 4.0:
                head.append(head[-1] + dt)
                dt *= growth
            rest = np.arange(head[-1] + step, total + 1e-12, step)
            times = np.concatenate([head, rest])
            if abs(times[-1] - total) > 1e-12:
                times = np.append(times, total)
        else:
            raise ConfigError("times.grading", f"unknown grading {grading!r}")
    if times.ndim != 1 or times.size < 2 or np.any(np.diff(times) <= 0):
        raise ConfigError("times", "must be strictly increasing with at least two entries")
    return times


def _write_json(path, data):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _say(quiet, *parts):
    if not quiet:
        print(*parts)


# -- subcommands -------------------------------------------------------------


def cmd_simulate(args):
    cfg = _load_config(args.config)
    grid = _grid_from_config(cfg)
    eps = _eps_from_config(cfg)
    u0 = _initial_field(cfg, grid, eps)
    fspec = _require(cfg, "flow", dict)
    flow_cfg = dynamics.FlowConfig(
        eps=eps,
        dt=float(_require(fspec, "dt")),
        steps=int(_require(fspec, "steps")),
        scheme=fspec.get("scheme", "semi_implicit"),
    )
    flow_cfg.validate_for(grid)
    record_every = int(fspec.get("record_every", 1))
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    noise_spec = cfg.get("noise")
    if noise_spec is not None:
        noise = dynamics.NoiseConfig(
            gamma=float(_require(noise_spec, "gamma")),
            lam=float(_require(noise_spec, "lambda")),
            seed=seed,
        )
        noise.validate_for(grid)
        path = dynamics.run_stochastic(u0, flow_cfg, noise, record_every=record_every)
    else:
        path = dynamics.run_flow(u0, flow_cfg, record_every=record_every)

    os.makedirs(args.output, exist_ok=True)
    path_file = os.path.join(args.output, "path.acpath")
    storage.write_path(path_file, path)
    from .functionals import energy

    rows = []
    for m in range(path.times.size):
        snap = path.snapshot(m)
        rows.append(
            (
                path.times[m],
                energy(snap, eps),
                diagnostics.equipartition_residual(snap, eps),
            )
        )
    trace_file = os.path.join(args.output, "energy_trace.csv")
    storage.write_csv(
        trace_file,
        ["time [t]", "energy [1]", "equipartition_residual [1]"],
        rows,
    )
    if grid.dim == 2:
        radius_rows = []
        for m in range(path.times.size):
            loci = diagnostics.extract_interface(path.snapshot(m))
            closed = [l for l in loci if l.closed]
            if len(closed) == 1:
                radius_rows.append((path.times[m], closed[0].measure / (2.0 * np.pi)))
        if radius_rows:
            storage.write_csv(
                os.path.join(args.output, "interface_radius.csv"),
                ["time [t]", "radius [length]"],
                radius_rows,
            )
    meta = {
        "command": "simulate",
        "schema_version": SCHEMA_VERSION,
        "config": cfg,
        "seed": seed,
        "backend": backend_name(),
        "snapshots": int(path.times.size),
        "energy_trace": [[float(t), float(e), float(q)] for t, e, q in rows],
    }
    _write_json(os.path.join(args.output, "run.json"), meta)
    _say(args.quiet, f"simulate: {path.times.size} snapshots -> {path_file}")
    return EXIT_OK


def cmd_minimize(args):
    cfg = _load_config(args.config)
    grid = _grid_from_config(cfg)
    eps = _eps_from_config(cfg)
    times = _times_from_config(cfg)
    pspec = _require(cfg, "initial_path", dict)
    kind = _require(pspec, "kind", str)
    if kind == "from_file":
        path0 = storage.read_path(_require(pspec, "path", str))
    else:
        try:
            path0 = minimizer.initial_path(kind, grid, times, eps)
        except ValueError as exc:
            raise ConfigError("initial_path.kind", str(exc)) from exc
    if cfg.get("endpoints", "free") == "switching":
        if not (np.all(path0.values[0] == -1.0) and np.all(path0.values[-1] == 1.0)):
            raise ConfigError("endpoints", "switching preset needs u(0) = -1 and u(T) = +1")
    mspec = _require(cfg, "minimize", dict)
    mcfg = minimizer.MinimizeConfig(
        max_iterations=int(mspec.get("max_iterations", 500)),
        gradient_tolerance=float(mspec.get("gradient_tolerance", 1e-6)),
        step_rule=mspec.get("step_rule", "backtracking"),
        initial_step=float(mspec.get("initial_step", 1.0)),
        history=int(mspec.get("history", 10)),
    )
    best, report = minimizer.minimize_action(path0, eps, mcfg)

    os.makedirs(args.output, exist_ok=True)
    storage.write_path(os.path.join(args.output, "path.acpath"), best)
    _write_json(os.path.join(args.output, "report.json"), report.as_dict())
    _write_json(os.path.join(args.output, "breakdown.json"), report.final_breakdown.as_dict())
    _say(
        args.quiet,
        f"minimize: reason={report.reason} iterations={report.iterations} "
        f"action={report.final_breakdown.total:.6g}",
    )
    return EXIT_OK


def cmd_diagnose(args):
    try:
        path = storage.read_path(args.path)
    except (OSError, ValueError) as exc:
        raise ConfigError("path", f"unreadable path container: {exc}") from exc
    eps = args.eps
    if eps is None or eps <= 0:
        raise ConfigError("eps", "must be a positive number")
    os.makedirs(args.output, exist_ok=True)

    obs = diagnostics.observables(path, eps)
    gap = diagnostics.lower_bound_gap(path, eps)
    track = diagnostics.track_interfaces(path, eps)

    speed = np.sqrt(np.sum(obs.velocity**2, axis=1))
    curv = np.sqrt(np.sum(obs.curvature**2, axis=1))
    rows = []
    dts = path.interval_widths
    for m in range(path.num_intervals):
        u_mid = ScalarField(path.grid, 0.5 * (path.values[m] + path.values[m + 1]))
        layer = np.abs(u_mid.values) < 0.9
        layer &= ~obs.mask[m]
        mean_speed = float(speed[m][layer].mean()) if layer.any() else 0.0
        mean_curv = float(curv[m][layer].mean()) if layer.any() else 0.0
        rows.append(
            (
                obs.times[m],
                mean_speed,
                mean_curv,
                diagnostics.equipartition_residual(u_mid, eps),
                gap.interval_lhs[m] / dts[m],
                gap.interval_rhs[m] / dts[m],
                (gap.interval_lhs[m] - gap.interval_rhs[m]) / dts[m],
            )
        )
    storage.write_csv(
        os.path.join(args.output, "observables.csv"),
        [
            "time [t]",
            "interface_speed [length/t]",
            "interface_curvature [1/length]",
            "equipartition_residual [1]",
            "lhs_rate [1/t]",
            "rhs_rate [1/t]",
            "gap_rate [1/t]",
        ],
        rows,
    )
    storage.write_csv(
        os.path.join(args.output, "gap.csv"),
        ["time [t]", "lhs_rate [1/t]", "rhs_rate [1/t]", "gap_rate [1/t]"],
        [
            (
                obs.times[m],
                gap.interval_lhs[m] / dts[m],
                gap.interval_rhs[m] / dts[m],
                (gap.interval_lhs[m] - gap.interval_rhs[m]) / dts[m],
            )
            for m in range(path.num_intervals)
        ],
    )
    storage.write_interval_fields(
        os.path.join(args.output, "speed.acpath"), path.grid, obs.times, speed
    )
    storage.write_interval_fields(
        os.path.join(args.output, "curvature.acpath"), path.grid, obs.times, curv
    )
    _write_json(os.path.join(args.output, "interfaces.json"), track.as_dict())
    _write_json(
        os.path.join(args.output, "gap.json"),
        {"gap": gap.gap, "lhs": gap.lhs, "rhs": gap.rhs},
    )
    _say(args.quiet, f"diagnose: gap={gap.gap:.6g} lhs={gap.lhs:.6g} rhs={gap.rhs:.6g}")
    return EXIT_OK


def _reduced_breakdown(data):
    if data.get("example") == "hidden_boundary":
        comparison = reduced.example_hidden_boundary(
            float(_require(data, "x1")),
            float(_require(data, "x2")),
            float(_require(data, "t1")),
            float(_require(data, "t2")),
        )
        return {
            "example": "hidden_boundary",
            "action_u": comparison.action_u,
            "action_mu": comparison.action_mu,
            "difference": comparison.difference,
            "threshold_satisfied": comparison.threshold_satisfied,
        }
    try:
        ev = reduced.evolution_from_dict(data)
    except ValueError as exc:
        raise ConfigError("trajectories", str(exc)) from exc
    parts = reduced.reduced_action(ev)
    return {
        "propagation": parts.propagation,
        "nucleation": parts.nucleation,
        "total": parts.total,
        "raw_nucleation_mass": reduced.nucleation_cost(ev),
    }


def cmd_reduced(args):
    data = _load_config(args.config)
    result = _reduced_breakdown(data)
    if not args.quiet:
        for key, value in result.items():
            print(f"{key}: {value}")
    if args.output:
        os.makedirs(args.output, exist_ok=True)
        _write_json(os.path.join(args.output, "reduced.json"), result)
    return EXIT_OK


def cmd_compare(args):
    try:
        path = storage.read_path(args.path)
    except (OSError, ValueError) as exc:
        raise ConfigError("path", f"unreadable path container: {exc}") from exc
    eps = args.eps
    if eps is None or eps <= 0:
        raise ConfigError("eps", "must be a positive number")
    if args.evolution == "extracted":
        ev = diagnostics.extract_reduced_evolution(path, eps)
    else:
        data = _load_config(args.evolution)
        try:
            ev = reduced.evolution_from_dict(data)
        except ValueError as exc:
            raise ConfigError("trajectories", str(exc)) from exc
    breakdown = action(path, eps)
    parts = reduced.reduced_action(ev)
    track = diagnostics.track_interfaces(path, eps)
    weighted = [
        sum(est.value * locus.measure for locus, est in zip(loci, ests))
        for loci, ests in zip(track.loci, track.multiplicities)
    ]
    result = {
        "diffuse_action": breakdown.total,
        "reduced_action": parts.total,
        "difference": breakdown.total - parts.total,
        "reduced_propagation": parts.propagation,
        "reduced_nucleation": parts.nucleation,
        "interface_measure_weighted": weighted,
    }
    if not args.quiet:
        print(f"diffuse action S_eps: {breakdown.total:.8g}")
        print(f"reduced action:       {parts.total:.8g}")
        print(f"difference:           {breakdown.total - parts.total:.8g}")
        summary = ", ".join(f"{w:.4f}" for w in weighted[:8])
        more = " ..." if len(weighted) > 8 else ""
        print(f"multiplicity-weighted interface measure per snapshot: {summary}{more}")
    if args.output:
        os.makedirs(args.output, exist_ok=True)
        _write_json(os.path.join(args.output, "compare.json"), result)
    return EXIT_OK


# -- entry point -------------------------------------------------------------


def _build_parser():
    top = argparse.ArgumentParser(prog="ac-action", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    def common(p, need_output=True):
        if need_output:
            p.add_argument("--output", required=True, help="output directory")
        else:
            p.add_argument("--output", default=None, help="optional output directory")
        p.add_argument("--seed", type=int, default=None, help="seed override (u64)")
        p.add_argument("--threads", type=int, default=None, help="worker threads")
        p.add_argument("--quiet", action="store_true")

    p = sub.add_parser("simulate", help="run the relaxation flow (optionally noisy)")
    p.add_argument("--config", required=True)
    common(p)

    p = sub.add_parser("minimize", help="minimum-action switching path")
    p.add_argument("--config", required=True)
    common(p)

    p = sub.add_parser("diagnose", help="interface observables of a stored path")
    p.add_argument("--path", required=True, help="path container (.acpath)")
    p.add_argument("--eps", type=float, required=True)
    common(p)

    p = sub.add_parser("reduced", help="sharp-interface action of an evolution file")
    p.add_argument("--config", required=True, help="evolution JSON (or preset name)")
    common(p, need_output=False)

    p = sub.add_parser("compare", help="diffuse action vs reduced action")
    p.add_argument("--path", required=True)
    p.add_argument("--evolution", required=True, help="evolution JSON or 'extracted'")
    p.add_argument("--eps", type=float, required=True)
    common(p, need_output=False)
    return top


_COMMANDS = {
    "simulate": cmd_simulate,
    "minimize": cmd_minimize,
    "diagnose": cmd_diagnose,
    "reduced": cmd_reduced,
    "compare": cmd_compare,
}


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    threads = args.threads
    if threads is None:
        threads = int(os.environ.get("AC_ACTION_THREADS", "1") or 1)
    runtime.set_threads(threads)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalFailure as exc:
        detail = f" (step {exc.step})" if exc.step is not None else ""
        print(f"numerical failure: {exc}{detail}", file=sys.stderr)
        return EXIT_NUMERICAL


def console_main():
    sys.exit(main())


def artifact_digest(directory):
    """SHA-256 over all files in a directory tree (sorted); determinism checks."""
    digest = hashlib.sha256()
    for root, _dirs, files in sorted(os.walk(directory)):
        for name in sorted(files):
            full = os.path.join(root, name)
            digest.update(name.encode())
            digest.update(open(full, "rb").read())
    return digest.hexdigest()
