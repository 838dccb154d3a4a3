import json

import numpy as np

from acaction import storage
from acaction.cli import EXIT_CONFIG, EXIT_OK, artifact_digest, main
from acaction.functionals import SpaceTimePath
from acaction.mesh import Grid
from acaction.potential import SURFACE_TENSION, optimal_profile

C0 = SURFACE_TENSION


def write_config(tmp_path, name, data):
    target = tmp_path / name
    target.write_text(json.dumps(data))
    return str(target)


def small_flow_config(**overrides):
    cfg = {
        "schema_version": 1,
        "grid": {"extents": [1.0], "counts": [65], "bc": "neumann"},
        "eps": 0.06,
        "initial": {"kind": "constant", "value": 1.0},
        "flow": {"dt": 0.0005, "steps": 40, "record_every": 10},
    }
    cfg.update(overrides)
    return cfg


def test_simulate_constant_state_zero_energy(tmp_path):
    cfg_file = write_config(tmp_path, "cfg.json", small_flow_config())
    out = tmp_path / "out"
    assert main(["simulate", "--config", cfg_file, "--output", str(out), "--quiet"]) == EXIT_OK
    rows = (out / "energy_trace.csv").read_text().splitlines()
    assert rows[0].startswith("time [t],energy [1]")
    energies = [float(r.split(",")[1]) for r in rows[1:]]
    assert all(abs(e) < 1e-12 for e in energies)
    assert (out / "path.acpath").exists()
    assert (out / "run.json").exists()


def test_simulate_malformed_json_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    out = tmp_path / "out"
    assert main(["simulate", "--config", str(bad), "--output", str(out)]) == EXIT_CONFIG
    assert "config" in capsys.readouterr().err


def test_simulate_missing_key_names_it(tmp_path, capsys):
    cfg = small_flow_config()
    del cfg["flow"]
    cfg_file = write_config(tmp_path, "c.json", cfg)
    assert main(["simulate", "--config", cfg_file, "--output", str(tmp_path / "o")]) == EXIT_CONFIG
    assert "'flow'" in capsys.readouterr().err


def test_simulate_schema_version_checked(tmp_path, capsys):
    cfg = small_flow_config(schema_version=99)
    cfg_file = write_config(tmp_path, "c.json", cfg)
    assert main(["simulate", "--config", cfg_file, "--output", str(tmp_path / "o")]) == EXIT_CONFIG
    assert "schema_version" in capsys.readouterr().err


def test_simulate_deterministic_outputs(tmp_path):
    cfg = small_flow_config(
        initial={"kind": "cosine", "amplitude": 0.3, "mode": 2},
        noise={"gamma": 0.02, "lambda": 0.05},
        seed=42,
    )
    cfg_file = write_config(tmp_path, "c.json", cfg)
    out1 = tmp_path / "o1"
    out2 = tmp_path / "o2"
    assert main(["simulate", "--config", cfg_file, "--output", str(out1), "--quiet"]) == EXIT_OK
    assert main(["simulate", "--config", cfg_file, "--output", str(out2), "--quiet"]) == EXIT_OK
    assert artifact_digest(out1) == artifact_digest(out2)
    out3 = tmp_path / "o3"
    assert (
        main(
            ["simulate", "--config", cfg_file, "--output", str(out3), "--seed", "43", "--quiet"]
        )
        == EXIT_OK
    )
    assert artifact_digest(out1) != artifact_digest(out3)


def test_minimize_zero_budget_returns_initial(tmp_path):
    cfg = {
        "schema_version": 1,
        "grid": {"extents": [1.0], "counts": [33]},
        "eps": 0.1,
        "times": {"total": 1.0, "slices": 8, "grading": "quadratic"},
        "initial_path": {"kind": "linear_ramp"},
        "minimize": {"max_iterations": 0},
    }
    cfg_file = write_config(tmp_path, "c.json", cfg)
    out = tmp_path / "o"
    assert main(["minimize", "--config", cfg_file, "--output", str(out), "--quiet"]) == EXIT_OK
    report = json.loads((out / "report.json").read_text())
    assert report["reason"] == "max_iterations"
    path = storage.read_path(out / "path.acpath")
    np.testing.assert_allclose(path.values[0], -1.0)
    np.testing.assert_allclose(path.values[-1], 1.0)
    mid_expected = -1.0 + 2.0 * path.times[4] / path.times[-1]
    np.testing.assert_allclose(path.values[4], mid_expected, atol=1e-12)


def test_minimize_switching_endpoint_validation(tmp_path):
    g = Grid.line(1.0, 17)
    times = np.linspace(0.0, 1.0, 4)
    vals = np.linspace(-0.5, 1.0, 4)[:, None] * np.ones(17)
    bad = SpaceTimePath(g, times, vals)
    path_file = tmp_path / "p.acpath"
    storage.write_path(path_file, bad)
    cfg = {
        "schema_version": 1,
        "grid": {"extents": [1.0], "counts": [17]},
        "eps": 0.2,
        "times": {"total": 1.0, "slices": 3},
        "initial_path": {"kind": "from_file", "path": str(path_file)},
        "endpoints": "switching",
        "minimize": {"max_iterations": 1},
    }
    cfg_file = write_config(tmp_path, "c.json", cfg)
    assert main(["minimize", "--config", cfg_file, "--output", str(tmp_path / "o")]) == EXIT_CONFIG


def test_minimize_small_switching_improves(tmp_path):
    cfg = {
        "schema_version": 1,
        "grid": {"extents": [1.0], "counts": [33]},
        "eps": 0.1,
        "times": {"total": 2.0, "slices": 16, "grading": "quadratic"},
        "initial_path": {"kind": "boundary_front"},
        "endpoints": "switching",
        "minimize": {"max_iterations": 400, "gradient_tolerance": 1e-5, "history": 20},
    }
    cfg_file = write_config(tmp_path, "c.json", cfg)
    out = tmp_path / "o"
    assert main(["minimize", "--config", cfg_file, "--output", str(out), "--quiet"]) == EXIT_OK
    report = json.loads((out / "report.json").read_text())
    assert report["actions"][-1] < report["actions"][0]
    breakdown = json.loads((out / "breakdown.json").read_text())
    assert breakdown["total"] == report["final_breakdown"]["total"]


def test_diagnose_traveling_front(tmp_path):
    eps = 0.02
    grid = Grid.line(1.0, 401)
    x = grid.coords()
    times = np.linspace(0.0, 0.6, 31)
    vals = np.stack([optimal_profile((0.25 + 0.5 * t - x) / eps) for t in times])
    path_file = tmp_path / "front.acpath"
    storage.write_path(path_file, SpaceTimePath(grid, times, vals))
    out = tmp_path / "diag"
    code = main(
        ["diagnose", "--path", str(path_file), "--eps", str(eps), "--output", str(out), "--quiet"]
    )
    assert code == EXIT_OK
    rows = (out / "observables.csv").read_text().splitlines()
    header = rows[0].split(",")
    speed_col = header.index("interface_speed [length/t]")
    gap_col = header.index("gap_rate [1/t]")
    for row in rows[1:]:
        cells = [float(v) for v in row.split(",")]
        assert abs(cells[speed_col] - 0.5) < 0.01
        assert cells[gap_col] < 1e-6
    interfaces = json.loads((out / "interfaces.json").read_text())
    assert len(interfaces["snapshots"]) == times.size


def test_simulate_shrinking_circle_radius_csv(tmp_path):
    out = tmp_path / "circle"
    assert main(["simulate", "--config", "shrink_circle", "--output", str(out), "--quiet"]) == 0
    rows = (out / "interface_radius.csv").read_text().splitlines()
    assert rows[0] == "time [t],radius [length]"
    r0 = 0.35
    for row in rows[1:]:
        t, r = (float(v) for v in row.split(","))
        predicted = r0**2 - 2.0 * t
        assert abs(r * r - predicted) / predicted < 0.05


def test_diagnose_flags_collapsing_pair_multiplicity(tmp_path):
    eps = 0.01
    grid = Grid.line(1.0, 2001)
    x = grid.coords()
    mid = 0.5017
    seps = [3.0 * eps, 2.0 * eps]  # two fronts closing in
    vals = []
    for sep in seps:
        vals.append(
            optimal_profile((x - (mid - sep)) / eps)
            + optimal_profile(((mid + sep) - x) / eps)
            - 1.0
        )
    path_file = tmp_path / "pair.acpath"
    storage.write_path(
        path_file, SpaceTimePath(grid, np.array([0.0, 0.01]), np.stack(vals))
    )
    out = tmp_path / "diag"
    assert (
        main(["diagnose", "--path", str(path_file), "--eps", str(eps), "--output", str(out), "--quiet"])
        == EXIT_OK
    )
    interfaces = json.loads((out / "interfaces.json").read_text())
    last = interfaces["snapshots"][-1]
    assert len(last) == 2
    assert all(entry["ambiguous"] for entry in last)
    combined = sum(entry["multiplicity"] for entry in last)
    assert combined > 3.0  # each tube sees most of both fronts
    gap_rows = (out / "gap.csv").read_text().splitlines()
    assert gap_rows[0] == "time [t],lhs_rate [1/t],rhs_rate [1/t],gap_rate [1/t]"


def test_diagnose_unreadable_path(tmp_path, capsys):
    bogus = tmp_path / "nope.acpath"
    bogus.write_bytes(b"junk\n")
    assert (
        main(["diagnose", "--path", str(bogus), "--eps", "0.1", "--output", str(tmp_path / "o")])
        == EXIT_CONFIG
    )


def test_reduced_hidden_boundary_preset(tmp_path, capsys):
    assert main(["reduced", "--config", "hidden_boundary"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "difference" in out
    data = json.loads(
        "{"
        + ",".join(
            f'"{line.split(": ")[0]}": "{line.split(": ")[1]}"' for line in out.strip().splitlines()
        )
        + "}"
    )
    x1, x2, t1, t2 = 0.4, 0.9, 0.0, 1.0
    expected = 8 * C0 - 2 * C0 * (x2 - x1) ** 2 / (t2 - t1)
    assert abs(float(data["difference"]) - expected) < 1e-12


def test_reduced_evolution_file_and_compare(tmp_path, capsys):
    from acaction.reduced import (
        FrontTrajectory,
        ReducedEvolution,
        evolution_to_dict,
    )

    t = np.linspace(0.0, 0.045, 301)
    r = np.sqrt(0.25 - 2.0 * t)
    ev = ReducedEvolution([FrontTrajectory("circle_2d", t, r)])
    ev_file = write_config(tmp_path, "ev.json", evolution_to_dict(ev))
    assert main(["reduced", "--config", ev_file, "--output", str(tmp_path / "o")]) == EXIT_OK
    result = json.loads((tmp_path / "o" / "reduced.json").read_text())
    assert result["total"] < 1e-8
    assert result["nucleation"] == 0.0


def test_reduced_malformed_evolution_exits_2(tmp_path, capsys):
    bad = write_config(
        tmp_path, "ev.json", {"schema_version": 1, "trajectories": [{"kind": "point_1d"}]}
    )
    assert main(["reduced", "--config", bad]) == EXIT_CONFIG


def test_compare_front_path_against_extracted(tmp_path, capsys):
    eps = 0.02
    grid = Grid.line(1.0, 801)
    x = grid.coords()
    times = np.linspace(0.0, 0.6, 241)
    vals = np.stack([optimal_profile((0.25 + 0.5 * t - x) / eps) for t in times])
    path_file = tmp_path / "front.acpath"
    storage.write_path(path_file, SpaceTimePath(grid, times, vals))
    out = tmp_path / "cmp"
    code = main(
        [
            "compare",
            "--path",
            str(path_file),
            "--evolution",
            "extracted",
            "--eps",
            str(eps),
            "--output",
            str(out),
            "--quiet",
        ]
    )
    assert code == EXIT_OK
    result = json.loads((out / "compare.json").read_text())
    # S_eps ~ c0 v^2 T and the extracted reduced action agree for a clean front
    assert abs(result["diffuse_action"] - result["reduced_action"]) < 0.1 * result["diffuse_action"]
