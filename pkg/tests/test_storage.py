import numpy as np
import pytest

from acaction import storage
from acaction.functionals import SpaceTimePath
from acaction.mesh import Grid, ScalarField


def test_snapshot_roundtrip(tmp_path):
    g = Grid.box((1.0, 2.0), (9, 17), bc="periodic")
    rng = np.random.default_rng(1)
    f = ScalarField(g, rng.standard_normal(g.shape))
    target = tmp_path / "field.acpath"
    storage.write_snapshot(target, f, time=0.25)
    back, t = storage.read_snapshot(target)
    assert t == 0.25
    assert back.grid == g
    np.testing.assert_array_equal(back.values, f.values)


def test_path_roundtrip(tmp_path):
    g = Grid.line(1.0, 33)
    times = np.linspace(0.0, 1.0, 5)
    rng = np.random.default_rng(2)
    p = SpaceTimePath(g, times, rng.standard_normal((5,) + g.shape))
    target = tmp_path / "p.acpath"
    storage.write_path(target, p)
    back = storage.read_path(target)
    np.testing.assert_array_equal(back.times, times)
    np.testing.assert_array_equal(back.values, p.values)
    assert back.grid == g


def test_writes_are_deterministic(tmp_path):
    g = Grid.line(1.0, 17)
    f = ScalarField(g, np.linspace(-1, 1, 17))
    a = tmp_path / "a.bin"
    b = tmp_path / "b.bin"
    storage.write_snapshot(a, f, time=0.5)
    storage.write_snapshot(b, f, time=0.5)
    assert a.read_bytes() == b.read_bytes()


def test_truncated_record_rejected(tmp_path):
    g = Grid.line(1.0, 17)
    f = ScalarField(g, np.zeros(17))
    target = tmp_path / "broken.acpath"
    storage.write_snapshot(target, f)
    data = target.read_bytes()
    target.write_bytes(data[:-8])
    with pytest.raises(ValueError):
        storage.read_snapshot(target)


def test_csv_export_has_units_header(tmp_path):
    g = Grid.line(1.0, 5)
    f = ScalarField(g, np.arange(5.0))
    target = tmp_path / "field.csv"
    storage.field_to_csv(target, f, value_name="u [1]")
    lines = target.read_text().splitlines()
    assert lines[0] == "x [length],u [1]"
    assert len(lines) == 6
    g2 = Grid.box((1.0, 1.0), (3, 3))
    f2 = ScalarField.constant(g2, 1.0)
    target2 = tmp_path / "field2d.csv"
    storage.field_to_csv(target2, f2)
    assert target2.read_text().splitlines()[0].startswith("x [length],y [length]")
