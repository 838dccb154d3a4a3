"""Binary field/path containers and CSV export.

Snapshot record: one JSON header line (sorted keys, newline-terminated)
followed by the node values as little-endian float64 in C order.  A path
container is snapshot records concatenated in time order.  Writers emit
deterministic bytes for identical inputs.
"""

import json

import numpy as np

from .functionals import SpaceTimePath
from .mesh import Grid, ScalarField

_FORMAT = "acaction.field"
_VERSION = 1


def _header(field, time):
    return {
        "format": _FORMAT,
        "version": _VERSION,
        "dim": field.grid.dim,
        "extents": list(field.grid.extents),
        "counts": list(field.grid.counts),
        "bc": field.grid.bc,
        "time": float(time),
    }


def _write_record(fh, field, time):
    line = json.dumps(_header(field, time), sort_keys=True, separators=(",", ":"))
    fh.write(line.encode("utf-8") + b"\n")
    fh.write(np.ascontiguousarray(field.values, dtype="<f8").tobytes())


def _read_record(fh):
    line = fh.readline()
    if not line:
        return None
    head = json.loads(line.decode("utf-8"))
    if head.get("format") != _FORMAT or head.get("version") != _VERSION:
        raise ValueError(f"not an {_FORMAT} v{_VERSION} record")
    grid = Grid(tuple(head["extents"]), tuple(head["counts"]), head["bc"])
    count = grid.node_count
    payload = fh.read(count * 8)
    if len(payload) != count * 8:
        raise ValueError("truncated field record")
    values = np.frombuffer(payload, dtype="<f8").reshape(grid.shape).copy()
    return ScalarField(grid, values), float(head["time"])


def write_snapshot(path, field, time=0.0):
    with open(path, "wb") as fh:
        _write_record(fh, field, time)


def read_snapshot(path):
    with open(path, "rb") as fh:
        rec = _read_record(fh)
    if rec is None:
        raise ValueError("empty snapshot file")
    return rec


def write_path(path, st_path):
    with open(path, "wb") as fh:
        for m in range(st_path.times.size):
            _write_record(fh, st_path.snapshot(m), st_path.times[m])


def write_interval_fields(path, grid, times, fields):
    """Write a sequence of raw arrays (one per time) as a container."""
    with open(path, "wb") as fh:
        for t, values in zip(times, fields):
            _write_record(fh, ScalarField(grid, values), t)


def read_path(path):
    fields = []
    times = []
    with open(path, "rb") as fh:
        while True:
            rec = _read_record(fh)
            if rec is None:
                break
            fields.append(rec[0])
            times.append(rec[1])
    if len(fields) < 2:
        raise ValueError("path container needs at least two snapshots")
    return SpaceTimePath.from_fields(times, fields)


def field_to_csv(path, field, value_name="value"):
    """Node coordinates and value per row, with a units-annotated header."""
    grid = field.grid
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if grid.dim == 1:
            fh.write(f"x [length],{value_name}\n")
            for x, v in zip(grid.coords(), field.values):
                fh.write(f"{x!r},{v!r}\n")
        else:
            fh.write(f"x [length],y [length],{value_name}\n")
            xx, yy = grid.coords()
            for xi, yi, vi in zip(xx.ravel(), yy.ravel(), field.values.ravel()):
                fh.write(f"{xi!r},{yi!r},{vi!r}\n")


def write_csv(path, header, rows):
    """Write rows of floats with a header naming columns and units."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
