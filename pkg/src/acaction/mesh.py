"""Uniform 1D/2D grids, finite-difference operators, and quadrature.

Neumann boundaries are realized with mirror ghost nodes (the ghost node
equals the inner neighbour), which makes the discrete summation-by-parts
identity against the edge-based gradient pairing exact; see
:func:`gradient_pairing`.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels

BOUNDARY_CONDITIONS = ("neumann", "periodic")


@dataclass(frozen=True)
class Grid:
    """Uniform tensor grid on a 1D interval or 2D rectangle.

    ``extents`` are physical side lengths, ``counts`` node counts per
    axis.  Spacing is L/(N-1) for Neumann grids (nodes include both
    boundaries) and L/N for periodic ones (last node one spacing short
    of the wrap-around).
    """

    extents: tuple
    counts: tuple
    bc: str = "neumann"

    def __post_init__(self):
        object.__setattr__(self, "extents", tuple(float(e) for e in self.extents))
        object.__setattr__(self, "counts", tuple(int(n) for n in self.counts))
        if len(self.extents) != len(self.counts):
            raise ValueError("extents and counts must have the same length")
        if len(self.counts) not in (1, 2):
            raise ValueError("only 1D and 2D grids are supported")
        if self.bc not in BOUNDARY_CONDITIONS:
            raise ValueError(f"unknown boundary condition {self.bc!r}")
        if any(e <= 0 for e in self.extents):
            raise ValueError("extents must be positive")
        if any(n < 3 for n in self.counts):
            raise ValueError("need at least 3 nodes per axis")

    @classmethod
    def line(cls, length, nodes, bc="neumann"):
        return cls((length,), (nodes,), bc)

    @classmethod
    def box(cls, lengths, nodes, bc="neumann"):
        return cls(tuple(lengths), tuple(nodes), bc)

    @property
    def dim(self):
        return len(self.counts)

    @property
    def periodic(self):
        return self.bc == "periodic"

    @property
    def shape(self):
        return self.counts

    @property
    def node_count(self):
        n = 1
        for c in self.counts:
            n *= c
        return n

    @cached_property
    def spacings(self):
        if self.periodic:
            return tuple(e / n for e, n in zip(self.extents, self.counts))
        return tuple(e / (n - 1) for e, n in zip(self.extents, self.counts))

    def axis_coords(self, axis):
        return np.arange(self.counts[axis]) * self.spacings[axis]

    def coords(self):
        """Node coordinates: a 1D array, or a meshgrid tuple in 2D."""
        axes = [self.axis_coords(a) for a in range(self.dim)]
        if self.dim == 1:
            return axes[0]
        return np.meshgrid(*axes, indexing="ij")

    @cached_property
    def quadrature_weights(self):
        """Trapezoidal (Neumann) or rectangle (periodic) product weights."""
        axis_w = []
        for a in range(self.dim):
            w = np.full(self.counts[a], self.spacings[a])
            if not self.periodic:
                w[0] *= 0.5
                w[-1] *= 0.5
            axis_w.append(w)
        if self.dim == 1:
            return axis_w[0]
        return np.outer(axis_w[0], axis_w[1])


@dataclass(frozen=True)
class ScalarField:
    """Nodal values of a scalar field on a :class:`Grid`.

    Treated as immutable once constructed; operators return new fields.
    """

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.values, dtype=float)
        if arr.shape != self.grid.shape:
            raise ValueError(
                f"values shape {arr.shape} does not match grid {self.grid.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError("field values must be finite")
        object.__setattr__(self, "values", arr)

    @classmethod
    def from_function(cls, grid, fn):
        if grid.dim == 1:
            return cls(grid, fn(grid.coords()))
        return cls(grid, fn(*grid.coords()))

    @classmethod
    def constant(cls, grid, value):
        return cls(grid, np.full(grid.shape, float(value)))


# -- raw-array dispatch helpers (hot path; used by functionals/dynamics) --


def raw_laplacian(values, grid):
    h = grid.spacings
    if grid.dim == 1:
        return kernels.impl.laplacian_1d(values, h[0], grid.periodic)
    return kernels.impl.laplacian_2d(values, h[0], h[1], grid.periodic)


def raw_gradient(values, grid):
    h = grid.spacings
    if grid.dim == 1:
        return (kernels.impl.gradient_1d(values, h[0], grid.periodic),)
    return kernels.impl.gradient_2d(values, h[0], h[1], grid.periodic)


def raw_grad_sq(values, grid):
    h = grid.spacings
    if grid.dim == 1:
        return kernels.impl.grad_sq_1d(values, h[0], grid.periodic)
    return kernels.impl.grad_sq_2d(values, h[0], h[1], grid.periodic)


def laplacian(f):
    """Standard 3-point / 5-point stencil honoring the grid's boundary tag."""
    return ScalarField(f.grid, raw_laplacian(f.values, f.grid))


def gradient(f):
    """Centered-difference gradient, one component field per axis.

    At Neumann boundaries the mirror ghost makes the normal component
    vanish exactly.
    """
    return tuple(ScalarField(f.grid, g) for g in raw_gradient(f.values, f.grid))


def gradient_squared(f):
    """Nodal |grad u|^2 via the mean of adjacent squared edge differences.

    This is the discretization whose quadrature sum is the edge-based
    Dirichlet form, so integrate(f * laplacian(g)) =
    -gradient_pairing(f, g) holds to rounding.
    """
    return ScalarField(f.grid, raw_grad_sq(f.values, f.grid))


def integrate(f):
    """Quadrature of the field over the domain."""
    return float(np.sum(f.grid.quadrature_weights * f.values))


def gradient_pairing(f, g):
    """The discrete Dirichlet pairing: the quadrature of grad f . grad g.

    Computed from one-sided edge differences, which makes it the exact
    summation-by-parts partner of :func:`laplacian` on both boundary
    types.
    """
    if f.grid != g.grid:
        raise ValueError("fields live on different grids")
    grid = f.grid
    total = 0.0
    for axis in range(grid.dim):
        h = grid.spacings[axis]
        df = np.diff(f.values, axis=axis) / h
        dg = np.diff(g.values, axis=axis) / h
        # transverse quadrature weights on the other axis
        if grid.dim == 1:
            w_t = 1.0
        else:
            other = 1 - axis
            w_t = np.full(grid.counts[other], grid.spacings[other])
            if not grid.periodic:
                w_t[0] *= 0.5
                w_t[-1] *= 0.5
            w_t = w_t if axis == 0 else w_t[:, None]
        total += float(np.sum(w_t * (df * dg))) * h
        if grid.periodic:
            wrap_f = (np.take(f.values, 0, axis=axis) - np.take(f.values, -1, axis=axis)) / h
            wrap_g = (np.take(g.values, 0, axis=axis) - np.take(g.values, -1, axis=axis)) / h
            if grid.dim == 1:
                total += float(wrap_f * wrap_g) * h
            else:
                w_o = np.full(grid.counts[1 - axis], grid.spacings[1 - axis])
                total += float(np.sum(w_o * wrap_f * wrap_g)) * h
    return total
