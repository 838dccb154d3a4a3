"""NumPy reference implementations of the grid kernels.

This module and the compiled twin ``_kernels_cy`` expose the same
functions with the same semantics; ``acaction.kernels`` picks one at
import time.  Conventions shared by both backends:

* arrays are C-contiguous float64; 2D fields are indexed ``[ix, iy]``;
* ``periodic=False`` means homogeneous Neumann data realized by mirror
  ghost nodes (ghost equals the inner neighbour), ``periodic=True``
  wraps indices;
* ``wq`` is the array of quadrature weights matching the field shape.

The squared-gradient kernels average the squares of the two adjacent
one-sided edge differences per axis.  With trapezoidal weights this sums
to the edge form of the Dirichlet energy exactly, which is what makes
summation by parts against the mirrored laplacian exact.
"""

import numpy as np


def _edge_sq_mean(u, h, periodic, axis):
    d2 = (np.diff(u, axis=axis) / h) ** 2
    out = np.empty_like(u)
    mid = [slice(None)] * u.ndim
    lo = [slice(None)] * u.ndim
    hi = [slice(None)] * u.ndim
    mid[axis] = slice(1, -1)
    lo[axis] = slice(None, -1)
    hi[axis] = slice(1, None)
    out[tuple(mid)] = 0.5 * (d2[tuple(lo)] + d2[tuple(hi)])
    first = [slice(None)] * u.ndim
    last = [slice(None)] * u.ndim
    first[axis] = 0
    last[axis] = -1
    d2_first = [slice(None)] * u.ndim
    d2_last = [slice(None)] * u.ndim
    d2_first[axis] = 0
    d2_last[axis] = -1
    if periodic:
        wrap = ((np.take(u, 0, axis=axis) - np.take(u, -1, axis=axis)) / h) ** 2
        out[tuple(first)] = 0.5 * (wrap + d2[tuple(d2_first)])
        out[tuple(last)] = 0.5 * (d2[tuple(d2_last)] + wrap)
    else:
        # mirror ghost: the ghost edge repeats the first/last real edge
        out[tuple(first)] = d2[tuple(d2_first)]
        out[tuple(last)] = d2[tuple(d2_last)]
    return out


def _laplacian_axis(u, h, periodic, axis):
    out = np.empty_like(u)
    inv = 1.0 / (h * h)
    mid = [slice(None)] * u.ndim
    mid[axis] = slice(1, -1)
    up = [slice(None)] * u.ndim
    dn = [slice(None)] * u.ndim
    ce = [slice(None)] * u.ndim
    up[axis] = slice(2, None)
    dn[axis] = slice(None, -2)
    ce[axis] = slice(1, -1)
    out[tuple(mid)] = (u[tuple(up)] - 2.0 * u[tuple(ce)] + u[tuple(dn)]) * inv
    first = [slice(None)] * u.ndim
    last = [slice(None)] * u.ndim
    first[axis] = 0
    last[axis] = -1
    u0 = np.take(u, 0, axis=axis)
    u1 = np.take(u, 1, axis=axis)
    um1 = np.take(u, -1, axis=axis)
    um2 = np.take(u, -2, axis=axis)
    if periodic:
        out[tuple(first)] = (u1 - 2.0 * u0 + um1) * inv
        out[tuple(last)] = (u0 - 2.0 * um1 + um2) * inv
    else:
        out[tuple(first)] = 2.0 * (u1 - u0) * inv
        out[tuple(last)] = 2.0 * (um2 - um1) * inv
    return out


def _gradient_axis(u, h, periodic, axis):
    out = np.empty_like(u)
    inv = 0.5 / h
    mid = [slice(None)] * u.ndim
    mid[axis] = slice(1, -1)
    up = [slice(None)] * u.ndim
    dn = [slice(None)] * u.ndim
    up[axis] = slice(2, None)
    dn[axis] = slice(None, -2)
    out[tuple(mid)] = (u[tuple(up)] - u[tuple(dn)]) * inv
    first = [slice(None)] * u.ndim
    last = [slice(None)] * u.ndim
    first[axis] = 0
    last[axis] = -1
    if periodic:
        out[tuple(first)] = (np.take(u, 1, axis=axis) - np.take(u, -1, axis=axis)) * inv
        out[tuple(last)] = (np.take(u, 0, axis=axis) - np.take(u, -2, axis=axis)) * inv
    else:
        # mirror ghosts make the centered boundary derivative vanish
        out[tuple(first)] = 0.0
        out[tuple(last)] = 0.0
    return out


def laplacian_1d(u, h, periodic):
    return _laplacian_axis(u, h, periodic, 0)


def laplacian_2d(u, hx, hy, periodic):
    return _laplacian_axis(u, hx, periodic, 0) + _laplacian_axis(u, hy, periodic, 1)


def gradient_1d(u, h, periodic):
    return _gradient_axis(u, h, periodic, 0)


def gradient_2d(u, hx, hy, periodic):
    return _gradient_axis(u, hx, periodic, 0), _gradient_axis(u, hy, periodic, 1)


def grad_sq_1d(u, h, periodic):
    return _edge_sq_mean(u, h, periodic, 0)


def grad_sq_2d(u, hx, hy, periodic):
    return _edge_sq_mean(u, hx, periodic, 0) + _edge_sq_mean(u, hy, periodic, 1)


def chemical_potential_1d(u, h, eps, periodic):
    return -eps * laplacian_1d(u, h, periodic) + (u * u - 1.0) * u / eps


def chemical_potential_2d(u, hx, hy, eps, periodic):
    return -eps * laplacian_2d(u, hx, hy, periodic) + (u * u - 1.0) * u / eps


def _interval_terms(u0, u1, w_theta, dt, eps, wq):
    du = u1 - u0
    ut = du / dt
    sqeps = np.sqrt(eps)
    r = sqeps * ut + w_theta / sqeps
    total = dt * float(np.sum(wq * r * r))
    kinetic = dt * eps * float(np.sum(wq * ut * ut))
    curvature = (dt / eps) * float(np.sum(wq * w_theta * w_theta))
    cross = 2.0 * float(np.sum(wq * du * w_theta))
    return total, kinetic, curvature, cross, r


def interval_terms_1d(u0, u1, dt, eps, h, wq, periodic):
    """Action contribution of one time interval.

    Returns ``(total, kinetic, curvature, cross, residual)`` where
    ``residual`` is the nodewise integrand root
    sqrt(eps) du/dt + w(u_mid)/sqrt(eps) evaluated at the interval
    midpoint state.
    """
    w_theta = chemical_potential_1d(0.5 * (u0 + u1), h, eps, periodic)
    return _interval_terms(u0, u1, w_theta, dt, eps, wq)


def interval_terms_2d(u0, u1, dt, eps, hx, hy, wq, periodic):
    w_theta = chemical_potential_2d(0.5 * (u0 + u1), hx, hy, eps, periodic)
    return _interval_terms(u0, u1, w_theta, dt, eps, wq)


def jacobian_apply_1d(v, r, eps, h, periodic):
    """Apply the chemical-potential Jacobian at state v to the field r."""
    return -eps * laplacian_1d(r, h, periodic) + (3.0 * v * v - 1.0) * r / eps


def jacobian_apply_2d(v, r, eps, hx, hy, periodic):
    return -eps * laplacian_2d(r, hx, hy, periodic) + (3.0 * v * v - 1.0) * r / eps


def explicit_step_1d(u, dt, eps, h, periodic):
    return u + dt * (laplacian_1d(u, h, periodic) - (u * u - 1.0) * u / (eps * eps))


def explicit_step_2d(u, dt, eps, hx, hy, periodic):
    return u + dt * (laplacian_2d(u, hx, hy, periodic) - (u * u - 1.0) * u / (eps * eps))


# -- batched whole-path kernels (the optimizer's hot loop) -------------------


def _batched_chemical_potential(u_theta, spatial_axes, hs, eps, periodic):
    lap = _laplacian_axis(u_theta, hs[0], periodic, spatial_axes[0])
    for ax, h in zip(spatial_axes[1:], hs[1:]):
        lap += _laplacian_axis(u_theta, h, periodic, ax)
    return -eps * lap + (u_theta * u_theta - 1.0) * u_theta / eps


def _path_terms(values, dts, hs, eps, wq, periodic, spatial_axes):
    u0 = values[:-1]
    u1 = values[1:]
    u_theta = 0.5 * (u0 + u1)
    w = _batched_chemical_potential(u_theta, spatial_axes, hs, eps, periodic)
    du = u1 - u0
    shape = (-1,) + (1,) * len(spatial_axes)
    ut = du / dts.reshape(shape)
    sqeps = np.sqrt(eps)
    r = sqeps * ut + w / sqeps
    axes = tuple(spatial_axes)
    totals = dts * np.sum(wq * r * r, axis=axes)
    kinetics = dts * eps * np.sum(wq * ut * ut, axis=axes)
    curvatures = (dts / eps) * np.sum(wq * w * w, axis=axes)
    crosses = 2.0 * np.sum(wq * du * w, axis=axes)
    return totals, kinetics, curvatures, crosses, r, u_theta


def path_terms_1d(values, dts, eps, h, wq, periodic):
    """Per-interval action terms for a whole (M+1, N) path in one pass."""
    out = _path_terms(values, dts, (h,), eps, wq, periodic, (1,))
    return out[:5]


def path_terms_2d(values, dts, eps, hx, hy, wq, periodic):
    out = _path_terms(values, dts, (hx, hy), eps, wq, periodic, (1, 2))
    return out[:5]


def _path_gradient(values, dts, hs, eps, wq, periodic, spatial_axes):
    _, _, _, _, r, u_theta = _path_terms(values, dts, hs, eps, wq, periodic, spatial_axes)
    lap_r = _laplacian_axis(r, hs[0], periodic, spatial_axes[0])
    for ax, h in zip(spatial_axes[1:], hs[1:]):
        lap_r += _laplacian_axis(r, h, periodic, ax)
    jr = -eps * lap_r + (3.0 * u_theta * u_theta - 1.0) * r / eps
    shape = (-1,) + (1,) * len(spatial_axes)
    sqeps = np.sqrt(eps)
    core = (dts.reshape(shape) / sqeps) * wq * jr
    wr = 2.0 * sqeps * wq * r
    grad = np.zeros_like(values)
    grad[:-1] += core - wr
    grad[1:] += core + wr
    grad[0] = 0.0
    grad[-1] = 0.0
    return grad


def path_gradient_1d(values, dts, eps, h, wq, periodic):
    """Exact action gradient of a whole path; endpoint rows are zero."""
    return _path_gradient(values, dts, (h,), eps, wq, periodic, (1,))


def path_gradient_2d(values, dts, eps, hx, hy, wq, periodic):
    return _path_gradient(values, dts, (hx, hy), eps, wq, periodic, (1, 2))
