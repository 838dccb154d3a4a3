# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled grid kernels (hot inner loops).

Semantics match ``_kernels_np`` exactly; see that module for the
conventions.  Loops are fused single passes per node, which is where the
speedup over the NumPy fallback comes from.
"""

import numpy as np

cimport cython
from libc.math cimport sqrt


cdef inline Py_ssize_t _prev(Py_ssize_t i, Py_ssize_t n, bint periodic) nogil:
    if i > 0:
        return i - 1
    return n - 1 if periodic else 1


cdef inline Py_ssize_t _next(Py_ssize_t i, Py_ssize_t n, bint periodic) nogil:
    if i < n - 1:
        return i + 1
    return 0 if periodic else n - 2


def laplacian_1d(double[::1] u, double h, bint periodic):
    cdef Py_ssize_t n = u.shape[0], i
    cdef double inv = 1.0 / (h * h)
    out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    with nogil:
        for i in range(n):
            out[i] = (u[_next(i, n, periodic)] - 2.0 * u[i] + u[_prev(i, n, periodic)]) * inv
    return out_arr


def laplacian_2d(double[:, ::1] u, double hx, double hy, bint periodic):
    cdef Py_ssize_t nx = u.shape[0], ny = u.shape[1], i, j, ip, im, jp, jm
    cdef double ivx = 1.0 / (hx * hx), ivy = 1.0 / (hy * hy)
    out_arr = np.empty((nx, ny))
    cdef double[:, ::1] out = out_arr
    with nogil:
        for i in range(nx):
            ip = _next(i, nx, periodic)
            im = _prev(i, nx, periodic)
            for j in range(ny):
                jp = _next(j, ny, periodic)
                jm = _prev(j, ny, periodic)
                out[i, j] = (u[ip, j] - 2.0 * u[i, j] + u[im, j]) * ivx + \
                            (u[i, jp] - 2.0 * u[i, j] + u[i, jm]) * ivy
    return out_arr


def gradient_1d(double[::1] u, double h, bint periodic):
    cdef Py_ssize_t n = u.shape[0], i
    cdef double inv = 0.5 / h
    out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    with nogil:
        for i in range(1, n - 1):
            out[i] = (u[i + 1] - u[i - 1]) * inv
        if periodic:
            out[0] = (u[1] - u[n - 1]) * inv
            out[n - 1] = (u[0] - u[n - 2]) * inv
        else:
            out[0] = 0.0
            out[n - 1] = 0.0
    return out_arr


def gradient_2d(double[:, ::1] u, double hx, double hy, bint periodic):
    cdef Py_ssize_t nx = u.shape[0], ny = u.shape[1], i, j, ip, im, jp, jm
    cdef double ivx = 0.5 / hx, ivy = 0.5 / hy
    gx_arr = np.empty((nx, ny))
    gy_arr = np.empty((nx, ny))
    cdef double[:, ::1] gx = gx_arr
    cdef double[:, ::1] gy = gy_arr
    with nogil:
        for i in range(nx):
            ip = _next(i, nx, periodic)
            im = _prev(i, nx, periodic)
            for j in range(ny):
                jp = _next(j, ny, periodic)
                jm = _prev(j, ny, periodic)
                if periodic or (0 < i < nx - 1):
                    gx[i, j] = (u[ip, j] - u[im, j]) * ivx
                else:
                    gx[i, j] = 0.0
                if periodic or (0 < j < ny - 1):
                    gy[i, j] = (u[i, jp] - u[i, jm]) * ivy
                else:
                    gy[i, j] = 0.0
    return gx_arr, gy_arr


cdef inline double _edge_sq_pair_1d(double[::1] u, Py_ssize_t i, Py_ssize_t n,
                                    double inv, bint periodic) nogil:
    # mean of the two adjacent squared edge differences along a line
    cdef double dl, dr
    if i > 0:
        dl = (u[i] - u[i - 1]) * inv
    elif periodic:
        dl = (u[0] - u[n - 1]) * inv
    else:
        dl = (u[1] - u[0]) * inv  # mirror ghost repeats the first edge
    if i < n - 1:
        dr = (u[i + 1] - u[i]) * inv
    elif periodic:
        dr = (u[0] - u[n - 1]) * inv
    else:
        dr = (u[n - 1] - u[n - 2]) * inv
    return 0.5 * (dl * dl + dr * dr)


def grad_sq_1d(double[::1] u, double h, bint periodic):
    cdef Py_ssize_t n = u.shape[0], i
    cdef double inv = 1.0 / h
    out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    with nogil:
        for i in range(n):
            out[i] = _edge_sq_pair_1d(u, i, n, inv, periodic)
    return out_arr


cdef inline double _edge_sq_pair_x(double[:, ::1] u, Py_ssize_t i, Py_ssize_t j,
                                   Py_ssize_t nx, double inv, bint periodic) nogil:
    cdef double dl, dr
    if i > 0:
        dl = (u[i, j] - u[i - 1, j]) * inv
    elif periodic:
        dl = (u[0, j] - u[nx - 1, j]) * inv
    else:
        dl = (u[1, j] - u[0, j]) * inv
    if i < nx - 1:
        dr = (u[i + 1, j] - u[i, j]) * inv
    elif periodic:
        dr = (u[0, j] - u[nx - 1, j]) * inv
    else:
        dr = (u[nx - 1, j] - u[nx - 2, j]) * inv
    return 0.5 * (dl * dl + dr * dr)


cdef inline double _edge_sq_pair_y(double[:, ::1] u, Py_ssize_t i, Py_ssize_t j,
                                   Py_ssize_t ny, double inv, bint periodic) nogil:
    cdef double dl, dr
    if j > 0:
        dl = (u[i, j] - u[i, j - 1]) * inv
    elif periodic:
        dl = (u[i, 0] - u[i, ny - 1]) * inv
    else:
        dl = (u[i, 1] - u[i, 0]) * inv
    if j < ny - 1:
        dr = (u[i, j + 1] - u[i, j]) * inv
    elif periodic:
        dr = (u[i, 0] - u[i, ny - 1]) * inv
    else:
        dr = (u[i, ny - 1] - u[i, ny - 2]) * inv
    return 0.5 * (dl * dl + dr * dr)


def grad_sq_2d(double[:, ::1] u, double hx, double hy, bint periodic):
    cdef Py_ssize_t nx = u.shape[0], ny = u.shape[1], i, j
    cdef double ivx = 1.0 / hx, ivy = 1.0 / hy
    out_arr = np.empty((nx, ny))
    cdef double[:, ::1] out = out_arr
    with nogil:
        for i in range(nx):
            for j in range(ny):
                out[i, j] = _edge_sq_pair_x(u, i, j, nx, ivx, periodic) + \
                            _edge_sq_pair_y(u, i, j, ny, ivy, periodic)
    return out_arr


def chemical_potential_1d(double[::1] u, double h, double eps, bint periodic):
    cdef Py_ssize_t n = u.shape[0], i
    cdef double inv = 1.0 / (h * h), ie = 1.0 / eps, ui
    out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    with nogil:
        for i in range(n):
            ui = u[i]
            out[i] = -eps * (u[_next(i, n, periodic)] - 2.0 * ui + u[_prev(i, n, periodic)]) * inv \
                     + (ui * ui * ui - ui) * ie
    return out_arr


def chemical_potential_2d(double[:, ::1] u, double hx, double hy, double eps, bint periodic):
    cdef Py_ssize_t nx = u.shape[0], ny = u.shape[1], i, j, ip, im, jp, jm
    cdef double ivx = 1.0 / (hx * hx), ivy = 1.0 / (hy * hy), ie = 1.0 / eps, ui
    out_arr = np.empty((nx, ny))
    cdef double[:, ::1] out = out_arr
    with nogil:
        for i in range(nx):
            ip = _next(i, nx, periodic)
            im = _prev(i, nx, periodic)
            for j in range(ny):
                jp = _next(j, ny, periodic)
                jm = _prev(j, ny, periodic)
                ui = u[i, j]
                out[i, j] = -eps * ((u[ip, j] - 2.0 * ui + u[im, j]) * ivx +
                                    (u[i, jp] - 2.0 * ui + u[i, jm]) * ivy) \
                            + (ui * ui * ui - ui) * ie
    return out_arr


def interval_terms_1d(double[::1] u0, double[::1] u1, double dt, double eps,
                      double h, double[::1] wq, bint periodic):
    """One interval's action terms: (total, kinetic, curvature, cross, residual)."""
    cdef Py_ssize_t n = u0.shape[0], i
    cdef double inv = 1.0 / (h * h), ie = 1.0 / eps, idt = 1.0 / dt
    cdef double sq = sqrt(eps), isq = 1.0 / sq
    cdef double tot = 0.0, kin = 0.0, cur = 0.0, cro = 0.0
    cdef double um, up, uc, wm, du, ut, ri
    uth_arr = np.empty(n)
    r_arr = np.empty(n)
    cdef double[::1] uth = uth_arr
    cdef double[::1] r = r_arr
    with nogil:
        for i in range(n):
            uth[i] = 0.5 * (u0[i] + u1[i])
        for i in range(n):
            uc = uth[i]
            um = uth[_prev(i, n, periodic)]
            up = uth[_next(i, n, periodic)]
            wm = -eps * (up - 2.0 * uc + um) * inv + (uc * uc * uc - uc) * ie
            du = u1[i] - u0[i]
            ut = du * idt
            ri = sq * ut + wm * isq
            r[i] = ri
            tot += wq[i] * ri * ri
            kin += wq[i] * ut * ut
            cur += wq[i] * wm * wm
            cro += wq[i] * du * wm
    return dt * tot, dt * eps * kin, dt * ie * cur, 2.0 * cro, r_arr


def interval_terms_2d(double[:, ::1] u0, double[:, ::1] u1, double dt, double eps,
                      double hx, double hy, double[:, ::1] wq, bint periodic):
    cdef Py_ssize_t nx = u0.shape[0], ny = u0.shape[1], i, j, ip, im, jp, jm
    cdef double ivx = 1.0 / (hx * hx), ivy = 1.0 / (hy * hy)
    cdef double ie = 1.0 / eps, idt = 1.0 / dt
    cdef double sq = sqrt(eps), isq = 1.0 / sq
    cdef double tot = 0.0, kin = 0.0, cur = 0.0, cro = 0.0
    cdef double uc, wm, du, ut, ri
    uth_arr = np.empty((nx, ny))
    r_arr = np.empty((nx, ny))
    cdef double[:, ::1] uth = uth_arr
    cdef double[:, ::1] r = r_arr
    with nogil:
        for i in range(nx):
            for j in range(ny):
                uth[i, j] = 0.5 * (u0[i, j] + u1[i, j])
        for i in range(nx):
            ip = _next(i, nx, periodic)
            im = _prev(i, nx, periodic)
            for j in range(ny):
                jp = _next(j, ny, periodic)
                jm = _prev(j, ny, periodic)
                uc = uth[i, j]
                wm = -eps * ((uth[ip, j] - 2.0 * uc + uth[im, j]) * ivx +
                             (uth[i, jp] - 2.0 * uc + uth[i, jm]) * ivy) \
                     + (uc * uc * uc - uc) * ie
                du = u1[i, j] - u0[i, j]
                ut = du * idt
                ri = sq * ut + wm * isq
                r[i, j] = ri
                tot += wq[i, j] * ri * ri
                kin += wq[i, j] * ut * ut
                cur += wq[i, j] * wm * wm
                cro += wq[i, j] * du * wm
    return dt * tot, dt * eps * kin, dt * ie * cur, 2.0 * cro, r_arr


def jacobian_apply_1d(double[::1] v, double[::1] r, double eps, double h, bint periodic):
    cdef Py_ssize_t n = v.shape[0], i
    cdef double inv = 1.0 / (h * h), ie = 1.0 / eps, vi
    out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    with nogil:
        for i in range(n):
            vi = v[i]
            out[i] = -eps * (r[_next(i, n, periodic)] - 2.0 * r[i] + r[_prev(i, n, periodic)]) * inv \
                     + (3.0 * vi * vi - 1.0) * r[i] * ie
    return out_arr


def jacobian_apply_2d(double[:, ::1] v, double[:, ::1] r, double eps,
                      double hx, double hy, bint periodic):
    cdef Py_ssize_t nx = v.shape[0], ny = v.shape[1], i, j, ip, im, jp, jm
    cdef double ivx = 1.0 / (hx * hx), ivy = 1.0 / (hy * hy), ie = 1.0 / eps, vi
    out_arr = np.empty((nx, ny))
    cdef double[:, ::1] out = out_arr
    with nogil:
        for i in range(nx):
            ip = _next(i, nx, periodic)
            im = _prev(i, nx, periodic)
            for j in range(ny):
                jp = _next(j, ny, periodic)
                jm = _prev(j, ny, periodic)
                vi = v[i, j]
                out[i, j] = -eps * ((r[ip, j] - 2.0 * r[i, j] + r[im, j]) * ivx +
                                    (r[i, jp] - 2.0 * r[i, j] + r[i, jm]) * ivy) \
                            + (3.0 * vi * vi - 1.0) * r[i, j] * ie
    return out_arr


def explicit_step_1d(double[::1] u, double dt, double eps, double h, bint periodic):
    cdef Py_ssize_t n = u.shape[0], i
    cdef double inv = 1.0 / (h * h), ie2 = 1.0 / (eps * eps), ui
    out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    with nogil:
        for i in range(n):
            ui = u[i]
            out[i] = ui + dt * ((u[_next(i, n, periodic)] - 2.0 * ui + u[_prev(i, n, periodic)]) * inv
                                - (ui * ui * ui - ui) * ie2)
    return out_arr


def explicit_step_2d(double[:, ::1] u, double dt, double eps,
                     double hx, double hy, bint periodic):
    cdef Py_ssize_t nx = u.shape[0], ny = u.shape[1], i, j, ip, im, jp, jm
    cdef double ivx = 1.0 / (hx * hx), ivy = 1.0 / (hy * hy), ie2 = 1.0 / (eps * eps), ui
    out_arr = np.empty((nx, ny))
    cdef double[:, ::1] out = out_arr
    with nogil:
        for i in range(nx):
            ip = _next(i, nx, periodic)
            im = _prev(i, nx, periodic)
            for j in range(ny):
                jp = _next(j, ny, periodic)
                jm = _prev(j, ny, periodic)
                ui = u[i, j]
                out[i, j] = ui + dt * ((u[ip, j] - 2.0 * ui + u[im, j]) * ivx +
                                       (u[i, jp] - 2.0 * ui + u[i, jm]) * ivy
                                       - (ui * ui * ui - ui) * ie2)
    return out_arr


# -- batched whole-path kernels (the optimizer's hot loop) -------------------


cdef void _interval_core_1d(double[::1] u0, double[::1] u1, double dt, double eps,
                            double h, double[::1] wq, bint periodic,
                            double[::1] r, double[::1] uth, double* sums) nogil:
    cdef Py_ssize_t n = u0.shape[0], i
    cdef double inv = 1.0 / (h * h), ie = 1.0 / eps, idt = 1.0 / dt
    cdef double sq = sqrt(eps), isq = 1.0 / sq
    cdef double uc, wm, du, ut, ri
    cdef double tot = 0.0, kin = 0.0, cur = 0.0, cro = 0.0
    for i in range(n):
        uth[i] = 0.5 * (u0[i] + u1[i])
    for i in range(n):
        uc = uth[i]
        wm = -eps * (uth[_next(i, n, periodic)] - 2.0 * uc + uth[_prev(i, n, periodic)]) * inv \
             + (uc * uc * uc - uc) * ie
        du = u1[i] - u0[i]
        ut = du * idt
        ri = sq * ut + wm * isq
        r[i] = ri
        tot += wq[i] * ri * ri
        kin += wq[i] * ut * ut
        cur += wq[i] * wm * wm
        cro += wq[i] * du * wm
    sums[0] = dt * tot
    sums[1] = dt * eps * kin
    sums[2] = dt * ie * cur
    sums[3] = 2.0 * cro


def path_terms_1d(double[:, ::1] values, double[::1] dts, double eps,
                  double h, double[::1] wq, bint periodic):
    """Per-interval action terms for a whole (M+1, N) path in one pass."""
    cdef Py_ssize_t m_count = values.shape[0] - 1, n = values.shape[1], m
    totals_arr = np.empty(m_count)
    kin_arr = np.empty(m_count)
    cur_arr = np.empty(m_count)
    cro_arr = np.empty(m_count)
    r_arr = np.empty((m_count, n))
    uth_arr = np.empty(n)
    cdef double[::1] totals = totals_arr, kin = kin_arr, cur = cur_arr, cro = cro_arr
    cdef double[:, ::1] r = r_arr
    cdef double[::1] uth = uth_arr
    cdef double sums[4]
    with nogil:
        for m in range(m_count):
            _interval_core_1d(values[m], values[m + 1], dts[m], eps, h, wq,
                              periodic, r[m], uth, sums)
            totals[m] = sums[0]
            kin[m] = sums[1]
            cur[m] = sums[2]
            cro[m] = sums[3]
    return totals_arr, kin_arr, cur_arr, cro_arr, r_arr


def path_gradient_1d(double[:, ::1] values, double[::1] dts, double eps,
                     double h, double[::1] wq, bint periodic):
    """Exact action gradient of a whole path; endpoint rows are zero."""
    cdef Py_ssize_t m_count = values.shape[0] - 1, n = values.shape[1], m, i
    cdef double inv = 1.0 / (h * h), ie = 1.0 / eps
    cdef double sq = sqrt(eps), isq = 1.0 / sq
    cdef double uc, wm, du, ut, ri, jr, core, wr, dt
    grad_arr = np.zeros((m_count + 1, n))
    r_arr = np.empty(n)
    uth_arr = np.empty(n)
    cdef double[:, ::1] grad = grad_arr
    cdef double[:, ::1] vals = values
    cdef double[::1] r = r_arr, uth = uth_arr
    with nogil:
        for m in range(m_count):
            dt = dts[m]
            for i in range(n):
                uth[i] = 0.5 * (vals[m, i] + vals[m + 1, i])
            for i in range(n):
                uc = uth[i]
                wm = -eps * (uth[_next(i, n, periodic)] - 2.0 * uc
                             + uth[_prev(i, n, periodic)]) * inv \
                     + (uc * uc * uc - uc) * ie
                r[i] = sq * (vals[m + 1, i] - vals[m, i]) / dt + wm * isq
            for i in range(n):
                jr = -eps * (r[_next(i, n, periodic)] - 2.0 * r[i]
                             + r[_prev(i, n, periodic)]) * inv \
                     + (3.0 * uth[i] * uth[i] - 1.0) * r[i] * ie
                core = (dt * isq) * wq[i] * jr
                wr = 2.0 * sq * wq[i] * r[i]
                grad[m, i] += core - wr
                grad[m + 1, i] += core + wr
        for i in range(n):
            grad[0, i] = 0.0
            grad[m_count, i] = 0.0
    return grad_arr


def path_terms_2d(double[:, :, ::1] values, double[::1] dts, double eps,
                  double hx, double hy, double[:, ::1] wq, bint periodic):
    cdef Py_ssize_t m_count = values.shape[0] - 1
    cdef Py_ssize_t nx = values.shape[1], ny = values.shape[2]
    cdef Py_ssize_t m, i, j, ip, im, jp, jm
    cdef double ivx = 1.0 / (hx * hx), ivy = 1.0 / (hy * hy)
    cdef double ie = 1.0 / eps, sq = sqrt(eps), isq = 1.0 / sq
    cdef double uc, wm, du, ut, ri, idt
    cdef double tot, kin, cur, cro
    totals_arr = np.empty(m_count)
    kin_arr = np.empty(m_count)
    cur_arr = np.empty(m_count)
    cro_arr = np.empty(m_count)
    r_arr = np.empty((m_count, nx, ny))
    uth_arr = np.empty((nx, ny))
    cdef double[::1] totals = totals_arr, kins = kin_arr, curs = cur_arr, cros = cro_arr
    cdef double[:, :, ::1] r = r_arr
    cdef double[:, ::1] uth = uth_arr
    with nogil:
        for m in range(m_count):
            idt = 1.0 / dts[m]
            for i in range(nx):
                for j in range(ny):
                    uth[i, j] = 0.5 * (values[m, i, j] + values[m + 1, i, j])
            tot = kin = cur = cro = 0.0
            for i in range(nx):
                ip = _next(i, nx, periodic)
                im = _prev(i, nx, periodic)
                for j in range(ny):
                    jp = _next(j, ny, periodic)
                    jm = _prev(j, ny, periodic)
                    uc = uth[i, j]
                    wm = -eps * ((uth[ip, j] - 2.0 * uc + uth[im, j]) * ivx +
                                 (uth[i, jp] - 2.0 * uc + uth[i, jm]) * ivy) \
                         + (uc * uc * uc - uc) * ie
                    du = values[m + 1, i, j] - values[m, i, j]
                    ut = du * idt
                    ri = sq * ut + wm * isq
                    r[m, i, j] = ri
                    tot += wq[i, j] * ri * ri
                    kin += wq[i, j] * ut * ut
                    cur += wq[i, j] * wm * wm
                    cro += wq[i, j] * du * wm
            totals[m] = dts[m] * tot
            kins[m] = dts[m] * eps * kin
            curs[m] = dts[m] * ie * cur
            cros[m] = 2.0 * cro
    return totals_arr, kin_arr, cur_arr, cro_arr, r_arr


def path_gradient_2d(double[:, :, ::1] values, double[::1] dts, double eps,
                     double hx, double hy, double[:, ::1] wq, bint periodic):
    cdef Py_ssize_t m_count = values.shape[0] - 1
    cdef Py_ssize_t nx = values.shape[1], ny = values.shape[2]
    cdef Py_ssize_t m, i, j, ip, im, jp, jm
    cdef double ivx = 1.0 / (hx * hx), ivy = 1.0 / (hy * hy)
    cdef double ie = 1.0 / eps, sq = sqrt(eps), isq = 1.0 / sq
    cdef double uc, wm, jr, core, wr, dt
    grad_arr = np.zeros((m_count + 1, nx, ny))
    r_arr = np.empty((nx, ny))
    uth_arr = np.empty((nx, ny))
    cdef double[:, :, ::1] grad = grad_arr
    cdef double[:, ::1] r = r_arr, uth = uth_arr
    with nogil:
        for m in range(m_count):
            dt = dts[m]
            for i in range(nx):
                for j in range(ny):
                    uth[i, j] = 0.5 * (values[m, i, j] + values[m + 1, i, j])
            for i in range(nx):
                ip = _next(i, nx, periodic)
                im = _prev(i, nx, periodic)
                for j in range(ny):
                    jp = _next(j, ny, periodic)
                    jm = _prev(j, ny, periodic)
                    uc = uth[i, j]
                    wm = -eps * ((uth[ip, j] - 2.0 * uc + uth[im, j]) * ivx +
                                 (uth[i, jp] - 2.0 * uc + uth[i, jm]) * ivy) \
                         + (uc * uc * uc - uc) * ie
                    r[i, j] = sq * (values[m + 1, i, j] - values[m, i, j]) / dt + wm * isq
            for i in range(nx):
                ip = _next(i, nx, periodic)
                im = _prev(i, nx, periodic)
                for j in range(ny):
                    jp = _next(j, ny, periodic)
                    jm = _prev(j, ny, periodic)
                    jr = -eps * ((r[ip, j] - 2.0 * r[i, j] + r[im, j]) * ivx +
                                 (r[i, jp] - 2.0 * r[i, j] + r[i, jm]) * ivy) \
                         + (3.0 * uth[i, j] * uth[i, j] - 1.0) * r[i, j] * ie
                    core = (dt * isq) * wq[i, j] * jr
                    wr = 2.0 * sq * wq[i, j] * r[i, j]
                    grad[m, i, j] += core - wr
                    grad[m + 1, i, j] += core + wr
        for i in range(nx):
            for j in range(ny):
                grad[0, i, j] = 0.0
                grad[m_count, i, j] = 0.0
    return grad_arr
