# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the per-frame hot loops.

Mirrors fbgshape._kernels_py; keep formulas and accumulation order in sync so
both backends agree to roundoff.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport cos, fabs, sin

cnp.import_array()

SMALL_BEND_ANGLE = 1e-6

cdef double _SMALL = 1e-6


cdef inline void _section(double kappa, double tau, double ds,
                          double* r, double* p) noexcept nogil:
    # r is row-major 3x3, p is length 3
    cdef double theta = kappa * ds
    cdef double ct = cos(theta)
    cdef double st = sin(theta)
    cdef double ctau = cos(tau)
    cdef double stau = sin(tau)
    cdef double rho, x, z
    if fabs(theta) < _SMALL:
        x = kappa * ds * ds * 0.5
        z = ds
    else:
        rho = 1.0 / kappa
        x = rho * (1.0 - ct)
        z = rho * st
    r[0] = ctau * ct; r[1] = -stau; r[2] = ctau * st
    r[3] = stau * ct; r[4] = ctau; r[5] = stau * st
    r[6] = -st;       r[7] = 0.0;  r[8] = ct
    p[0] = x; p[1] = 0.0; p[2] = z


def section_pose(double kappa, double tau, double ds):
    """Local pose (R, p) of one constant-curvature section."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] r = np.empty((3, 3))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] p = np.empty(3)
    _section(kappa, tau, ds, <double*> r.data, <double*> p.data)
    return r, p


def chain_poses(double[::1] kappas, double[::1] taus, double ds,
                double[:, ::1] r0, double[::1] p0):
    """Accumulate section poses left to right from the base pose (r0, p0)."""
    cdef Py_ssize_t n = kappas.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=3] rs = np.empty((n, 3, 3))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] ps = np.empty((n, 3))
    cdef double[:, :, ::1] rs_v = rs
    cdef double[:, ::1] ps_v = ps
    cdef double racc[9]
    cdef double pacc[3]
    cdef double rloc[9]
    cdef double ploc[3]
    cdef double rnew[9]
    cdef Py_ssize_t i, a, b, k
    cdef double s

    for a in range(3):
        pacc[a] = p0[a]
        for b in range(3):
            racc[3 * a + b] = r0[a, b]

    with nogil:
        for i in range(n):
            _section(kappas[i], taus[i], ds, rloc, ploc)
            # p_acc += R_acc @ p_loc
            for a in range(3):
                s = 0.0
                for k in range(3):
                    s += racc[3 * a + k] * ploc[k]
                pacc[a] = pacc[a] + s
            # R_acc = R_acc @ R_loc
            for a in range(3):
                for b in range(3):
                    s = 0.0
                    for k in range(3):
                        s += racc[3 * a + k] * rloc[3 * k + b]
                    rnew[3 * a + b] = s
            for a in range(9):
                racc[a] = rnew[a]
            for a in range(3):
                ps_v[i, a] = pacc[a]
                for b in range(3):
                    rs_v[i, a, b] = racc[3 * a + b]
    return rs, ps


def window_costs(double[::1] kappas, int window, double kappa_c):
    """Matching cost of every complete window of `window` consecutive sections."""
    cdef Py_ssize_t m = kappas.shape[0]
    cdef Py_ssize_t nwin = m - window + 1
    if nwin < 1:
        return np.empty(0)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] prefix = np.empty(m + 1)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] costs = np.empty(nwin)
    cdef double[::1] pf = prefix
    cdef double[::1] cv = costs
    cdef double target = kappa_c * window
    cdef double acc = 0.0
    cdef Py_ssize_t i
    with nogil:
        pf[0] = 0.0
        for i in range(m):
            acc += kappas[i]
            pf[i + 1] = acc
        for i in range(nwin):
            cv[i] = fabs(pf[i + window] - pf[i] - target)
    return costs
