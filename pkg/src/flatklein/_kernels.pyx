# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled batch kernels; same contract as ``_kernels_py``."""
import numpy as np

from libc.math cimport sin, cos, floor


def locate(const double[::1] u, const double[::1] v, double r, double tau, double s, long n):
    cdef Py_ssize_t m = u.shape[0], i
    cdef long k
    cdef double sigma, vloc
    strip_arr = np.empty(m, dtype=np.int64)
    upper_arr = np.empty(m, dtype=np.uint8)
    cdef long long[::1] strip = strip_arr
    cdef unsigned char[::1] upper = upper_arr
    for i in range(m):
        k = <long>floor((v[i] + 0.5 * s) / s)
        if k < 0:
            k = 0
        elif k > n - 1:
            k = n - 1
        sigma = 1.0 if k % 2 == 0 else -1.0
        vloc = v[i] - k * s
        strip[i] = k
        upper[i] = 1 if vloc > tau * r * sin(sigma * u[i] / r) else 0
    return strip_arr, upper_arr


def evaluate_pieces(const double[::1] u, const double[::1] v, const long long[::1] strip,
                    const unsigned char[::1] upper, const double[:, :, ::1] lin,
                    const double[:, ::1] trans, double r, double tau, double s,
                    const double[::1] nrm):
    cdef Py_ssize_t m = u.shape[0], i
    cdef long long k
    cdef double sigma, t, x, y, z, d
    out_arr = np.empty((m, 3))
    cdef double[:, ::1] out = out_arr
    for i in range(m):
        k = strip[i]
        sigma = 1.0 if k % 2 == 0 else -1.0
        t = sigma * u[i] / r
        x = r * sin(t)
        y = v[i] - k * s
        z = r * cos(t)
        if upper[i]:
            d = x * nrm[0] + y * nrm[1] + z * nrm[2]
            x = x - 2.0 * d * nrm[0]
            y = y - 2.0 * d * nrm[1]
            z = z - 2.0 * d * nrm[2]
        out[i, 0] = lin[k, 0, 0] * x + lin[k, 0, 1] * y + lin[k, 0, 2] * z + trans[k, 0]
        out[i, 1] = lin[k, 1, 0] * x + lin[k, 1, 1] * y + lin[k, 1, 2] * z + trans[k, 1]
        out[i, 2] = lin[k, 2, 0] * x + lin[k, 2, 1] * y + lin[k, 2, 2] * z + trans[k, 2]
    return out_arr


def jacobian_pieces(const double[::1] u, const double[::1] v, const long long[::1] strip,
                    const unsigned char[::1] upper, const double[:, :, ::1] lin,
                    const double[:, ::1] trans, double r, double tau, double s,
                    const double[::1] nrm):
    cdef Py_ssize_t m = u.shape[0], i, a
    cdef long long k
    cdef double sigma, t, d
    cdef double cu[3]
    cdef double cv[3]
    out_arr = np.empty((m, 3, 2))
    cdef double[:, :, ::1] out = out_arr
    for i in range(m):
        k = strip[i]
        sigma = 1.0 if k % 2 == 0 else -1.0
        t = sigma * u[i] / r
        cu[0] = sigma * cos(t)
        cu[1] = 0.0
        cu[2] = -sigma * sin(t)
        cv[0] = 0.0
        cv[1] = 1.0
        cv[2] = 0.0
        if upper[i]:
            d = cu[0] * nrm[0] + cu[1] * nrm[1] + cu[2] * nrm[2]
            for a in range(3):
                cu[a] = cu[a] - 2.0 * d * nrm[a]
            d = cv[0] * nrm[0] + cv[1] * nrm[1] + cv[2] * nrm[2]
            for a in range(3):
                cv[a] = cv[a] - 2.0 * d * nrm[a]
        for a in range(3):
            out[i, a, 0] = lin[k, a, 0] * cu[0] + lin[k, a, 1] * cu[1] + lin[k, a, 2] * cu[2]
            out[i, a, 1] = lin[k, a, 0] * cv[0] + lin[k, a, 1] * cv[1] + lin[k, a, 2] * cv[2]
    return out_arr
