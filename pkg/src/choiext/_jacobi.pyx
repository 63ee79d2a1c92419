# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled cyclic Jacobi kernel for dense complex Hermitian matrices."""

from libc.math cimport sqrt, fabs, hypot

cdef extern from "complex.h" nogil:
    double cabs(double complex)
    double creal(double complex)
    double cimag(double complex)
    double complex conj(double complex)


# below this an off-diagonal entry is dropped; dividing by it would overflow
cdef double TINY = 1e-290


cdef double _offdiag_norm(double complex[:, ::1] a) noexcept nogil:
    cdef Py_ssize_t n = a.shape[0], i, j
    cdef double s = 0.0, re, im
    for i in range(n):
        for j in range(n):
            if i != j:
                re = creal(a[i, j])
                im = cimag(a[i, j])
                s += re * re + im * im
    return sqrt(s)


cdef int _sweeps(double complex[:, ::1] a, double complex[:, ::1] v,
                 double threshold, int max_sweeps) noexcept nogil:
    cdef Py_ssize_t n = a.shape[0], p, q, k
    cdef int sweep
    cdef double r, tau, t, c, s, app, aqq
    cdef double complex ph, phc, akp, akq, apk, aqk, vkp, vkq
    for sweep in range(max_sweeps + 1):
        if _offdiag_norm(a) <= threshold:
            return sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                r = cabs(a[p, q])
                if r < TINY:
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    continue
                ph = creal(a[p, q]) / r + 1j * (cimag(a[p, q]) / r)
                phc = conj(ph)
                app = creal(a[p, p])
                aqq = creal(a[q, q])
                tau = (aqq - app) / (2.0 * r)
                if tau >= 0:
                    t = 1.0 / (tau + hypot(1.0, tau))
                else:
                    t = -1.0 / (-tau + hypot(1.0, tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                # V = [[c, s], [-s*conj(ph), c*conj(ph)]] on (p, q)
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * phc * akq
                    a[k, q] = s * akp + c * phc * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * ph * aqk
                    a[q, k] = s * apk + c * ph * aqk
                a[p, p] = app - t * r
                a[q, q] = aqq + t * r
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * phc * vkq
                    v[k, q] = s * vkp + c * phc * vkq
    return -1


def jacobi_sweeps(double complex[:, ::1] a, double complex[:, ::1] v,
                  double threshold, int max_sweeps):
    """Diagonalize ``a`` in place, accumulating rotations into ``v``.

    Returns the number of sweeps used, or -1 if ``max_sweeps`` was hit.
    The GIL is released while rotating.
    """
    cdef int out
    with nogil:
        out = _sweeps(a, v, threshold, max_sweeps)
    return out
