# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled cyclic Jacobi kernel; mirrors ``_jacobi_py.jacobi_sweeps``."""

from libc.math cimport sqrt, fabs


cdef inline double _abs2(double complex z) nogil:
    return z.real * z.real + z.imag * z.imag


cdef double _off_norm(double complex[:, ::1] a) nogil:
    cdef Py_ssize_t n = a.shape[0], p, q
    cdef double total = 0.0
    for p in range(n):
        for q in range(n):
            if p != q:
                total += _abs2(a[p, q])
    return sqrt(total)


def off_norm(double complex[:, ::1] a):
    return _off_norm(a)


def jacobi_sweeps(double complex[:, ::1] a, double complex[:, ::1] v,
                  double thresh, int max_sweeps):
    if a.shape[0] != a.shape[1] or v.shape[0] != a.shape[0] or v.shape[1] != a.shape[0]:
        raise ValueError("a and v must be square matrices of equal size")
    return _sweeps(a, v, thresh, max_sweeps)


cdef int _sweeps(double complex[:, ::1] a, double complex[:, ::1] v,
                 double thresh, int max_sweeps) noexcept nogil:
    cdef Py_ssize_t n = a.shape[0], p, q, k
    cdef int sweep
    cdef double app, aqq, mag, theta, t, c, s
    cdef double complex apq, phase, cph, j_qp, j_qq, xp, xq

    for sweep in range(max_sweeps + 1):
        if _off_norm(a) <= thresh:
            return sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq.real == 0.0 and apq.imag == 0.0:
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                mag = sqrt(_abs2(apq))
                phase = apq / mag
                theta = (aqq - app) / (2.0 * mag)
                if fabs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                cph = phase.conjugate()
                j_qp = -s * cph
                j_qq = c * cph

                for k in range(n):
                    xp = a[k, p]
                    xq = a[k, q]
                    a[k, p] = c * xp + j_qp * xq
                    a[k, q] = s * xp + j_qq * xq
                for k in range(n):
                    xp = a[p, k]
                    xq = a[q, k]
                    a[p, k] = c * xp - s * phase * xq
                    a[q, k] = s * xp + c * phase * xq

                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = app - t * mag
                a[q, q] = aqq + t * mag

                for k in range(n):
                    xp = v[k, p]
                    xq = v[k, q]
                    v[k, p] = c * xp + j_qp * xq
                    v[k, q] = s * xp + j_qq * xq
    return -1
