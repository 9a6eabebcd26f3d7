# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; same contracts as ``_pykernel`` with scalar ``c, k``.

Array arguments are contiguous 1-D float64 of equal length.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sin, cos

cnp.import_array()


cdef inline double _recip(double v) nogil:
    # 1/λ only ever multiplies c; a zero λ must not poison c = 0 maps
    return 1.0 / v if v != 0.0 else 0.0


def tension(const double[::1] p0, const double[::1] p1, const double[::1] p2,
            const double[::1] s0, const double[::1] s1,
            const double[::1] l0, const double[::1] l1, double c, double k):
    cdef Py_ssize_t i, n = p1.shape[0]
    x_arr = np.empty(n)
    y_arr = np.empty(n)
    cdef double[::1] x = x_arr
    cdef double[::1] y = y_arr
    cdef double q, w
    for i in range(n):
        q = s1[i] / s0[i]
        w = c * c + k * k / (s0[i] * s0[i])
        x[i] = p2[i] + q * p1[i] - w * l0[i] * l1[i]
        y[i] = c * (2.0 * p1[i] * l1[i] * _recip(l0[i]) + q)
    return x_arr, y_arr


cdef struct Jets:
    double x, x1, x2, y, y1, y2
    double xm, x1m, x2m, ym, y1m, y2m
    double q, w, mu, mu1, nu, nu1
    double qm, wm, mum, mu1m, num


cdef inline Jets _jets(double p1, double p2, double p3, double p4,
                       double s0, double s1, double s2, double s3,
                       double l0, double l1, double l2, double l3,
                       double c, double k) nogil:
    cdef Jets J
    cdef double inv = 1.0 / s0
    cdef double q = s1 * inv
    cdef double a2 = s2 * inv
    cdef double q1 = a2 - q * q
    cdef double q2 = s3 * inv - 3.0 * q * a2 + 2.0 * q * q * q
    cdef double k2 = k * k
    cdef double inv2 = inv * inv
    cdef double w = c * c + k2 * inv2
    cdef double w1 = -2.0 * k2 * s1 * inv2 * inv
    cdef double w2 = -2.0 * k2 * s2 * inv2 * inv + 6.0 * k2 * s1 * s1 * inv2 * inv2
    cdef double qm = fabs(q)
    cdef double q1m = fabs(a2) + q * q
    cdef double q2m = fabs(s3 * inv) + 3.0 * fabs(q * a2) + 2.0 * qm * qm * qm
    cdef double wm = w
    cdef double w1m = fabs(w1)
    cdef double w2m = 2.0 * k2 * fabs(s2 * inv2 * inv) + 6.0 * k2 * s1 * s1 * inv2 * inv2

    cdef double mu = l0 * l1
    cdef double mu1 = l1 * l1 + l0 * l2
    cdef double mu2 = 3.0 * l1 * l2 + l0 * l3
    cdef double linv = _recip(l0)
    cdef double nu = l1 * linv
    cdef double b2 = l2 * linv
    cdef double nu1 = b2 - nu * nu
    cdef double nu2 = l3 * linv - 3.0 * nu * b2 + 2.0 * nu * nu * nu
    cdef double mum = fabs(mu)
    cdef double mu1m = l1 * l1 + fabs(l0 * l2)
    cdef double mu2m = 3.0 * fabs(l1 * l2) + fabs(l0 * l3)
    cdef double num = fabs(nu)
    cdef double nu1m = fabs(b2) + nu * nu
    cdef double nu2m = fabs(l3 * linv) + 3.0 * fabs(nu * b2) + 2.0 * num * num * num

    cdef double a1_ = fabs(p1), a2_ = fabs(p2), a3_ = fabs(p3), a4_ = fabs(p4)
    cdef double m1 = mu1 * p1
    cdef double m2 = mu2 * p1 * p1 + mu1 * p2
    cdef double m1m = mu1m * a1_
    cdef double m2m = mu2m * a1_ * a1_ + mu1m * a2_
    cdef double n1 = nu1 * p1
    cdef double n2 = nu2 * p1 * p1 + nu1 * p2
    cdef double n1m = nu1m * a1_
    cdef double n2m = nu2m * a1_ * a1_ + nu1m * a2_
    cdef double ac = fabs(c)

    J.x = p2 + q * p1 - w * mu
    J.x1 = p3 + q1 * p1 + q * p2 - w1 * mu - w * m1
    J.x2 = p4 + q2 * p1 + 2.0 * q1 * p2 + q * p3 - w2 * mu - 2.0 * w1 * m1 - w * m2
    J.xm = a2_ + qm * a1_ + wm * mum
    J.x1m = a3_ + q1m * a1_ + qm * a2_ + w1m * mum + wm * m1m
    J.x2m = a4_ + q2m * a1_ + 2.0 * q1m * a2_ + qm * a3_ + w2m * mum + 2.0 * w1m * m1m + wm * m2m
    J.y = c * (2.0 * p1 * nu + q)
    J.y1 = c * (2.0 * (p2 * nu + p1 * n1) + q1)
    J.y2 = c * (2.0 * (p3 * nu + 2.0 * p2 * n1 + p1 * n2) + q2)
    J.ym = ac * (2.0 * a1_ * num + qm)
    J.y1m = ac * (2.0 * (a2_ * num + a1_ * n1m) + q1m)
    J.y2m = ac * (2.0 * (a3_ * num + 2.0 * a2_ * n1m + a1_ * n2m) + q2m)
    J.q = q
    J.w = w
    J.mu = mu
    J.mu1 = mu1
    J.nu = nu
    J.nu1 = nu1
    J.qm = qm
    J.wm = wm
    J.mum = mum
    J.mu1m = mu1m
    J.num = num
    return J


def residual_simplified(const double[::1] p0, const double[::1] p1, const double[::1] p2,
                        const double[::1] p3, const double[::1] p4,
                        const double[::1] s0, const double[::1] s1, const double[::1] s2,
                        const double[::1] s3,
                        const double[::1] l0, const double[::1] l1, const double[::1] l2,
                        const double[::1] l3, double c, double k):
    cdef Py_ssize_t i, n = p1.shape[0]
    out = np.empty((8, n))
    cdef double[:, ::1] o = out
    cdef Jets J
    cdef double c2 = c * c, ac = fabs(c)
    with nogil:
        for i in range(n):
            J = _jets(p1[i], p2[i], p3[i], p4[i], s0[i], s1[i], s2[i], s3[i],
                      l0[i], l1[i], l2[i], l3[i], c, k)
            o[0, i] = J.x
            o[1, i] = J.y
            o[2, i] = J.x2 + J.q * J.x1 - J.w * J.mu1 * J.x - (2.0 * c * J.y1 + J.y * J.y) * J.mu
            o[3, i] = (c * J.y2 + J.y * J.y1 + 2.0 * c2 * J.nu * J.x1
                       + 2.0 * c2 * (J.q * J.nu + p1[i] * J.mu1 * _recip(l0[i]) * _recip(l0[i])) * J.x)
            o[4, i] = J.xm
            o[5, i] = J.ym
            o[6, i] = (J.x2m + J.qm * J.x1m + J.wm * J.mu1m * J.xm
                       + (2.0 * ac * J.y1m + J.ym * J.ym) * J.mum)
            o[7, i] = (ac * J.y2m + J.ym * J.y1m + 2.0 * c2 * J.num * J.x1m
                       + 2.0 * c2 * (J.qm * J.num + fabs(p1[i]) * J.mu1m * _recip(l0[i]) * _recip(l0[i])) * J.xm)
    return tuple(out)


def residual_termsum(const double[::1] p0, const double[::1] p1, const double[::1] p2,
                     const double[::1] p3, const double[::1] p4,
                     const double[::1] s0, const double[::1] s1, const double[::1] s2,
                     const double[::1] s3,
                     const double[::1] l0, const double[::1] l1, const double[::1] l2,
                     const double[::1] l3, double c, double k):
    cdef Py_ssize_t i, n = p1.shape[0]
    out = np.empty((2, n))
    cdef double[:, ::1] o = out
    cdef Jets J
    cdef double P1, lpp, l1sq, b2, t1, t2
    with nogil:
        for i in range(n):
            J = _jets(p1[i], p2[i], p3[i], p4[i], s0[i], s1[i], s2[i], s3[i],
                      l0[i], l1[i], l2[i], l3[i], c, k)
            P1 = p1[i]
            lpp = l0[i] * l2[i]
            l1sq = l1[i] * l1[i]
            b2 = l2[i] * _recip(l0[i])
            t1 = (J.x2 + J.q * J.x1
                  - 2.0 * c * J.mu * J.y1
                  - c * J.q * J.mu * J.y
                  - c * P1 * J.mu1 * J.y
                  - J.w * l1sq * J.x - c * P1 * l1sq * J.y
                  - J.w * lpp * J.x + c * P1 * lpp * J.y)
            t2 = (J.y2 + J.q * J.y1
                  + 2.0 * (c * J.x1 + P1 * J.y1) * J.nu
                  + J.nu * (c * J.q * J.x + (p2[i] + J.q * P1) * J.y)
                  + c * P1 * J.nu1 * J.x + P1 * P1 * J.nu1 * J.y
                  + c * P1 * J.nu * J.nu * J.x + P1 * P1 * J.nu * J.nu * J.y - J.w * l1sq * J.y
                  + c * P1 * b2 * J.x - P1 * P1 * b2 * J.y)
            o[0, i] = t1
            o[1, i] = c * t2
    return out[0], out[1]


def obstruction(double a, double k, double a1, const double[::1] r):
    cdef Py_ssize_t i, n = r.shape[0]
    out = np.empty((4, n))
    cdef double[:, ::1] o = out
    cdef double K = k * k, K2 = k * k * k * k
    cdef double A = 2.0 * K * a * a - 3.0 * K
    cdef double rho, s2r, c2r, s2p, c2p, s4p, c4p
    with nogil:
        for i in range(n):
            rho = a * r[i] + a1
            s2r = sin(2.0 * r[i])
            c2r = cos(2.0 * r[i])
            s2p = sin(2.0 * rho)
            c2p = cos(2.0 * rho)
            s4p = sin(4.0 * rho)
            c4p = cos(4.0 * rho)
            o[0, i] = (a * s2r + A * s2p - (2.0 * K * a * a + K) * c2r * s2p
                       + 2.0 * K * a * s2r * c2p + K2 * s2p * c2p)
            o[1, i] = (2.0 * a * c2r + 2.0 * a * A * c2p + 2.0 * K * s2r * s2p
                       + (2.0 * K * a - 4.0 * K * a * a * a) * c2r * c2p + 2.0 * K2 * a * c4p)
            o[2, i] = (-4.0 * a * s2r - 4.0 * a * a * A * s2p
                       + (8.0 * K * a * a * a * a - 4.0 * K * a * a + 4.0 * K) * c2r * s2p
                       + 8.0 * K * a * a * a * s2r * c2p - 8.0 * K2 * a * a * s4p)
            o[3, i] = (-8.0 * a * c2r - 8.0 * a * a * a * A * c2p
                       + (-32.0 * K * a * a * a * a + 8.0 * K * a * a - 8.0 * K) * s2r * s2p
                       + (16.0 * K * a * a * a * a * a + 8.0 * K * a * a * a + 8.0 * K * a) * c2r * c2p
                       - 32.0 * K2 * a * a * a * c4p)
    return out[0], out[1], out[2], out[3]
