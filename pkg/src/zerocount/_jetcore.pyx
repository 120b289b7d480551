# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled tape interpreter.

Runs the same instruction set as ``tape._run_numpy`` but point by point, with a
small register file of order-4 Taylor arrays that stays in cache.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport (sin, cos, tan, exp, log, sqrt, fabs, sinh, cosh, tanh, erf,
                        atan, NAN, M_PI)
from libc.stdlib cimport malloc, free

cdef extern from "math.h" nogil:
    double jn(int n, double x)

cnp.import_array()

DEF NC = 5

cdef enum:
    OP_CONST = 0
    OP_VAR = 1
    OP_ADD = 2
    OP_SUB = 3
    OP_MUL = 4
    OP_DIV = 5
    OP_NEG = 6
    OP_POWI = 7
    OP_FUNC0 = 16

cdef enum:
    F_SIN, F_COS, F_TAN, F_EXP, F_LN, F_SQRT, F_ABS, F_SINH, F_COSH, F_TANH, F_ERF, F_J0, F_J1, F_ATAN

cdef double FACT[5]
FACT[:] = [1.0, 1.0, 2.0, 6.0, 24.0]


cdef inline void t_mul(const double* a, const double* b, double* c) noexcept nogil:
    cdef double c0, c1, c2, c3, c4
    c0 = a[0] * b[0]
    c1 = a[0] * b[1] + a[1] * b[0]
    c2 = a[0] * b[2] + a[1] * b[1] + a[2] * b[0]
    c3 = a[0] * b[3] + a[1] * b[2] + a[2] * b[1] + a[3] * b[0]
    c4 = a[0] * b[4] + a[1] * b[3] + a[2] * b[2] + a[3] * b[1] + a[4] * b[0]
    c[0] = c0; c[1] = c1; c[2] = c2; c[3] = c3; c[4] = c4


cdef inline void t_div(const double* a, const double* b, double* q) noexcept nogil:
    cdef double q0, q1, q2, q3, q4
    q0 = a[0] / b[0]
    q1 = (a[1] - b[1] * q0) / b[0]
    q2 = (a[2] - b[1] * q1 - b[2] * q0) / b[0]
    q3 = (a[3] - b[1] * q2 - b[2] * q1 - b[3] * q0) / b[0]
    q4 = (a[4] - b[1] * q3 - b[2] * q2 - b[3] * q1 - b[4] * q0) / b[0]
    q[0] = q0; q[1] = q1; q[2] = q2; q[3] = q3; q[4] = q4


cdef inline void t_compose(const double* u, const double* g, double* r) noexcept nogil:
    cdef double v1 = u[1], v2 = u[2], v3 = u[3], v4 = u[4]
    cdef double c1 = g[1], c2 = g[2] / 2.0, c3 = g[3] / 6.0, c4 = g[4] / 24.0
    r[0] = g[0]
    r[1] = c1 * v1
    r[2] = c1 * v2 + c2 * v1 * v1
    r[3] = c1 * v3 + 2.0 * c2 * v1 * v2 + c3 * v1 * v1 * v1
    r[4] = (c1 * v4 + c2 * (2.0 * v1 * v3 + v2 * v2) + 3.0 * c3 * v1 * v1 * v2
            + c4 * v1 * v1 * v1 * v1)


cdef inline double bessel(int n, double x) noexcept nogil:
    if n < 0:
        return -jn(-n, x) if (-n) % 2 else jn(-n, x)
    return jn(n, x)


cdef void bessel_table(int n, double x, double* g) noexcept nogil:
    # J_n^(k) = 2^-k sum_m (-1)^m C(k, m) J_{n-k+2m}
    cdef double J[9]
    cdef int m, k
    cdef double acc, binom, sgn, scale
    for m in range(9):
        J[m] = bessel(n - 4 + m, x)   # J[m] = J_{n-4+m}
    g[0] = J[4]
    scale = 1.0
    for k in range(1, 5):
        scale *= 2.0
        acc = 0.0
        binom = 1.0
        sgn = 1.0
        for m in range(k + 1):
            acc = acc + sgn * binom * J[4 - k + 2 * m]
            binom = binom * (k - m) / (m + 1)
            sgn = -sgn
        g[k] = acc / scale


cdef int derivative_table(int f, double u0, double* g) noexcept nogil:
    """Fill g with G^(k)(u0); return 1 on a domain error, 2 at a kink, else 0."""
    cdef double s, c, t, t2, w, d1
    if f == F_EXP:
        s = exp(u0)
        g[0] = s; g[1] = s; g[2] = s; g[3] = s; g[4] = s
    elif f == F_LN:
        if not (u0 > 0):
            return 1
        w = 1.0 / u0
        g[0] = log(u0); g[1] = w; g[2] = -w * w; g[3] = 2.0 * w * w * w
        g[4] = -6.0 * w * w * w * w
    elif f == F_SQRT:
        if u0 < 0:
            return 1
        s = sqrt(u0)
        g[0] = s
        if u0 == 0:
            return 2
        w = 1.0 / u0
        g[1] = 0.5 / s; g[2] = -0.25 * w / s; g[3] = 0.375 * w * w / s
        g[4] = -0.9375 * w * w * w / s
    elif f == F_SIN:
        s = sin(u0); c = cos(u0)
        g[0] = s; g[1] = c; g[2] = -s; g[3] = -c; g[4] = s
    elif f == F_COS:
        s = sin(u0); c = cos(u0)
        g[0] = c; g[1] = -s; g[2] = -c; g[3] = s; g[4] = c
    elif f == F_SINH:
        s = sinh(u0); c = cosh(u0)
        g[0] = s; g[1] = c; g[2] = s; g[3] = c; g[4] = s
    elif f == F_COSH:
        s = sinh(u0); c = cosh(u0)
        g[0] = c; g[1] = s; g[2] = c; g[3] = s; g[4] = c
    elif f == F_TAN:
        t = tan(u0); t2 = t * t
        g[0] = t; g[1] = 1.0 + t2; g[2] = 2.0 * t * (1.0 + t2)
        g[3] = 2.0 + 8.0 * t2 + 6.0 * t2 * t2
        g[4] = t * (16.0 + 40.0 * t2 + 24.0 * t2 * t2)
    elif f == F_TANH:
        t = tanh(u0); c = cosh(u0); s = 1.0 / (c * c)
        g[0] = t; g[1] = s; g[2] = -2.0 * t * s
        g[3] = s * (4.0 * t * t - 2.0 * s)
        g[4] = 8.0 * t * s * (2.0 * s - t * t)
    elif f == F_ATAN:
        w = 1.0 / (1.0 + u0 * u0)
        g[0] = atan(u0); g[1] = w; g[2] = -2.0 * u0 * w * w
        g[3] = (6.0 * u0 * u0 - 2.0) * w * w * w
        g[4] = -24.0 * u0 * (u0 * u0 - 1.0) * w * w * w * w
    elif f == F_ERF:
        d1 = 2.0 / sqrt(M_PI) * exp(-u0 * u0)
        g[0] = erf(u0); g[1] = d1; g[2] = -2.0 * u0 * d1
        g[3] = (4.0 * u0 * u0 - 2.0) * d1
        g[4] = (12.0 * u0 - 8.0 * u0 * u0 * u0) * d1
    elif f == F_ABS:
        g[0] = fabs(u0)
        if u0 == 0:
            return 2
        g[1] = 1.0 if u0 > 0 else (-1.0 if u0 < 0 else NAN)
        g[2] = 0.0; g[3] = 0.0; g[4] = 0.0
    elif f == F_J0:
        bessel_table(0, u0, g)
    elif f == F_J1:
        bessel_table(1, u0, g)
    return 0


cdef inline void set_nan(double* r) noexcept nogil:
    cdef int k
    for k in range(NC):
        r[k] = NAN


cdef signed char run_point(int m, const int* codes, const int* arg0, const int* arg1,
                           const double* consts, double x, double* regs) noexcept nogil:
    cdef int i, k, code, rep
    cdef signed char status = 0
    cdef int st
    cdef double* r
    cdef double* a
    cdef double* b
    cdef double one[5]
    cdef double g[5]
    for i in range(m):
        code = codes[i]
        r = regs + NC * i
        if code == OP_CONST:
            r[0] = consts[i]
            for k in range(1, NC):
                r[k] = 0.0
        elif code == OP_VAR:
            r[0] = x; r[1] = 1.0
            for k in range(2, NC):
                r[k] = 0.0
        elif code == OP_ADD or code == OP_SUB:
            a = regs + NC * arg0[i]
            b = regs + NC * arg1[i]
            for k in range(NC):
                r[k] = a[k] + b[k] if code == OP_ADD else a[k] - b[k]
        elif code == OP_MUL:
            t_mul(regs + NC * arg0[i], regs + NC * arg1[i], r)
        elif code == OP_DIV:
            b = regs + NC * arg1[i]
            if b[0] == 0:
                set_nan(r)
                status = 1
            else:
                t_div(regs + NC * arg0[i], b, r)
        elif code == OP_NEG:
            a = regs + NC * arg0[i]
            for k in range(NC):
                r[k] = -a[k]
        elif code == OP_POWI:
            a = regs + NC * arg0[i]
            rep = arg1[i]
            if rep == 0:
                r[0] = 1.0
                for k in range(1, NC):
                    r[k] = 0.0
            else:
                for k in range(NC):
                    r[k] = a[k]
                for k in range((rep if rep > 0 else -rep) - 1):
                    t_mul(r, a, r)
                if rep < 0:
                    if a[0] == 0:
                        set_nan(r)
                        status = 1
                    else:
                        one[0] = 1.0
                        for k in range(1, NC):
                            one[k] = 0.0
                        t_div(one, r, r)
        else:
            a = regs + NC * arg0[i]
            for k in range(NC):
                g[k] = NAN
            st = derivative_table(code - OP_FUNC0, a[0], g)
            if st == 1:
                set_nan(r)
                status = 1
            elif st == 2:
                # exact value at a kink, undefined derivatives
                r[0] = g[0]
                for k in range(1, NC):
                    r[k] = NAN
                if status == 0:
                    status = 2
            else:
                t_compose(a, g, r)
    return status


def run_tape(cnp.ndarray codes, cnp.ndarray arg0, cnp.ndarray arg1, cnp.ndarray consts,
             cnp.ndarray xs):
    """Return ``(derivs, status)`` for the tape at every point of ``xs``."""
    cdef int[::1] c = np.ascontiguousarray(codes, dtype=np.int32)
    cdef int[::1] p0 = np.ascontiguousarray(arg0, dtype=np.int32)
    cdef int[::1] p1 = np.ascontiguousarray(arg1, dtype=np.int32)
    cdef double[::1] cs = np.ascontiguousarray(consts, dtype=np.float64)
    cdef double[::1] x = np.ascontiguousarray(xs, dtype=np.float64)
    cdef Py_ssize_t n = x.shape[0], j
    cdef int m = c.shape[0], k
    out = np.empty((NC, n), dtype=np.float64)
    status = np.zeros(n, dtype=np.int8)
    cdef double[:, ::1] d = out
    cdef signed char[::1] st = status
    cdef double* regs
    cdef double* last
    if m == 0:
        raise ValueError("empty tape")
    regs = <double*> malloc(sizeof(double) * NC * m)
    if regs == NULL:
        raise MemoryError()
    try:
        with nogil:
            for j in range(n):
                st[j] = run_point(m, &c[0], &p0[0], &p1[0], &cs[0], x[j], regs)
                last = regs + NC * (m - 1)
                for k in range(NC):
                    d[k, j] = last[k] * FACT[k]
    finally:
        free(regs)
    return out, status


cdef inline void two_prod(double a, double b, double* p, double* e) noexcept nogil:
    cdef double ca = 134217729.0 * a, cb = 134217729.0 * b
    cdef double ah = ca - (ca - a), bh = cb - (cb - b)
    cdef double al = a - ah, bl = b - bh
    p[0] = a * b
    e[0] = ((ah * bh - p[0]) + ah * bl + al * bh) + al * bl


def comp_horner(const double[::1] hi, const double[::1] lo, const double[::1] xs):
    """Compensated Horner with double-double coefficients, as in ``models._comp_horner``."""
    cdef Py_ssize_t n = xs.shape[0], m = hi.shape[0], j, i
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef double s, c, x, p, pe, t, bb, se
    with nogil:
        for j in range(n):
            x = xs[j]
            s = hi[m - 1]
            c = lo[m - 1]
            for i in range(m - 2, -1, -1):
                two_prod(s, x, &p, &pe)
                t = p + hi[i]
                bb = t - p
                se = (p - (t - bb)) + (hi[i] - bb)
                s = t
                c = c * x + (pe + se + lo[i])
            o[j] = s + c
    return out


def neumaier_sum(const double[::1] v):
    """Compensated sum in index order (Kahan-Babuska-Neumaier)."""
    cdef Py_ssize_t i, n = v.shape[0]
    cdef double s = 0.0, c = 0.0, t, x
    with nogil:
        for i in range(n):
            x = v[i]
            t = s + x
            if fabs(s) >= fabs(x):
                c += (s - t) + x
            else:
                c += (x - t) + s
            s = t
    return s + c
