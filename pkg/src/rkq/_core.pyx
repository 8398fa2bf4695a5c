# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled RK34Q8 loop for the built-in two-dimensional problems.

Mirrors ``_pyloop.run_loop`` operation for operation (same summation order,
same libm calls); build with -ffp-contract=off so no FMA is introduced.
"""

from libc.math cimport sin, cos, pow, fabs, isfinite

import numpy as np

cdef enum:
    MAXS = 16

cdef enum:
    PENDULUM = 0
    HARMONIC = 1

cdef int OK = 0, UNDERFLOW = 1, MAX_STEPS = 2, STEP_FAILED = 3

KERNELS = {"pendulum": PENDULUM, "harmonic": HARMONIC}


cdef struct Tab:
    int s
    double a[MAXS][MAXS]
    double b[MAXS]
    double c[MAXS]


cdef inline void rhs(int kind, double q, double p, double* out) noexcept nogil:
    if kind == PENDULUM:
        out[0] = p + cos(q) / 6.0
        out[1] = (p / 6.0 - 1.0) * sin(q)
    else:
        out[0] = p
        out[1] = -q


cdef inline void jac(int kind, double q, double p, double* m) noexcept nogil:
    cdef double s, c
    if kind == PENDULUM:
        s = sin(q)
        c = cos(q)
        m[0] = -s / 6.0
        m[1] = 1.0
        m[2] = (p / 6.0 - 1.0) * c
        m[3] = s / 6.0
    else:
        m[0] = 0.0
        m[1] = 1.0
        m[2] = -1.0
        m[3] = 0.0


cdef int step(Tab* T, int kind, double q, double p, double h,
              double* out) noexcept nogil:
    """One RK step; returns -1 on success or the failing stage index."""
    cdef double kq[MAXS]
    cdef double kp[MAXS]
    cdef double f[2]
    cdef double aq, ap
    cdef int i, j
    for i in range(T.s):
        aq = 0.0
        ap = 0.0
        for j in range(i):
            aq = aq + T.a[i][j] * kq[j]
            ap = ap + T.a[i][j] * kp[j]
        rhs(kind, q + h * aq, p + h * ap, f)
        if not (isfinite(f[0]) and isfinite(f[1])):
            return i
        kq[i] = f[0]
        kp[i] = f[1]
    aq = 0.0
    ap = 0.0
    for j in range(T.s):
        aq = aq + T.b[j] * kq[j]
        ap = ap + T.b[j] * kp[j]
    out[0] = q + h * aq
    out[1] = p + h * ap
    return -1


cdef int load(Tab* T, tableau) except -1:
    cdef int s = tableau.stage_count
    cdef int i, j
    if s > MAXS:
        raise ValueError("too many stages for the compiled kernel")
    T.s = s
    a = np.asarray(tableau.a, dtype=float)
    for i in range(s):
        T.b[i] = float(tableau.b[i])
        T.c[i] = float(tableau.c[i])
        for j in range(s):
            T.a[i][j] = a[i, j]
    return 0


cdef inline double tolerance(double q, double p, double dabs, double drel) noexcept nogil:
    cdef double tq, tp
    if drel == 0.0:
        return dabs
    tq = drel * fabs(q)
    tp = drel * fabs(p)
    if tq < dabs:
        tq = dabs
    if tp < dabs:
        tp = dabs
    return tq if tq <= tp else tp


def run_loop(str kernel, double t0, y0, double t_end, double tol_abs, double tol_rel,
             double h0, double h_min, bint quench, long max_steps, rk3, rk4, rk8):
    """Same contract as ``_pyloop.run_loop``: ``(status, message, rows)``."""
    cdef Tab T3, T4, T8
    load(&T3, rk3)
    load(&T4, rk4)
    load(&T8, rk8)
    cdef int kind = KERNELS[kernel]

    cdef Py_ssize_t cap = 1024, n = 0
    buf = np.empty((cap, 12))
    cdef double[:, ::1] rows = buf

    cdef double t = t0, h = h0, h_try, h_new, half, delta, err, fac
    cdef double q34 = float(y0[0]), p34 = float(y0[1])
    cdef double q8 = q34, p8 = p34
    cdef double d8q = 0.0, d8p = 0.0, nq, np_
    cdef double y3[2]
    cdef double y4[2]
    cdef double yf[2]
    cdef double ym[2]
    cdef double yh[2]
    cdef double m[4]
    cdef double e8q = 0.0, e8p = 0.0, m00, m01, m10, m11
    cdef bint last, quenched
    cdef long steps = 0
    cdef int fail = -1
    cdef int status = OK

    rows[0, 0] = t
    rows[0, 1] = 0.0
    rows[0, 2] = q34
    rows[0, 3] = p34
    rows[0, 4] = q8
    rows[0, 5] = p8
    rows[0, 6] = 0.0
    rows[0, 7] = 0.0
    rows[0, 8] = 0.0
    rows[0, 9] = 0.0
    rows[0, 10] = 0.0
    rows[0, 11] = tolerance(q34, p34, tol_abs, tol_rel)
    n = 1

    while t < t_end:
        if steps >= max_steps:
            status = MAX_STEPS
            break
        delta = tolerance(q34, p34, tol_abs, tol_rel)
        while True:
            last = t + h >= t_end
            h_try = t_end - t if last else h
            fail = step(&T3, kind, q34, p34, h_try, y3)
            if fail < 0:
                fail = step(&T4, kind, q34, p34, h_try, y4)
            if fail >= 0:
                break
            err = fabs(y4[0] - y3[0])
            if fabs(y4[1] - y3[1]) > err:
                err = fabs(y4[1] - y3[1])
            fac = 0.9 * pow(delta / (err if err > 1e-300 else 1e-300), 1.0 / 4)
            if fac < 0.2:
                fac = 0.2
            elif fac > 5.0:
                fac = 5.0
            h_new = h_try * fac
            if err <= delta:
                break
            if h_new < h_min:
                status = UNDERFLOW
                break
            h = h_new
        if fail >= 0:
            status = STEP_FAILED
            break
        if status != OK:
            break

        half = h_try / 2
        fail = step(&T8, kind, q8, p8, h_try, yf)
        if fail < 0:
            fail = step(&T8, kind, q8, p8, half, ym)
        if fail < 0:
            fail = step(&T8, kind, ym[0], ym[1], half, yh)
        if fail >= 0:
            status = STEP_FAILED
            break
        e8q = (yh[0] - yf[0]) * (256.0 / 255.0)
        e8p = (yh[1] - yf[1]) * (256.0 / 255.0)

        jac(kind, q8, p8, m)
        m00 = 1.0 + h_try * m[0]
        m01 = 0.0 + h_try * m[1]
        m10 = 0.0 + h_try * m[2]
        m11 = 1.0 + h_try * m[3]
        nq = e8q + (m00 * d8q + m01 * d8p)
        np_ = e8p + (m10 * d8q + m11 * d8p)
        d8q = nq
        d8p = np_

        t = t_end if last else t + h_try
        q34 = y4[0]
        p34 = y4[1]
        q8 = yh[0]
        p8 = yh[1]
        err = fabs(q34 - q8)
        if fabs(p34 - p8) > err:
            err = fabs(p34 - p8)
        quenched = quench and err > delta
        if quenched:
            q34 = q8
            p34 = p8

        if n == cap:
            cap *= 2
            buf = np.resize(buf, (cap, 12))
            rows = buf
        rows[n, 0] = t
        rows[n, 1] = h_try
        rows[n, 2] = q34
        rows[n, 3] = p34
        rows[n, 4] = q8
        rows[n, 5] = p8
        rows[n, 6] = e8q
        rows[n, 7] = e8p
        rows[n, 8] = d8q
        rows[n, 9] = d8p
        rows[n, 10] = 1.0 if quenched else 0.0
        rows[n, 11] = delta
        n += 1
        h = h_new
        steps += 1

    if status == MAX_STEPS:
        msg = f"max_steps={max_steps} reached at t={t!r}"
    elif status == UNDERFLOW:
        msg = f"stepsize underflow at t={t!r} (h={h_new!r})"
    elif status == STEP_FAILED:
        msg = f"non-finite derivative at stage {fail} (t={t!r})"
    else:
        msg = ""
    return status, msg, buf[:n].copy()
