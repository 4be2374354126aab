# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loop: adaptive Dormand-Prince 5(4) integration of the
Bogoliubov coefficient system for contact/Lorentzian couplings with
poly5/linear schedules.  Mirrors tllcd._backend._integrate_python exactly;
the equivalence is enforced by tests and the benchmark."""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, fabs, pow

cdef double TWO_PI = 6.283185307179586476925286766559


cdef struct Coeffs:
    double omega
    double g
    double chi


cdef inline void eval_coeffs(double t, double p, double v_F,
                             double g2s, double g2e, double g4s, double g4e,
                             double R0, double t_f, int family, int sched,
                             int cd, Coeffs *out) nogil:
    cdef double s = t / t_f
    cdef double P, dP, g2, g4, dg2, dg4, a, damp, lam, dlam
    if sched == 0:
        P = s * s * s * (10.0 + s * (-15.0 + 6.0 * s))
        dP = 30.0 * s * s * (1.0 - s) * (1.0 - s)
    else:
        P = s
        dP = 1.0
    if family == 0:
        g2 = g2s + (g2e - g2s) * P
        g4 = g4s + (g4e - g4s) * P
        dg2 = (g2e - g2s) * dP / t_f
        dg4 = (g4e - g4s) * dP / t_f
    else:
        damp = exp(-R0 * p)
        lam = g2s + (g2e - g2s) * P
        dlam = (g2e - g2s) * dP / t_f
        g2 = lam * damp
        g4 = g2
        dg2 = dlam * damp
        dg4 = dg2
    out.omega = p * (v_F + g4 / TWO_PI)
    out.g = p * g2 / TWO_PI
    if cd:
        a = TWO_PI * v_F + g4
        out.chi = 0.5 * (dg4 * g2 - dg2 * a) / (a * a - g2 * g2)
    else:
        out.chi = 0.0


cdef inline void rhs(double t, double *y, double *dy, double p, double v_F,
                     double g2s, double g2e, double g4s, double g4e,
                     double R0, double t_f, int family, int sched, int cd) nogil:
    cdef Coeffs c
    eval_coeffs(t, p, v_F, g2s, g2e, g4s, g4e, R0, t_f, family, sched, cd, &c)
    # u = y0 + i y1, v = y2 + i y3
    dy[0] = -c.omega * y[1] - c.chi * y[2] + c.g * y[3]
    dy[1] = c.omega * y[0] - c.chi * y[3] - c.g * y[2]
    dy[2] = c.omega * y[3] - c.chi * y[0] - c.g * y[1]
    dy[3] = -c.omega * y[2] + c.g * y[0] - c.chi * y[1]


def integrate_pair(double p, double v_F,
                   double g2s, double g2e, double g4s, double g4e, double R0,
                   double t_f, int family, int sched, int cd,
                   cnp.ndarray[cnp.float64_t, ndim=1] t_eval,
                   double rtol, double atol,
                   double complex u0, double complex v0):
    """Integrate over each [t_k, t_{k+1}] of t_eval; returns (u, v) arrays.

    Returns None on step-size underflow (caller raises)."""
    cdef int n_out = t_eval.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] u_out = np.empty(n_out, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] v_out = np.empty(n_out, dtype=np.complex128)

    cdef double[4] y
    cdef double[4] ynew
    cdef double[4] yerr
    cdef double[4] k1, k2, k3, k4, k5, k6, k7
    cdef double[4] ytmp
    cdef double t, t_end, h, h_min, err, sc, factor
    cdef int i, k, j
    cdef bint last

    y[0] = u0.real; y[1] = u0.imag; y[2] = v0.real; y[3] = v0.imag
    u_out[0] = u0; v_out[0] = v0

    h_min = 1e-14 * t_f
    t = t_eval[0]
    h = min(1e-3 * t_f, (t_eval[n_out - 1] - t) if n_out > 1 else t_f)
    if h <= 0:
        h = 1e-3 * t_f

    for k in range(1, n_out):
        t_end = t_eval[k]
        while t < t_end:
            last = False
            if t + h >= t_end:
                h = t_end - t
                last = True

            rhs(t, y, k1, p, v_F, g2s, g2e, g4s, g4e, R0, t_f, family, sched, cd)
            for j in range(4):
                ytmp[j] = y[j] + h * 0.2 * k1[j]
            rhs(t + 0.2 * h, ytmp, k2, p, v_F, g2s, g2e, g4s, g4e, R0, t_f, family, sched, cd)
            for j in range(4):
                ytmp[j] = y[j] + h * (3.0 / 40.0 * k1[j] + 9.0 / 40.0 * k2[j])
            rhs(t + 0.3 * h, ytmp, k3, p, v_F, g2s, g2e, g4s, g4e, R0, t_f, family, sched, cd)
            for j in range(4):
                ytmp[j] = y[j] + h * (44.0 / 45.0 * k1[j] - 56.0 / 15.0 * k2[j] + 32.0 / 9.0 * k3[j])
            rhs(t + 0.8 * h, ytmp, k4, p, v_F, g2s, g2e, g4s, g4e, R0, t_f, family, sched, cd)
            for j in range(4):
                ytmp[j] = y[j] + h * (19372.0 / 6561.0 * k1[j] - 25360.0 / 2187.0 * k2[j]
                                      + 64448.0 / 6561.0 * k3[j] - 212.0 / 729.0 * k4[j])
            rhs(t + 8.0 / 9.0 * h, ytmp, k5, p, v_F, g2s, g2e, g4s, g4e, R0, t_f, family, sched, cd)
            for j in range(4):
                ytmp[j] = y[j] + h * (9017.0 / 3168.0 * k1[j] - 355.0 / 33.0 * k2[j]
                                      + 46732.0 / 5247.0 * k3[j] + 49.0 / 176.0 * k4[j]
                                      - 5103.0 / 18656.0 * k5[j])
            rhs(t + h, ytmp, k6, p, v_F, g2s, g2e, g4s, g4e, R0, t_f, family, sched, cd)
            for j in range(4):
                ynew[j] = y[j] + h * (35.0 / 384.0 * k1[j] + 500.0 / 1113.0 * k3[j]
                                      + 125.0 / 192.0 * k4[j] - 2187.0 / 6784.0 * k5[j]
                                      + 11.0 / 84.0 * k6[j])
            rhs(t + h, ynew, k7, p, v_F, g2s, g2e, g4s, g4e, R0, t_f, family, sched, cd)
            # embedded 4th-order error estimate
            for j in range(4):
                yerr[j] = h * (71.0 / 57600.0 * k1[j] - 71.0 / 16695.0 * k3[j]
                               + 71.0 / 1920.0 * k4[j] - 17253.0 / 339200.0 * k5[j]
                               + 22.0 / 525.0 * k6[j] - 1.0 / 40.0 * k7[j])

            err = 0.0
            for j in range(4):
                sc = atol + rtol * max(fabs(y[j]), fabs(ynew[j]))
                err += (yerr[j] / sc) * (yerr[j] / sc)
            err = (err / 4.0) ** 0.5

            if err <= 1.0:
                t = t + h
                for j in range(4):
                    y[j] = ynew[j]
                factor = 5.0 if err == 0.0 else min(5.0, 0.9 * pow(err, -0.2))
                if not last:
                    h = h * factor
            else:
                h = h * max(0.2, 0.9 * pow(err, -0.2))
                if h < h_min:
                    return None
        u_out[k] = y[0] + 1j * y[1]
        v_out[k] = y[2] + 1j * y[3]
    return u_out, v_out
