# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel: complex psi functions and the rate-flow integrator.

Mirror of ``_purepy.py`` (same algorithm, same constants); keep the two
in sync when touching either.
"""

from libc.math cimport floor, hypot, sqrt, pow, pi, fabs

cdef extern from "complex.h" nogil:
    double complex clog(double complex)
    double cabs "cabs"(double complex)

import numpy as np


cdef double _PSI_COEF[8]
_PSI_COEF[0] = 1.0 / 12.0
_PSI_COEF[1] = -1.0 / 120.0
_PSI_COEF[2] = 1.0 / 252.0
_PSI_COEF[3] = -1.0 / 240.0
_PSI_COEF[4] = 1.0 / 132.0
_PSI_COEF[5] = -691.0 / 32760.0
_PSI_COEF[6] = 1.0 / 12.0
_PSI_COEF[7] = -3617.0 / 8160.0

cdef double _PSI1_COEF[8]
_PSI1_COEF[0] = 1.0 / 6.0
_PSI1_COEF[1] = -1.0 / 30.0
_PSI1_COEF[2] = 1.0 / 42.0
_PSI1_COEF[3] = -1.0 / 30.0
_PSI1_COEF[4] = 5.0 / 66.0
_PSI1_COEF[5] = -691.0 / 2730.0
_PSI1_COEF[6] = 7.0 / 6.0
_PSI1_COEF[7] = -3617.0 / 510.0

cdef double complex _NAN = float("nan") + 1j * float("nan")
cdef int _MAX_SHIFTS = 2_000_000
cdef double _GAMMA_CAP = 1e120
cdef long _MAX_STEPS = 2_000_000

COMPILED = True


cdef inline bint _is_pole(double complex z) nogil:
    return z.imag == 0.0 and z.real <= 0.0 and z.real == floor(z.real)


cdef double complex _digamma(double complex z) nogil:
    cdef double complex acc = 0.0, s, w
    cdef int shifts = 0, n
    if _is_pole(z):
        return _NAN
    while z.real < 0.5 or (z.real * z.real + z.imag * z.imag) < 400.0:
        acc -= 1.0 / z
        z += 1.0
        shifts += 1
        if shifts > _MAX_SHIFTS:
            return _NAN
    w = 1.0 / (z * z)
    s = _PSI_COEF[7]
    for n in range(6, -1, -1):
        s = s * w + _PSI_COEF[n]
    return acc + clog(z) - 0.5 / z - s * w


cdef double complex _trigamma(double complex z) nogil:
    cdef double complex acc = 0.0, s, w, inv
    cdef int shifts = 0, n
    if _is_pole(z):
        return _NAN
    while z.real < 0.5 or (z.real * z.real + z.imag * z.imag) < 400.0:
        acc += 1.0 / (z * z)
        z += 1.0
        shifts += 1
        if shifts > _MAX_SHIFTS:
            return _NAN
    w = 1.0 / (z * z)
    s = _PSI1_COEF[7]
    for n in range(6, -1, -1):
        s = s * w + _PSI1_COEF[n]
    inv = 1.0 / z
    return acc + inv + 0.5 * w + s * w * inv


def digamma(z):
    """psi(z) for complex z; nan+nanj at the poles."""
    return complex(_digamma(complex(z)))


def trigamma(z):
    """psi'(z) for complex z; nan+nanj at the poles."""
    return complex(_trigamma(complex(z)))


cdef inline double _pole_distance(double complex z) nogil:
    cdef double m
    if z.real >= 0.0:
        return sqrt(z.real * z.real + z.imag * z.imag)
    m = floor(-z.real + 0.5)
    return hypot(z.real + m, z.imag)


cdef inline int _rhs(double complex e, double complex g1, double complex g2,
                     double g, double inv2pit, bint zero_t,
                     double complex *d1_out, double complex *d2_out,
                     double *dmin_out) nogil:
    """Flow derivatives; returns 0 on success, 1 at a pole / blow-up."""
    cdef double complex mie, w1, w2, z1, z2, pref
    cdef double d1, d2, d
    if cabs(g1) > _GAMMA_CAP or cabs(g2) > _GAMMA_CAP:
        return 1
    mie.real = e.imag
    mie.imag = -e.real
    w2 = mie + 0.5 * g2
    w1 = mie + g1
    if zero_t:
        d = min(cabs(w1), cabs(w2))
        if d < 1e-14:
            return 1
        pref = 1j * g * g1
        d1_out[0] = pref / w2
        d2_out[0] = pref / w1
        dmin_out[0] = d
        return 0
    z2 = 0.5 + w2 * inv2pit
    z1 = 0.5 + w1 * inv2pit
    d2 = _pole_distance(z2)
    d1 = _pole_distance(z1)
    if d2 < 1e-12 or d1 < 1e-12:
        return 1
    pref = 1j * g * g1 * inv2pit
    d1_out[0] = pref * _trigamma(z2)
    d2_out[0] = pref * _trigamma(z1)
    dmin_out[0] = min(d1, d2) / inv2pit
    return 0


# Dormand-Prince 5(4) tableau (FSAL)
cdef double _A21 = 1.0 / 5.0
cdef double _A31 = 3.0 / 40.0, _A32 = 9.0 / 40.0
cdef double _A41 = 44.0 / 45.0, _A42 = -56.0 / 15.0, _A43 = 32.0 / 9.0
cdef double _A51 = 19372.0 / 6561.0, _A52 = -25360.0 / 2187.0
cdef double _A53 = 64448.0 / 6561.0, _A54 = -212.0 / 729.0
cdef double _A61 = 9017.0 / 3168.0, _A62 = -355.0 / 33.0
cdef double _A63 = 46732.0 / 5247.0, _A64 = 49.0 / 176.0
cdef double _A65 = -5103.0 / 18656.0
cdef double _B1 = 35.0 / 384.0, _B3 = 500.0 / 1113.0, _B4 = 125.0 / 192.0
cdef double _B5 = -2187.0 / 6784.0, _B6 = 11.0 / 84.0
cdef double _E1 = 71.0 / 57600.0, _E3 = -71.0 / 16695.0, _E4 = 71.0 / 1920.0
cdef double _E5 = -17253.0 / 339200.0, _E6 = 22.0 / 525.0, _E7 = -1.0 / 40.0


def integrate_ray(e0, dirn, s_targets, g1, g2,
                  double g, double temperature, double rtol, double atol):
    """Integrate the coupled rate flow along E(s) = e0 + dirn*s.

    Same contract as the pure-Python twin: s_targets ascending and
    nonnegative, records at each target, returns (gamma1, gamma2, n_ok).
    """
    cdef double[::1] st = np.ascontiguousarray(s_targets, dtype=np.float64)
    cdef Py_ssize_t n = st.shape[0]
    o1 = np.full(n, _NAN, dtype=np.complex128)
    o2 = np.full(n, _NAN, dtype=np.complex128)
    cdef double complex[::1] out1 = o1
    cdef double complex[::1] out2 = o2
    cdef double complex ce0 = complex(e0), cdir = complex(dirn)
    cdef double complex cg1 = complex(g1), cg2 = complex(g2)
    cdef Py_ssize_t idx
    with nogil:
        idx = _run(ce0, cdir, st, cg1, cg2, g, temperature, rtol, atol,
                   out1, out2)
    return o1, o2, int(idx)


cdef Py_ssize_t _run(double complex e0, double complex dirn, double[::1] st,
                     double complex g1, double complex g2,
                     double g, double temperature, double rtol, double atol,
                     double complex[::1] out1,
                     double complex[::1] out2) nogil:
    cdef Py_ssize_t n = st.shape[0]
    cdef Py_ssize_t idx = 0, k
    cdef bint zero_t, landing
    cdef double inv2pit, guard_floor, s_total, h_min, s, h, growth_cap
    cdef double dmin, dnew, rem, sc1, sc2, q1, q2, err, fac
    cdef long steps = 0
    cdef double complex k1r, k1i, k2r, k2i, k3r, k3i, k4r, k4i
    cdef double complex k5r, k5i, k6r, k6i, k7r, k7i
    cdef double complex e, de, y1a, y2a, y1n, y2n, err1, err2

    while idx < n and st[idx] <= 0.0:
        out1[idx] = g1
        out2[idx] = g2
        idx += 1
    if idx >= n:
        return n
    if g == 0.0:
        for k in range(idx, n):
            out1[k] = g1
            out2[k] = g2
        return n

    zero_t = temperature == 0.0
    inv2pit = 0.0 if zero_t else 1.0 / (2.0 * pi * temperature)
    guard_floor = 0.0 if zero_t else 0.25 * pi * temperature
    s_total = st[n - 1]
    h_min = 1e-13 * max(1.0, s_total)

    s = 0.0
    if _rhs(e0, g1, g2, g, inv2pit, zero_t, &k1r, &k1i, &dmin):
        return idx
    h = 1e-3
    growth_cap = 5.0
    while idx < n:
        steps += 1
        if steps > _MAX_STEPS:
            break
        rem = st[idx] - s
        h = min(h, max(guard_floor, 0.5 * dmin))
        landing = h >= rem
        if landing:
            h = rem
        if h < h_min:
            break
        e = e0 + dirn * s
        de = dirn * h

        y1a = g1 + de * (_A21 * k1r)
        y2a = g2 + de * (_A21 * k1i)
        if _rhs(e + 0.2 * de, y1a, y2a, g, inv2pit, zero_t, &k2r, &k2i, &dnew):
            h *= 0.25
            growth_cap = 1.0
            continue
        y1a = g1 + de * (_A31 * k1r + _A32 * k2r)
        y2a = g2 + de * (_A31 * k1i + _A32 * k2i)
        if _rhs(e + 0.3 * de, y1a, y2a, g, inv2pit, zero_t, &k3r, &k3i, &dnew):
            h *= 0.25
            growth_cap = 1.0
            continue
        y1a = g1 + de * (_A41 * k1r + _A42 * k2r + _A43 * k3r)
        y2a = g2 + de * (_A41 * k1i + _A42 * k2i + _A43 * k3i)
        if _rhs(e + 0.8 * de, y1a, y2a, g, inv2pit, zero_t, &k4r, &k4i, &dnew):
            h *= 0.25
            growth_cap = 1.0
            continue
        y1a = g1 + de * (_A51 * k1r + _A52 * k2r + _A53 * k3r + _A54 * k4r)
        y2a = g2 + de * (_A51 * k1i + _A52 * k2i + _A53 * k3i + _A54 * k4i)
        if _rhs(e + (8.0 / 9.0) * de, y1a, y2a, g, inv2pit, zero_t,
                &k5r, &k5i, &dnew):
            h *= 0.25
            growth_cap = 1.0
            continue
        y1a = g1 + de * (_A61 * k1r + _A62 * k2r + _A63 * k3r + _A64 * k4r
                         + _A65 * k5r)
        y2a = g2 + de * (_A61 * k1i + _A62 * k2i + _A63 * k3i + _A64 * k4i
                         + _A65 * k5i)
        if _rhs(e + de, y1a, y2a, g, inv2pit, zero_t, &k6r, &k6i, &dnew):
            h *= 0.25
            growth_cap = 1.0
            continue
        y1n = g1 + de * (_B1 * k1r + _B3 * k3r + _B4 * k4r + _B5 * k5r
                         + _B6 * k6r)
        y2n = g2 + de * (_B1 * k1i + _B3 * k3i + _B4 * k4i + _B5 * k5i
                         + _B6 * k6i)
        if _rhs(e + de, y1n, y2n, g, inv2pit, zero_t, &k7r, &k7i, &dnew):
            h *= 0.25
            growth_cap = 1.0
            continue

        err1 = de * (_E1 * k1r + _E3 * k3r + _E4 * k4r + _E5 * k5r
                     + _E6 * k6r + _E7 * k7r)
        err2 = de * (_E1 * k1i + _E3 * k3i + _E4 * k4i + _E5 * k5i
                     + _E6 * k6i + _E7 * k7i)
        sc1 = atol + rtol * max(cabs(g1), cabs(y1n))
        sc2 = atol + rtol * max(cabs(g2), cabs(y2n))
        q1 = cabs(err1) / sc1
        q2 = cabs(err2) / sc2
        err = sqrt(0.5 * (q1 * q1 + q2 * q2))

        if err <= 1.0:
            g1 = y1n
            g2 = y2n
            k1r = k7r
            k1i = k7i
            dmin = dnew
            if landing:
                s = st[idx]
                while idx < n and st[idx] <= s:
                    out1[idx] = g1
                    out2[idx] = g2
                    idx += 1
            else:
                s += h
            if err == 0.0:
                fac = growth_cap
            else:
                fac = min(growth_cap, max(0.2, 0.9 * pow(err, -0.2)))
            h *= fac
            growth_cap = 5.0
        else:
            h *= max(0.2, 0.9 * pow(err, -0.2))
            growth_cap = 1.0
    return idx
