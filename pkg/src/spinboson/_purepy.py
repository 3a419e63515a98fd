"""Pure-Python kernel: complex psi functions and the rate-flow integrator.

This module mirrors the compiled kernel in ``_core.pyx`` step for step so
that both backends produce the same numbers (up to compiler rounding).
Keep the two in sync when touching either.

All energies are in units of the Kondo scale, times in its inverse.
"""

import cmath
import math

COMPILED = False

# Asymptotic series coefficients B_{2n}/(2n) for psi and B_{2n} for psi',
# n = 1..8.  Eight terms give ~1e-13 truncation error once |z| >= 20.
_PSI_COEF = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
)
_PSI1_COEF = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
)

_NAN = complex(float("nan"), float("nan"))
_MAX_SHIFTS = 2_000_000


def _is_pole(z):
    return z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real)


def digamma(z):
    """psi(z) for complex z via upward recurrence + asymptotic series.

    Returns nan+nanj at the poles (nonpositive integers).
    """
    z = complex(z)
    if _is_pole(z):
        return _NAN
    acc = 0.0 + 0.0j
    shifts = 0
    # shift until the asymptotic series is safe: Re z >= 0.5 keeps the
    # argument away from the negative real axis, |z| >= 20 bounds the
    # truncation error
    while z.real < 0.5 or (z.real * z.real + z.imag * z.imag) < 400.0:
        acc -= 1.0 / z
        z += 1.0
        shifts += 1
        if shifts > _MAX_SHIFTS:
            return _NAN
    w = 1.0 / (z * z)
    s = _PSI_COEF[7]
    for n in (6, 5, 4, 3, 2, 1, 0):
        s = s * w + _PSI_COEF[n]
    return acc + cmath.log(z) - 0.5 / z - s * w


def trigamma(z):
    """psi'(z) for complex z; nan+nanj at the poles."""
    z = complex(z)
    if _is_pole(z):
        return _NAN
    acc = 0.0 + 0.0j
    shifts = 0
    while z.real < 0.5 or (z.real * z.real + z.imag * z.imag) < 400.0:
        acc += 1.0 / (z * z)
        z += 1.0
        shifts += 1
        if shifts > _MAX_SHIFTS:
            return _NAN
    w = 1.0 / (z * z)
    s = _PSI1_COEF[7]
    for n in (6, 5, 4, 3, 2, 1, 0):
        s = s * w + _PSI1_COEF[n]
    inv = 1.0 / z
    return acc + inv + 0.5 * w + s * w * inv


def _pole_distance(z):
    """Distance from z to the nearest trigamma pole 0, -1, -2, ..."""
    if z.real >= 0.0:
        return abs(z)
    m = math.floor(-z.real + 0.5)  # nearest nonpositive integer
    return math.hypot(z.real + m, z.imag)


# Dormand-Prince 5(4) tableau (FSAL, as in classic DOPRI5)
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = (19372.0 / 6561.0, -25360.0 / 2187.0,
                          64448.0 / 6561.0, -212.0 / 729.0)
_A61, _A62, _A63, _A64, _A65 = (9017.0 / 3168.0, -355.0 / 33.0,
                                46732.0 / 5247.0, 49.0 / 176.0,
                                -5103.0 / 18656.0)
_B1, _B3, _B4, _B5, _B6 = (35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0,
                           -2187.0 / 6784.0, 11.0 / 84.0)
_E1, _E3, _E4, _E5, _E6, _E7 = (71.0 / 57600.0, -71.0 / 16695.0,
                                71.0 / 1920.0, -17253.0 / 339200.0,
                                22.0 / 525.0, -1.0 / 40.0)

_GAMMA_CAP = 1e120
_MAX_STEPS = 2_000_000


def _rhs(e, g1, g2, g, inv2pit, zero_t):
    """Flow derivatives (dG1/dE, dG2/dE) and distance to the nearest
    right-hand-side pole, measured in energy units.

    Returns None when the state sits on a pole or has blown up.
    """
    if abs(g1) > _GAMMA_CAP or abs(g2) > _GAMMA_CAP:
        return None
    mie = complex(e.imag, -e.real)  # -i*E
    w2 = mie + 0.5 * g2
    w1 = mie + g1
    if zero_t:
        d = min(abs(w1), abs(w2))
        if d < 1e-14:
            return None
        pref = 1j * g * g1
        return pref / w2, pref / w1, d
    z2 = 0.5 + w2 * inv2pit
    z1 = 0.5 + w1 * inv2pit
    d2 = _pole_distance(z2)
    d1 = _pole_distance(z1)
    if d2 < 1e-12 or d1 < 1e-12:
        return None
    pref = 1j * g * g1 * inv2pit
    d = min(d1, d2) / inv2pit
    return pref * trigamma(z2), pref * trigamma(z1), d


def integrate_ray(e0, dirn, s_targets, g1, g2, g, temperature, rtol, atol):
    """Integrate the coupled rate flow along E(s) = e0 + dirn*s.

    s_targets must be ascending and nonnegative; the rates are recorded at
    each target.  Returns (gamma1 list, gamma2 list, n_ok) where n_ok is
    the number of targets reached before a singularity (if any) stopped
    the trajectory.
    """
    n = len(s_targets)
    out1 = [_NAN] * n
    out2 = [_NAN] * n
    idx = 0
    while idx < n and s_targets[idx] <= 0.0:
        out1[idx] = g1
        out2[idx] = g2
        idx += 1
    if idx >= n:
        return out1, out2, n
    if g == 0.0:
        # zero coupling: the right-hand side vanishes identically
        for k in range(idx, n):
            out1[k] = g1
            out2[k] = g2
        return out1, out2, n

    zero_t = temperature == 0.0
    inv2pit = 0.0 if zero_t else 1.0 / (2.0 * math.pi * temperature)
    guard_floor = 0.0 if zero_t else 0.25 * math.pi * temperature
    s_total = s_targets[n - 1]
    h_min = 1e-13 * max(1.0, s_total)

    s = 0.0
    res = _rhs(e0, g1, g2, g, inv2pit, zero_t)
    if res is None:
        return out1, out2, idx
    k1r, k1i, dmin = res
    h = 1e-3
    growth_cap = 5.0
    steps = 0
    while idx < n:
        steps += 1
        if steps > _MAX_STEPS:
            break
        rem = s_targets[idx] - s
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
        r2 = _rhs(e + 0.2 * de, y1a, y2a, g, inv2pit, zero_t)
        if r2 is None:
            h *= 0.25
            growth_cap = 1.0
            continue
        k2r, k2i, _ = r2
        y1a = g1 + de * (_A31 * k1r + _A32 * k2r)
        y2a = g2 + de * (_A31 * k1i + _A32 * k2i)
        r3 = _rhs(e + 0.3 * de, y1a, y2a, g, inv2pit, zero_t)
        if r3 is None:
            h *= 0.25
            growth_cap = 1.0
            continue
        k3r, k3i, _ = r3
        y1a = g1 + de * (_A41 * k1r + _A42 * k2r + _A43 * k3r)
        y2a = g2 + de * (_A41 * k1i + _A42 * k2i + _A43 * k3i)
        r4 = _rhs(e + 0.8 * de, y1a, y2a, g, inv2pit, zero_t)
        if r4 is None:
            h *= 0.25
            growth_cap = 1.0
            continue
        k4r, k4i, _ = r4
        y1a = g1 + de * (_A51 * k1r + _A52 * k2r + _A53 * k3r + _A54 * k4r)
        y2a = g2 + de * (_A51 * k1i + _A52 * k2i + _A53 * k3i + _A54 * k4i)
        r5 = _rhs(e + (8.0 / 9.0) * de, y1a, y2a, g, inv2pit, zero_t)
        if r5 is None:
            h *= 0.25
            growth_cap = 1.0
            continue
        k5r, k5i, _ = r5
        y1a = g1 + de * (_A61 * k1r + _A62 * k2r + _A63 * k3r + _A64 * k4r
                         + _A65 * k5r)
        y2a = g2 + de * (_A61 * k1i + _A62 * k2i + _A63 * k3i + _A64 * k4i
                         + _A65 * k5i)
        r6 = _rhs(e + de, y1a, y2a, g, inv2pit, zero_t)
        if r6 is None:
            h *= 0.25
            growth_cap = 1.0
            continue
        k6r, k6i, _ = r6
        y1n = g1 + de * (_B1 * k1r + _B3 * k3r + _B4 * k4r + _B5 * k5r
                         + _B6 * k6r)
        y2n = g2 + de * (_B1 * k1i + _B3 * k3i + _B4 * k4i + _B5 * k5i
                         + _B6 * k6i)
        r7 = _rhs(e + de, y1n, y2n, g, inv2pit, zero_t)
        if r7 is None:
            h *= 0.25
            growth_cap = 1.0
            continue
        k7r, k7i, dnew = r7

        err1 = de * (_E1 * k1r + _E3 * k3r + _E4 * k4r + _E5 * k5r
                     + _E6 * k6r + _E7 * k7r)
        err2 = de * (_E1 * k1i + _E3 * k3i + _E4 * k4i + _E5 * k5i
                     + _E6 * k6i + _E7 * k7i)
        sc1 = atol + rtol * max(abs(g1), abs(y1n))
        sc2 = atol + rtol * max(abs(g2), abs(y2n))
        q1 = abs(err1) / sc1
        q2 = abs(err2) / sc2
        err = math.sqrt(0.5 * (q1 * q1 + q2 * q2))

        if err <= 1.0:
            g1, g2 = y1n, y2n
            k1r, k1i = k7r, k7i
            dmin = dnew
            if landing:
                s = s_targets[idx]
                while idx < n and s_targets[idx] <= s:
                    out1[idx] = g1
                    out2[idx] = g2
                    idx += 1
            else:
                s += h
            if err == 0.0:
                fac = growth_cap
            else:
                fac = min(growth_cap, max(0.2, 0.9 * err ** -0.2))
            h *= fac
            growth_cap = 5.0
        else:
            h *= max(0.2, 0.9 * err ** -0.2)
            growth_cap = 1.0
    return out1, out2, idx
