"""Rate-flow integration in the complex energy plane.

Trajectories are vertical lines seeded at Im E = omega_c with the exact
high-energy rate Delta^2/omega_c; the coupled rates are integrated down
to the target with an adaptive embedded Runge-Kutta 5(4) pair (in the
kernel).  Where the propagator is analytic the result is
path-independent, which both the two-segment test path and the
horizontal-sweep evaluator rely on.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import backend
from .exceptions import DomainError, FlowSingularityError, PropagatorPoleError
from .specfun import trigamma

#: Radius of the guard disk around known nonanalyticities.
RHO_MIN = 1e-3


@dataclass(frozen=True)
class AccuracySpec:
    """Integration tolerances and flow-domain limits."""

    rel: float = 1e-9
    abs: float = 1e-12
    im_min: float = -2.0     # configurable lower bound of the flow domain
    re_max: float = 250.0


@dataclass(frozen=True)
class FlowState:
    """Current position and rates along a trajectory."""

    e: complex
    gamma1: complex
    gamma2: complex


@dataclass(frozen=True)
class FlowPath:
    """Vertical integration segment from Im E = omega_c down to a target."""

    start: complex
    end: complex

    def __post_init__(self):
        if self.start.real != self.end.real:
            raise DomainError("flow path must be vertical")
        if self.start.imag < self.end.imag:
            raise DomainError("flow path must point downward")


def make_path(e_target, params):
    """Vertical path for a target, seeded at the band edge."""
    e_target = complex(e_target)
    return FlowPath(start=complex(e_target.real, params.omega_c),
                    end=e_target)


def flow_rhs(state, params):
    """Right-hand side (dGamma1/dE, dGamma2/dE) of the coupled rate flow.

    At T > 0 each component is i*g*Gamma1/(2 pi T) times the trigamma of
    1/2 + (-iE + Gamma_{2/1}/n')/(2 pi T) with n' = 2 for the first and
    n' = 1 for the second rate.  At T = 0 the analytic limit
    i*g*Gamma1/(-iE + Gamma_{2/1}/n') is used instead.
    """
    g = params.g
    e = complex(state.e)
    mie = complex(e.imag, -e.real)  # -i E
    w2 = mie + 0.5 * complex(state.gamma2)
    w1 = mie + complex(state.gamma1)
    if params.temperature == 0.0:
        if min(abs(w1), abs(w2)) < 1e-14:
            raise FlowSingularityError(f"flow pole at E={e}", location=e)
        pref = 1j * g * complex(state.gamma1)
        return pref / w2, pref / w1
    two_pi_t = 2.0 * math.pi * params.temperature
    try:
        t2 = trigamma(0.5 + w2 / two_pi_t)
        t1 = trigamma(0.5 + w1 / two_pi_t)
    except Exception as exc:
        raise FlowSingularityError(f"flow pole at E={e}", location=e) from exc
    pref = 1j * g * complex(state.gamma1) / two_pi_t
    return pref * t2, pref * t1


def _check_domain(e_target, params, tol):
    e_target = complex(e_target)
    if e_target.imag < tol.im_min:
        raise DomainError(
            f"Im E={e_target.imag} below the flow domain {tol.im_min}")
    if e_target.imag > params.omega_c:
        raise DomainError("target above the integration seed")
    if abs(e_target.real) > tol.re_max:
        raise DomainError(
            f"|Re E|={abs(e_target.real)} outside the flow domain")
    return e_target


def _check_guard(e_target, known_singularities):
    for z in known_singularities:
        if abs(e_target - z) < RHO_MIN:
            raise FlowSingularityError(
                f"target {e_target} inside the guard disk of {z}",
                location=e_target)


def evaluate_rates(e_target, params, tol=None, path="vertical",
                   known_singularities=()):
    """Rates (Gamma1(E), Gamma2(E)) at a single complex energy.

    ``path`` is "vertical" (default) or "two_segment" (down the imaginary
    axis, then horizontally; upper half plane only) -- the latter exists
    to exercise path independence.
    """
    tol = tol or AccuracySpec()
    e_target = _check_domain(e_target, params, tol)
    _check_guard(e_target, known_singularities)
    gic = params.gamma_initial
    if path == "vertical":
        s_end = params.omega_c - e_target.imag
        g1, g2, n_ok = backend.integrate_ray(
            complex(e_target.real, params.omega_c), -1j, [s_end],
            gic, gic, params.g, params.temperature, tol.rel, tol.abs)
        if n_ok < 1:
            raise FlowSingularityError(
                f"flow hit a nonanalyticity before reaching {e_target}",
                location=e_target)
        return complex(g1[0]), complex(g2[0])
    if path == "two_segment":
        if e_target.imag <= 0:
            raise DomainError("two-segment path requires Im E > 0")
        g1, g2, n_ok = backend.integrate_ray(
            complex(0.0, params.omega_c), -1j,
            [params.omega_c - e_target.imag],
            gic, gic, params.g, params.temperature, tol.rel, tol.abs)
        if n_ok < 1:
            raise FlowSingularityError("axis segment failed",
                                       location=e_target)
        x = e_target.real
        if x == 0.0:
            return complex(g1[0]), complex(g2[0])
        dirn = 1.0 if x > 0 else -1.0
        g1, g2, n_ok = backend.integrate_ray(
            complex(0.0, e_target.imag), dirn, [abs(x)],
            complex(g1[0]), complex(g2[0]),
            params.g, params.temperature, tol.rel, tol.abs)
        if n_ok < 1:
            raise FlowSingularityError("horizontal segment failed",
                                       location=e_target)
        return complex(g1[0]), complex(g2[0])
    raise DomainError(f"unknown path {path!r}")


def evaluate_rates_column(x, y_targets, params, tol=None):
    """Rates along a vertical line Re E = x at descending Im E values.

    One trajectory serves the whole column.  Returns (gamma1, gamma2, ok)
    arrays; entries below the first nonanalyticity on the line carry
    ok = False and NaN rates.
    """
    tol = tol or AccuracySpec()
    y = np.asarray(y_targets, dtype=float)
    if y.size and (np.any(np.diff(y) > 0)):
        raise DomainError("y_targets must be descending")
    for yy in (y[:1], y[-1:]):
        if yy.size:
            _check_domain(complex(x, yy[0]), params, tol)
    gic = params.gamma_initial
    s = params.omega_c - y
    g1, g2, n_ok = backend.integrate_ray(
        complex(x, params.omega_c), -1j, s, gic, gic,
        params.g, params.temperature, tol.rel, tol.abs)
    ok = np.zeros(y.size, dtype=bool)
    ok[:n_ok] = True
    return np.asarray(g1), np.asarray(g2), ok


def evaluate_rates_horizontal(y, x_targets, params, tol=None):
    """Rates on a horizontal line Im E = y > 0 (Laplace contours).

    Integrates one vertical trajectory to iy and sweeps left and right
    from there; legitimate because the propagator is analytic in the
    upper half plane, where the result is path-independent.
    """
    tol = tol or AccuracySpec()
    if y <= 0:
        raise DomainError("horizontal sweep requires Im E > 0")
    x = np.asarray(x_targets, dtype=float)
    _check_domain(complex(np.max(np.abs(x), initial=0.0), y), params, tol)
    gic = params.gamma_initial
    g1a, g2a, n_ok = backend.integrate_ray(
        complex(0.0, params.omega_c), -1j, [params.omega_c - y],
        gic, gic, params.g, params.temperature, tol.rel, tol.abs)
    if n_ok < 1:
        raise FlowSingularityError(f"anchor trajectory to i*{y} failed",
                                   location=complex(0.0, y))
    anchor1, anchor2 = complex(g1a[0]), complex(g2a[0])
    g1 = np.empty(x.size, dtype=complex)
    g2 = np.empty(x.size, dtype=complex)
    for sign in (1.0, -1.0):
        mask = (x > 0) if sign > 0 else (x < 0)
        if not np.any(mask):
            continue
        idx = np.nonzero(mask)[0]
        order = np.argsort(np.abs(x[idx]), kind="stable")
        idx = idx[order]
        s = np.abs(x[idx])
        r1, r2, n_ok = backend.integrate_ray(
            complex(0.0, y), sign, s, anchor1, anchor2,
            params.g, params.temperature, tol.rel, tol.abs)
        if n_ok < s.size:
            raise FlowSingularityError(
                f"horizontal sweep stalled at |Re E|={s[n_ok]}",
                location=complex(sign * s[n_ok], y))
        g1[idx] = r1
        g2[idx] = r2
    zero = x == 0
    g1[zero] = anchor1
    g2[zero] = anchor2
    return g1, g2


def propagator(e, n, rates):
    """Propagator i/(E + i*Gamma_n(E)/n) from the rate pair ``rates``."""
    if n not in (1, 2):
        raise DomainError(f"n={n} not in (1, 2)")
    gamma_n = rates[n - 1]
    den = complex(e) + 1j * complex(gamma_n) / n
    if abs(den) < 1e-100:
        raise PropagatorPoleError(f"propagator pole near E={e}", location=e)
    return 1j / den


def evaluate_rates_matsubara(e_target, params, terms, tol=None):
    """Flow integration with the truncated-Matsubara right-hand side.

    Re-evaluates the frozen-rate sum (with its Euler-Maclaurin tail, so
    the truncation error is O(1/M^3) instead of O(1/M)) at every step.
    Slow; exists to validate that both forms of the flow equations
    integrate to the same rates.
    """
    from scipy.integrate import solve_ivp

    tol = tol or AccuracySpec()
    e_target = _check_domain(e_target, params, tol)
    if params.temperature <= 0:
        raise DomainError("Matsubara form requires T > 0")
    two_pi_t = 2.0 * math.pi * params.temperature
    m = np.arange(terms)
    g = params.g
    x0 = e_target.real

    def sum_sq(base):
        w = base / two_pi_t + 0.5 + m
        acc = np.sum(1.0 / (w * w))
        wm = base / two_pi_t + 0.5 + terms
        acc += 1.0 / wm + 0.5 / (wm * wm)
        return acc / two_pi_t

    def rhs(s, yv):
        # E(s) runs straight down, so dGamma/ds = -i * dGamma/dE
        e = complex(x0, params.omega_c - s)
        mie = complex(e.imag, -e.real)
        pref = g * yv[0]
        return [pref * sum_sq(mie + 0.5 * yv[1]),
                pref * sum_sq(mie + yv[0])]

    gic = params.gamma_initial
    s_end = params.omega_c - e_target.imag
    sol = solve_ivp(rhs, (0.0, s_end), [gic + 0j, gic + 0j],
                    method="RK45", rtol=tol.rel, atol=tol.abs,
                    dense_output=False)
    if not sol.success:
        raise FlowSingularityError(f"Matsubara-form flow failed: {sol.message}",
                                   location=e_target)
    return complex(sol.y[0, -1]), complex(sol.y[1, -1])
