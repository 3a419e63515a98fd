"""Nonanalyticity hunting in the lower half plane and regime classification.

The propagator's finite-frequency poles are located by Newton iteration on
iz - Gamma1(z); the essential singularities on the negative imaginary axis
are located as maxima of the Cauchy-Riemann residual along a slightly
offset vertical line (Newton has nothing to bite on for an essential
singularity) and refined by golden-section search.
"""

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import analytic
from .exceptions import (ClassificationError, DomainError,
                         FlowSingularityError, MapError)
from .flow import AccuracySpec, evaluate_rates, evaluate_rates_column, propagator

#: A pole counts as finite-frequency above this |Re z|.
OMEGA_TOL = 1e-3

#: Rate ties closer than this get a boundary flag.
BOUNDARY_TOL = 1e-4


class Regime(Enum):
    INCOHERENT = "incoherent"
    ASYMPTOTICALLY_COHERENT = "asymptotically_coherent"
    PARTIALLY_COHERENT = "partially_coherent"


@dataclass(frozen=True)
class PoleRecord:
    """Finite-frequency pole pair +-Omega - i*Gamma1*, stored with Omega >= 0."""

    omega: float
    rate: float

    @property
    def z(self):
        return complex(self.omega, -self.rate)

    @property
    def finite_frequency(self):
        return self.omega > OMEGA_TOL


@dataclass(frozen=True)
class RegimeDecision:
    regime: Regime
    boundary: bool = False


@dataclass(frozen=True)
class SpectralFeatures:
    """Poles, imaginary-axis decay rates, and the derived regime."""

    poles: tuple
    imag_singularities: tuple
    regime: Regime = None
    boundary: bool = False
    scan_complete: bool = True

    def replace_regime(self, decision):
        return SpectralFeatures(poles=self.poles,
                                imag_singularities=self.imag_singularities,
                                regime=decision.regime,
                                boundary=decision.boundary,
                                scan_complete=self.scan_complete)


@dataclass
class ResidualMap:
    """Cauchy-Riemann residual |d_ImE Re Pi1 + d_ReE Im Pi1| on a grid.

    Failed flow points carry +inf.
    """

    re_grid: np.ndarray
    im_grid: np.ndarray
    values: np.ndarray  # shape (ny, nx), row j <-> im_grid[j]
    alpha: float = None
    temperature: float = None

    @property
    def rectangle(self):
        return (self.re_grid[0], self.re_grid[-1],
                self.im_grid[0], self.im_grid[-1])


def _pi1_grid(params, xs, ys_desc, tol):
    """Propagator samples on a rectangular grid; NaN where the flow fails."""
    vals = np.full((len(ys_desc), len(xs)), np.nan + 0j)
    failed = 0
    for i, x in enumerate(xs):
        g1, _g2, ok = evaluate_rates_column(x, ys_desc, params, tol)
        for j, y in enumerate(ys_desc):
            if not ok[j]:
                failed += 1
                continue
            den = complex(x, y) + 1j * g1[j]
            if abs(den) < 1e-100:
                failed += 1
                continue
            vals[j, i] = 1j / den
    return vals, failed


def cr_residual_map(params, rectangle, grid, tol=None):
    """Residual map over rectangle=(x0, x1, y0, y1) with grid=(nx, ny).

    Central differences on a one-cell-padded propagator grid so every
    requested point gets a value; cells whose stencil touched a failed
    flow point carry +inf.
    """
    tol = tol or AccuracySpec()
    x0, x1, y0, y1 = rectangle
    nx, ny = grid
    if nx < 16 or ny < 16:
        raise DomainError("grid must be at least 16x16")
    xs = np.linspace(x0, x1, nx)
    ys = np.linspace(y0, y1, ny)
    hx = xs[1] - xs[0]
    hy = ys[1] - ys[0]
    xs_pad = np.concatenate(([xs[0] - hx], xs, [xs[-1] + hx]))
    ys_pad = np.concatenate(([ys[0] - hy], ys, [ys[-1] + hy]))
    ys_desc = ys_pad[::-1].copy()
    pi, failed = _pi1_grid(params, xs_pad, ys_desc, tol)
    if failed > 0.10 * pi.size:
        raise MapError(f"flow failed at {failed}/{pi.size} grid points")
    pi = pi[::-1, :]  # row j <-> ys_pad[j] ascending
    d_im = (np.real(pi[2:, 1:-1]) - np.real(pi[:-2, 1:-1])) / (2.0 * hy)
    d_re = (np.imag(pi[1:-1, 2:]) - np.imag(pi[1:-1, :-2])) / (2.0 * hx)
    values = np.abs(d_im + d_re)
    values[~np.isfinite(values)] = np.inf
    return ResidualMap(re_grid=xs, im_grid=ys, values=values,
                       alpha=params.alpha, temperature=params.temperature)


def _default_seed(params):
    return analytic.predicted_pole(params.g, params.kondo_scale)


def find_poles(params, seed=None, tol=None, newton_tol=1e-10, max_iter=100):
    """Finite-frequency poles of the propagator: roots of iz = Gamma1(z).

    Newton iteration with a secant-approximated derivative from ``seed``
    (zero-temperature prediction when omitted).  Returns a list with the
    canonical Omega >= 0 member of the mirror pair, or an empty list when
    the iteration does not converge (no finite-frequency pole).
    """
    tol = tol or AccuracySpec(rel=1e-12, abs=1e-14)
    z = complex(seed) if seed is not None else _default_seed(params)
    if z.imag >= 0.0:
        z = complex(z.real, -abs(z.imag) - 0.1)

    def f(w):
        g1, _ = evaluate_rates(w, params, tol)
        return 1j * w - g1

    fz = None
    for _ in range(max_iter):
        try:
            fz = f(z)
        except FlowSingularityError:
            return []
        if abs(fz) < newton_tol * params.kondo_scale:
            break
        delta = 1e-7 * max(1.0, abs(z))
        try:
            fp = (f(z + delta) - f(z - delta)) / (2.0 * delta)
        except FlowSingularityError:
            return []
        if fp == 0:
            return []
        step = fz / fp
        if abs(step) > 0.5:
            step *= 0.5 / abs(step)
        z = z - step
        if abs(z.real) > 3.0 * params.kondo_scale or z.imag < -3.0 \
                or z.imag > 0.5:
            raise DomainError(f"pole iteration left the search domain at {z}")
    else:
        return []
    if fz is None or abs(fz) >= newton_tol * params.kondo_scale:
        return []
    return [PoleRecord(omega=abs(z.real), rate=-z.imag)]


def _residual_line(params, tol, x_line, h, y):
    """CR residual at (x_line, y) from a five-point cross of step h."""
    g1c, _, okc = evaluate_rates_column(x_line, [y + h, y - h], params, tol)
    g1l, _, okl = evaluate_rates_column(x_line - h, [y], params, tol)
    g1r, _, okr = evaluate_rates_column(x_line + h, [y], params, tol)
    if not (okc.all() and okl.all() and okr.all()):
        return np.inf

    def pi1(x, yy, g1):
        return 1j / (complex(x, yy) + 1j * complex(g1))

    up = pi1(x_line, y + h, g1c[0])
    dn = pi1(x_line, y - h, g1c[1])
    le = pi1(x_line - h, y, g1l[0])
    ri = pi1(x_line + h, y, g1r[0])
    return abs((up.real - dn.real) / (2 * h) + (ri.imag - le.imag) / (2 * h))


def _golden_max(fun, lo, hi, xtol):
    """Golden-section maximization on [lo, hi]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fun(c), fun(d)
    while b - a > xtol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fun(d)
    return 0.5 * (a + b)


@dataclass(frozen=True)
class ImagAxisScan:
    """Decay rates found on the negative imaginary axis."""

    rates: tuple
    requested: int

    @property
    def complete(self):
        return len(self.rates) >= self.requested


def find_imag_axis_singularities(params, count, tol=None, fp=None):
    """Smallest ``count`` decay rates of imaginary-axis nonanalyticities.

    Scans the Cauchy-Riemann residual along a vertical line at a small
    real offset (the singularities sit exactly on the axis, where vertical
    trajectories cannot pass them), locates local maxima, and refines each
    by golden-section on the continuous residual profile.
    """
    t = params.temperature
    if t <= 0.0:
        raise DomainError("axis-singularity scan requires T > 0")
    if count < 1:
        raise DomainError("count must be >= 1")
    tol = tol or AccuracySpec()
    g = params.g
    try:
        gamma0_hat = analytic.predicted_gamma0(params, fp)
    except Exception:
        gamma0_hat = math.pi * t + 0.55 * params.kondo_scale
    # offset large enough that the essential-singularity phase (scale
    # 2 pi g T) does not fold into the residual profile
    x_line = max(2.0 * math.pi * abs(g) * t, 0.02)
    h = 0.5 * x_line
    y_top = -max(0.25 * math.pi * t, 0.3 * gamma0_hat)
    y_bot = -(gamma0_hat + (count + 0.6) * 2.0 * math.pi * t)
    y_bot = max(y_bot, tol.im_min + 2.5 * h)
    step = min(math.pi * t / 2.0, (y_top - y_bot) / (8.0 * count))

    ys = np.arange(y_top, y_bot, -step)
    prof = np.array([_residual_line(params, tol, x_line, h, y) for y in ys])
    finite = np.isfinite(prof)
    rates = []
    for j in range(1, len(ys) - 1):
        if not (finite[j - 1] and finite[j] and finite[j + 1]):
            continue
        if prof[j] > prof[j - 1] and prof[j] >= prof[j + 1]:
            y_ref = _golden_max(
                lambda y: _residual_line(params, tol, x_line, h, y),
                ys[j + 1], ys[j - 1], xtol=1e-4 * max(1.0, t))
            rates.append(-y_ref)
    rates = sorted(rates)
    merged = []
    for r in rates:
        if not merged or r - merged[-1] > step:
            merged.append(r)
    return ImagAxisScan(rates=tuple(merged[:count]), requested=count)


def classify_regime(features):
    """Regime from spectral features.

    Incoherent without a finite-frequency pole; otherwise the pole decay
    rate against the topmost axis rate decides between asymptotically
    (pole closer to the real axis) and partially coherent.
    """
    if not features.poles and not features.imag_singularities:
        raise ClassificationError("no spectral features to classify")
    pole = None
    for p in features.poles:
        if p.finite_frequency:
            pole = p
            break
    if pole is None:
        return RegimeDecision(Regime.INCOHERENT)
    if not features.imag_singularities:
        raise ClassificationError(
            "finite-frequency pole but no axis rate to compare against")
    gamma0 = min(features.imag_singularities)
    diff = pole.rate - gamma0
    boundary = abs(diff) < BOUNDARY_TOL
    if diff < 0:
        return RegimeDecision(Regime.ASYMPTOTICALLY_COHERENT, boundary)
    return RegimeDecision(Regime.PARTIALLY_COHERENT, boundary)


def find_spectral_features(params, count=2, seed=None, tol=None):
    """Assemble poles + axis singularities and classify the regime."""
    poles = find_poles(params, seed=seed)
    has_pole = any(p.finite_frequency for p in poles)
    if params.temperature > 0.0:
        scan = find_imag_axis_singularities(params, count, tol)
        sings = scan.rates
        complete = scan.complete
    else:
        sings = ()
        complete = True
    feats = SpectralFeatures(poles=tuple(poles), imag_singularities=sings,
                             scan_complete=complete)
    if params.temperature == 0.0 and not sings:
        # zero temperature: branch cut start at Gamma2*/2 plays the role
        # of the topmost axis rate
        g2 = analytic.zero_t_rates(max(params.g, 0.0),
                                   params.kondo_scale).gamma2_star
        feats = SpectralFeatures(poles=feats.poles,
                                 imag_singularities=(0.5 * g2,),
                                 scan_complete=True)
    decision = classify_regime(feats) if (feats.poles or
                                          feats.imag_singularities) else None
    if decision is None:
        raise ClassificationError("no features found")
    if not has_pole and not feats.imag_singularities:
        raise ClassificationError("empty feature set")
    return feats.replace_regime(decision)
