"""Complex digamma/trigamma and the Matsubara partial-sum oracle.

The psi functions shift the argument into |z| >= 20 by upward recurrence
and then apply the standard asymptotic series (done in the kernel).
Arguments on the nonpositive real axis are rejected: the poles live
there and nothing in scope needs that half-line.
"""

import math

from . import backend
from .exceptions import DomainError, SingularityError


def _check_argument(z):
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"nonfinite argument {z}")
    if z.imag == 0.0 and z.real <= 0.0:
        if z.real == math.floor(z.real):
            raise SingularityError(f"psi pole at z={z}", location=z)
        raise DomainError(f"argument {z} on the negative real axis")
    return z


def digamma(z):
    """psi(z), accurate to ~1e-12 relative for |z| <= 1e6."""
    w = backend.digamma_kernel(_check_argument(z))
    if not (math.isfinite(w.real) and math.isfinite(w.imag)):
        raise SingularityError(f"digamma failed at z={z}", location=z)
    return w


def trigamma(z):
    """psi'(z), accurate to ~1e-12 relative for |z| <= 1e6."""
    w = backend.trigamma_kernel(_check_argument(z))
    if not (math.isfinite(w.real) and math.isfinite(w.imag)):
        raise SingularityError(f"trigamma failed at z={z}", location=z)
    return w


def trigamma_partial_sum(z, terms, tail=True):
    """Brute-force psi'(z) = sum_m 1/(z+m)^2 over the first ``terms`` m.

    With ``tail`` the Euler-Maclaurin correction 1/(z+M) + 1/(2(z+M)^2)
    is added, otherwise the raw partial sum (error O(1/M)) is returned.
    Oracle used to cross-check the closed-form trigamma.
    """
    z = complex(z)
    acc = 0.0 + 0.0j
    for m in range(terms):
        w = z + m
        if w == 0:
            raise SingularityError(f"partial sum hit pole at m={m}",
                                   location=z)
        acc += 1.0 / (w * w)
    if tail:
        w = z + terms
        acc += 1.0 / w + 0.5 / (w * w)
    return acc


def matsubara_sum_sq(e, rate, n, temperature, terms, tail=False):
    """Truncated Matsubara sum 2*pi*T * sum_m [Pi(E + i w_m)]^2.

    The propagator is built from the frozen ``rate``:
    Pi(E') = i / (E' + i*rate/n), and w_m = pi*T*(2m+1).  As terms -> inf
    this converges (with O(1/M) error) to
    psi'(1/2 + (-iE + rate/n)/(2 pi T)) / (2 pi T), the closed form used
    by the flow equations; ``tail`` adds the Euler-Maclaurin correction.
    """
    if temperature <= 0.0:
        raise DomainError("matsubara_sum_sq requires T > 0")
    if terms < 1:
        raise DomainError("terms must be >= 1")
    if n not in (1, 2):
        raise DomainError(f"n={n} not in (1, 2)")
    e = complex(e)
    rate = complex(rate)
    two_pi_t = 2.0 * math.pi * temperature
    # [i/(E + i w + i rate/n)]^2 = 1/(-iE + w + rate/n)^2
    base = complex(e.imag, -e.real) + rate / n  # -iE + rate/n
    z = 0.5 + base / two_pi_t
    acc = trigamma_partial_sum(z, terms, tail=tail)
    return acc / two_pi_t


def matsubara_closed_form(e, rate, n, temperature):
    """Infinite-M limit of matsubara_sum_sq via the trigamma function."""
    if temperature <= 0.0:
        raise DomainError("requires T > 0")
    e = complex(e)
    two_pi_t = 2.0 * math.pi * temperature
    base = complex(e.imag, -e.real) + complex(rate) / n
    return trigamma(0.5 + base / two_pi_t) / two_pi_t


EULER_GAMMA = 0.57721566490153286

__all__ = ["digamma", "trigamma", "trigamma_partial_sum",
           "matsubara_sum_sq", "matsubara_closed_form", "EULER_GAMMA"]
