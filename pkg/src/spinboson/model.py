"""Model parameters and derived scales.

Units convention: all energies in units of the Kondo scale T_K = 1, all
times in 1/T_K.  The Kondo scale is T_K = Delta (Delta/omega_c)^(a/(1-a))
for coupling a, so at fixed T_K the tunneling amplitude follows as
Delta = omega_c^a * T_K^(1-a).
"""

import math
from dataclasses import dataclass, replace

from .exceptions import ConfigurationError, DomainError

#: Scaling-limit floor: the band edge must dwarf every other scale.
OMEGA_C_MIN = 1e3

#: Default band edge, large enough that universal quantities are
#: insensitive to it (see the doubling test) yet cheap to integrate from.
OMEGA_C_DEFAULT = 1e4


@dataclass(frozen=True)
class ModelParams:
    """Physical inputs and derived scales, immutable after construction.

    Attributes
    ----------
    alpha : float
        Dissipation strength, 0 < alpha < 1.
    g : float
        Expansion parameter 1 - 2*alpha (negative above alpha = 1/2).
    temperature : float
        Reservoir temperature in units of T_K, >= 0.
    kondo_scale : float
        T_K; fixed to 1 by convention.
    omega_c : float
        Band edge in units of T_K.
    delta : float
        Tunneling amplitude solving the Kondo-scale relation.
    """

    alpha: float
    g: float
    temperature: float
    kondo_scale: float
    omega_c: float
    delta: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"alpha={self.alpha} outside (0, 1)")
        if self.temperature < 0.0:
            raise DomainError(f"temperature={self.temperature} negative")
        if self.omega_c < OMEGA_C_MIN * self.kondo_scale:
            raise ConfigurationError(
                f"omega_c={self.omega_c} below the scaling-limit floor "
                f"{OMEGA_C_MIN} T_K")

    @property
    def gamma_initial(self):
        """High-energy rate Delta^2/omega_c seeding every flow trajectory."""
        return self.delta * self.delta / self.omega_c

    def with_temperature(self, temperature):
        """Copy of the parameters at a different temperature."""
        return replace(self, temperature=float(temperature))


def derive_scales(alpha, omega_c=OMEGA_C_DEFAULT, temperature=0.0,
                  kondo_scale=1.0):
    """Construct ModelParams with Delta solving the Kondo-scale relation.

    Parameters
    ----------
    alpha : float
        Dissipation strength in (0, 1).
    omega_c : float
        Band edge, at least 1e3 in units of T_K.
    temperature : float
        Reservoir temperature, >= 0.
    kondo_scale : float
        Kondo scale; 1 by convention.
    """
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha={alpha} outside (0, 1)")
    delta = omega_c ** alpha * kondo_scale ** (1.0 - alpha)
    return ModelParams(alpha=alpha, g=1.0 - 2.0 * alpha,
                       temperature=float(temperature),
                       kondo_scale=float(kondo_scale),
                       omega_c=float(omega_c), delta=delta)


def kondo_scale_of(delta, omega_c, alpha):
    """T_K = Delta (Delta/omega_c)^(alpha/(1-alpha)); round-trip check."""
    return delta * (delta / omega_c) ** (alpha / (1.0 - alpha))


@dataclass(frozen=True)
class MatsubaraFrequency:
    """Bosonic Matsubara frequency pi*T*(2m+1) at index m >= 0."""

    index: int
    temperature: float

    def __post_init__(self):
        if self.index < 0:
            raise DomainError(f"index={self.index} negative")
        if self.temperature < 0.0:
            raise DomainError("temperature negative")

    @property
    def value(self):
        return math.pi * self.temperature * (2 * self.index + 1)
