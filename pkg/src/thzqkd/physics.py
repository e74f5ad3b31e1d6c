"""Physical constants, thermal photon statistics and entropy helpers.

Shot-noise-unit (SNU) convention used throughout the package: quadratures
are q = a + a*, p = i(a* - a), the zero-temperature vacuum has unit
quadrature variance, and a thermal vacuum at temperature T_e has variance
V0 = 2*nbar + 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# CODATA-2018 exact SI values, pinned here so every module agrees bit-for-bit.
PLANCK_H = 6.62607015e-34    # J s
BOLTZMANN_KB = 1.380649e-23  # J / K
SPEED_OF_LIGHT = 299792458.0  # m / s
CONSTANTS_VERSION = "CODATA-2018"

# Numerically computed symplectic eigenvalues of pure states land slightly
# below 1; values inside this window clamp to 1 instead of raising.
ENTROPY_CLAMP_TOL = 1e-9

_RANGE_TOL = 1e-12


@dataclass(frozen=True)
class EnvironmentParams:
    """Carrier, environment temperature and modulation/noise variances (SNU).

    Attributes:
        carrier_frequency_hz: carrier frequency f_c.
        temperature_k: environment temperature T_e.
        signal_variance: V_s, variance of the Gaussian signal encoding.
        eve_noise_variance: W, variance of the excess noise injected by the
            eavesdropper; W = 1 is pure vacuum injection.
    """

    carrier_frequency_hz: float
    temperature_k: float
    signal_variance: float
    eve_noise_variance: float = 1.0

    def __post_init__(self):
        if not self.carrier_frequency_hz > 0:
            raise ValueError("carrier_frequency_hz must be > 0")
        if not self.temperature_k > 0:
            raise ValueError("temperature_k must be > 0")
        if not self.signal_variance > 0:
            raise ValueError("signal_variance must be > 0")
        if self.eve_noise_variance < 1.0 - _RANGE_TOL:
            raise ValueError("eve_noise_variance must be >= 1 (SNU)")

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_frequency_hz


def mean_thermal_photons(env: EnvironmentParams) -> float:
    """Planck occupation nbar = 1/(exp(h f_c / kB T_e) - 1) at the carrier.

    Returns 0.0 when the exponent is too large to represent, which is the
    correct zero-occupation limit.
    """
    x = PLANCK_H * env.carrier_frequency_hz / (BOLTZMANN_KB * env.temperature_k)
    if x > 700.0:
        return 0.0
    return 1.0 / math.expm1(x)


def vacuum_variance(env: EnvironmentParams) -> float:
    """Thermal vacuum quadrature variance V0 = 2*nbar + 1 (SNU)."""
    return 2.0 * mean_thermal_photons(env) + 1.0


def bosonic_entropy(x: float) -> float:
    """Entropy (bits) of a thermal mode with symplectic eigenvalue x >= 1.

    h(x) = (x+1)/2 log2((x+1)/2) - (x-1)/2 log2((x-1)/2), with the second
    term defined as 0 at x = 1.  Values in [1 - ENTROPY_CLAMP_TOL, 1) clamp
    to 1; anything lower raises.
    """
    if x < 1.0 - ENTROPY_CLAMP_TOL:
        raise ValueError(f"symplectic eigenvalue {x!r} is below 1")
    if x <= 1.0:
        return 0.0
    up = (x + 1.0) / 2.0
    dn = (x - 1.0) / 2.0
    return up * math.log2(up) - dn * math.log2(dn)


def lambda_mix(t: float, x: float, y: float) -> float:
    """Convex combination t*x + (1-t)*y used by all the rate formulas."""
    if t < -_RANGE_TOL or t > 1.0 + _RANGE_TOL:
        raise ValueError(f"mixing weight {t!r} outside [0, 1]")
    t = min(max(t, 0.0), 1.0)
    return t * x + (1.0 - t) * y
