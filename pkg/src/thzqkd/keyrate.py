"""Closed-form reverse-reconciliation secret key rates.

Per-channel rate = mutual information minus the eavesdropper's accessible
(Holevo) information.  Three evaluation methods:

* ``exact``: Holevo term from the first-principles covariance pipeline in
  :mod:`thzqkd.gaussian`.
* ``large_modulation``: four-entropy closed form valid for V_s >> V_0, W.
* ``taylor``: small-transmittance expansion R ~ zeta * tr(H^H H) - r h(W).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from . import gaussian
from .channel import ChannelDecomposition
from .physics import EnvironmentParams, bosonic_entropy, lambda_mix, vacuum_variance

METHODS = ("exact", "large_modulation", "taylor")

# Literal constant of the small-T expansion; the analytic value it rounds
# is 1/(2 ln 2), selectable for convergence studies.
ZETA_CONSTANT_PAPER = 0.72
ZETA_CONSTANT_ANALYTIC = 1.0 / (2.0 * math.log(2.0))


def _zeta_constant(mode: str) -> float:
    if mode == "paper":
        return ZETA_CONSTANT_PAPER
    if mode == "analytic":
        return ZETA_CONSTANT_ANALYTIC
    raise ValueError("zeta constant mode must be 'paper' or 'analytic'")


@dataclass(frozen=True)
class PerChannelRate:
    transmittance: float
    mutual_info_bits: float
    holevo_bits: float
    rate_bits: float


@dataclass(frozen=True)
class RateBreakdown:
    """Per-eigenmode and total key rate (bits per MIMO channel use)."""

    per_channel: tuple[PerChannelRate, ...]
    total_rate_bits: float
    method: str


@dataclass(frozen=True)
class ApproxEigs:
    """Large-modulation symplectic eigenvalues and their quadratic invariants."""

    nu1: float
    nu2: float
    nu3: float
    nu4: float
    delta: float
    upsilon: float


@dataclass(frozen=True)
class FeasibilityResult:
    zeta: float
    alpha: float
    feasible: bool


def mutual_information(transmittance: float, signal_variance: float,
                       vacuum_var: float, eve_noise: float) -> float:
    """Alice-Bob mutual information (bits):
    I = 1/2 log2(1 + T V_s / (T V_0 + (1-T) W))."""
    _check_common(transmittance, signal_variance, vacuum_var, eve_noise, allow_zero_t=True)
    noise = lambda_mix(transmittance, vacuum_var, eve_noise)
    return 0.5 * math.log2(1.0 + transmittance * signal_variance / noise)


def approx_symplectic_eigs(transmittance: float, alice_variance: float,
                           eve_noise: float) -> ApproxEigs:
    """Large-modulation eigenvalues: nu1 = T W + (1-T) V_a, nu2 = W, and
    nu3,4 = sqrt((Delta +/- sqrt(Delta^2 - 4 Upsilon))/2)."""
    t, va, w = transmittance, alice_variance, eve_noise
    if not 0.0 < t <= 1.0 + 1e-12:
        raise ValueError("transmittance must lie in (0, 1]")
    if va <= 1.0:
        raise ValueError("alice_variance must exceed 1")
    if w < 1.0 - 1e-9:
        raise ValueError("eve_noise must be >= 1")
    t = min(t, 1.0)
    lam_w_va = lambda_mix(t, w, va)
    lam_wva_1 = lambda_mix(t, w * va, 1.0)
    lam_va_w = lambda_mix(t, va, w)
    delta = (va * w * lam_w_va + w * lam_wva_1) / lam_va_w
    upsilon = va * w * w * lam_wva_1 * lam_w_va / lam_va_w ** 2
    disc = delta * delta - 4.0 * upsilon
    if disc < -1e-8 * max(delta * delta, 1.0):
        raise ValueError(f"negative eigenvalue discriminant {disc!r}")
    root = math.sqrt(max(disc, 0.0))
    nu3 = math.sqrt(0.5 * (delta + root))
    nu4 = math.sqrt(max(0.5 * (delta - root), 0.0))
    return ApproxEigs(nu1=lam_w_va, nu2=w, nu3=nu3, nu4=nu4,
                      delta=delta, upsilon=upsilon)


def holevo_large_modulation(transmittance: float, alice_variance: float,
                            eve_noise: float) -> float:
    """Four-entropy closed form of the eavesdropper bound (bits):
    h(nu1) + h(W) - h(sqrt(V_a W nu1 / L)) - h(sqrt(W (T W V_a + 1 - T) / L))
    with nu1 = T W + (1-T) V_a and L = T V_a + (1-T) W."""
    t, va, w = transmittance, alice_variance, eve_noise
    lam_w_va = lambda_mix(t, w, va)
    lam_wva_1 = lambda_mix(t, w * va, 1.0)
    lam_va_w = lambda_mix(t, va, w)
    nu3 = math.sqrt(va * w * lam_w_va / lam_va_w)
    nu4 = math.sqrt(w * lam_wva_1 / lam_va_w)
    return (bosonic_entropy(lam_w_va) + bosonic_entropy(w)
            - bosonic_entropy(nu3) - bosonic_entropy(nu4))


def rate_per_channel(transmittance: float, signal_variance: float,
                     vacuum_var: float, eve_noise: float,
                     method: str = "large_modulation") -> float:
    """Reverse-reconciliation rate of one parallel channel (bits/use).

    Negative values are returned as-is: key distillation is infeasible on
    that eigenmode.
    """
    mi, holevo = _rate_terms(transmittance, signal_variance, vacuum_var,
                             eve_noise, method)
    return mi - holevo


def _check_common(t, vs, v0, w, allow_zero_t=False):
    lo_ok = t >= -1e-12 if allow_zero_t else t > 0.0
    if not (lo_ok and t <= 1.0 + 1e-12):
        raise ValueError(f"transmittance {t!r} outside the valid range")
    if not vs > 0:
        raise ValueError("signal_variance must be > 0")
    if v0 < 1.0 - 1e-9:
        raise ValueError("vacuum variance must be >= 1")
    if w < 1.0 - 1e-9:
        raise ValueError("eve_noise must be >= 1")


def _rate_terms(t, vs, v0, w, method, zeta_constant_mode="paper"):
    """(mutual information, holevo) pair for one channel under a method."""
    _check_common(t, vs, v0, w, allow_zero_t=True)
    t = min(max(t, 0.0), 1.0)
    va = vs + v0
    if method == "exact":
        mi = mutual_information(t, vs, v0, w)
        holevo = gaussian.holevo_exact(t, va, w)
    elif method == "large_modulation":
        mi = mutual_information(t, vs, v0, w)
        holevo = holevo_large_modulation(t, va, w)
    elif method == "taylor":
        zeta = zeta_coefficient(vs, v0, w, zeta_constant_mode)
        mi = zeta * t
        holevo = bosonic_entropy(w)
    else:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    return mi, holevo


def rate_mimo(dec: ChannelDecomposition, env: EnvironmentParams,
              method: str = "large_modulation",
              clamp_negative_channels: bool = False,
              zeta_constant_mode: str = "paper") -> RateBreakdown:
    """Total MIMO rate: sum of the per-eigenmode rates.

    With clamp_negative_channels, eigenmodes with negative rate contribute 0
    (a practical system switches them off); by default they are summed
    as-is.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    vs = env.signal_variance
    v0 = vacuum_variance(env)
    w = env.eve_noise_variance
    per = []
    total = 0.0
    for t in dec.transmittances:
        mi, holevo = _rate_terms(float(t), vs, v0, w, method, zeta_constant_mode)
        rate = mi - holevo
        per.append(PerChannelRate(transmittance=float(t), mutual_info_bits=mi,
                                  holevo_bits=holevo, rate_bits=rate))
        total += max(rate, 0.0) if clamp_negative_channels else rate
    return RateBreakdown(per_channel=tuple(per), total_rate_bits=total, method=method)


def rate_taylor(dec: ChannelDecomposition, env: EnvironmentParams,
                zeta_constant_mode: str = "paper",
                clamp_negative_channels: bool = False) -> RateBreakdown:
    """Small-transmittance expansion: total = zeta * tr(H^H H) - r h(W)."""
    return rate_mimo(dec, env, method="taylor",
                     clamp_negative_channels=clamp_negative_channels,
                     zeta_constant_mode=zeta_constant_mode)


def zeta_coefficient(signal_variance: float, vacuum_var: float,
                     eve_noise: float, constant_mode: str = "paper") -> float:
    """Small-transmittance rate slope:
    zeta = c [V_s/W - ln((V_a+1)/(V_a-1)) ((V_a^2-W^2)/(2W) - V_a)]
    with c = 0.72 (or 1/(2 ln 2) in 'analytic' mode) and V_a = V_s + V_0."""
    c = _zeta_constant(constant_mode)
    vs, v0, w = signal_variance, vacuum_var, eve_noise
    if w < 1.0 - 1e-9:
        raise ValueError("eve_noise must be >= 1")
    va = vs + v0
    if va <= 1.0:
        raise ValueError("V_a = V_s + V_0 must exceed 1")
    bracket = vs / w - math.log((va + 1.0) / (va - 1.0)) * ((va * va - w * w) / (2.0 * w) - va)
    return c * bracket


def feasibility_threshold(dec: ChannelDecomposition, env: EnvironmentParams,
                          constant_mode: str = "paper") -> FeasibilityResult:
    """Necessary condition for a positive rate: zeta > alpha with
    alpha = r h(W) / tr(H^H H)."""
    zeta = zeta_coefficient(env.signal_variance, vacuum_variance(env),
                            env.eve_noise_variance, constant_mode)
    alpha = dec.rank * bosonic_entropy(env.eve_noise_variance) / dec.total_transmittance
    return FeasibilityResult(zeta=zeta, alpha=alpha, feasible=zeta > alpha)
