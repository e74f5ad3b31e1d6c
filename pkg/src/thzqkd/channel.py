"""Terahertz MIMO channel construction and SVD eigenmode decomposition.

Builds the complex N_r x N_t channel matrix from multipath geometry (ULA
steering vectors, free-space plus molecular-absorption path loss) and
factors it into parallel eigenmode transmittances via the singular value
decomposition.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError, UnphysicalChannelError
from .physics import EnvironmentParams

DEFAULT_RANK_TOLERANCE = 1e-12
_SINGULAR_FLOOR = 1e-30
_UNIT_TOL = 1e-9


@dataclass(frozen=True)
class ArrayConfig:
    """Transmit/receive ULA sizes and per-element gain (linear units)."""

    n_tx: int
    n_rx: int
    element_gain: float
    element_spacing_over_lambda: float = 0.5

    def __post_init__(self):
        if self.n_tx < 1 or self.n_rx < 1:
            raise ValueError("array sizes must be >= 1")
        if not self.element_gain > 0:
            raise ValueError("element_gain must be > 0 (linear units)")
        if not self.element_spacing_over_lambda > 0:
            raise ValueError("element_spacing_over_lambda must be > 0")

    @property
    def tx_gain(self) -> float:
        return self.n_tx * self.element_gain

    @property
    def rx_gain(self) -> float:
        return self.n_rx * self.element_gain


@dataclass(frozen=True)
class PathSpec:
    """One multipath component: geometry plus reflection parameters.

    roughness_beta and fresnel_r only enter the loss of non-line-of-sight
    paths; they are ignored on the LoS path.
    """

    path_length_m: float
    aod_rad: float = 0.0
    aoa_rad: float = 0.0
    delay_s: float = 0.0
    is_los: bool = False
    roughness_beta: float = 1.0
    fresnel_r: complex = 1.0 + 0.0j

    def __post_init__(self):
        if not self.path_length_m > 0:
            raise ValueError("path_length_m must be > 0")
        half_pi = np.pi / 2
        if not -half_pi < self.aod_rad < half_pi:
            raise ValueError("aod_rad must lie in (-pi/2, pi/2)")
        if not -half_pi < self.aoa_rad < half_pi:
            raise ValueError("aoa_rad must lie in (-pi/2, pi/2)")
        if self.delay_s < 0:
            raise ValueError("delay_s must be >= 0")
        if not self.is_los:
            if not 0.0 <= self.roughness_beta <= 1.0:
                raise ValueError("roughness_beta must lie in [0, 1]")
            if abs(complex(self.fresnel_r)) > 1.0 + _UNIT_TOL:
                raise ValueError("fresnel_r must have magnitude <= 1")


class AbsorptionTable:
    """Piecewise-constant molecular absorption delta(f) in dB/km.

    Bands are non-overlapping contiguous intervals.  ``closed="right"``
    means a band (lo, hi] owns its upper edge (the convention of the
    built-in default table); ``closed="left"`` means [lo, hi), the
    convention used for tables loaded from CSV.
    """

    def __init__(self, bands: Sequence[tuple[float, float, float]], closed: str = "right"):
        if closed not in ("left", "right"):
            raise ConfigError("absorption table 'closed' must be 'left' or 'right'")
        bands = [(float(lo), float(hi), float(d)) for lo, hi, d in bands]
        if not bands:
            raise ConfigError("absorption table needs at least one band")
        bands.sort(key=lambda b: b[0])
        prev_hi = None
        for lo, hi, d in bands:
            if hi <= lo:
                raise ConfigError(f"absorption band ({lo}, {hi}) is empty")
            if d < 0:
                raise ConfigError("absorption delta_db_per_km must be >= 0")
            if prev_hi is not None and lo < prev_hi:
                raise ConfigError("absorption bands overlap")
            prev_hi = hi
        self.bands = tuple(bands)
        self.closed = closed

    def delta_db_per_km(self, frequency_hz: float) -> float:
        for lo, hi, d in self.bands:
            if self.closed == "right":
                if lo < frequency_hz <= hi:
                    return d
            else:
                if lo <= frequency_hz < hi:
                    return d
        raise ConfigError(
            f"carrier frequency {frequency_hz:g} Hz outside the absorption "
            f"table coverage [{self.bands[0][0]:g}, {self.bands[-1][1]:g}] Hz"
        )

    @classmethod
    def from_csv(cls, path) -> "AbsorptionTable":
        """Load a two-column CSV (frequency_hz, delta_db_per_km).

        Consecutive rows delimit left-closed bands [f_i, f_{i+1}); the last
        row terminates the covered range.
        """
        rows = []
        with open(path, newline="", encoding="utf-8") as fh:
            for rec in csv.reader(fh):
                if not rec or rec[0].lstrip().startswith("#"):
                    continue
                try:
                    rows.append((float(rec[0]), float(rec[1])))
                except (IndexError, ValueError) as exc:
                    raise ConfigError(f"bad absorption CSV row {rec!r} in {path}") from exc
        if len(rows) < 2:
            raise ConfigError(f"absorption CSV {path} needs at least two rows")
        freqs = [f for f, _ in rows]
        if any(b <= a for a, b in zip(freqs, freqs[1:])):
            raise ConfigError(f"absorption CSV {path} frequencies must increase")
        bands = [(rows[i][0], rows[i + 1][0], rows[i][1]) for i in range(len(rows) - 1)]
        return cls(bands, closed="left")


def default_absorption_table() -> AbsorptionTable:
    """Default delta(f): 1000 dB/km up to 10 THz, 100 dB/km on (10, 14] THz,
    50 dB/km on (14, 30] THz."""
    return AbsorptionTable(
        [(0.0, 10e12, 1000.0), (10e12, 14e12, 100.0), (14e12, 30e12, 50.0)],
        closed="right",
    )


def steering_vector(k: int, theta_rad: float, spacing_over_lambda: float = 0.5) -> np.ndarray:
    """Unit-norm ULA array response: entry m is exp(j*2*pi*(d/lambda)*m*sin(theta))/sqrt(k)."""
    if k < 1:
        raise ValueError("array size must be >= 1")
    m = np.arange(k)
    phase = 2.0 * np.pi * spacing_over_lambda * m * np.sin(theta_rad)
    return np.exp(1j * phase) / np.sqrt(k)


def path_loss(
    path: PathSpec,
    env: EnvironmentParams,
    arrays: ArrayConfig,
    absorption: AbsorptionTable,
    fresnel_mode: str = "power",
) -> float:
    """Power gain of one multipath component.

    Free-space term (lambda / 4 pi d)^2 times the array gains G_t G_r and the
    molecular absorption 10^(-delta*d/10) with delta in dB/km.  NLoS paths are
    additionally scaled by the Rayleigh roughness factor and the Fresnel
    reflection coefficient: |r|^2 when fresnel_mode="power" (default, treats
    the tabulated path gain as a power ratio), Re(r) when fresnel_mode="raw".
    """
    if fresnel_mode not in ("power", "raw"):
        raise ValueError("fresnel_mode must be 'power' or 'raw'")
    lam = env.wavelength_m
    d = path.path_length_m
    delta = absorption.delta_db_per_km(env.carrier_frequency_hz)
    gamma = (lam / (4.0 * np.pi * d)) ** 2 * arrays.tx_gain * arrays.rx_gain
    gamma *= 10.0 ** (-0.1 * delta * (d / 1000.0))
    if not path.is_los:
        if fresnel_mode == "power":
            gamma *= path.roughness_beta * abs(complex(path.fresnel_r)) ** 2
        else:
            gamma *= path.roughness_beta * complex(path.fresnel_r).real
    if not np.isfinite(gamma) or gamma < 0:
        raise UnphysicalChannelError(f"path loss evaluated to {gamma!r}")
    return float(gamma)


def _validate_paths(paths: Sequence[PathSpec]) -> None:
    if not paths:
        raise ValueError("at least one path is required")
    los = [p for p in paths if p.is_los]
    if len(los) != 1:
        raise ValueError(f"exactly one LoS path required, got {len(los)}")
    d_min = min(p.path_length_m for p in paths)
    if los[0].path_length_m > d_min:
        raise ValueError("the LoS path must have the minimal path length")


def build_channel(
    paths: Sequence[PathSpec],
    env: EnvironmentParams,
    arrays: ArrayConfig,
    absorption: AbsorptionTable,
    fresnel_mode: str = "power",
) -> np.ndarray:
    """Sum of per-path rank-1 outer products with carrier phase factors.

    H = sum_l sqrt(gamma_l) exp(j*2*pi*f_c*tau_l) psi_rx(aoa_l) psi_tx(aod_l)^H
    """
    _validate_paths(paths)
    h = np.zeros((arrays.n_rx, arrays.n_tx), dtype=complex)
    for p in paths:
        gamma = path_loss(p, env, arrays, absorption, fresnel_mode)
        phase = np.exp(1j * 2.0 * np.pi * env.carrier_frequency_hz * p.delay_s)
        rx = steering_vector(arrays.n_rx, p.aoa_rad, arrays.element_spacing_over_lambda)
        tx = steering_vector(arrays.n_tx, p.aod_rad, arrays.element_spacing_over_lambda)
        h += np.sqrt(gamma) * phase * np.outer(rx, tx.conj())
    return h


@dataclass(frozen=True, eq=False)
class ChannelDecomposition:
    """SVD factors of the channel and the parallel-channel transmittances.

    transmittances holds the r non-zero eigenvalues of H^H H in descending
    order; eve_mix holds sqrt(1 - T_i) for the r active eigenmodes padded
    with ones up to min(N_r, N_t).
    """

    matrix: np.ndarray
    left_unitary: np.ndarray
    right_unitary: np.ndarray
    transmittances: np.ndarray
    rank: int
    eve_mix: np.ndarray

    @property
    def total_transmittance(self) -> float:
        """tr(H^H H), the equivalent channel transmittance."""
        return float(np.sum(self.transmittances))


def decompose(channel: np.ndarray, rank_tolerance: float = DEFAULT_RANK_TOLERANCE) -> ChannelDecomposition:
    """SVD of the channel matrix with numerical-rank truncation.

    Singular values below rank_tolerance times the largest one count as
    zero.  Raises UnphysicalChannelError when the channel is fully opaque
    or any transmittance exceeds 1 (a passive channel cannot amplify).
    """
    h = np.asarray(channel, dtype=complex)
    if h.ndim != 2:
        raise ValueError("channel must be a 2-D matrix")
    if not np.all(np.isfinite(h)):
        raise ValueError("channel matrix contains non-finite entries")
    u, s, vh = np.linalg.svd(h)
    if s[0] <= _SINGULAR_FLOOR:
        raise UnphysicalChannelError("all singular values below 1e-30: channel fully opaque")
    rank = int(np.sum(s > rank_tolerance * s[0]))
    t = s[:rank] ** 2
    if t[0] > 1.0 + 1e-12:
        raise UnphysicalChannelError(
            f"leading eigenmode transmittance {t[0]:.6g} exceeds 1; the passive "
            "beam-splitter channel model does not apply (reduce gains or "
            "increase distance)"
        )
    t = np.minimum(t, 1.0)
    m = min(h.shape)
    eve_mix = np.concatenate([np.sqrt(1.0 - t), np.ones(m - rank)])
    return ChannelDecomposition(
        matrix=h,
        left_unitary=u,
        right_unitary=vh.conj().T,
        transmittances=t,
        rank=rank,
        eve_mix=eve_mix,
    )


def effective_parallel_channels(dec: ChannelDecomposition) -> np.ndarray:
    """Transmittances T_1..T_r of the parallel channels after transmit
    beamforming with V and receive combining with U^H (which diagonalize H
    to diag(sqrt(T_i)))."""
    return dec.transmittances.copy()


@dataclass(frozen=True, eq=False)
class ParallelChannels:
    """Eigenmode transmittances without the dense SVD factors.

    Duck-type compatible with ChannelDecomposition wherever only the
    transmittances are needed (rate evaluation, feasibility, sweeps).
    """

    transmittances: np.ndarray
    rank: int

    @property
    def total_transmittance(self) -> float:
        return float(np.sum(self.transmittances))


def eigenmode_transmittances(
    paths: Sequence[PathSpec],
    env: EnvironmentParams,
    arrays: ArrayConfig,
    absorption: AbsorptionTable,
    fresnel_mode: str = "power",
    rank_tolerance: float = DEFAULT_RANK_TOLERANCE,
) -> ParallelChannels:
    """Nonzero eigenvalues of H^H H computed from L x L path Gram matrices.

    With H = R D T^H (R, T the stacked receive/transmit steering vectors and
    D = diag(sqrt(gamma_l) e^{j phi_l})), the nonzero spectrum of H^H H
    equals that of (D^H R^H R D)(T^H T).  Exact and O(L^3) instead of
    O(N_r N_t min(N_r, N_t)), which matters for large arrays in sweeps.
    """
    _validate_paths(paths)
    coeffs = []
    rx_cols = []
    tx_cols = []
    for p in paths:
        gamma = path_loss(p, env, arrays, absorption, fresnel_mode)
        coeffs.append(np.sqrt(gamma) * np.exp(1j * 2.0 * np.pi * env.carrier_frequency_hz * p.delay_s))
        rx_cols.append(steering_vector(arrays.n_rx, p.aoa_rad, arrays.element_spacing_over_lambda))
        tx_cols.append(steering_vector(arrays.n_tx, p.aod_rad, arrays.element_spacing_over_lambda))
    d = np.diag(coeffs)
    r = np.column_stack(rx_cols)
    t = np.column_stack(tx_cols)
    m = d.conj().T @ (r.conj().T @ r) @ d
    eigs = np.linalg.eigvals(m @ (t.conj().T @ t)).real
    eigs = np.sort(eigs)[::-1]
    if eigs[0] <= _SINGULAR_FLOOR ** 2:
        raise UnphysicalChannelError("all eigenmode transmittances vanish: channel fully opaque")
    rank = int(np.sum(eigs > (rank_tolerance ** 2) * eigs[0]))
    trans = eigs[:rank]
    if trans[0] > 1.0 + 1e-12:
        raise UnphysicalChannelError(
            f"leading eigenmode transmittance {trans[0]:.6g} exceeds 1; the passive "
            "beam-splitter channel model does not apply (reduce gains or "
            "increase distance)"
        )
    return ParallelChannels(transmittances=np.minimum(trans, 1.0), rank=rank)
