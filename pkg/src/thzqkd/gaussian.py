"""Exact Gaussian-state machinery in shot-noise units.

Covariance matrices use the quadrature ordering (q1, p1, q2, p2, ...).
Everything needed for the eavesdropper bound from first principles:
symplectic transforms, partial traces, homodyne conditioning via the Schur
complement, symplectic spectra and von Neumann entropies.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import UnphysicalStateError
from .physics import bosonic_entropy

_SYM_TOL = 1e-12
_OMEGA_TOL = 1e-10
_EIG_PAIR_RTOL = 1e-8
_EIG_FLOOR_TOL = 1e-6
_PINV_RCOND = 1e-12

_I2 = np.eye(2)
_Z2 = np.diag([1.0, -1.0])


def symplectic_form(n_modes: int) -> np.ndarray:
    """Block-diagonal symplectic form Omega for (q1, p1, q2, p2, ...)."""
    om = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return np.kron(np.eye(n_modes), om)


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Zero-mean Gaussian state given by its 2n x 2n covariance matrix (SNU)."""

    cov: np.ndarray
    mean: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        cov = np.asarray(self.cov, dtype=float)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2:
            raise ValueError("covariance must be a square 2n x 2n matrix")
        asym = np.max(np.abs(cov - cov.T)) if cov.size else 0.0
        if asym > _SYM_TOL * max(1.0, np.max(np.abs(cov))):
            raise ValueError(f"covariance not symmetric (max asymmetry {asym:g})")
        cov = 0.5 * (cov + cov.T)
        object.__setattr__(self, "cov", cov)
        mean = self.mean if self.mean is not None else np.zeros(cov.shape[0])
        mean = np.asarray(mean, dtype=float)
        if mean.shape != (cov.shape[0],):
            raise ValueError("mean must be a length-2n vector")
        object.__setattr__(self, "mean", mean)

    @property
    def n_modes(self) -> int:
        return self.cov.shape[0] // 2


@dataclass(frozen=True, eq=False)
class SymplecticTransform:
    """Linear quadrature transform S with S Omega S^T = Omega."""

    matrix: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.matrix, dtype=float)
        if s.ndim != 2 or s.shape[0] != s.shape[1] or s.shape[0] % 2:
            raise ValueError("transform must be a square 2n x 2n matrix")
        om = symplectic_form(s.shape[0] // 2)
        err = np.max(np.abs(s @ om @ s.T - om))
        if err > _OMEGA_TOL:
            raise ValueError(f"matrix is not symplectic (defect {err:g})")
        object.__setattr__(self, "matrix", s)

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0] // 2


def thermal_state(variance: float) -> GaussianState:
    """Single thermal mode, cov = variance * I2."""
    if variance < 1.0 - 1e-9:
        raise ValueError("thermal variance must be >= 1 in SNU")
    return GaussianState(cov=max(variance, 1.0) * _I2)


def two_mode_squeezed(variance: float) -> GaussianState:
    """Two-mode squeezed vacuum with quadrature variance W per arm.

    cov = [[W I, c Z], [c Z, W I]] with c = sqrt(W^2 - 1); the state is pure.
    """
    if variance < 1.0 - 1e-9:
        raise ValueError("two-mode squeezed variance must be >= 1")
    w = max(variance, 1.0)
    c = np.sqrt(w * w - 1.0)
    return GaussianState(cov=np.block([[w * _I2, c * _Z2], [c * _Z2, w * _I2]]))


def beam_splitter(eta: float) -> SymplecticTransform:
    """Two-port beam splitter acting identically on q and p:
    out1 = sqrt(eta) in1 + sqrt(1-eta) in2, out2 = -sqrt(1-eta) in1 + sqrt(eta) in2.
    """
    if not -1e-12 <= eta <= 1.0 + 1e-12:
        raise ValueError("beam splitter transmittance must lie in [0, 1]")
    eta = min(max(eta, 0.0), 1.0)
    t = np.sqrt(eta)
    r = np.sqrt(1.0 - eta)
    return SymplecticTransform(np.block([[t * _I2, r * _I2], [-r * _I2, t * _I2]]))


def apply(transform: SymplecticTransform, state: GaussianState, modes) -> GaussianState:
    """Congruence cov -> S cov S^T with S embedded as identity elsewhere."""
    modes = list(modes)
    if len(set(modes)) != len(modes):
        raise IndexError("mode indices must be distinct")
    if len(modes) != transform.n_modes:
        raise IndexError("transform size does not match number of target modes")
    n = state.n_modes
    if any(m < 0 or m >= n for m in modes):
        raise IndexError("mode index out of range")
    s_emb = np.eye(2 * n)
    s = transform.matrix
    for a, ma in enumerate(modes):
        for b, mb in enumerate(modes):
            s_emb[2 * ma:2 * ma + 2, 2 * mb:2 * mb + 2] = s[2 * a:2 * a + 2, 2 * b:2 * b + 2]
    return GaussianState(cov=s_emb @ state.cov @ s_emb.T, mean=s_emb @ state.mean)


def partial_trace(state: GaussianState, keep) -> GaussianState:
    """Restriction of the covariance to the kept modes."""
    keep = list(keep)
    if not keep or len(set(keep)) != len(keep):
        raise IndexError("keep indices must be nonempty and distinct")
    n = state.n_modes
    if any(m < 0 or m >= n for m in keep):
        raise IndexError("mode index out of range")
    rows = [i for m in keep for i in (2 * m, 2 * m + 1)]
    return GaussianState(cov=state.cov[np.ix_(rows, rows)], mean=state.mean[rows])


def homodyne_condition(state: GaussianState, measured_mode: int, quadrature: str = "q") -> GaussianState:
    """State of the remaining modes after a homodyne measurement.

    Schur-complement update cov_keep -> A - C (X B X)^+ C^T with B the
    measured mode's 2x2 block and X the projector onto the measured
    quadrature.  The result is outcome-independent (Gaussian property).
    """
    if quadrature not in ("q", "p"):
        raise ValueError("quadrature must be 'q' or 'p'")
    n = state.n_modes
    if n < 2:
        raise ValueError("need at least two modes to condition")
    if not 0 <= measured_mode < n:
        raise IndexError("measured mode out of range")
    keep_modes = [m for m in range(n) if m != measured_mode]
    rows = [i for m in keep_modes for i in (2 * m, 2 * m + 1)]
    meas = [2 * measured_mode, 2 * measured_mode + 1]
    a = state.cov[np.ix_(rows, rows)]
    b = state.cov[np.ix_(meas, meas)]
    c = state.cov[np.ix_(rows, meas)]
    x = np.diag([1.0, 0.0]) if quadrature == "q" else np.diag([0.0, 1.0])
    xbx = x @ b @ x
    var = xbx[0, 0] if quadrature == "q" else xbx[1, 1]
    if var <= _PINV_RCOND * max(1.0, float(np.max(np.abs(b)))):
        raise UnphysicalStateError("measured quadrature variance is numerically singular")
    cond = a - c @ np.linalg.pinv(xbx, rcond=_PINV_RCOND) @ c.T
    return GaussianState(cov=0.5 * (cond + cond.T), mean=state.mean[rows])


def symplectic_eigenvalues(state: GaussianState) -> np.ndarray:
    """Symplectic spectrum: |eig(Omega cov)| deduplicated to n values, descending.

    Raises UnphysicalStateError if any value lies below 1 - 1e-6; smaller
    numerical dips are clamped to 1.
    """
    om = symplectic_form(state.n_modes)
    vals = np.sort(np.abs(np.linalg.eigvals(om @ state.cov)))[::-1]
    pairs = []
    for i in range(0, len(vals), 2):
        hi, lo = vals[i], vals[i + 1]
        if hi - lo > _EIG_PAIR_RTOL * max(hi, 1.0):
            raise UnphysicalStateError(
                f"symplectic eigenvalues failed to pair: {hi!r} vs {lo!r}"
            )
        pairs.append(0.5 * (hi + lo))
    nus = np.array(pairs)
    if np.any(nus < 1.0 - _EIG_FLOOR_TOL):
        raise UnphysicalStateError(
            f"symplectic eigenvalue {nus.min()!r} below 1: state violates "
            "the uncertainty principle (caller bug)"
        )
    return np.maximum(nus, 1.0)


def von_neumann_entropy(state: GaussianState) -> float:
    """Sum of bosonic entropies of the symplectic eigenvalues (bits)."""
    return float(sum(bosonic_entropy(nu) for nu in symplectic_eigenvalues(state)))


def holevo_exact(transmittance: float, alice_variance: float, eve_variance: float) -> float:
    """Eavesdropper's accessible information about Bob's homodyne outcome.

    Three-mode construction of the collective entangling attack on one
    parallel channel: the sender's ensemble-average mode (thermal V_a) is
    mixed on a transmittance-T beam splitter with one arm of the attacker's
    two-mode squeezed vacuum (variance W); the attacker keeps her memory
    mode and the beam splitter's second output.  Returns
    S(E) - S(E | q_B) in bits, which is quadrature-symmetric.
    """
    if not -1e-12 <= transmittance <= 1.0 + 1e-12:
        raise ValueError("transmittance must lie in [0, 1]")
    if alice_variance < 1.0 - 1e-9:
        raise ValueError("alice_variance must be >= 1 (SNU)")
    if eve_variance < 1.0 - 1e-9:
        raise ValueError("eve_variance must be >= 1 (SNU)")
    t = min(max(transmittance, 0.0), 1.0)
    alice = thermal_state(alice_variance)
    epr = two_mode_squeezed(eve_variance)
    # modes: 0 = Alice -> Bob, 1 = memory mode e, 2 = injected arm E -> E'
    joint = GaussianState(cov=np.block([
        [alice.cov, np.zeros((2, 4))],
        [np.zeros((4, 2)), epr.cov],
    ]))
    joint = apply(beam_splitter(t), joint, (0, 2))
    eve = partial_trace(joint, (1, 2))
    s_eve = von_neumann_entropy(eve)
    conditioned = homodyne_condition(joint, measured_mode=0, quadrature="q")
    s_cond = von_neumann_entropy(conditioned)
    holevo = s_eve - s_cond
    if holevo < -1e-9:
        raise UnphysicalStateError(f"negative accessible information {holevo!r}")
    return max(holevo, 0.0)
