"""Sample-level simulation of the Gaussian prepare-and-measure rounds.

Classical Gaussian sampling is exact here: homodyne outcomes of Gaussian
states are Gaussian with the analytic variances, so no density-matrix
machinery is needed.  Draws are deterministic given the seed; each parallel
channel gets its own counter-based substream keyed by (seed, channel).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .physics import EnvironmentParams, vacuum_variance

RNG_ALGORITHM = f"numpy.random.Philox (numpy {np.__version__})"

QUADRATURES = ("q", "p")


@dataclass(frozen=True, eq=False)
class ChannelSamples:
    """Per-round samples of one parallel channel.

    quadrature_choice is 0 for q and 1 for p; x_alice is the encoded value
    of the measured quadrature, x_bob the homodyne outcome, x_eve the
    quadrature stored in the attacker's ancilla.
    """

    transmittance: float
    x_alice: np.ndarray
    quadrature_choice: np.ndarray
    x_bob: np.ndarray
    x_eve: np.ndarray


@dataclass(frozen=True, eq=False)
class ProtocolRun:
    n_rounds: int
    seed: int
    signal_variance: float
    vacuum_var: float
    eve_noise: float
    channels: tuple[ChannelSamples, ...]
    rng_algorithm: str = RNG_ALGORITHM


def _channel_rng(seed: int, channel_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[seed, channel_index]))


def simulate(dec, env: EnvironmentParams, n_rounds: int, seed: int) -> ProtocolRun:
    """Draw n_rounds correlated (x_alice, x_bob) pairs per parallel channel.

    Per round: signal s ~ N(0, V_s), preparation noise v ~ N(0, V_0),
    attacker noise e ~ N(0, W); Bob measures sqrt(T)(s+v) + sqrt(1-T) e on a
    uniformly chosen quadrature, the ancilla keeps -sqrt(1-T)(s+v) + sqrt(T) e.
    """
    if n_rounds < 1:
        raise ValueError("n_rounds must be >= 1")
    if not 0 <= seed < 2 ** 64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    vs = env.signal_variance
    v0 = vacuum_variance(env)
    w = env.eve_noise_variance
    channels = []
    for i, t in enumerate(dec.transmittances):
        t = float(t)
        rng = _channel_rng(seed, i)
        quad = rng.integers(0, 2, size=n_rounds).astype(np.uint8)
        s = rng.normal(0.0, np.sqrt(vs), size=n_rounds)
        v = rng.normal(0.0, np.sqrt(v0), size=n_rounds)
        e = rng.normal(0.0, np.sqrt(w), size=n_rounds)
        mode = s + v
        bob = np.sqrt(t) * mode + np.sqrt(1.0 - t) * e
        eve = -np.sqrt(1.0 - t) * mode + np.sqrt(t) * e
        channels.append(ChannelSamples(transmittance=t, x_alice=s,
                                       quadrature_choice=quad, x_bob=bob, x_eve=eve))
    return ProtocolRun(n_rounds=n_rounds, seed=seed, signal_variance=vs,
                       vacuum_var=v0, eve_noise=w, channels=tuple(channels))


def empirical_mutual_information(run: ProtocolRun) -> np.ndarray:
    """Gaussian plug-in mutual-information estimate per channel (bits).

    0.5 log2(Var(x_bob) / Var(residual)) with the residual from the
    least-squares fit of x_bob on x_alice; exact for the jointly Gaussian
    samples the protocol produces.
    """
    if run.n_rounds < 10 ** 4:
        raise ValueError("need at least 1e4 rounds for a stable estimate")
    out = []
    for chan in run.channels:
        a = chan.x_alice
        b = chan.x_bob
        var_a = float(np.var(a))
        if var_a < 1e-12:
            raise ValueError("degenerate input: Var(x_alice) below 1e-12")
        var_b = float(np.var(b))
        cov = float(np.mean((a - a.mean()) * (b - b.mean())))
        resid = var_b - cov * cov / var_a
        out.append(0.5 * np.log2(var_b / resid))
    return np.array(out)


def eve_ancilla_samples(run: ProtocolRun) -> list[np.ndarray]:
    """Attacker's stored-quadrature samples, one array per channel.

    Generated jointly with the Bob samples from the same draws; used for
    covariance sanity checks only.
    """
    return [chan.x_eve for chan in run.channels]


def expected_bob_variance(transmittance: float, alice_variance: float, eve_noise: float) -> float:
    """Analytic homodyne variance T V_a + (1-T) W."""
    return transmittance * alice_variance + (1.0 - transmittance) * eve_noise


def mi_standard_error(transmittance: float, signal_variance: float,
                      vacuum_var: float, eve_noise: float, n_rounds: int) -> float:
    """Delta-method standard error of the plug-in Gaussian MI estimate.

    With correlation rho between x_alice and x_bob, sd(I_hat) is
    approximately rho / (ln 2 sqrt(n)).
    """
    va = signal_variance + vacuum_var
    var_b = expected_bob_variance(transmittance, va, eve_noise)
    rho_sq = transmittance * signal_variance / var_b
    rho = np.sqrt(min(max(rho_sq, 0.0), 1.0))
    return float(max(rho, 1e-3) / (np.log(2.0) * np.sqrt(n_rounds)))
