"""Secret key rates of continuous-variable QKD over terahertz MIMO channels.

Library layout:

* :mod:`thzqkd.physics` - constants, thermal photon statistics, entropy.
* :mod:`thzqkd.channel` - ULA steering, path loss, channel matrix, SVD
  eigenmode decomposition.
* :mod:`thzqkd.gaussian` - covariance-matrix machinery and the exact
  eavesdropper bound.
* :mod:`thzqkd.keyrate` - closed-form reverse-reconciliation rates.
* :mod:`thzqkd.montecarlo` - sample-level protocol simulation.
* :mod:`thzqkd.experiments` - sweeps, max-distance bisection, frequency
  profiles.
* :mod:`thzqkd.config` / :mod:`thzqkd.csvio` / :mod:`thzqkd.plotting` /
  :mod:`thzqkd.cli` - TOML scenarios, CSV + plot-script emission,
  matplotlib figures, command line.
"""

__version__ = "0.1.0"

from .channel import (
    AbsorptionTable,
    ArrayConfig,
    ChannelDecomposition,
    ParallelChannels,
    PathSpec,
    build_channel,
    decompose,
    default_absorption_table,
    effective_parallel_channels,
    eigenmode_transmittances,
    path_loss,
    steering_vector,
)
from .errors import (
    BracketError,
    ConfigError,
    NumericsError,
    ThzQkdError,
    UnphysicalChannelError,
    UnphysicalStateError,
)
from .experiments import (
    SweepSpec,
    SweepTable,
    auto_bracket,
    frequency_profile,
    max_distance,
    sweep,
)
from .gaussian import (
    GaussianState,
    SymplecticTransform,
    apply,
    beam_splitter,
    holevo_exact,
    homodyne_condition,
    partial_trace,
    symplectic_eigenvalues,
    thermal_state,
    two_mode_squeezed,
    von_neumann_entropy,
)
from .keyrate import (
    ApproxEigs,
    FeasibilityResult,
    RateBreakdown,
    approx_symplectic_eigs,
    feasibility_threshold,
    mutual_information,
    rate_mimo,
    rate_per_channel,
    rate_taylor,
    zeta_coefficient,
)
from .montecarlo import (
    ProtocolRun,
    empirical_mutual_information,
    eve_ancilla_samples,
    simulate,
)
from .physics import (
    EnvironmentParams,
    bosonic_entropy,
    lambda_mix,
    mean_thermal_photons,
    vacuum_variance,
)
from .scenario import Options, Scenario, single_los_scenario

__all__ = [name for name in dir() if not name.startswith("_")]
