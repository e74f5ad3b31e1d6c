"""Scenario: the full channel + environment configuration for one link.

Immutable aggregation of everything the rate pipeline needs, with
with_* helpers so sweeps can vary one parameter at a time.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

from . import channel as ch
from . import keyrate as kr
from .errors import ConfigError
from .physics import EnvironmentParams


@dataclass(frozen=True)
class Options:
    """Evaluation knobs shared by the CLI and the sweep engine."""

    method: str = "large_modulation"
    clamp_negative_channels: bool = False
    fresnel_mode: str = "power"
    rank_tolerance: float = ch.DEFAULT_RANK_TOLERANCE
    zeta_constant_mode: str = "paper"

    def __post_init__(self):
        if self.method not in kr.METHODS:
            raise ConfigError(f"options.method must be one of {kr.METHODS}")
        if self.fresnel_mode not in ("power", "raw"):
            raise ConfigError("options.fresnel_mode must be 'power' or 'raw'")
        if not 0 < self.rank_tolerance < 1:
            raise ConfigError("options.rank_tolerance must lie in (0, 1)")
        if self.zeta_constant_mode not in ("paper", "analytic"):
            raise ConfigError("options.zeta_constant_mode must be 'paper' or 'analytic'")


@dataclass(frozen=True, eq=False)
class Scenario:
    environment: EnvironmentParams
    arrays: ch.ArrayConfig
    paths: tuple[ch.PathSpec, ...]
    absorption: ch.AbsorptionTable = field(default_factory=ch.default_absorption_table)
    options: Options = field(default_factory=Options)

    def __post_init__(self):
        object.__setattr__(self, "paths", tuple(self.paths))

    @property
    def is_single_los(self) -> bool:
        return len(self.paths) == 1 and self.paths[0].is_los

    @property
    def distance_m(self) -> float:
        """Length of the line-of-sight path."""
        return next(p.path_length_m for p in self.paths if p.is_los)

    def with_distance(self, distance_m: float) -> "Scenario":
        """Same geometry at a different link distance (single-LoS scenarios only)."""
        if not self.is_single_los:
            raise ConfigError(
                "distance sweeps are only defined for single-LoS scenarios; "
                "rescaling multipath geometry is ambiguous"
            )
        new_path = replace(self.paths[0], path_length_m=distance_m)
        return replace(self, paths=(new_path,))

    def with_frequency(self, carrier_frequency_hz: float) -> "Scenario":
        env = replace(self.environment, carrier_frequency_hz=carrier_frequency_hz)
        return replace(self, environment=env)

    def with_temperature(self, temperature_k: float) -> "Scenario":
        env = replace(self.environment, temperature_k=temperature_k)
        return replace(self, environment=env)

    def parallel_channels(self) -> ch.ParallelChannels:
        """Eigenmode transmittances of the current geometry."""
        return ch.eigenmode_transmittances(
            self.paths, self.environment, self.arrays, self.absorption,
            fresnel_mode=self.options.fresnel_mode,
            rank_tolerance=self.options.rank_tolerance,
        )

    def build_matrix(self):
        """Dense channel matrix H (for the full SVD decomposition path)."""
        return ch.build_channel(self.paths, self.environment, self.arrays,
                                self.absorption, fresnel_mode=self.options.fresnel_mode)

    def rate(self, method: str | None = None) -> kr.RateBreakdown:
        dec = self.parallel_channels()
        return kr.rate_mimo(dec, self.environment,
                            method=method or self.options.method,
                            clamp_negative_channels=self.options.clamp_negative_channels,
                            zeta_constant_mode=self.options.zeta_constant_mode)

    def feasibility(self) -> kr.FeasibilityResult:
        return kr.feasibility_threshold(self.parallel_channels(), self.environment,
                                        constant_mode=self.options.zeta_constant_mode)


def single_los_scenario(environment: EnvironmentParams, arrays: ch.ArrayConfig,
                        distance_m: float,
                        absorption: ch.AbsorptionTable | None = None,
                        options: Options | None = None) -> Scenario:
    """Convenience constructor for the dominant-LoS (L=1) link."""
    return Scenario(
        environment=environment,
        arrays=arrays,
        paths=(ch.PathSpec(path_length_m=distance_m, is_los=True),),
        absorption=absorption or ch.default_absorption_table(),
        options=options or Options(),
    )
