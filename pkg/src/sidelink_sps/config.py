"""Scenario configuration and validation for Mode 4 sidelink runs."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

SENSING_WINDOW_MS = 1000
CBR_WINDOW_MS = 100

# SL_RESELECTION_COUNTER range by resource reservation interval (ms).
RC_RANGES = {20: (25, 75), 50: (10, 30), 100: (5, 15)}

SCHEDULER_SPS = "sps"
SCHEDULER_SPSLA = "spsla"
SCHEDULERS = (SCHEDULER_SPS, SCHEDULER_SPSLA)


class ConfigurationError(ValueError):
    """Invalid parameter or flag combination (CLI exit code 2)."""


class CapacityError(ValueError):
    """Population exceeds what the resource grid can carry (CLI exit code 3)."""


def rc_range(rri: int) -> tuple[int, int]:
    """Counter range for a reservation interval; intervals above 100 ms use the 100 ms range."""
    if rri >= 100:
        return RC_RANGES[100]
    try:
        return RC_RANGES[rri]
    except KeyError:
        raise ConfigurationError(f"unsupported RRI {rri} ms (expected 20, 50, or >= 100)") from None


def ues_for_cbr(cbr: float, n_subchannels: int = 25, rri: int = 100) -> int:
    """Population that produces a target channel busy ratio at one packet per UE per RRI."""
    return round(cbr * n_subchannels * rri)


@dataclass
class ScenarioConfig:
    """One experiment: population, scheduler, grid geometry, and run controls.

    Defaults reproduce the reference parameter set: 25 subchannels, RRI 100 ms,
    selection window [n+1, n+100], counter range [5, 15], keep probability 0,
    lookahead planning one packet before the streak ends.
    """

    scheduler: str = SCHEDULER_SPS
    num_ues: int = 25
    n_subchannels: int = 25
    rri: int = 100
    t1: int = 1
    t2: int = 100
    c1: int | None = None
    c2: int | None = None
    rc_la: int = 1
    prob_resource_keep: float = 0.0
    churn_rate: float = 0.0
    duration_s: int = 100
    seed: int = 1
    runs: int = 10
    warmup_s: int = 0
    sensing_window: int = SENSING_WINDOW_MS
    # Diagnostics / ablation knobs (not part of the standard scheme).
    collect_collision_events: bool = False
    la_registry_enabled: bool = True

    def __post_init__(self) -> None:
        if self.scheduler not in SCHEDULERS:
            raise ConfigurationError(f"unknown scheduler {self.scheduler!r} (expected sps or spsla)")
        if self.c1 is None or self.c2 is None:
            c1_default, c2_default = rc_range(self.rri)
            if self.c1 is None:
                self.c1 = c1_default
            if self.c2 is None:
                self.c2 = c2_default
        if not 1 <= self.c1 <= self.c2:
            raise ConfigurationError(f"bad counter range [{self.c1}, {self.c2}]")
        if self.n_subchannels < 1:
            raise ConfigurationError("n_subchannels must be >= 1")
        if not 1 <= self.t1 < self.t2:
            raise ConfigurationError(f"selection window needs t2 > t1 >= 1, got [{self.t1}, {self.t2}]")
        if self.num_ues < 1:
            raise ConfigurationError("num_ues must be >= 1")
        if self.num_ues > self.capacity:
            raise CapacityError(
                f"{self.num_ues} UEs exceed grid capacity {self.capacity} "
                f"({self.n_subchannels} subchannels x {self.rri} ms)"
            )
        if not 0.0 <= self.prob_resource_keep <= 1.0:
            raise ConfigurationError("prob_resource_keep must be in [0, 1]")
        if self.prob_resource_keep > 0.8:
            warnings.warn(
                f"prob_resource_keep={self.prob_resource_keep} is above the configured "
                "maximum of 0.8",
                stacklevel=2,
            )
        if not 0.0 <= self.churn_rate <= 1.0:
            raise ConfigurationError("churn_rate must be in [0, 1] (fraction of population per second)")
        if self.rc_la < 1:
            raise ConfigurationError("rc_la must be >= 1")
        if self.rc_la > self.c1:
            raise ConfigurationError(
                f"rc_la={self.rc_la} exceeds c1={self.c1}; short streaks would never plan a lookahead"
            )
        if self.rri * self.rc_la + self.t2 > self.sensing_window:
            raise ConfigurationError(
                "lookahead horizon rri*rc_la + t2 must fit inside the sensing window"
            )
        if self.duration_s < 1:
            raise ConfigurationError("duration_s must be >= 1")
        if not 0 <= self.warmup_s < self.duration_s:
            raise ConfigurationError("warmup_s must satisfy 0 <= warmup_s < duration_s")
        if self.runs < 1:
            raise ConfigurationError("runs must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError("seed must fit in 64 bits")

    @property
    def capacity(self) -> int:
        return self.n_subchannels * self.rri

    @property
    def cbr_target(self) -> float:
        """Nominal channel busy ratio implied by the population."""
        return self.num_ues / self.capacity

    @property
    def total_subframes(self) -> int:
        return self.duration_s * 1000

    def with_seed(self, seed: int) -> "ScenarioConfig":
        return replace(self, seed=seed)


__all__ = [
    "CBR_WINDOW_MS",
    "CapacityError",
    "ConfigurationError",
    "RC_RANGES",
    "SCHEDULER_SPS",
    "SCHEDULER_SPSLA",
    "SCHEDULERS",
    "SENSING_WINDOW_MS",
    "ScenarioConfig",
    "rc_range",
    "ues_for_cbr",
]
