"""Closed-form reselection collision probabilities and the control-message
bit cost of carrying a lookahead."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .config import ConfigurationError


@dataclass(frozen=True)
class AnalyticParams:
    """Inputs of the average-case reselection model."""

    n_subchannels: int = 25
    t1: int = 1
    t2: int = 100
    c1: int = 5
    c2: int = 15
    cbr: float = 0.0

    def __post_init__(self) -> None:
        if not (self.t2 >= self.t1 >= 1):
            raise ConfigurationError("need t2 >= t1 >= 1")
        if not (self.c2 >= self.c1 >= 1):
            raise ConfigurationError("need c2 >= c1 >= 1")
        if not 0.0 <= self.cbr < 1.0:
            raise ConfigurationError("cbr must be in [0, 1)")
        if self.n_subchannels < 1:
            raise ConfigurationError("n_subchannels must be >= 1")

    @property
    def window(self) -> int:
        return self.t2 - self.t1 + 1

    @property
    def mean_counter(self) -> float:
        return (self.c1 + self.c2) / 2

    @property
    def pick_probability(self) -> float:
        """Chance a contender lands on any one of the free window resources."""
        return 1.0 / (self.n_subchannels * self.window * (1.0 - self.cbr))

    @property
    def expiring_per_subframe(self) -> float:
        """Average number of UEs whose counter runs out in any one subframe."""
        return self.n_subchannels * self.cbr / self.mean_counter


def p_col_spsla(params: AnalyticParams) -> float:
    """Reselection collision probability with lookaheads: only the same-subframe
    contenders remain, 1 - (1-p)^(n'-1). A non-positive exponent (fewer than one
    contender besides the UE itself) clamps to zero."""
    expo = params.expiring_per_subframe - 1.0
    if expo <= 0.0:
        return 0.0
    p = min(params.pick_probability, 1.0)
    return 1.0 - (1.0 - p) ** expo


def p_col_sps(params: AnalyticParams) -> float:
    """Total reselection collision probability without lookaheads: contenders
    from every subframe of the window, each scaled by the window overlap
    (T-k)/T, compounded over k = 0..T-1."""
    p = params.pick_probability
    n = params.expiring_per_subframe
    t = params.window
    log_survive = 0.0
    for k in range(t):
        overlap = (t - k) / t * p
        if overlap >= 1.0:
            return 1.0  # saturated window: a contender lands on the pick surely
        log_survive += n * math.log1p(-overlap)
    return 1.0 - math.exp(log_survive)


def sci_extra_bits(n_subchannels: int, include_offset: bool = False) -> int:
    """Bits needed to name a (start, length) subchannel pair in the sidelink
    control message, plus ten bits for the subframe offset when requested."""
    if n_subchannels < 1:
        raise ConfigurationError("n_subchannels must be >= 1")
    pairs = n_subchannels * (n_subchannels + 1) // 2
    bits = (pairs - 1).bit_length()
    return bits + (10 if include_offset else 0)


__all__ = ["AnalyticParams", "p_col_sps", "p_col_spsla", "sci_extra_bits"]
