"""Standard sensing-based semi-persistent scheduling, one state machine per UE.

A UE transmits a streak of rc+1 packets spaced one RRI apart on a fixed
subchannel. When the counter runs out it either keeps the location (with
probability prob_resource_keep) or draws a fresh one from the sensing-filtered
selection window; either way a new counter is drawn.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ScenarioConfig, rc_range
from .grid import ResourceCoord
from .sensing import SensingMap, candidate_mask


def draw_rc(rng: np.random.Generator, rri: int) -> int:
    """Fresh reselection counter, uniform over the RRI-dependent range."""
    c1, c2 = rc_range(rri)
    return int(rng.integers(c1, c2 + 1))


@dataclass(slots=True)
class UeState:
    """Scheduler state of one vehicle."""

    ue_id: int
    tx_subchannel: int
    tx_subframe: int
    rc: int
    sensing: SensingMap
    registry: object | None = None          # lookahead claims view (SPS/LA only)
    plan: object | None = None              # pending lookahead plan (SPS/LA only)
    decided_at: int = 0                     # subframe of the last final resource decision
    joined_at: int = 0
    active: bool = True


def _pick_free(mask: np.ndarray, base: int, n_subchannels: int,
               rng: np.random.Generator) -> tuple[int, int, bool]:
    """Uniform pick over unmasked cells; blind pick over the whole window when
    nothing is free. Returns (subframe, subchannel, fell_back)."""
    free = np.flatnonzero(~mask.ravel())
    if free.size:
        pick = int(free[rng.integers(0, free.size)])
        return base + pick // n_subchannels, pick % n_subchannels, False
    pick = int(rng.integers(0, mask.size))
    return base + pick // n_subchannels, pick % n_subchannels, True


def select_resource(ue: UeState, n: int, rng: np.random.Generator,
                    params: ScenarioConfig, now: int | None = None) -> tuple[int, int]:
    """Uniform draw from the sensing-filtered window anchored at n."""
    mask = candidate_mask(ue.sensing, n, params.rri, params.t1, params.t2, now=now)
    sf, ch, _ = _pick_free(mask, n + params.t1, params.n_subchannels, rng)
    return sf, ch


def sps_step(ue: UeState, subframe: int, rng: np.random.Generator,
             params: ScenarioConfig) -> ResourceCoord | None:
    """Advance one UE by one subframe; returns its transmission, if any.

    Off-schedule subframes are no-ops (sensing is fed externally). On the
    scheduled subframe the packet goes out first; the streak then either
    continues, or ends and resolves to keep / move with a fresh counter.
    """
    if subframe != ue.tx_subframe:
        return None
    ue.sensing.note_own_transmission(subframe)
    coord = ResourceCoord(subframe, ue.tx_subchannel)
    if ue.rc != 0:
        ue.tx_subframe += params.rri
        ue.rc -= 1
        return coord
    ue.rc = int(rng.integers(params.c1, params.c2 + 1))
    if rng.random() < params.prob_resource_keep:
        ue.tx_subframe += params.rri
    else:
        ue.tx_subframe, ue.tx_subchannel = select_resource(ue, subframe, rng, params)
    ue.decided_at = subframe
    return coord


__all__ = ["UeState", "draw_rc", "select_resource", "sps_step"]
