"""Per-UE view of past resource use and the candidate-resource filter.

A UE infers future occupancy from the trailing reservation period: a packet
heard at (c, z) announces that (c, z + RRI·j) is reserved, so the filter
projects the last full RRI period of observations forward periodically.
Subframes in which the UE itself transmitted are unobservable (half-duplex),
and every future subframe they project onto is dropped wholesale.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import SENSING_WINDOW_MS, ConfigurationError
from .grid import ResourceCoord


class OccupancyWindow:
    """Rolling record of which subchannels carried a packet, per subframe.

    Keeps exactly `window` trailing subframes in a ring; older rows expire
    implicitly. One instance may be shared by every UE in a run (broadcast
    traffic is identical for all listeners); each SensingMap masks out its
    own blind spots on top.
    """

    def __init__(self, n_subchannels: int, window: int = SENSING_WINDOW_MS):
        if window < 1:
            raise ConfigurationError("window must be >= 1")
        self.n_subchannels = n_subchannels
        self.window = window
        self.last_recorded = -1
        self._rows = np.zeros((window, n_subchannels), dtype=bool)

    def record(self, subframe: int, busy_subchannels) -> None:
        """Store one subframe's busy set. Monotonic; recording the same
        subframe twice is a no-op (idempotent for shared use)."""
        if subframe <= self.last_recorded:
            if subframe == self.last_recorded:
                return
            raise RuntimeError(f"subframe {subframe} precedes last recorded {self.last_recorded}")
        # zero-fill skipped subframes so stale rows never alias
        gap = subframe - self.last_recorded - 1
        if gap:
            if gap >= self.window:
                self._rows[:] = False
            else:
                for s in range(self.last_recorded + 1, subframe):
                    self._rows[s % self.window] = False
        row = self._rows[subframe % self.window]
        row[:] = False
        for c in busy_subchannels:
            row[c] = True
        self.last_recorded = subframe

    def busy(self, subchannel: int, subframe: int) -> bool:
        if subframe < 0 or subframe > self.last_recorded or subframe <= self.last_recorded - self.window:
            return False
        return bool(self._rows[subframe % self.window, subchannel])

    def reservation_view(self, base: int, count: int, rri: int, now: int,
                         not_before: int = 0) -> np.ndarray:
        """Predicted-busy mask for subframes [base, base+count): cell (k, c) is
        True when (c, z) was busy for the unique z = base+k - RRI*j inside the
        last full period [now-RRI, now-1]. Rows before `not_before` (e.g. a
        UE's join time) or outside recorded history read as free."""
        period_start = now - rri
        offsets = base + np.arange(count)
        z = period_start + (offsets - period_start) % rri
        valid = (z >= max(0, not_before)) & (z <= self.last_recorded) & (z > self.last_recorded - self.window)
        out = self._rows[z % self.window].copy()
        out[~valid] = False
        return out


class SensingMap:
    """One UE's sensing state: shared (or private) occupancy plus its own
    transmission times, which it can never observe."""

    def __init__(self, owner: int, n_subchannels: int,
                 window: OccupancyWindow | None = None,
                 sensing_window: int = SENSING_WINDOW_MS,
                 joined_at: int = 0):
        self.owner = owner
        self.sensing_window = sensing_window
        self.joined_at = joined_at
        self._private = window is None
        self.window = window if window is not None else OccupancyWindow(n_subchannels, sensing_window)
        self.own_tx: list[int] = []
        self.own_tx_set: set[int] = set()

    @property
    def n_subchannels(self) -> int:
        return self.window.n_subchannels

    def note_own_transmission(self, subframe: int) -> None:
        self.own_tx.append(subframe)
        self.own_tx_set.add(subframe)
        horizon = subframe - self.sensing_window
        while self.own_tx and self.own_tx[0] < horizon:
            self.own_tx_set.discard(self.own_tx.pop(0))

    def observe_subframe(self, subframe: int, transmissions, owner_transmitted: bool) -> None:
        """Take in one subframe: either the owner transmitted (whole subframe
        unobservable) or it heard every packet on the grid."""
        if owner_transmitted:
            self.note_own_transmission(subframe)
            if self._private:
                self.window.record(subframe, ())
            return
        busy = set()
        for t in transmissions:
            if isinstance(t, ResourceCoord):
                busy.update(t.cells())
            else:
                busy.add(int(t))
        if self._private or self.window.last_recorded < subframe:
            self.window.record(subframe, busy)

    def observed_busy(self, subchannel: int, subframe: int) -> bool:
        """Whether the owner actually heard a packet at that cell; its own
        transmission subframes and pre-join history read as silent."""
        if subframe in self.own_tx_set or subframe < self.joined_at:
            return False
        return self.window.busy(subchannel, subframe)


@dataclass
class CandidateSet:
    """Free single-subframe resources inside one selection window."""

    anchor: int
    t1: int
    t2: int
    coords: list[ResourceCoord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.coords)


def candidate_mask(sensing: SensingMap, anchor: int, rri: int, t1: int, t2: int,
                   now: int | None = None) -> np.ndarray:
    """Exclusion mask over the window [anchor+t1, anchor+t2] x subchannels.

    True marks a cell ruled out, either because the last reservation period
    showed it busy or because a subframe the owner could not sense (its own
    transmissions) projects onto that subframe.
    """
    if now is None:
        now = sensing.window.last_recorded + 1
    base = anchor + t1
    count = t2 - t1 + 1
    mask = sensing.window.reservation_view(base, count, rri, now, not_before=sensing.joined_at)
    end = anchor + t2
    for t in sensing.own_tx:
        m = t + rri * ((base - t + rri - 1) // rri)
        while m <= end:
            mask[m - base] = True
            m += rri
    return mask


def candidate_resources(sensing: SensingMap, n: int, rri: int, t1: int, t2: int,
                        registry=None, now: int | None = None) -> CandidateSet:
    """All free coords in the selection window anchored at n, after the
    half-duplex, predicted-busy and (when a registry is given) lookahead-claim
    exclusions. An empty set signals that the caller must fall back."""
    mask = candidate_mask(sensing, n, rri, t1, t2, now=now)
    if registry is not None:
        registry.apply_exclusions(mask, n + t1, t2 - t1 + 1)
    base = n + t1
    coords = [
        ResourceCoord(base + int(k), int(c))
        for k, c in np.argwhere(~mask)
    ]
    return CandidateSet(anchor=n, t1=t1, t2=t2, coords=coords)


__all__ = [
    "CandidateSet",
    "OccupancyWindow",
    "SensingMap",
    "candidate_mask",
    "candidate_resources",
]
