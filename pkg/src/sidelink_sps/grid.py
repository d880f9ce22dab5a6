"""Time-frequency resource grid: transmission ledger and collision / CBR metrics.

The grid is the ground truth of a run. Every packet lands on one cell
(subframe, subchannel run); a cell that receives two or more packets in the
same subframe counts as exactly one collided resource, no matter how many
packets piled up.
"""

from __future__ import annotations

import hashlib
import warnings
from collections import deque
from dataclasses import dataclass

from .config import CBR_WINDOW_MS, ConfigurationError, SENSING_WINDOW_MS


@dataclass(frozen=True, slots=True)
class ResourceCoord:
    """One single-subframe resource: `length` consecutive subchannels in one subframe."""

    subframe: int
    subchannel: int
    length: int = 1

    def __post_init__(self) -> None:
        if self.subframe < 0:
            raise ConfigurationError(f"negative subframe {self.subframe}")
        if self.subchannel < 0:
            raise ConfigurationError(f"negative subchannel {self.subchannel}")
        if self.length < 1:
            raise ConfigurationError(f"length must be >= 1, got {self.length}")

    def cells(self) -> range:
        return range(self.subchannel, self.subchannel + self.length)


class TransmissionLog:
    """Per-subframe packet records plus running collision counters.

    Only the trailing `retention` subframes are kept in full detail (enough for
    any sensing window or CBR query); the counters cover the whole run.
    Pass ``retention=None`` to keep everything, e.g. for post-hoc audits.
    """

    def __init__(self, n_subchannels: int, retention: int | None = SENSING_WINDOW_MS):
        if n_subchannels < 1:
            raise ConfigurationError("n_subchannels must be >= 1")
        if retention is not None and retention < CBR_WINDOW_MS:
            raise ConfigurationError(f"retention must be >= {CBR_WINDOW_MS}")
        self.n_subchannels = n_subchannels
        self.retention = retention
        self.subframes_elapsed = 0
        self.collided_resource_count = 0
        self._current_subframe: int | None = None
        # trailing window of (subframe, records tuple, occupied-cell count)
        self._history: deque[tuple[int, tuple, int]] = deque()
        self._cur_records: list[tuple[int, int, int]] = []  # (subchannel, length, ue_id)
        self._cur_counts = [0] * n_subchannels
        self._cur_touched: list[int] = []
        self._cur_collided: list[bool] = [False] * n_subchannels

    @property
    def current_subframe(self) -> int | None:
        return self._current_subframe

    @property
    def total_resources_elapsed(self) -> int:
        return self.n_subchannels * self.subframes_elapsed

    def begin_subframe(self, subframe: int) -> None:
        if self._current_subframe is not None:
            raise RuntimeError("previous subframe not finished")
        expected = self.subframes_elapsed
        if subframe != expected:
            raise RuntimeError(f"subframes must advance one at a time (expected {expected}, got {subframe})")
        self._current_subframe = subframe
        for c in self._cur_touched:
            self._cur_counts[c] = 0
            self._cur_collided[c] = False
        self._cur_touched.clear()
        self._cur_records.clear()

    def record_transmission(self, coord: ResourceCoord, ue_id: int) -> None:
        """Place one packet on the grid; bumps the collision counter when a cell
        reaches two packets (and only then)."""
        if coord.subframe != self._current_subframe:
            raise RuntimeError(
                f"coord subframe {coord.subframe} is not the current subframe {self._current_subframe}"
            )
        if coord.subchannel + coord.length > self.n_subchannels:
            raise ConfigurationError(
                f"coord {coord} exceeds {self.n_subchannels} subchannels"
            )
        counts = self._cur_counts
        for c in coord.cells():
            if counts[c] == 0:
                self._cur_touched.append(c)
            counts[c] += 1
            if counts[c] == 2 and not self._cur_collided[c]:
                self._cur_collided[c] = True
                self.collided_resource_count += 1
        self._cur_records.append((coord.subchannel, coord.length, ue_id))

    def collided_cells_now(self) -> list[tuple[int, list[int]]]:
        """Cells of the current subframe holding >= 2 packets, with their senders."""
        out: list[tuple[int, list[int]]] = []
        for c in self._cur_touched:
            if self._cur_counts[c] >= 2:
                ues = [ue for (sc, ln, ue) in self._cur_records if sc <= c < sc + ln]
                out.append((c, ues))
        return out

    def end_subframe(self) -> tuple[int, ...]:
        """Close the subframe; returns the busy subchannels (any packet present)."""
        if self._current_subframe is None:
            raise RuntimeError("no subframe in progress")
        busy = tuple(sorted(self._cur_touched))
        self._history.append((self._current_subframe, tuple(self._cur_records), len(busy)))
        if self.retention is not None:
            while len(self._history) > self.retention:
                self._history.popleft()
        self.subframes_elapsed += 1
        self._current_subframe = None
        return busy

    def records_for(self, subframe: int) -> tuple:
        """Packet records of a retained subframe (oldest retained wins an IndexError otherwise)."""
        if not self._history:
            raise IndexError("empty log")
        oldest = self._history[0][0]
        idx = subframe - oldest
        if idx < 0 or idx >= len(self._history):
            raise IndexError(f"subframe {subframe} outside retained window")
        entry = self._history[idx]
        assert entry[0] == subframe
        return entry[1]

    def occupied_cells(self, subframe: int) -> int:
        if not self._history:
            return 0
        oldest = self._history[0][0]
        idx = subframe - oldest
        if idx < 0 or idx >= len(self._history):
            raise IndexError(f"subframe {subframe} outside retained window")
        return self._history[idx][2]


def collision_probability(log: TransmissionLog, elapsed_subframes: int) -> float:
    """Collided cells divided by all cells that elapsed (the run-level metric)."""
    if elapsed_subframes <= 0:
        raise ConfigurationError("elapsed_subframes must be > 0")
    return log.collided_resource_count / (log.n_subchannels * elapsed_subframes)


def channel_busy_ratio(log: TransmissionLog, n: int) -> float:
    """Fraction of cells carrying a packet over subframes [n-100, n-1].

    Below 100 subframes of history the value is computed over what exists and a
    warm-up warning is emitted.
    """
    window = CBR_WINDOW_MS
    start = n - window
    if start < 0:
        warnings.warn(f"channel_busy_ratio({n}) is a warm-up value (< {window} subframes of history)",
                      stacklevel=2)
        start = 0
    if n <= start:
        return 0.0
    occupied = sum(log.occupied_cells(s) for s in range(start, n))
    return occupied / (log.n_subchannels * (n - start))


__all__ = [
    "ResourceCoord",
    "TransmissionLog",
    "channel_busy_ratio",
    "collision_probability",
]
