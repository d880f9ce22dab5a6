"""Reselection lookaheads: early planning, claim exchange, and the commit check.

One packet before its streak ends (at rc == rc_la), a UE picks the first
resource of its next streak and rides that announcement on every remaining
packet. Receivers store the claims; a claimed cell is off-limits for other
planners (first advertiser wins). At the streak's last packet the plan is
double-checked against everything heard since; if the target no longer looks
safe the UE keeps its current location for one more streak instead of moving
blind.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ScenarioConfig
from .grid import ResourceCoord
from .sensing import candidate_mask
from .sps import UeState, _pick_free


@dataclass(frozen=True, slots=True)
class Lookahead:
    """Advertised first resource of the advertiser's next streak."""

    subchannel: int
    length: int
    subframe: int


@dataclass(slots=True)
class PlannedReselection:
    lookahead: Lookahead
    next_rc: int
    decided_at: int


@dataclass(slots=True)
class Claim:
    advertiser: int
    subchannel: int
    target: int
    ad_subframes: list[int]

    def audible_to(self, own_tx_set: set[int], joined_at: int) -> bool:
        for s in self.ad_subframes:
            if s >= joined_at and s not in own_tx_set:
                return True
        return False


class ClaimBoard:
    """Run-wide ledger of advertised lookaheads.

    Every UE hears the same broadcasts except in subframes where it was itself
    transmitting, so claims are stored once and filtered per listener. Claims
    expire when their target subframe passes; by then the new streak is on the
    air and ordinary sensing covers it.
    """

    def __init__(self, n_subchannels: int, rri: int):
        self.n_subchannels = n_subchannels
        self.rri = rri
        self._by_phase: dict[tuple[int, int], list[Claim]] = {}
        self._by_target: dict[int, list[Claim]] = {}
        self._planholders: dict[tuple[int, int], set[int]] = {}
        self._purged_through = 0

    def advertise(self, la: Lookahead, advertiser: int, subframe: int) -> Claim:
        """Record one broadcast of a claim; repeat broadcasts extend the same claim."""
        key = (la.subchannel, la.subframe % self.rri)
        claims = self._by_phase.setdefault(key, [])
        for c in claims:
            if c.advertiser == advertiser and c.target == la.subframe:
                if not c.ad_subframes or c.ad_subframes[-1] != subframe:
                    c.ad_subframes.append(subframe)
                return c
        claim = Claim(advertiser, la.subchannel, la.subframe, [subframe])
        claims.append(claim)
        self._by_target.setdefault(la.subframe, []).append(claim)
        return claim

    def purge(self, now: int) -> None:
        """Drop claims whose target subframe is in the past. Call every subframe."""
        for t in range(self._purged_through, now):
            for claim in self._by_target.pop(t, ()):  # target == t just passed
                key = (claim.subchannel, claim.target % self.rri)
                claims = self._by_phase.get(key)
                if claims is not None:
                    claims.remove(claim)
                    if not claims:
                        del self._by_phase[key]
        self._purged_through = now

    def active_claims(self):
        for claims in self._by_phase.values():
            yield from claims

    def claims_on_phase(self, subchannel: int, subframe: int) -> list[Claim]:
        return self._by_phase.get((subchannel, subframe % self.rri), [])

    # plan bookkeeping for first-come-first-serve yielding
    def register_plan(self, ue_id: int, la: Lookahead) -> None:
        self._planholders.setdefault((la.subchannel, la.subframe % self.rri), set()).add(ue_id)

    def unregister_plan(self, ue_id: int, la: Lookahead) -> None:
        holders = self._planholders.get((la.subchannel, la.subframe % self.rri))
        if holders is not None:
            holders.discard(ue_id)

    def planholders(self, subchannel: int, subframe: int) -> set[int]:
        return self._planholders.get((subchannel, subframe % self.rri), set())


class LookaheadRegistry:
    """One UE's audible subset of the claim board."""

    def __init__(self, ue: UeState, board: ClaimBoard):
        self.ue = ue
        self.board = board

    def entries(self) -> list[tuple[Lookahead, int, int]]:
        """Visible claims as (lookahead, advertiser, first audible subframe)."""
        sensing = self.ue.sensing
        out = []
        for claim in self.board.active_claims():
            if claim.advertiser == self.ue.ue_id:
                continue
            heard = [s for s in claim.ad_subframes
                     if s >= sensing.joined_at and s not in sensing.own_tx_set]
            if heard:
                out.append((Lookahead(claim.subchannel, 1, claim.target), claim.advertiser, heard[0]))
        return out

    def apply_exclusions(self, mask: np.ndarray, base: int, count: int) -> None:
        """Mask the exact cells claimed by audible lookaheads inside the window."""
        sensing = self.ue.sensing
        own_tx = sensing.own_tx_set
        joined = sensing.joined_at
        me = self.ue.ue_id
        by_target = self.board._by_target
        for t in range(base, base + count):
            claims = by_target.get(t)
            if claims is None:
                continue
            for claim in claims:
                if claim.advertiser != me and claim.audible_to(own_tx, joined):
                    mask[t - base, claim.subchannel] = True

    def claim_conflicts(self, subchannel: int, subframe: int) -> bool:
        """Audible claim by another UE whose streak would share this cell's
        channel and period cadence."""
        sensing = self.ue.sensing
        for claim in self.board.claims_on_phase(subchannel, subframe):
            if claim.advertiser != self.ue.ue_id and claim.audible_to(
                    sensing.own_tx_set, sensing.joined_at):
                return True
        return False


def _plan_anchor(ue: UeState, params: ScenarioConfig) -> int:
    """Subframe of the streak's final packet; the next streak starts after it."""
    return ue.tx_subframe + params.rri * ue.rc


def select_resource_lookahead(ue: UeState, n: int, rng: np.random.Generator,
                              params: ScenarioConfig, now: int | None = None) -> tuple[int, int]:
    """Sensing-filtered selection that additionally avoids claimed cells.

    Falls back in stages when the window is exhausted: first ignoring claims,
    then blind over the whole window.
    """
    mask = candidate_mask(ue.sensing, n, params.rri, params.t1, params.t2, now=now)
    base = n + params.t1
    if ue.registry is not None and params.la_registry_enabled:
        sensing_mask = mask.copy()
        ue.registry.apply_exclusions(mask, base, params.t2 - params.t1 + 1)
        sf, ch, fell_back = _pick_free(mask, base, params.n_subchannels, rng)
        if fell_back and not sensing_mask.all():
            sf, ch, _ = _pick_free(sensing_mask, base, params.n_subchannels, rng)
        return sf, ch
    sf, ch, _ = _pick_free(mask, base, params.n_subchannels, rng)
    return sf, ch


def plan_lookahead(ue: UeState, subframe: int, rng: np.random.Generator,
                   params: ScenarioConfig, board: ClaimBoard) -> Lookahead:
    """Early reselection at rc == rc_la: decide where the next streak starts
    without committing yet. The keep branch holds the subchannel and cadence;
    the move branch draws from the claim-aware candidate set."""
    next_rc = int(rng.integers(params.c1, params.c2 + 1))
    if rng.random() < params.prob_resource_keep:
        la = Lookahead(ue.tx_subchannel, 1, ue.tx_subframe + params.rri * (ue.rc + 1))
    else:
        sf, ch = select_resource_lookahead(ue, _plan_anchor(ue, params), rng, params, now=subframe)
        la = Lookahead(ch, 1, sf)
    if board is not None:
        if ue.plan is not None:
            board.unregister_plan(ue.ue_id, ue.plan.lookahead)
        board.register_plan(ue.ue_id, la)
    ue.plan = PlannedReselection(lookahead=la, next_rc=next_rc, decided_at=subframe)
    return la


def receive_lookaheads(ue: UeState, subframe: int, heard, ue_transmitted: bool,
                       rng: np.random.Generator, params: ScenarioConfig,
                       board: ClaimBoard) -> None:
    """Deliver one subframe's advertisements to a UE.

    A transmitting UE hears nothing (half-duplex). Otherwise the claims enter
    the shared board, and a UE whose own pending plan is now claimed by someone
    else re-plans immediately (first come, first served)."""
    for la, advertiser in heard:
        board.advertise(la, advertiser, subframe)
    if ue_transmitted or ue.plan is None:
        return
    mine = ue.plan.lookahead
    for la, advertiser in heard:
        if advertiser != ue.ue_id and la.subchannel == mine.subchannel and la.subframe == mine.subframe:
            replan_on_conflict(ue, subframe, rng, params, board)
            return


def replan_on_conflict(ue: UeState, subframe: int, rng: np.random.Generator,
                       params: ScenarioConfig, board: ClaimBoard) -> None:
    """First-come-first-serve yield: pick a new plan target right away; it will
    ride on the streak's remaining packets."""
    old = ue.plan
    board.unregister_plan(ue.ue_id, old.lookahead)
    sf, ch = select_resource_lookahead(ue, _plan_anchor(ue, params), rng, params,
                                       now=subframe + 1)
    ue.plan = PlannedReselection(lookahead=Lookahead(ch, 1, sf), next_rc=old.next_rc,
                                 decided_at=subframe)
    board.register_plan(ue.ue_id, ue.plan.lookahead)


def check_lookahead(ue: UeState, commit_subframe: int, params: ScenarioConfig) -> bool:
    """Commit-time double check of the planned cell.

    Fails when another UE's audible claim shares the target's channel and
    cadence, or when a packet was observed one reservation period before the
    target (same channel); the plan would ride straight into that streak.
    """
    if ue.plan is None:
        raise RuntimeError(f"ue {ue.ue_id} reached commit without a lookahead plan")
    la = ue.plan.lookahead
    if ue.registry is not None and params.la_registry_enabled:
        if ue.registry.claim_conflicts(la.subchannel, la.subframe):
            return False
    period_start = commit_subframe - params.rri
    z = period_start + (la.subframe - period_start) % params.rri
    if 0 <= z < commit_subframe and ue.sensing.observed_busy(la.subchannel, z):
        return False
    return True


def la_step(ue: UeState, subframe: int, rng: np.random.Generator,
            params: ScenarioConfig) -> tuple[ResourceCoord, Lookahead | None] | None:
    """One subframe of the lookahead scheduler; returns (transmission, attached
    lookahead) on scheduled subframes.

    The final packet of a streak carries the plan out one last time, then the
    plan is committed if the double check passes; otherwise the UE stays on its
    current resource for the next streak and plans afresh one packet before it
    ends.
    """
    if subframe != ue.tx_subframe:
        return None
    ue.sensing.note_own_transmission(subframe)
    coord = ResourceCoord(subframe, ue.tx_subchannel)
    board = ue.registry.board if ue.registry is not None else None
    if ue.rc != 0:
        if ue.rc == params.rc_la:
            plan_lookahead(ue, subframe, rng, params, board)
        attached = ue.plan.lookahead if ue.plan is not None else None
        ue.tx_subframe += params.rri
        ue.rc -= 1
        return coord, attached
    plan = ue.plan
    if plan is None:
        raise RuntimeError(f"ue {ue.ue_id} reached rc=0 without a lookahead plan")
    attached = plan.lookahead
    ue.rc = plan.next_rc
    if check_lookahead(ue, subframe, params):
        ue.tx_subframe = plan.lookahead.subframe
        ue.tx_subchannel = plan.lookahead.subchannel
    else:
        ue.tx_subframe += params.rri  # target unsafe: hold the current resource
    ue.decided_at = subframe
    if board is not None:
        board.unregister_plan(ue.ue_id, plan.lookahead)
    ue.plan = None
    return coord, attached


__all__ = [
    "Claim",
    "ClaimBoard",
    "Lookahead",
    "LookaheadRegistry",
    "PlannedReselection",
    "check_lookahead",
    "la_step",
    "plan_lookahead",
    "receive_lookaheads",
    "replan_on_conflict",
    "select_resource_lookahead",
]
