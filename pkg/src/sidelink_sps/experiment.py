"""Run loop, population churn, multi-seed aggregation, and parameter sweeps."""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import stats as sps_stats

from .config import (
    SCHEDULER_SPSLA,
    SCHEDULERS,
    ConfigurationError,
    ScenarioConfig,
    ues_for_cbr,
)
from .grid import TransmissionLog, channel_busy_ratio
from .lookahead import ClaimBoard, LookaheadRegistry, la_step, replan_on_conflict
from .sensing import OccupancyWindow, SensingMap
from .sps import UeState, sps_step


@dataclass
class CollisionEvent:
    """One collided cell, with the senders and when each last fixed its location."""

    subframe: int
    subchannel: int
    ue_ids: tuple[int, ...]
    decision_subframes: tuple[int, ...]
    episode_start: bool


@dataclass
class RunMetrics:
    """Outcome of one seeded run."""

    seed: int
    scheduler: str
    num_ues: int
    series: list[float]                 # cumulative collision probability, one point per second
    final_collision_probability: float
    mean_cbr: float
    collided_cells: int
    collision_events: list[CollisionEvent] | None = None


@dataclass
class SweepPoint:
    scheduler: str
    axis: str
    value: float
    num_ues: int
    prob_keep: float
    churn: float
    rc_la: int
    cbr_pct: float
    seeds: list[int] = field(default_factory=list)
    finals: list[float] = field(default_factory=list)
    series_by_run: list[list[float]] = field(default_factory=list)
    mean: float = 0.0
    ci95: float = 0.0

    @property
    def mean_series(self) -> list[float]:
        if not self.series_by_run:
            return []
        arr = np.asarray(self.series_by_run)
        return arr.mean(axis=0).tolist()


@dataclass
class SweepResult:
    axis: str
    base: ScenarioConfig
    points: list[SweepPoint] = field(default_factory=list)


def _spawn_ue(ue_id: int, subframe_lo: int, window: OccupancyWindow, board: ClaimBoard | None,
              rng: np.random.Generator, cfg: ScenarioConfig, joined_at: int,
              tx_subframe: int | None = None, tx_subchannel: int | None = None) -> UeState:
    if tx_subframe is None:
        tx_subframe = subframe_lo + int(rng.integers(1, cfg.rri + 1))
    if tx_subchannel is None:
        tx_subchannel = int(rng.integers(0, cfg.n_subchannels))
    sensing = SensingMap(ue_id, cfg.n_subchannels, window=window,
                         sensing_window=cfg.sensing_window, joined_at=joined_at)
    ue = UeState(
        ue_id=ue_id,
        tx_subchannel=tx_subchannel,
        tx_subframe=tx_subframe,
        rc=int(rng.integers(cfg.c1, cfg.c2 + 1)),
        sensing=sensing,
        joined_at=joined_at,
        decided_at=joined_at,
    )
    if board is not None:
        ue.registry = LookaheadRegistry(ue, board)
    return ue


def churn_step(population: dict[int, UeState], rate: float, now: int,
               rng: np.random.Generator, window: OccupancyWindow,
               board: ClaimBoard | None, cfg: ScenarioConfig,
               next_id: int) -> int:
    """Replace round(rate * population) UEs: departures drop out mid-streak,
    arrivals start blind within the next RRI. Returns the next fresh id."""
    k = round(rate * len(population))
    if k <= 0:
        return next_id
    ids = sorted(population)
    leave = rng.choice(len(ids), size=k, replace=False)
    for idx in sorted(int(i) for i in leave):
        ue = population.pop(ids[idx])
        ue.active = False
        if board is not None and ue.plan is not None:
            board.unregister_plan(ue.ue_id, ue.plan.lookahead)
            ue.plan = None
    for _ in range(k):
        ue = _spawn_ue(next_id, now, window, board, rng, cfg, joined_at=now)
        population[ue.ue_id] = ue
        next_id += 1
    return next_id


def run_scenario(config: ScenarioConfig) -> RunMetrics:
    """Simulate one seeded scenario subframe by subframe.

    Per subframe: scheduled UEs transmit in ascending id order, the grid logs
    the packets, every listener's shared occupancy row is recorded, then
    lookahead advertisements are delivered (half-duplex honored) and claims
    that provoke first-come-first-serve yields trigger immediate replanning.
    Churn applies at whole-second boundaries.
    """
    cfg = config
    rng = np.random.default_rng(cfg.seed)
    is_la = cfg.scheduler == SCHEDULER_SPSLA
    grid = TransmissionLog(cfg.n_subchannels)
    window = OccupancyWindow(cfg.n_subchannels, cfg.sensing_window)
    board = ClaimBoard(cfg.n_subchannels, cfg.rri) if is_la else None

    # sensing-established start: every UE on its own cell of the period grid
    start_cells = rng.permutation(cfg.capacity)[:cfg.num_ues]
    population: dict[int, UeState] = {}
    for ue_id in range(cfg.num_ues):
        cell = int(start_cells[ue_id])
        ue = _spawn_ue(ue_id, 0, window, board, rng, cfg, joined_at=0,
                       tx_subframe=1 + cell // cfg.n_subchannels,
                       tx_subchannel=cell % cfg.n_subchannels)
        population[ue.ue_id] = ue
    next_id = cfg.num_ues

    ring = 1
    while ring < cfg.rri + cfg.t2 + 2:
        ring <<= 1
    ring_mask = ring - 1
    buckets: list[list[UeState]] = [[] for _ in range(ring)]
    for ue in population.values():
        buckets[ue.tx_subframe & ring_mask].append(ue)

    total = cfg.total_subframes
    warmup_sf = cfg.warmup_s * 1000
    collided_at_warmup = 0
    series: list[float] = []
    cbr_samples: list[float] = []
    events: list[CollisionEvent] | None = [] if cfg.collect_collision_events else None
    prev_collided: dict[tuple[int, int], frozenset[int]] = {}

    step = la_step if is_la else sps_step
    for sf in range(total):
        if cfg.churn_rate > 0.0 and sf > 0 and sf % 1000 == 0:
            next_id = churn_step(population, cfg.churn_rate, sf, rng, window, board, cfg, next_id)
            for ue in population.values():
                if ue.joined_at == sf:
                    buckets[ue.tx_subframe & ring_mask].append(ue)
        if board is not None:
            board.purge(sf)
        grid.begin_subframe(sf)
        bucket = buckets[sf & ring_mask]
        buckets[sf & ring_mask] = []
        ads: list[tuple] = []
        tx_now: set[int] = set()
        if bucket:
            bucket.sort(key=lambda u: u.ue_id)
            for ue in bucket:
                if not ue.active:
                    continue
                out = step(ue, sf, rng, cfg)
                if out is None:
                    continue
                if is_la:
                    coord, attached = out
                    if attached is not None and cfg.la_registry_enabled:
                        ads.append((attached, ue.ue_id))
                else:
                    coord = out
                tx_now.add(ue.ue_id)
                grid.record_transmission(coord, ue.ue_id)
                buckets[ue.tx_subframe & ring_mask].append(ue)
        if events is not None:
            for subchannel, ues in grid.collided_cells_now():
                key = (subchannel, sf - cfg.rri)
                prev = prev_collided.get(key, frozenset())
                here = frozenset(ues)
                start = len(here & prev) < 2
                prev_collided[(subchannel, sf)] = here
                events.append(CollisionEvent(
                    subframe=sf,
                    subchannel=subchannel,
                    ue_ids=tuple(sorted(here)),
                    decision_subframes=tuple(population[u].decided_at for u in sorted(here)
                                             if u in population),
                    episode_start=start,
                ))
            if sf % 1000 == 0 and prev_collided:
                horizon = sf - 2 * cfg.rri
                prev_collided = {k: v for k, v in prev_collided.items() if k[1] >= horizon}
        busy = grid.end_subframe()
        window.record(sf, busy)
        if board is not None and ads:
            yields: set[int] = set()
            for la, advertiser in ads:
                board.advertise(la, advertiser, sf)
                for holder in board.planholders(la.subchannel, la.subframe):
                    if holder == advertiser or holder in tx_now or holder not in population:
                        continue
                    holder_ue = population[holder]
                    mine = holder_ue.plan.lookahead if holder_ue.plan is not None else None
                    if mine is not None and mine.subchannel == la.subchannel and mine.subframe == la.subframe:
                        yields.add(holder)
            for holder in sorted(yields):
                replan_on_conflict(population[holder], sf, rng, cfg, board)
        if sf == warmup_sf - 1:
            collided_at_warmup = grid.collided_resource_count
        if sf % 1000 == 999:
            t = (sf + 1) // 1000
            if t > cfg.warmup_s:
                num = grid.collided_resource_count - collided_at_warmup
                den = cfg.n_subchannels * (t - cfg.warmup_s) * 1000
                series.append(num / den)
                cbr_samples.append(channel_busy_ratio(grid, sf + 1))

    return RunMetrics(
        seed=cfg.seed,
        scheduler=cfg.scheduler,
        num_ues=cfg.num_ues,
        series=series,
        final_collision_probability=series[-1] if series else 0.0,
        mean_cbr=float(np.mean(cbr_samples)) if cbr_samples else 0.0,
        collided_cells=grid.collided_resource_count - collided_at_warmup,
        collision_events=events,
    )


def same_subframe_violations(metrics: RunMetrics) -> list[CollisionEvent]:
    """Episode-start collisions in which no two participants made their final
    resource decision in the same subframe."""
    if metrics.collision_events is None:
        raise ValueError("run was not executed with collect_collision_events=True")
    out = []
    for ev in metrics.collision_events:
        if not ev.episode_start:
            continue
        stamps = ev.decision_subframes
        if len(stamps) < 2 or len(set(stamps)) == len(stamps):
            out.append(ev)
    return out


def aggregate_runs(values) -> tuple[float, float]:
    """Sample mean and 95% confidence half-width (Student t) of run outcomes."""
    vals = [float(v) for v in values]
    if not vals:
        raise ConfigurationError("aggregate_runs needs at least one value")
    n = len(vals)
    mean = float(np.mean(vals))
    if n == 1:
        warnings.warn("confidence interval of a single run is reported as 0", stacklevel=2)
        return mean, 0.0
    sd = float(np.std(vals, ddof=1))
    if sd == 0.0:
        return mean, 0.0
    t = float(sps_stats.t.ppf(0.975, n - 1))
    return mean, t * sd / math.sqrt(n)


_SCHED_IDX = {s: i for i, s in enumerate(SCHEDULERS)}


def derive_seed(base_seed: int, scheduler: str, point_index: int, run_index: int) -> int:
    ss = np.random.SeedSequence([base_seed, _SCHED_IDX[scheduler], point_index, run_index])
    return int(ss.generate_state(1, np.uint64)[0])


def _config_for_point(base: ScenarioConfig, axis: str, value: float, scheduler: str) -> ScenarioConfig:
    if axis == "cbr":
        return replace(base, scheduler=scheduler,
                       num_ues=ues_for_cbr(value, base.n_subchannels, base.rri))
    if axis == "prob_keep":
        return replace(base, scheduler=scheduler, prob_resource_keep=value)
    if axis == "churn":
        return replace(base, scheduler=scheduler, churn_rate=value)
    raise ConfigurationError(f"unknown sweep axis {axis!r} (expected cbr, prob_keep, or churn)")


def _run_for_pool(cfg: ScenarioConfig) -> RunMetrics:
    return run_scenario(cfg)


def sweep(axis: str, points, base: ScenarioConfig, schedulers=None,
          jobs: int | None = None) -> SweepResult:
    """Run `base.runs` seeds per (scheduler, point) and aggregate.

    Seeds derive deterministically from the base seed, so any row of the
    result can be reproduced as a standalone run. Runs fan out over processes
    when jobs > 1.
    """
    if schedulers is None:
        schedulers = (base.scheduler,)
    points = list(points)
    result = SweepResult(axis=axis, base=base)
    tasks: list[tuple[int, ScenarioConfig]] = []
    for scheduler in schedulers:
        for pi, value in enumerate(points):
            cfg_point = _config_for_point(base, axis, value, scheduler)
            point = SweepPoint(
                scheduler=scheduler, axis=axis, value=float(value),
                num_ues=cfg_point.num_ues, prob_keep=cfg_point.prob_resource_keep,
                churn=cfg_point.churn_rate, rc_la=cfg_point.rc_la,
                cbr_pct=100.0 * cfg_point.cbr_target,
            )
            result.points.append(point)
            for ri in range(base.runs):
                seed = derive_seed(base.seed, scheduler, pi, ri)
                point.seeds.append(seed)
                tasks.append((len(result.points) - 1, cfg_point.with_seed(seed)))

    if jobs is None:
        jobs = os.cpu_count() or 1
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_run_for_pool, [cfg for _, cfg in tasks], chunksize=1))
    else:
        outcomes = [run_scenario(cfg) for _, cfg in tasks]

    for (point_idx, _), metrics in zip(tasks, outcomes):
        point = result.points[point_idx]
        point.finals.append(metrics.final_collision_probability)
        point.series_by_run.append(metrics.series)
    for point in result.points:
        point.mean, point.ci95 = aggregate_runs(point.finals)
    return result


__all__ = [
    "CollisionEvent",
    "RunMetrics",
    "SweepPoint",
    "SweepResult",
    "aggregate_runs",
    "churn_step",
    "derive_seed",
    "run_scenario",
    "same_subframe_violations",
    "sweep",
]
