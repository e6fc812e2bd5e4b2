"""Experiment orchestration: simulated users, episodes, sweeps and CSV output."""

from __future__ import annotations

import csv
import hashlib
import io
import logging
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

from rhtn.domains import get_plugin
from rhtn.domains.navigation import Goal, reach
from rhtn.gridworld import (
    BUDGET,
    MONSTER,
    ORESCHU,
    RESPAWN_PROBABILITIES,
    GridMap,
    World,
    generate_map,
    initial_state,
)
from rhtn.htn import Plan
from rhtn.planner import PlanOutcome, Policy, Status, rseek_steps

log = logging.getLogger(__name__)

TICK_CAP = 200
CSV_COLUMNS = (
    "domain",
    "policy",
    "probability",
    "mean_goals",
    "mean_discrepancies",
    "mean_penalty_points",
    "mean_gold",
    "mean_deaths",
    "episodes",
)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    domain: str
    policies: tuple[str, ...] = tuple(p.value for p in Policy)
    probabilities: tuple[int, ...] = RESPAWN_PROBABILITIES
    episodes_per_cell: int = 100
    base_seed: int = 0
    out_path: Optional[str] = None
    tick_cap: int = TICK_CAP

    def __post_init__(self) -> None:
        if self.domain not in (ORESCHU, MONSTER):
            raise ConfigError(f"unknown domain {self.domain!r}")
        bad = [p for p in self.policies if p not in {x.value for x in Policy}]
        if bad or not self.policies:
            raise ConfigError(f"bad policies {bad or list(self.policies)}")
        off_grid = [p for p in self.probabilities if p not in RESPAWN_PROBABILITIES]
        if off_grid or not self.probabilities:
            raise ConfigError(f"probabilities must be drawn from {RESPAWN_PROBABILITIES}, got {list(self.probabilities)}")
        if self.episodes_per_cell < 1:
            raise ConfigError("episodes_per_cell must be at least 1")
        if self.tick_cap < 1:
            raise ConfigError("tick_cap must be positive")


@dataclass(frozen=True)
class EpisodeRecord:
    domain: str
    policy: str
    probability: int
    seed: int
    goals_achieved: int = 0
    discrepancies: int = 0
    penalty_points: int = 0
    gold_collected: int = 0
    deaths: int = 0
    ticks_used: int = 0
    error: Optional[str] = None


@dataclass(frozen=True)
class CellMeans:
    mean_goals: float
    mean_discrepancies: float
    mean_penalty_points: float
    mean_gold: float
    mean_deaths: float
    episodes: int

    @classmethod
    def of(cls, records: Sequence[EpisodeRecord]) -> CellMeans:
        n = len(records)
        return cls(
            mean_goals=sum(r.goals_achieved for r in records) / n,
            mean_discrepancies=sum(r.discrepancies for r in records) / n,
            mean_penalty_points=sum(r.penalty_points for r in records) / n,
            mean_gold=sum(r.gold_collected for r in records) / n,
            mean_deaths=sum(r.deaths for r in records) / n,
            episodes=n,
        )


@dataclass(frozen=True)
class SweepResult:
    config: ExperimentConfig
    records: tuple[EpisodeRecord, ...]
    cells: dict[tuple[str, int], CellMeans] = field(default_factory=dict)


# -- seeding ------------------------------------------------------------------


def episode_seed(base_seed: int, domain: str, probability: int, index: int) -> int:
    """Seed shared by every policy for the same (domain, probability, index).

    All three agent types therefore face the same map, goals and respawn
    stream, and adding a policy never shifts another cell's seeds.
    """
    key = f"{base_seed}:{domain}:{probability}:{index}".encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "big")


def stream(seed: int, name: str) -> random.Random:
    return random.Random(f"{seed}:{name}")


# -- simulated users ----------------------------------------------------------


def simulated_user_oreschu(grid: GridMap, rng: random.Random, n_agents: int = 5) -> list[Goal]:
    names = rng.sample(grid.destination_names, n_agents)
    return [Goal(i, name) for i, name in enumerate(names)]


def simulated_user_monster(grid: GridMap, rng: random.Random, issued: Sequence[str] = ()) -> Optional[Goal]:
    """Next gold location for the NPC, never repeating one; ``None`` after two."""
    if len(issued) >= 2:
        return None
    remaining = [n for n in grid.destination_names if n not in issued]
    return Goal(0, rng.choice(remaining))


# -- episodes -----------------------------------------------------------------


def _advance(steps) -> Optional[PlanOutcome]:
    try:
        next(steps)
    except StopIteration as stop:
        return stop.value
    return None


def format_trace(world: World) -> list[str]:
    lines = []
    for tick, agent, action, pos, resource, inside in world.log:
        violated = ",".join(f"redzone{z}" if world.state.rules == ORESCHU else "monster" for z in inside) or "-"
        lines.append(f"{tick} {agent} {action} {pos[0]},{pos[1]} {resource} {violated}")
    return lines


def _oreschu_episode(world: World, goals: Sequence[Goal], policy: Policy, tick_cap: int) -> dict:
    plugin = get_plugin(ORESCHU)
    ds = plugin.directives(world.state.map)
    hooks = plugin.hooks(ds)
    planners = {
        g.agent: rseek_steps(
            world.env(g.agent), (reach(g.agent, g.destination),), Plan(), policy, ds, hooks, plugin.domain
        )
        for g in goals
    }
    while planners and world.state.tick < tick_cap:
        world.respawn()
        for agent in sorted(planners):
            outcome = _advance(planners[agent])
            if outcome is not None:
                log.debug("agent %d: %s", agent, outcome.status.value)
                del planners[agent]
                world.update_agent(agent, active=False)
        world.end_tick()
    s = world.state
    return dict(
        goals_achieved=sum(plugin.goal_reached(s, g) for g in goals),
        discrepancies=sum(s.violations),
        penalty_points=sum(s.penalties),
        ticks_used=s.tick,
        capped=bool(planners),
    )


def _monster_episode(world: World, user_rng: random.Random, policy: Policy, tick_cap: int) -> dict:
    plugin = get_plugin(MONSTER)
    ds = plugin.directives(world.state.map)
    hooks = plugin.hooks(ds)
    issued: list[str] = []
    achieved = 0

    def assign() -> Optional[object]:
        goal = simulated_user_monster(world.state.map, user_rng, issued)
        if goal is None:
            return None
        issued.append(goal.destination)
        world.update_agent(0, goal=goal.destination, active=True)
        return rseek_steps(world.env(0), (reach(0, goal.destination),), Plan(), policy, ds, hooks, plugin.domain)

    steps = assign()
    while steps is not None and world.state.tick < tick_cap:
        world.respawn()
        outcome = _advance(steps)
        while outcome is not None:
            if outcome.status is Status.COMPLETED:
                achieved += 1
            npc = world.state.agents[0]
            if npc.hp <= 0:
                steps = None
                break
            world.update_agent(0, active=False)
            steps = assign()
            outcome = _advance(steps) if steps is not None else None
        world.end_tick()
        if world.state.agents[0].hp <= 0:
            break
    s = world.state
    return dict(
        goals_achieved=achieved,
        discrepancies=sum(s.violations),
        gold_collected=s.gold_collected,
        deaths=int(s.agents[0].hp <= 0),
        ticks_used=s.tick,
        capped=steps is not None and s.agents[0].hp > 0,
    )


def run_episode(
    domain: str,
    policy: str | Policy,
    probability: int,
    seed: int,
    *,
    tick_cap: int = TICK_CAP,
    grid: Optional[GridMap] = None,
    goals: Optional[Sequence[Goal]] = None,
    budget: int = BUDGET,
    trace: Optional[list[str]] = None,
) -> EpisodeRecord:
    """Run one episode; fully determined by its arguments.

    ``grid`` and ``goals`` override the seeded map and simulated user (used
    for scenario replay). Trace lines are appended to ``trace`` if given.
    """
    policy = Policy(policy)
    plugin = get_plugin(domain)
    if grid is None:
        grid = generate_map(stream(seed, "map"))
    user_rng = stream(seed, "user")
    world_rng = stream(seed, "world")
    if domain == ORESCHU:
        if goals is None:
            goals = simulated_user_oreschu(grid, user_rng, plugin.n_agents)
        state = initial_state(grid, len(goals), ORESCHU, [g.destination for g in goals], budget)
        world = World(state, world_rng, probability)
        measures = _oreschu_episode(world, goals, policy, tick_cap)
    else:
        state = initial_state(grid, 1, MONSTER)
        world = World(state, world_rng, probability)
        measures = _monster_episode(world, user_rng, policy, tick_cap)
    if measures.pop("capped"):
        log.debug("episode %s/%s/%d/%d hit the tick cap", domain, policy.value, probability, seed)
    if trace is not None:
        trace.append(f"# domain={domain} policy={policy.value} probability={probability} seed={seed}")
        trace.extend(format_trace(world))
    return EpisodeRecord(domain=domain, policy=policy.value, probability=probability, seed=seed, **measures)


def _episode_job(args: tuple) -> tuple[EpisodeRecord, list[str]]:
    domain, policy, probability, seed, tick_cap, want_trace = args
    trace: Optional[list[str]] = [] if want_trace else None
    try:
        record = run_episode(domain, policy, probability, seed, tick_cap=tick_cap, trace=trace)
    except Exception as exc:  # recorded per episode, never raised past the sweep
        log.warning("episode %s/%s/%d/%d failed: %s", domain, policy, probability, seed, exc)
        record = EpisodeRecord(domain, policy, probability, seed, error=f"{type(exc).__name__}: {exc}")
    return record, trace or []


def run_sweep(
    config: ExperimentConfig,
    *,
    jobs: int = 1,
    trace_path: Optional[str | Path] = None,
) -> SweepResult:
    """Every (policy, probability) cell for ``episodes_per_cell`` seeds.

    Jobs are laid out in a fixed order and results are collected in that
    order, so the outcome does not depend on ``jobs``.
    """
    policies = sorted(config.policies)
    probabilities = sorted(config.probabilities)
    work = [
        (config.domain, pol, p, episode_seed(config.base_seed, config.domain, p, i), config.tick_cap, trace_path is not None)
        for pol in policies
        for p in probabilities
        for i in range(config.episodes_per_cell)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_episode_job, work, chunksize=max(1, len(work) // (jobs * 8))))
    else:
        results = [_episode_job(w) for w in work]

    records = tuple(r for r, _ in results)
    if trace_path is not None:
        with open(trace_path, "w", encoding="utf-8", newline="\n") as fh:
            for _, lines in results:
                for line in lines:
                    fh.write(line + "\n")

    cells = {}
    for pol in policies:
        for p in probabilities:
            cells[(pol, p)] = CellMeans.of([r for r in records if r.policy == pol and r.probability == p])
    return SweepResult(config, records, cells)


def csv_text(result: SweepResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for (pol, p), m in sorted(result.cells.items()):
        writer.writerow(
            [
                result.config.domain,
                pol,
                p,
                f"{m.mean_goals:.4f}",
                f"{m.mean_discrepancies:.4f}",
                f"{m.mean_penalty_points:.4f}",
                f"{m.mean_gold:.4f}",
                f"{m.mean_deaths:.4f}",
                m.episodes,
            ]
        )
    return buf.getvalue()


def emit_csv(result: SweepResult, path: str | Path) -> Path:
    path = Path(path)
    try:
        path.write_text(csv_text(result), encoding="utf-8", newline="\n")
    except OSError as exc:
        raise OSError(f"cannot write sweep CSV to {path}: {exc}") from exc
    return path


def read_csv(path: str | Path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def records_as_dicts(records: Iterable[EpisodeRecord]) -> list[dict]:
    return [asdict(r) for r in records]
