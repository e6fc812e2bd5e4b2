"""Grid simulation substrate shared by the O-RESCHU and MONSTER domains.

Cells are ``(x, y)`` with ``y`` growing downward, so ``up`` is ``y - 1``.
All state types are frozen; every operation returns a new state. Randomness
is drawn from a ``random.Random`` passed in by the caller (the episode owns
its streams), never from module-level state.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Optional, Sequence

from rhtn.errors import GenerationExhausted, InactiveAgent

Cell = tuple[int, int]

DIRECTIONS: dict[str, Cell] = {
    "up": (0, -1),
    "down": (0, 1),
    "left": (-1, 0),
    "right": (1, 0),
    "stay": (0, 0),
}
MOVES = ("up", "down", "left", "right")

GRID_SIZE = 20
N_ZONES = 10
ZONE_SIZE = 2
N_DESTINATIONS = 7
BUDGET = 38
STEP_PENALTY = 1
RED_PENALTY = 20
NPC_HP = 10
MONSTER_HP = 10
GOLD_PER_LOCATION = 5
RESPAWN_PROBABILITIES = (0, 5, 10, 15, 20, 25, 30, 35, 40, 45, 50)
MAX_REJECTIONS = 1000

DESTINATION_NAMES = ("brown", "green", "orange", "yellow", "dark_blue", "pink", "purple")

ORESCHU = "oreschu"
MONSTER = "monster"


def manhattan(a: Cell, b: Cell) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


def offset(cell: Cell, direction: str) -> Cell:
    dx, dy = DIRECTIONS[direction]
    return (cell[0] + dx, cell[1] + dy)


@dataclass(frozen=True)
class Zone:
    """A square hazard (red zone or monster) identified by ``id``."""

    id: int
    anchor: Cell
    size: int = ZONE_SIZE

    def covers(self, cell: Cell) -> bool:
        x, y = self.anchor
        return x <= cell[0] < x + self.size and y <= cell[1] < y + self.size

    def cells(self) -> tuple[Cell, ...]:
        x, y = self.anchor
        return tuple((x + i, y + j) for j in range(self.size) for i in range(self.size))

    def separated_from(self, other: Zone, gap: int = 1) -> bool:
        """True when the two squares neither overlap nor touch within ``gap`` cells."""
        ax, ay = self.anchor
        bx, by = other.anchor
        return (
            ax + self.size + gap <= bx
            or bx + other.size + gap <= ax
            or ay + self.size + gap <= by
            or by + other.size + gap <= ay
        )


@dataclass(frozen=True)
class GridMap:
    width: int
    height: int
    zones: tuple[Zone, ...]
    destinations: tuple[tuple[str, Cell], ...]
    start: Cell

    def in_bounds(self, cell: Cell) -> bool:
        return 0 <= cell[0] < self.width and 0 <= cell[1] < self.height

    def destination(self, name: str) -> Cell:
        for n, cell in self.destinations:
            if n == name:
                return cell
        raise KeyError(name)

    @property
    def destination_names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.destinations)


@dataclass(frozen=True)
class AgentState:
    id: int
    pos: Cell
    budget: int = BUDGET
    hp: int = NPC_HP
    active: bool = True
    goal: Optional[str] = None


@dataclass(frozen=True)
class WorldState:
    """Full simulator state for one episode.

    ``zones`` holds the live hazards (red zones or surviving monsters); the
    map keeps the generation-time layout. ``violations`` and ``penalties`` are
    per-agent counters maintained by :func:`step_move`.
    """

    map: GridMap
    agents: tuple[AgentState, ...]
    zones: tuple[Zone, ...]
    rules: str = ORESCHU
    tick: int = 0
    gold: tuple[int, ...] = ()
    gold_collected: int = 0
    violations: tuple[int, ...] = ()
    penalties: tuple[int, ...] = ()
    fights: int = 0

    def agent(self, agent_id: int) -> AgentState:
        return self.agents[agent_id]

    def zone_at(self, cell: Cell) -> Optional[Zone]:
        for z in self.zones:
            if z.covers(cell):
                return z
        return None

    def in_zone(self, cell: Cell) -> bool:
        return self.zone_at(cell) is not None

    def with_agent(self, agent: AgentState) -> WorldState:
        agents = list(self.agents)
        agents[agent.id] = agent
        return replace(self, agents=tuple(agents))


def initial_state(
    grid: GridMap,
    n_agents: int,
    rules: str = ORESCHU,
    goals: Sequence[Optional[str]] | None = None,
    budget: int = BUDGET,
) -> WorldState:
    goals = list(goals) if goals is not None else [None] * n_agents
    agents = tuple(AgentState(i, grid.start, budget=budget, goal=goals[i]) for i in range(n_agents))
    gold = tuple(GOLD_PER_LOCATION for _ in grid.destinations) if rules == MONSTER else ()
    return WorldState(
        map=grid,
        agents=agents,
        zones=grid.zones,
        rules=rules,
        gold=gold,
        violations=(0,) * n_agents,
        penalties=(0,) * n_agents,
    )


def predicates(state: WorldState) -> frozenset[tuple]:
    """Grounded-atom view of a state, e.g. ``('at', 5, (10, 11))``."""
    atoms = {("at", a.id, a.pos) for a in state.agents}
    atoms |= {("red", z.id, z.anchor, z.size) for z in state.zones}
    atoms |= {("destination", n, c) for n, c in state.map.destinations}
    return frozenset(atoms)


# -- map generation ---------------------------------------------------------


def _sample_anchor(rng: random.Random, width: int, height: int, size: int) -> Cell:
    return (rng.randrange(width - size + 1), rng.randrange(height - size + 1))


def generate_map(
    seed: int | str | random.Random,
    *,
    width: int = GRID_SIZE,
    height: int = GRID_SIZE,
    n_zones: int = N_ZONES,
    n_destinations: int = N_DESTINATIONS,
    zone_size: int = ZONE_SIZE,
    max_rejections: int = MAX_REJECTIONS,
) -> GridMap:
    """Random map: gapped zones, then start and destinations outside every zone."""
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    names = DESTINATION_NAMES[:n_destinations] if n_destinations <= len(DESTINATION_NAMES) else tuple(
        f"d{i}" for i in range(n_destinations)
    )
    for _ in range(max_rejections):
        zones: list[Zone] = []
        for zid in range(n_zones):
            for _ in range(max_rejections):
                z = Zone(zid, _sample_anchor(rng, width, height, zone_size), zone_size)
                if all(z.separated_from(o) for o in zones):
                    zones.append(z)
                    break
            else:
                break
        if len(zones) < n_zones:
            continue
        covered = {c for z in zones for c in z.cells()}
        free = [(x, y) for y in range(height) for x in range(width) if (x, y) not in covered]
        if len(free) < n_destinations + 1:
            continue
        picks = rng.sample(free, n_destinations + 1)
        return GridMap(
            width=width,
            height=height,
            zones=tuple(zones),
            destinations=tuple(zip(names, picks[1:])),
            start=picks[0],
        )
    raise GenerationExhausted(f"no valid map after {max_rejections} attempts")


# -- dynamics ---------------------------------------------------------------


def respawn_zones(
    state: WorldState,
    p: int,
    rng: random.Random,
    max_rejections: int = MAX_REJECTIONS,
) -> WorldState:
    """Relocate each zone independently with probability ``p`` percent.

    A relocated zone gets a uniformly drawn anchor that keeps it in bounds,
    off every agent's cell, and separated from every other zone. If no such
    anchor turns up within ``max_rejections`` draws the zone stays put.
    """
    if not 0 <= p <= 100:
        raise ValueError(f"respawn probability must be a percent, got {p}")
    if p == 0 or not state.zones:
        return state
    occupied = {a.pos for a in state.agents}
    width, height = state.map.width, state.map.height
    zones = list(state.zones)
    for i, zone in enumerate(zones):
        if rng.random() >= p / 100:
            continue
        others = zones[:i] + zones[i + 1 :]
        for _ in range(max_rejections):
            cand = Zone(zone.id, _sample_anchor(rng, width, height, zone.size), zone.size)
            if any(cand.covers(c) for c in occupied):
                continue
            if all(cand.separated_from(o) for o in others):
                zones[i] = cand
                break
    return replace(state, zones=tuple(zones))


def penalty_for_move(src: Cell, dst: Cell, zones: Iterable[Zone]) -> int:
    if src == dst:
        return 0
    zones = tuple(zones)
    if any(z.covers(src) or z.covers(dst) for z in zones):
        return RED_PENALTY
    return STEP_PENALTY


def resolve_fight(npc_hp: int, monster_hp: int, rng: random.Random) -> tuple[str, int]:
    """Fair-coin fight to the death; returns ``(winner, npc_hp_left)``."""
    if npc_hp < 1 or monster_hp < 1:
        raise ValueError("both combatants need at least 1 hp")
    while npc_hp > 0 and monster_hp > 0:
        if rng.random() < 0.5:
            monster_hp -= 1
        else:
            npc_hp -= 1
    return ("npc", npc_hp) if npc_hp > 0 else ("monster", 0)




def move_target(state: WorldState, agent_id: int, direction: str) -> Optional[Cell]:
    target = offset(state.agents[agent_id].pos, direction)
    return target if state.map.in_bounds(target) else None


def relocate(state: WorldState, agent_id: int, direction: str) -> Optional[WorldState]:
    """Pure position update used by planning and projection. No costs, no dynamics."""
    target = move_target(state, agent_id, direction)
    if target is None:
        return None
    agent = state.agents[agent_id]
    if target == agent.pos:
        return state
    return state.with_agent(replace(agent, pos=target))


def can_act(agent: AgentState, rules: str) -> bool:
    if not agent.active:
        return False
    if rules == MONSTER:
        return agent.hp > 0
    return agent.budget > 0


def step_move(
    state: WorldState,
    agent_id: int,
    direction: str,
    rng: random.Random | None = None,
) -> Optional[WorldState]:
    """Execute one move in the environment.

    Returns ``None`` when the target cell is off the grid. O-RESCHU charges
    the move penalty against the budget and stops the agent once it is no
    longer positive; MONSTER resolves a
    fight on entering a monster cell and then collects any gold there. The
    mover's violation counter increases when it ends inside a hazard.
    """
    agent = state.agents[agent_id]
    if not can_act(agent, state.rules):
        raise InactiveAgent(f"agent {agent_id} cannot act")
    target = move_target(state, agent_id, direction)
    if target is None:
        return None

    violations = list(state.violations)
    penalties = list(state.penalties)

    if state.rules == MONSTER:
        moved = replace(agent, pos=target)
        s = state.with_agent(moved)
        if direction == "stay":
            return s
        monster = s.zone_at(target)
        if monster is not None:
            if rng is None:
                raise ValueError("a fight needs an rng")
            violations[agent_id] += 1
            winner, hp_left = resolve_fight(moved.hp, MONSTER_HP, rng)
            moved = replace(moved, hp=hp_left, active=hp_left > 0)
            zones = s.zones
            if winner == "npc":
                zones = tuple(z for z in zones if z.id != monster.id)
            s = replace(s.with_agent(moved), zones=zones, fights=s.fights + 1)
        gold, collected = s.gold, s.gold_collected
        if moved.hp > 0:
            for i, (_, cell) in enumerate(s.map.destinations):
                if cell == target and gold[i] > 0:
                    collected += gold[i]
                    gold = gold[:i] + (0,) + gold[i + 1 :]
        return replace(s, gold=gold, gold_collected=collected, violations=tuple(violations))

    # a step is always charged in full; the budget can finish below zero
    cost = penalty_for_move(agent.pos, target, state.zones)
    budget = agent.budget - cost
    moved = replace(agent, pos=target, budget=budget, active=agent.active and budget > 0)
    penalties[agent_id] += cost
    if direction != "stay" and state.in_zone(target):
        violations[agent_id] += 1
    return replace(
        state.with_agent(moved),
        violations=tuple(violations),
        penalties=tuple(penalties),
    )


def tick(
    state: WorldState,
    p: int,
    moves: Mapping[int, str],
    rng: random.Random,
) -> WorldState:
    """One simulation step: respawn, moves in ascending agent id, tick + 1."""
    missing = [a.id for a in state.agents if can_act(a, state.rules) and a.id not in moves]
    if missing:
        raise ValueError(f"no move given for active agents {missing}")
    s = respawn_zones(state, p, rng)
    for agent_id in sorted(moves):
        if not can_act(s.agents[agent_id], s.rules):
            continue
        nxt = step_move(s, agent_id, moves[agent_id], rng)
        if nxt is None:
            raise ValueError(f"move {moves[agent_id]} leaves the grid for agent {agent_id}")
        s = nxt
    return replace(s, tick=s.tick + 1)


class World:
    """Mutable owner of one episode's state and its dynamics stream.

    This is the only place the environment advances: :meth:`respawn` and
    :meth:`end_tick` drive the clock and zones, and agents move through the
    :class:`AgentEnv` handles returned by :meth:`env`.
    """

    def __init__(self, state: WorldState, rng: random.Random, p: int = 0) -> None:
        self.state = state
        self.rng = rng
        self.p = p
        self.log: list[tuple[int, int, str, Cell, int, tuple[int, ...]]] = []

    def respawn(self) -> None:
        self.state = respawn_zones(self.state, self.p, self.rng)

    def end_tick(self) -> None:
        self.state = replace(self.state, tick=self.state.tick + 1)

    def move(self, agent_id: int, direction: str) -> WorldState:
        before = self.state
        nxt = step_move(before, agent_id, direction, self.rng)
        if nxt is None:
            raise ValueError(f"move {direction} leaves the grid for agent {agent_id}")
        self.state = nxt
        agent = nxt.agents[agent_id]
        # hazards present on arrival, so a monster killed in the fight still shows
        inside = tuple(z.id for z in before.zones if z.covers(agent.pos)) if direction != "stay" else ()
        resource = agent.hp if nxt.rules == MONSTER else agent.budget
        self.log.append((nxt.tick, agent_id, direction, agent.pos, resource, inside))
        return nxt

    def update_agent(self, agent_id: int, **changes) -> None:
        self.state = self.state.with_agent(replace(self.state.agents[agent_id], **changes))

    def env(self, agent_id: int) -> AgentEnv:
        return AgentEnv(self, agent_id)


class AgentEnv:
    """Execution handle for one agent; satisfies the planner's ExecutionEnv protocol."""

    def __init__(self, world: World, agent_id: int) -> None:
        self.world = world
        self.agent_id = agent_id

    @property
    def current_state(self) -> WorldState:
        return self.world.state

    def execute(self, task) -> WorldState:
        return self.world.move(self.agent_id, task.head)

    def exhausted(self) -> bool:
        return not can_act(self.world.state.agents[self.agent_id], self.world.state.rules)

    def violation_count(self) -> int:
        return self.world.state.violations[self.agent_id]
