"""O-RESCHU: five UAVs, respawning red zones, 38-point budgets."""

from __future__ import annotations

from rhtn.directives import Directive, DirectiveSet
from rhtn.domains.navigation import (
    PRIORITY,
    alternatives,
    goal_of,
    move,
    navigation_domain,
    repair_by_distance,
)
from rhtn.gridworld import GridMap, WorldState, manhattan, penalty_for_move
from rhtn.htn import Domain, Task, TaskList, apply_action
from rhtn.planner import RepairHooks

N_AGENTS = 5

DOMAIN: Domain = navigation_domain("oreschu")


def redzone_directive(zone_id: int) -> Directive:
    """True when at least one agent stands inside the zone with this id."""

    def violated(s: WorldState) -> bool:
        zones = s.zones
        zone = zones[zone_id] if zone_id < len(zones) and zones[zone_id].id == zone_id else None
        if zone is None:
            zone = next((z for z in zones if z.id == zone_id), None)
            if zone is None:
                return False
        x, y = zone.anchor
        size = zone.size
        for a in s.agents:
            px, py = a.pos
            if x <= px < x + size and y <= py < y + size:
                return True
        return False

    return Directive(f"redzone{zone_id}", violated)


def redzone_directives(grid: GridMap) -> DirectiveSet:
    return DirectiveSet(redzone_directive(z.id) for z in grid.zones)


def repair_oreschu_effect(d: Directive, s: WorldState, tasks: TaskList, a0: Task, ds: DirectiveSet | None = None) -> TaskList:
    ds = ds if ds is not None else DirectiveSet(redzone_directive(z.id) for z in s.zones)
    return repair_by_distance(ds, DOMAIN, s, tasks, a0)


def repair_oreschu_state(d: Directive, s: WorldState, tasks: TaskList, ds: DirectiveSet | None = None) -> TaskList:
    """Put the cheapest move that clears every violation in front of ``tasks``.

    Candidates are ranked by move penalty, then distance to the goal, then
    direction priority. If ``tasks`` already starts with that move the list is
    returned unchanged, so the planner goes on to execute it instead of
    repairing the same state forever.
    """
    ds = ds if ds is not None else DirectiveSet(redzone_directive(z.id) for z in s.zones)
    if not tasks:
        return ()
    agent = tasks[0].args[0]
    goal = goal_of(s, agent)
    pos = s.agents[agent].pos
    best, best_key = None, None
    for task in alternatives(s, agent, ds, DOMAIN):
        nxt = apply_action(DOMAIN, s, task)
        target = nxt.agents[agent].pos
        dist = manhattan(target, s.map.destination(goal.destination)) if goal else 0
        key = (penalty_for_move(pos, target, s.zones), dist, PRIORITY.index(task.head))
        if best_key is None or key < best_key:
            best, best_key = task, key
    if best is None:
        return ()
    if tasks[0] == best:
        return tasks
    return (best,) + tasks


def oreschu_hooks(ds: DirectiveSet) -> RepairHooks:
    return RepairHooks(
        repair_state=lambda d, s, tasks: repair_oreschu_state(d, s, tasks, ds),
        repair_effect=lambda d, s, tasks, a0: repair_oreschu_effect(d, s, tasks, a0, ds),
    )


__all__ = [
    "DOMAIN",
    "N_AGENTS",
    "move",
    "oreschu_hooks",
    "redzone_directive",
    "redzone_directives",
    "repair_oreschu_effect",
    "repair_oreschu_state",
]
