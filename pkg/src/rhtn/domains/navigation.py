"""Grid navigation vocabulary shared by both domains.

Primitive tasks are the five moves ``up/down/left/right/stay(agent)``; the
one compound task is ``reach(agent, destination)``, decomposed by
``navigate-distant`` (two or more cells away) and ``navigate-close``
(adjacent, or already there). Directions are always tried in the fixed
order up, down, left, right, stay.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from rhtn.directives import DirectiveSet
from rhtn.gridworld import (
    DIRECTIONS,
    MOVES,
    Cell,
    WorldState,
    manhattan,
    move_target,
    offset,
    relocate,
)
from rhtn.htn import ActionDef, Domain, MethodDef, Task, TaskList, apply_action

PRIORITY = ("up", "down", "left", "right", "stay")
REACH = "reach"


@dataclass(frozen=True)
class Goal:
    agent: int
    destination: str


def reach(agent: int, destination: str) -> Task:
    return Task(REACH, (agent, destination))


def move(direction: str, agent: int) -> Task:
    return Task(direction, (agent,))


def _move_action(direction: str) -> ActionDef:
    def applicable(s: WorldState, args: tuple) -> bool:
        return move_target(s, args[0], direction) is not None

    def transition(s: WorldState, args: tuple) -> Optional[WorldState]:
        return relocate(s, args[0], direction)

    return ActionDef(direction, applicable, transition)


def distance(s: WorldState, goal: Goal) -> int:
    return manhattan(s.agents[goal.agent].pos, s.map.destination(goal.destination))


def _reach_geometry(s: WorldState, task: Task) -> tuple[int, Cell, Cell]:
    agent, dest = task.args
    return agent, s.agents[agent].pos, s.map.destination(dest)


def closing_step(pos: Cell, target: Cell) -> Optional[str]:
    """First direction in priority order that strictly reduces the distance."""
    d = manhattan(pos, target)
    for direction in MOVES:
        if manhattan(offset(pos, direction), target) < d:
            return direction
    return None


def _distant_applicable(s: WorldState, task: Task) -> bool:
    _, pos, target = _reach_geometry(s, task)
    return manhattan(pos, target) >= 2


def _distant_decomposition(s: WorldState, task: Task) -> TaskList:
    agent, pos, target = _reach_geometry(s, task)
    return (move(closing_step(pos, target), agent), task)


def _close_applicable(s: WorldState, task: Task) -> bool:
    _, pos, target = _reach_geometry(s, task)
    return manhattan(pos, target) <= 1


def _close_decomposition(s: WorldState, task: Task) -> TaskList:
    agent, pos, target = _reach_geometry(s, task)
    if pos == target:
        return ()
    return (move(closing_step(pos, target), agent),)


NAVIGATE_DISTANT = MethodDef("navigate-distant", REACH, _distant_applicable, _distant_decomposition)
NAVIGATE_CLOSE = MethodDef("navigate-close", REACH, _close_applicable, _close_decomposition)


def navigation_domain(name: str) -> Domain:
    return Domain(
        name=name,
        actions={d: _move_action(d) for d in DIRECTIONS},
        methods=(NAVIGATE_DISTANT, NAVIGATE_CLOSE),
    )


def alternatives(s: WorldState, agent: int, ds: DirectiveSet, domain: Domain) -> tuple[Task, ...]:
    """Applicable moves whose one-step projection violates no directive.

    ``stay`` is not a candidate: it never makes progress, and allowing it
    would let the distance criterion pick it over every sidestep.
    """
    found = []
    for direction in MOVES:
        task = move(direction, agent)
        nxt = apply_action(domain, s, task)
        if nxt is not None and ds.first_violated(nxt) is None:
            found.append(task)
    return tuple(found)


def best_alternative(s: WorldState, goal: Goal, candidates: tuple[Task, ...], domain: Domain) -> Optional[Task]:
    """The candidate whose successor is closest to the goal; ties go to priority order."""
    best, best_key = None, None
    for task in candidates:
        nxt = apply_action(domain, s, task)
        key = (distance(nxt, goal), PRIORITY.index(task.head))
        if best_key is None or key < best_key:
            best, best_key = task, key
    return best


def _with_reach(tasks: TaskList, goal: Goal) -> TaskList:
    if any(t.head == REACH and t.args[0] == goal.agent for t in tasks):
        return tasks
    return (reach(goal.agent, goal.destination),) + tasks


def goal_of(s: WorldState, agent: int) -> Optional[Goal]:
    dest = s.agents[agent].goal
    return None if dest is None else Goal(agent, dest)


def repair_by_distance(
    ds: DirectiveSet,
    domain: Domain,
    s: WorldState,
    tasks: TaskList,
    a0: Task,
) -> TaskList:
    """Swap the violating first action for the best safe alternative, or abandon.

    Abandons (returns ``()``) when the agent has no goal, when the goal cell
    itself is covered by a hazard, or when no safe alternative exists.
    """
    agent = a0.args[0]
    goal = goal_of(s, agent)
    if goal is None or s.in_zone(s.map.destination(goal.destination)):
        return ()
    choice = best_alternative(s, goal, alternatives(s, agent, ds, domain), domain)
    if choice is None:
        return ()
    return (choice,) + _with_reach(tasks[1:], goal)
