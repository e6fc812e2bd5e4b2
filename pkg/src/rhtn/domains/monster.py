"""MONSTER: one NPC, stationary monsters, fights to the death, gold locations.

The adaptive NPC is a coward: it walks around monsters and gives up on a
gold location that has a monster sitting on it.
"""

from __future__ import annotations

from rhtn.directives import Directive, DirectiveSet
from rhtn.domains.navigation import navigation_domain, repair_by_distance
from rhtn.gridworld import WorldState
from rhtn.htn import Domain, Task, TaskList
from rhtn.planner import RepairHooks

DOMAIN: Domain = navigation_domain("monster")


def _on_monster(s: WorldState) -> bool:
    return any(z.covers(a.pos) for a in s.agents for z in s.zones)


MONSTER_DIRECTIVE = Directive("monster", _on_monster)


def monster_directive() -> DirectiveSet:
    return DirectiveSet([MONSTER_DIRECTIVE])


def repair_monster_effect(d: Directive, s: WorldState, tasks: TaskList, a0: Task) -> TaskList:
    return repair_by_distance(monster_directive(), DOMAIN, s, tasks, a0)


def repair_monster_state(d: Directive, s: WorldState, tasks: TaskList) -> TaskList:
    # unreachable in practice: monsters never spawn on the NPC and the coward never steps on one
    return ()


MONSTER_HOOKS = RepairHooks(repair_monster_state, repair_monster_effect)
