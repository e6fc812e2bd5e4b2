"""Domain plugins.

A plugin bundles what the harness needs to run a domain: the HTN model
(actions and methods in order), a directive-set constructor, the adaptive
repair hooks, the simulator rules and the number of agents.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from rhtn.directives import DirectiveSet
from rhtn.domains import monster, oreschu
from rhtn.domains.navigation import Goal
from rhtn.gridworld import MONSTER, ORESCHU, GridMap, WorldState
from rhtn.htn import Domain
from rhtn.planner import RepairHooks


@dataclass(frozen=True)
class DomainPlugin:
    name: str
    domain: Domain
    rules: str
    n_agents: int
    directives: Callable[[GridMap], DirectiveSet]
    hooks: Callable[[DirectiveSet], RepairHooks]

    def goal_reached(self, s: WorldState, goal: Goal) -> bool:
        return s.agents[goal.agent].pos == s.map.destination(goal.destination)


PLUGINS: dict[str, DomainPlugin] = {
    ORESCHU: DomainPlugin(
        name=ORESCHU,
        domain=oreschu.DOMAIN,
        rules=ORESCHU,
        n_agents=oreschu.N_AGENTS,
        directives=oreschu.redzone_directives,
        hooks=oreschu.oreschu_hooks,
    ),
    MONSTER: DomainPlugin(
        name=MONSTER,
        domain=monster.DOMAIN,
        rules=MONSTER,
        n_agents=1,
        directives=lambda grid: monster.monster_directive(),
        hooks=lambda ds: monster.MONSTER_HOOKS,
    ),
}


def get_plugin(name: str) -> DomainPlugin:
    try:
        return PLUGINS[name]
    except KeyError:
        raise ValueError(f"unknown domain {name!r}; choose from {sorted(PLUGINS)}") from None
