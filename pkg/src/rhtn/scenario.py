"""Hand-written map files (JSON).

Schema (all coordinates are ``[x, y]`` with ``y`` growing downward)::

    {
      "width": 20,
      "height": 20,
      "start": [12, 12],
      "budget": 38,
      "zones": [{"id": 0, "anchor": [12, 17], "size": 2}, ...],
      "destinations": [{"name": "brown", "cell": [2, 2]}, ...],
      "goals": [{"agent": 0, "destination": "brown"}, ...]
    }

``budget`` defaults to 38 and ``goals`` to an empty list. Unknown keys are
rejected so typos do not pass silently.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from rhtn.domains.navigation import Goal
from rhtn.errors import ScenarioError
from rhtn.gridworld import BUDGET, GridMap, Zone

_KEYS = {"width", "height", "start", "budget", "zones", "destinations", "goals"}


@dataclass(frozen=True)
class Scenario:
    map: GridMap
    budget: int = BUDGET
    goals: tuple[Goal, ...] = ()


def _cell(value: Any, what: str) -> tuple[int, int]:
    if not (isinstance(value, list) and len(value) == 2 and all(isinstance(v, int) for v in value)):
        raise ScenarioError(f"{what} must be a [x, y] pair of integers, got {value!r}")
    return (value[0], value[1])


def from_dict(data: dict) -> Scenario:
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a JSON object")
    unknown = set(data) - _KEYS
    if unknown:
        raise ScenarioError(f"unknown scenario keys: {sorted(unknown)}")
    try:
        width, height = int(data["width"]), int(data["height"])
        start = _cell(data["start"], "start")
        zones = tuple(
            Zone(int(z["id"]), _cell(z["anchor"], f"zone {z.get('id')} anchor"), int(z.get("size", 2)))
            for z in data.get("zones", [])
        )
        dests = tuple((str(d["name"]), _cell(d["cell"], f"destination {d.get('name')}")) for d in data["destinations"])
        goals = tuple(Goal(int(g["agent"]), str(g["destination"])) for g in data.get("goals", []))
        budget = int(data.get("budget", BUDGET))
    except (KeyError, TypeError) as exc:
        raise ScenarioError(f"malformed scenario: {exc}") from exc
    grid = GridMap(width, height, zones, dests, start)
    validate(grid, goals)
    return Scenario(grid, budget, goals)


def validate(grid: GridMap, goals: tuple[Goal, ...] = ()) -> None:
    if not grid.in_bounds(grid.start):
        raise ScenarioError(f"start {grid.start} is off the grid")
    for z in grid.zones:
        if not all(grid.in_bounds(c) for c in z.cells()):
            raise ScenarioError(f"zone {z.id} leaves the grid")
    for name, cell in grid.destinations:
        if not grid.in_bounds(cell):
            raise ScenarioError(f"destination {name} is off the grid")
    names = grid.destination_names
    if len(set(names)) != len(names):
        raise ScenarioError("destination names must be unique")
    if len({z.id for z in grid.zones}) != len(grid.zones):
        raise ScenarioError("zone ids must be unique")
    for g in goals:
        if g.destination not in names:
            raise ScenarioError(f"goal for agent {g.agent} names unknown destination {g.destination!r}")
    if sorted(g.agent for g in goals) != list(range(len(goals))):
        raise ScenarioError("goal agents must be numbered 0..n-1")


def to_dict(scenario: Scenario) -> dict:
    grid = scenario.map
    return {
        "width": grid.width,
        "height": grid.height,
        "start": list(grid.start),
        "budget": scenario.budget,
        "zones": [{"id": z.id, "anchor": list(z.anchor), "size": z.size} for z in grid.zones],
        "destinations": [{"name": n, "cell": list(c)} for n, c in grid.destinations],
        "goals": [{"agent": g.agent, "destination": g.destination} for g in scenario.goals],
    }


def loads(text: str) -> Scenario:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"scenario is not valid JSON: {exc}") from exc
    return from_dict(data)


def dumps(scenario: Scenario) -> str:
    return json.dumps(to_dict(scenario), indent=2) + "\n"


def load(path: str | Path) -> Scenario:
    return loads(Path(path).read_text(encoding="utf-8"))


def save(scenario: Scenario, path: str | Path) -> None:
    Path(path).write_text(dumps(scenario), encoding="utf-8")
