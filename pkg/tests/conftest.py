from __future__ import annotations

import random
from collections import deque
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

import pytest
from hypothesis import settings

from rhtn import scenario
from rhtn.gridworld import BUDGET, MOVES, ORESCHU, GridMap, World, WorldState, Zone, initial_state, offset

ROOT = Path(__file__).resolve().parent.parent
EXAMPLE_MAP = ROOT / "scenarios" / "uav_example.json"


def make_map(
    width: int = 10,
    height: int = 10,
    zones: Sequence[tuple[int, int]] = (),
    destinations: Optional[dict[str, tuple[int, int]]] = None,
    start: tuple[int, int] = (0, 0),
) -> GridMap:
    dests = destinations if destinations is not None else {"brown": (width - 1, height - 1)}
    return GridMap(
        width=width,
        height=height,
        zones=tuple(Zone(i, a, 2) for i, a in enumerate(zones)),
        destinations=tuple(dests.items()),
        start=start,
    )


def make_state(
    grid: GridMap,
    positions: Sequence[tuple[int, int]] = (),
    goals: Optional[Sequence[Optional[str]]] = None,
    rules: str = ORESCHU,
    budget: int = BUDGET,
) -> WorldState:
    positions = list(positions) or [grid.start]
    s = initial_state(grid, len(positions), rules, goals, budget)
    return replace(s, agents=tuple(replace(a, pos=positions[a.id]) for a in s.agents))


def make_world(state: WorldState, seed: int = 0, p: int = 0) -> World:
    return World(state, random.Random(seed), p)


def bfs_length(grid: GridMap, src, dst, blocked=frozenset()) -> Optional[int]:
    """Shortest 4-connected path length avoiding ``blocked`` cells."""
    seen = {src: 0}
    queue = deque([src])
    while queue:
        cell = queue.popleft()
        if cell == dst:
            return seen[cell]
        for d in MOVES:
            nxt = offset(cell, d)
            if grid.in_bounds(nxt) and nxt not in blocked and nxt not in seen:
                seen[nxt] = seen[cell] + 1
                queue.append(nxt)
    return None


@pytest.fixture
def example_map():
    return scenario.load(EXAMPLE_MAP)


settings.register_profile("repo", deadline=None, print_blob=True)
settings.load_profile("repo")

_criteria: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_runtest_setup(item):
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        item.user_properties.append(("criterion", marker.args[0]))


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    if report.when == "call" or (report.when == "setup" and report.failed):
        _criteria[props["criterion"]] = ("PASS" if report.passed else "FAIL", props.get("measured", ""))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        verdict, measured = _criteria[number]
        terminalreporter.write_line(f"criterion {number:2d}: {verdict}  {measured}")
