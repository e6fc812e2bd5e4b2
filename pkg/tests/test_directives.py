from __future__ import annotations

import itertools
import pickle

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_map, make_state
from rhtn.directives import (
    Directive,
    DirectiveSet,
    DiscrepancyKind,
    DiscrepancyReport,
    check_immediate,
    check_projected,
    project,
)
from rhtn.domains import monster, oreschu
from rhtn.domains.navigation import reach
from rhtn.errors import PreconditionViolated
from rhtn.gridworld import DIRECTIONS, MONSTER
from rhtn.htn import Task, apply_action

DOMAIN = oreschu.DOMAIN
steps = st.lists(st.sampled_from(sorted(DIRECTIONS)), max_size=6)


def _example_zones():
    # zone 7 anchored at (10,11); the others spread out so they never touch it
    anchors = [(0, 0), (3, 0), (6, 0), (9, 0), (12, 0), (15, 0), (0, 3), (10, 11), (0, 17), (17, 17)]
    return make_map(20, 20, zones=anchors)


def test_agent_inside_zone_seven_violates_its_directive():
    grid = _example_zones()
    s = make_state(grid, [(5, 5)] * 5 + [(10, 11)])
    ds = oreschu.redzone_directives(grid)
    report = check_immediate(ds, s)
    assert report.kind is DiscrepancyKind.IMMEDIATE and report.directive_id == "redzone7"


def test_clean_state_reports_none():
    grid = _example_zones()
    report = check_immediate(oreschu.redzone_directives(grid), make_state(grid, [(5, 5)]))
    assert report.kind is DiscrepancyKind.NONE and report.directive_id is None
    assert not report


def test_first_violated_directive_in_set_order_is_reported():
    grid = make_map(20, 20, zones=[(0, 0), (3, 0), (6, 0), (9, 0), (12, 0), (15, 0)])
    s = make_state(grid, [(3, 0), (15, 1)])
    ds = oreschu.redzone_directives(grid)
    assert check_immediate(ds, s).directive_id == "redzone1"
    reordered = DirectiveSet(reversed(ds))
    assert check_immediate(reordered, s).directive_id == "redzone5"


def test_directive_ids_must_be_unique():
    d = Directive("x", lambda s: False)
    with pytest.raises(ValueError):
        DirectiveSet([d, d])


def test_report_requires_id_exactly_when_discrepant():
    with pytest.raises(ValueError):
        DiscrepancyReport(DiscrepancyKind.NONE, "redzone0", None)
    with pytest.raises(ValueError):
        DiscrepancyReport(DiscrepancyKind.PROJECTED, None, None)


def test_by_id_lookup():
    ds = oreschu.redzone_directives(make_map(zones=[(0, 0), (5, 5)]))
    assert ds.by_id("redzone1").id == "redzone1"
    with pytest.raises(KeyError):
        ds.by_id("redzone9")


def test_immediate_matches_point_in_rectangle_on_every_5x5_layout():
    # every pair of zone anchors x every agent cell on a 5x5 grid
    anchors = list(itertools.product(range(4), repeat=2))
    cells = list(itertools.product(range(5), repeat=2))
    checked = 0
    for a, b in itertools.combinations(anchors, 2):
        grid = make_map(5, 5, zones=[a, b])
        ds = oreschu.redzone_directives(grid)
        for cell in cells:
            inside = any(ax <= cell[0] < ax + 2 and ay <= cell[1] < ay + 2 for ax, ay in (a, b))
            report = check_immediate(ds, make_state(grid, [cell]))
            assert (report.kind is DiscrepancyKind.IMMEDIATE) == inside
            checked += 1
    assert checked == 120 * 25


class TestProject:
    def test_single_step_equals_transition(self):
        s = make_state(make_map(), [(4, 4)])
        assert project(DOMAIN, s, (Task("up", (0,)),)) == apply_action(DOMAIN, s, Task("up", (0,)))

    def test_empty_projection_is_identity(self):
        s = make_state(make_map(), [(4, 4)])
        assert project(DOMAIN, s, ()) is s

    def test_two_ups_leave_tick_and_zones_alone(self):
        s = make_state(make_map(zones=[(6, 6)]), [(4, 4)])
        nxt = project(DOMAIN, s, (Task("up", (0,)), Task("up", (0,))))
        assert nxt.agents[0].pos == (4, 2)
        assert nxt.tick == s.tick and nxt.zones == s.zones

    def test_inapplicable_step_yields_none(self):
        s = make_state(make_map(), [(0, 1)])
        assert project(DOMAIN, s, (Task("up", (0,)), Task("up", (0,)))) is None

    def test_compound_task_is_rejected(self):
        s = make_state(make_map(), [(4, 4)])
        with pytest.raises(PreconditionViolated):
            project(DOMAIN, s, (reach(0, "brown"),))

    @settings(max_examples=1000)
    @given(x=st.integers(0, 9), y=st.integers(0, 9), p=steps, q=steps)
    def test_composition_law(self, x, y, p, q):
        s = make_state(make_map(zones=[(6, 6)]), [(x, y)])
        pt = tuple(Task(d, (0,)) for d in p)
        qt = tuple(Task(d, (0,)) for d in q)
        whole = project(DOMAIN, s, pt + qt)
        mid = project(DOMAIN, s, pt)
        if mid is not None and whole is not None:
            assert whole == project(DOMAIN, mid, qt)

    @settings(max_examples=300)
    @given(x=st.integers(0, 9), y=st.integers(0, 9), p=steps)
    def test_projection_never_touches_clock_or_input(self, x, y, p):
        s = make_state(make_map(zones=[(6, 6)]), [(x, y)])
        before = pickle.dumps(s)
        out = project(DOMAIN, s, tuple(Task(d, (0,)) for d in p))
        assert pickle.dumps(s) == before
        if out is not None:
            assert (out.tick, out.zones, out.violations, out.penalties) == (s.tick, s.zones, s.violations, s.penalties)


class TestCheckProjected:
    def test_step_onto_monster_is_projected(self):
        grid = make_map(zones=[(5, 5)])
        s = make_state(grid, [(4, 5)], rules=MONSTER)
        report = check_projected(monster.monster_directive(), monster.DOMAIN, s, Task("right", (0,)))
        assert report.kind is DiscrepancyKind.PROJECTED and report.directive_id == "monster"

    def test_safe_step_is_none(self):
        grid = make_map(zones=[(5, 5)])
        s = make_state(grid, [(4, 5)])
        assert not check_projected(oreschu.redzone_directives(grid), DOMAIN, s, Task("up", (0,)))

    def test_requires_clean_current_state(self):
        grid = make_map(zones=[(5, 5)])
        s = make_state(grid, [(5, 5)])
        with pytest.raises(PreconditionViolated):
            check_projected(oreschu.redzone_directives(grid), DOMAIN, s, Task("up", (0,)))

    def test_requires_applicable_action(self):
        grid = make_map(zones=[(5, 5)])
        s = make_state(grid, [(0, 0)])
        with pytest.raises(PreconditionViolated):
            check_projected(oreschu.redzone_directives(grid), DOMAIN, s, Task("up", (0,)))

    @settings(max_examples=500)
    @given(x=st.integers(0, 9), y=st.integers(0, 9), d=st.sampled_from(sorted(DIRECTIONS)))
    def test_agrees_with_immediate_check_of_projection(self, x, y, d):
        grid = make_map(zones=[(2, 2), (6, 6)])
        ds = oreschu.redzone_directives(grid)
        s = make_state(grid, [(x, y)])
        a0 = Task(d, (0,))
        nxt = project(DOMAIN, s, (a0,))
        if check_immediate(ds, s) or nxt is None:
            return
        projected = check_projected(ds, DOMAIN, s, a0)
        immediate = check_immediate(ds, nxt)
        assert bool(projected) == bool(immediate)
        assert projected.directive_id == immediate.directive_id
