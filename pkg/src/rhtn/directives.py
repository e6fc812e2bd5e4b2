"""Directive sets and discrepancy detection (immediate and projected)."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Iterable, Optional, Sequence

from rhtn.errors import PreconditionViolated
from rhtn.htn import Domain, Task, apply_action


@dataclass(frozen=True)
class Directive:
    """A state predicate that is True when the state is prohibited."""

    id: str
    predicate: Callable[[Any], bool]

    def __call__(self, state: Any) -> bool:
        return bool(self.predicate(state))


class DirectiveSet(tuple):
    """Ordered, id-unique collection of directives. Order decides which one is reported."""

    def __new__(cls, directives: Iterable[Directive] = ()) -> DirectiveSet:
        items = tuple(directives)
        ids = [d.id for d in items]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate directive ids in {ids}")
        return super().__new__(cls, items)

    def by_id(self, directive_id: str) -> Directive:
        for d in self:
            if d.id == directive_id:
                return d
        raise KeyError(directive_id)

    def first_violated(self, state: Any) -> Optional[Directive]:
        for d in self:
            if d(state):
                return d
        return None


class DiscrepancyKind(str, Enum):
    IMMEDIATE = "immediate"
    PROJECTED = "projected"
    NONE = "none"


@dataclass(frozen=True)
class DiscrepancyReport:
    kind: DiscrepancyKind
    directive_id: Optional[str]
    state: Any

    def __post_init__(self) -> None:
        if (self.kind is DiscrepancyKind.NONE) != (self.directive_id is None):
            raise ValueError("directive_id must be set exactly when a discrepancy is reported")

    def __bool__(self) -> bool:
        return self.kind is not DiscrepancyKind.NONE


def check_immediate(ds: DirectiveSet, s: Any) -> DiscrepancyReport:
    d = ds.first_violated(s)
    if d is None:
        return DiscrepancyReport(DiscrepancyKind.NONE, None, s)
    return DiscrepancyReport(DiscrepancyKind.IMMEDIATE, d.id, s)


def project(domain: Domain, s: Any, pi_n: Sequence[Task]) -> Optional[Any]:
    """State after applying ``pi_n`` in order through the domain's transitions.

    Only action effects are composed; environment dynamics (respawns, the tick
    counter, random streams) are never touched. ``None`` if any step is
    inapplicable.
    """
    for task in pi_n:
        if not domain.is_primitive(task):
            raise PreconditionViolated(f"cannot project compound task {task}")
        s = apply_action(domain, s, task)
        if s is None:
            return None
    return s


def check_projected(ds: DirectiveSet, domain: Domain, s: Any, a0: Task) -> DiscrepancyReport:
    if ds.first_violated(s) is not None:
        raise PreconditionViolated("projected check requested while the current state already violates")
    nxt = project(domain, s, (a0,))
    if nxt is None:
        raise PreconditionViolated(f"{a0} is not applicable")
    d = ds.first_violated(nxt)
    if d is None:
        return DiscrepancyReport(DiscrepancyKind.NONE, None, nxt)
    return DiscrepancyReport(DiscrepancyKind.PROJECTED, d.id, nxt)
