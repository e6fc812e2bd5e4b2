"""Domain-agnostic HTN vocabulary: tasks, actions, methods and plans.

Inapplicability (the empty result of an action or method) is represented by
``None`` throughout. A method that applies but has nothing left to do returns
the empty tuple, which is a valid task list.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Iterable, Optional, Sequence

from rhtn.errors import TaskMismatch, UnknownAction


class TaskKind(str, Enum):
    PRIMITIVE = "primitive"
    COMPOUND = "compound"


@dataclass(frozen=True)
class TaskName:
    name: str
    kind: TaskKind

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("task name must be nonempty")


@dataclass(frozen=True)
class Task:
    """A grounded task such as ``reach(0, 'brown')`` or ``up(3)``."""

    head: str
    args: tuple[Any, ...] = ()

    def __str__(self) -> str:
        return f"{self.head}({','.join(str(a) for a in self.args)})"


TaskList = tuple[Task, ...]


def is_ground(task: Task) -> bool:
    """True when no argument is a ``?variable`` placeholder."""

    def ground(value: Any) -> bool:
        if isinstance(value, str):
            return not value.startswith("?")
        if isinstance(value, tuple):
            return all(ground(v) for v in value)
        return value is not None

    return all(ground(a) for a in task.args)


def concat(front: Sequence[Task], back: Sequence[Task]) -> TaskList:
    return tuple(front) + tuple(back)


@dataclass(frozen=True)
class ActionDef:
    head: str
    applicable: Callable[[Any, tuple], bool]
    transition: Callable[[Any, tuple], Any]


@dataclass(frozen=True)
class MethodDef:
    name: str
    task: str
    applicable: Callable[[Any, Task], bool]
    decomposition: Callable[[Any, Task], TaskList]


@dataclass(frozen=True)
class PlanStep:
    task: Task
    tick: int  # identifies the pre-state the action was executed in


@dataclass(frozen=True)
class Plan:
    steps: tuple[PlanStep, ...] = ()

    def append(self, task: Task, tick: int) -> Plan:
        return Plan(self.steps + (PlanStep(task, tick),))

    @property
    def actions(self) -> TaskList:
        return tuple(s.task for s in self.steps)

    def __len__(self) -> int:
        return len(self.steps)


@dataclass(frozen=True)
class Domain:
    """An HTN model: actions keyed by head plus methods in registration order."""

    name: str
    actions: dict[str, ActionDef] = field(default_factory=dict)
    methods: tuple[MethodDef, ...] = ()

    def __post_init__(self) -> None:
        compound = {m.task for m in self.methods}
        clash = compound & set(self.actions)
        if clash:
            raise ValueError(f"task names used as both primitive and compound: {sorted(clash)}")

    @property
    def vocabulary(self) -> tuple[TaskName, ...]:
        names = [TaskName(h, TaskKind.PRIMITIVE) for h in self.actions]
        seen = set()
        for m in self.methods:
            if m.task not in seen:
                seen.add(m.task)
                names.append(TaskName(m.task, TaskKind.COMPOUND))
        return tuple(names)

    def is_primitive(self, task: Task) -> bool:
        return task.head in self.actions

    def knows(self, task: Task) -> bool:
        return task.head in self.actions or any(m.task == task.head for m in self.methods)

    def methods_for(self, task: Task) -> Iterable[MethodDef]:
        return (m for m in self.methods if m.task == task.head)


def apply_action(domain: Domain, state: Any, action: Task) -> Optional[Any]:
    """Return the successor state, or ``None`` if the action is inapplicable."""
    try:
        adef = domain.actions[action.head]
    except KeyError:
        raise UnknownAction(action.head) from None
    if not adef.applicable(state, action.args):
        return None
    return adef.transition(state, action.args)


def decompose(method: MethodDef, state: Any, task: Task) -> Optional[TaskList]:
    if task.head != method.task:
        raise TaskMismatch(f"{method.name} decomposes {method.task}, not {task.head}")
    if not method.applicable(state, task):
        return None
    return tuple(method.decomposition(state, task))
