"""Online rebellious HTN planning.

The search follows SHOP-style total-order decomposition, but every primitive
step is checked against the directive set before it is executed, and the
action really runs in the environment (there is no offline plan). Because
executed actions cannot be undone, method backtracking is only possible
across decomposition attempts that have not executed anything yet.

:func:`rseek_steps` is the generator form: it yields each action right after
executing it, so a driver can interleave several agents within one tick.
:func:`rseek_plan` and :func:`rhtn` run it to completion.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Generator, Iterator, Optional, Protocol, Sequence

from rhtn.directives import Directive, DirectiveSet
from rhtn.errors import PreconditionViolated, RecursionLimitExceeded, UnknownAction
from rhtn.htn import Domain, Plan, Task, TaskList, apply_action, decompose

log = logging.getLogger(__name__)

MAX_DEPTH = 10_000


class Policy(str, Enum):
    COMPLIANT = "compliant"
    NONADAPTIVE = "nonadaptive"
    ADAPTIVE = "adaptive"


class Status(str, Enum):
    COMPLETED = "completed"
    ABANDONED = "abandoned"
    FAILED = "failed"
    BUDGET_EXHAUSTED = "budget_exhausted"


class ExecutionEnv(Protocol):
    """What the planner needs from the world it acts in."""

    @property
    def current_state(self) -> Any: ...

    def execute(self, task: Task) -> Any: ...

    def exhausted(self) -> bool: ...

    def violation_count(self) -> int: ...


@dataclass(frozen=True)
class RepairHooks:
    repair_state: Callable[[Directive, Any, TaskList], TaskList]
    repair_effect: Callable[[Directive, Any, TaskList, Task], TaskList]


def _abandon_state(d: Directive, s: Any, tasks: TaskList) -> TaskList:
    return ()


def _abandon_effect(d: Directive, s: Any, tasks: TaskList, a0: Task) -> TaskList:
    return ()


ABANDON = RepairHooks(_abandon_state, _abandon_effect)


@dataclass(frozen=True)
class PlanOutcome:
    status: Status
    executed: Plan
    discrepancies_incurred: int
    final_state: Any


def repair_tasks_if_needed(
    tasks: TaskList,
    s: Any,
    a0: Task,
    ds: DirectiveSet,
    hooks: RepairHooks,
    domain: Domain,
) -> TaskList:
    """Return ``tasks`` itself when nothing is violated, else the hook's repair.

    The current state is checked first; only if it is clean is ``a0``
    projected one step ahead. The first violated directive in ``ds`` order
    is the one handed to the hook.
    """
    for d in ds:
        if d(s):
            return tuple(hooks.repair_state(d, s, tasks))
    nxt = apply_action(domain, s, a0)
    if nxt is None:
        raise PreconditionViolated(f"{a0} is not applicable")
    for d in ds:
        if d(nxt):
            return tuple(hooks.repair_effect(d, s, tasks, a0))
    return tasks


def _decompositions(domain: Domain, s: Any, task: Task) -> Iterator[TaskList]:
    for method in domain.methods_for(task):
        sub = decompose(method, s, task)
        if sub is not None:
            yield sub


def rseek_steps(
    env: ExecutionEnv,
    tasks: Sequence[Task],
    plan: Plan,
    policy: Policy,
    ds: DirectiveSet,
    hooks: Optional[RepairHooks],
    domain: Domain,
    *,
    max_depth: int = MAX_DEPTH,
    max_actions: Optional[int] = None,
) -> Generator[Task, None, PlanOutcome]:
    policy = Policy(policy)
    if policy is Policy.NONADAPTIVE:
        hooks = ABANDON
    elif policy is Policy.ADAPTIVE and hooks is None:
        raise ValueError("adaptive policy needs repair hooks")
    tasks = tuple(tasks)
    for t in tasks:
        if not domain.knows(t):
            raise UnknownAction(t.head)

    start_violations = env.violation_count()
    # choice points: (remaining decompositions, tasks after the compound task)
    choices: list[tuple[Iterator[TaskList], TaskList]] = []
    depth = 0
    executed = 0

    def finish(status: Status) -> PlanOutcome:
        return PlanOutcome(status, plan, env.violation_count() - start_violations, env.current_state)

    while True:
        depth += 1
        if depth > max_depth:
            raise RecursionLimitExceeded(f"planner depth exceeded {max_depth}")

        if not tasks:
            return finish(Status.COMPLETED)
        t0, rest = tasks[0], tasks[1:]
        s = env.current_state

        if domain.is_primitive(t0):
            if apply_action(domain, s, t0) is not None:
                if policy is not Policy.COMPLIANT:
                    repaired = repair_tasks_if_needed(tasks, s, t0, ds, hooks, domain)
                    if repaired != tasks:
                        log.debug("discrepancy before %s; tasks now %s", t0, repaired)
                        if not repaired:
                            return finish(Status.ABANDONED)
                        tasks = repaired
                        continue
                if env.exhausted() or (max_actions is not None and executed >= max_actions):
                    return finish(Status.BUDGET_EXHAUSTED)
                env.execute(t0)
                executed += 1
                plan = plan.append(t0, getattr(s, "tick", len(plan)))
                choices.clear()
                yield t0
                tasks = rest
                continue
        else:
            choices.append((_decompositions(domain, s, t0), rest))

        # inapplicable action or fresh compound task: take the next untried decomposition
        while choices:
            alternatives, after = choices[-1]
            sub = next(alternatives, None)
            if sub is None:
                choices.pop()
                continue
            tasks = sub + after
            break
        else:
            return finish(Status.FAILED)


def _drive(steps: Generator[Task, None, PlanOutcome]) -> PlanOutcome:
    while True:
        try:
            next(steps)
        except StopIteration as stop:
            return stop.value


def rseek_plan(
    env: ExecutionEnv,
    tasks: Sequence[Task],
    plan: Plan,
    policy: Policy,
    ds: DirectiveSet,
    hooks: Optional[RepairHooks],
    domain: Domain,
    **kwargs: Any,
) -> PlanOutcome:
    return _drive(rseek_steps(env, tasks, plan, policy, ds, hooks, domain, **kwargs))


def rhtn(
    env: ExecutionEnv,
    tasks: Sequence[Task],
    policy: Policy,
    ds: DirectiveSet,
    hooks: Optional[RepairHooks],
    domain: Domain,
    **kwargs: Any,
) -> PlanOutcome:
    return rseek_plan(env, tasks, Plan(), policy, ds, hooks, domain, **kwargs)
