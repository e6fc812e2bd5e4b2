"""Exception types shared across the planner and simulator."""


class RHTNError(Exception):
    """Base class for every error raised by this package."""


class UnknownAction(RHTNError, KeyError):
    """A primitive task head has no registered action (malformed domain)."""


class TaskMismatch(RHTNError, ValueError):
    """A method was asked to decompose a task it is not registered for."""


class PreconditionViolated(RHTNError):
    """A caller broke an operation's ordering contract."""


class RecursionLimitExceeded(RHTNError):
    """The planner exceeded its hard decomposition depth."""


class GenerationExhausted(RHTNError):
    """Map generation could not satisfy its constraints."""


class InactiveAgent(RHTNError):
    """A move was requested for an agent that can no longer act."""


class ScenarioError(RHTNError, ValueError):
    """A scenario file is malformed."""
