"""Multi-run alternative suggestions with human, policy, or model steering.

Each completed run contributes at most one suggestion; run k excludes every
previously suggested paper, so the suggestion list never repeats. After each
run a controller decides whether to search for another alternative.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Protocol

from ..gateway import ChatMessage, Gateway, ModelProfile, ROLE_SYSTEM, ROLE_USER
from .session import (
    ExcerptTask,
    Session,
    TERMINAL_SELECTED,
    Trajectory,
    run_session,
)

STOP_USER = "user_stop"
STOP_AGENT = "agent_stop"
STOP_RUN_LIMIT = "run_limit"


@dataclass
class SuggestionSet:
    excerpt_ref: str
    suggestions: list[str] = field(default_factory=list)
    stop_reason: str = STOP_RUN_LIMIT
    trajectories: list[Trajectory] = field(default_factory=list)


class StopController(Protocol):
    """Decides after each run whether to search for another alternative."""

    stop_reason: str

    def decide(self, so_far: SuggestionSet) -> bool: ...


class FixedRunsController:
    """Run a fixed number of times, no questions asked."""

    stop_reason = STOP_RUN_LIMIT

    def __init__(self, runs: int):
        if runs < 1:
            raise ValueError("runs must be >= 1")
        self.runs = runs

    def decide(self, so_far: SuggestionSet) -> bool:
        return len(so_far.trajectories) < self.runs


class InteractiveController:
    """Asks the operator on stdin after each run."""

    stop_reason = STOP_USER

    def __init__(
        self,
        ask: Callable[[str], str] | None = None,
        out: Callable[[str], None] | None = None,
    ):
        self.ask = ask
        self.out = out

    def decide(self, so_far: SuggestionSet) -> bool:
        out = self.out or print
        ask = self.ask or input
        if so_far.suggestions:
            out(f"Suggestions so far: {', '.join(so_far.suggestions)}")
        else:
            out("No suggestion from this run.")
        answer = ask("Search for another alternative reference? [y/N] ")
        return answer.strip().lower().startswith("y")


class AgentDecidesController:
    """Lets the model answer a yes/no continuation question after each run."""

    stop_reason = STOP_AGENT

    _QUESTION = (
        "You suggested the following reference(s) for the excerpt: {suggestions}. "
        "Would suggesting one more alternative reference meaningfully help the "
        "reader? Answer with a single word: yes or no."
    )

    def __init__(self, gateway: Gateway, profile: ModelProfile):
        self.gateway = gateway
        self.profile = profile

    def decide(self, so_far: SuggestionSet) -> bool:
        question = self._QUESTION.format(
            suggestions=", ".join(so_far.suggestions) or "none"
        )
        text, _ = self.gateway.complete(
            self.profile,
            [
                ChatMessage(ROLE_SYSTEM, "You decide whether to keep searching."),
                ChatMessage(ROLE_USER, question),
            ],
        )
        lowered = text.lower()
        yes = lowered.find("yes")
        no = lowered.find("no")
        if yes < 0:
            return False
        return no < 0 or yes < no


def run_alternatives(
    session: Session,
    task: ExcerptTask,
    controller: StopController,
    max_runs: int = 10,
) -> SuggestionSet:
    result = SuggestionSet(excerpt_ref=task.item_id)
    for run_index in range(max_runs):
        trajectory = run_session(
            session,
            task,
            run_index=run_index,
            exclusions=frozenset(result.suggestions),
        )
        result.trajectories.append(trajectory)
        if trajectory.terminal.kind == TERMINAL_SELECTED:
            result.suggestions.append(trajectory.terminal.paper_id)
        if not controller.decide(result):
            result.stop_reason = controller.stop_reason
            return result
    result.stop_reason = STOP_RUN_LIMIT
    return result
