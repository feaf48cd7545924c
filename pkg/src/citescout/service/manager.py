"""Session lifecycle: background runs, steering decisions, crash recovery.

States move running -> awaiting_decision -> running|finished; finished is
terminal. A run executes on a worker thread; every turn is appended to the
store as it happens, and the run's suggestion is persisted before the state
flips to awaiting_decision. Decisions are idempotent via a client token.
On restart, awaiting_decision and finished sessions are restored as-is and
sessions that crashed mid-run are relaunched.
"""
from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field, replace
from typing import Callable

from ..agent import (
    ExcerptTask,
    Limits,
    PromptConfig,
    Session,
    TERMINAL_SELECTED,
    run_session,
    trajectory_to_dict,
)
from ..corpus import CorpusBackend
from ..errors import BadConfig, UnknownSession, WrongState
from ..gateway import Gateway, ModelProfile
from .store import SessionStore

STATE_RUNNING = "running"
STATE_AWAITING = "awaiting_decision"
STATE_FINISHED = "finished"

DECISION_CONTINUE = "continue"
DECISION_STOP = "stop"


@dataclass
class ManagedSession:
    session_id: str
    task: ExcerptTask
    agent: Session
    state: str = STATE_RUNNING
    current_run: int = 0
    suggestions: list[str] = field(default_factory=list)
    stop_reason: str | None = None
    turns: list[dict] = field(default_factory=list)
    decision_tokens: set[str] = field(default_factory=set)
    lock: threading.Lock = field(default_factory=threading.Lock)
    thread: threading.Thread | None = None

    def handle(self) -> dict:
        return {
            "session_id": self.session_id,
            "state": self.state,
            "current_run": self.current_run,
            "suggestions": list(self.suggestions),
            "stop_reason": self.stop_reason,
            "item_id": self.task.item_id,
            "turn_count": len(self.turns),
        }

    def state_payload(self) -> dict:
        return {
            "session_id": self.session_id,
            "state": self.state,
            "current_run": self.current_run,
            "suggestions": list(self.suggestions),
            "stop_reason": self.stop_reason,
            "item_id": self.task.item_id,
        }


class SessionManager:
    def __init__(
        self,
        store: SessionStore,
        corpus: CorpusBackend,
        gateway_factory: Callable[[ModelProfile], Gateway],
        profiles: dict[str, ModelProfile],
        limits: Limits = Limits(),
        prompt_config: PromptConfig = PromptConfig(),
    ):
        self.store = store
        self.corpus = corpus
        self.gateway_factory = gateway_factory
        self.profiles = profiles
        self.limits = limits
        self.prompt_config = prompt_config
        self._sessions: dict[str, ManagedSession] = {}
        self._registry_lock = threading.Lock()

    # -- lifecycle ----------------------------------------------------------

    def create_session(self, payload: dict) -> dict:
        profile_name = payload.get("profile")
        profile = self.profiles.get(profile_name or "")
        if profile is None:
            raise BadConfig(f"unknown profile {profile_name!r}")
        excerpt = payload.get("excerpt") or ""
        if not excerpt.strip():
            raise BadConfig("excerpt must be non-empty")
        max_steps = payload.get("max_steps")
        limits = self.limits
        if max_steps is not None:
            if not isinstance(max_steps, int) or max_steps < 1:
                raise BadConfig("max_steps must be a positive integer")
            limits = replace(limits, max_steps=max_steps)

        session_id = uuid.uuid4().hex
        task = ExcerptTask(
            item_id=payload.get("item_id") or session_id,
            excerpt=excerpt,
            source_title=payload.get("source_title"),
            source_paper_id=payload.get("source_paper_id"),
        )
        managed = ManagedSession(
            session_id=session_id,
            task=task,
            agent=Session(
                corpus=self.corpus,
                gateway=self.gateway_factory(profile),
                profile=profile,
                prompt_config=self.prompt_config,
                limits=limits,
            ),
        )
        self.store.create(session_id, {**payload, "item_id": task.item_id})
        self.store.save_state(session_id, managed.state_payload())
        with self._registry_lock:
            self._sessions[session_id] = managed
        self._launch_run(managed)
        return managed.handle()

    def get(self, session_id: str) -> dict:
        return self._managed(session_id).handle()

    def turns(self, session_id: str, since: int = 0) -> list[dict]:
        managed = self._managed(session_id)
        with managed.lock:
            return [row for row in managed.turns if row["index"] >= since]

    def decide(
        self,
        session_id: str,
        decision: str,
        verdict: str | None = None,
        token: str | None = None,
    ) -> dict:
        managed = self._managed(session_id)
        with managed.lock:
            if token and token in managed.decision_tokens:
                return managed.handle()
            if managed.state != STATE_AWAITING:
                raise WrongState(
                    f"session is {managed.state}, not {STATE_AWAITING}"
                )
            if decision not in (DECISION_CONTINUE, DECISION_STOP):
                raise BadConfig("decision must be 'continue' or 'stop'")
            if verdict not in (None, "accept", "reject"):
                raise BadConfig("verdict must be 'accept' or 'reject'")
            if token:
                managed.decision_tokens.add(token)
            self.store.append_decision(
                session_id,
                {
                    "token": token,
                    "decision": decision,
                    "verdict": verdict,
                    "paper_id": managed.suggestions[-1] if managed.suggestions else None,
                    "run_index": managed.current_run,
                },
            )
            if decision == DECISION_STOP:
                managed.state = STATE_FINISHED
                managed.stop_reason = "user_stop"
                self.store.save_state(session_id, managed.state_payload())
                self.store.rebuild_annotations()
                return managed.handle()
            managed.current_run += 1
            managed.state = STATE_RUNNING
            self.store.save_state(session_id, managed.state_payload())
            if verdict is not None:
                self.store.rebuild_annotations()
        self._launch_run(managed)
        return managed.handle()

    # -- recovery -----------------------------------------------------------

    def restore(self) -> list[str]:
        """Load persisted sessions; relaunch any that crashed mid-run."""
        restored = []
        for session_id in self.store.list_sessions():
            if session_id in self._sessions:
                continue
            state = self.store.load_state(session_id)
            config = self.store.load_config(session_id)
            profile = self.profiles.get(config.get("profile") or "")
            if profile is None:
                continue
            task = ExcerptTask(
                item_id=state.get("item_id", session_id),
                excerpt=config.get("excerpt", ""),
                source_title=config.get("source_title"),
                source_paper_id=config.get("source_paper_id"),
            )
            managed = ManagedSession(
                session_id=session_id,
                task=task,
                agent=Session(
                    corpus=self.corpus,
                    gateway=self.gateway_factory(profile),
                    profile=profile,
                    prompt_config=self.prompt_config,
                    limits=self.limits,
                ),
                state=state["state"],
                current_run=state["current_run"],
                suggestions=list(state.get("suggestions", [])),
                stop_reason=state.get("stop_reason"),
                turns=self.store.load_turns(session_id),
                decision_tokens={
                    row["token"]
                    for row in self.store.load_decisions(session_id)
                    if row.get("token")
                },
            )
            with self._registry_lock:
                self._sessions[session_id] = managed
            if managed.state == STATE_RUNNING:
                self._launch_run(managed)
            restored.append(session_id)
        return restored

    def wait_idle(self, timeout: float = 30.0) -> None:
        """Join all worker threads; test and shutdown aid."""
        with self._registry_lock:
            sessions = list(self._sessions.values())
        for managed in sessions:
            thread = managed.thread
            if thread is not None and thread.is_alive():
                thread.join(timeout)

    # -- internals ------------------------------------------------------------

    def _managed(self, session_id: str) -> ManagedSession:
        with self._registry_lock:
            managed = self._sessions.get(session_id)
        if managed is None:
            raise UnknownSession(f"no session {session_id!r}")
        return managed

    def _launch_run(self, managed: ManagedSession) -> None:
        thread = threading.Thread(
            target=self._run_once, args=(managed,), daemon=True
        )
        managed.thread = thread
        thread.start()

    def _run_once(self, managed: ManagedSession) -> None:
        def on_turn(turn):
            with managed.lock:
                row = {
                    "index": len(managed.turns),
                    "run_index": managed.current_run,
                    "reason": turn.reason,
                    "action": (
                        {"name": turn.action.name, "arguments": turn.action.arguments}
                        if turn.action
                        else None
                    ),
                    "observation": turn.observation,
                    "error": turn.error,
                }
                managed.turns.append(row)
                self.store.append_turn(managed.session_id, row)

        trajectory = run_session(
            managed.agent,
            managed.task,
            run_index=managed.current_run,
            exclusions=frozenset(managed.suggestions),
            on_turn=on_turn,
        )
        with managed.lock:
            self.store.save_trajectory(
                managed.session_id,
                managed.current_run,
                trajectory_to_dict(trajectory),
            )
            if trajectory.terminal.kind == TERMINAL_SELECTED:
                managed.suggestions.append(trajectory.terminal.paper_id)
            managed.state = STATE_AWAITING
            self.store.save_state(managed.session_id, managed.state_payload())
