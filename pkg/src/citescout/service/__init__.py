"""Session service: HTTP app, lifecycle manager, on-disk store."""
from .app import CreateSessionRequest, DecisionRequest, create_app
from .manager import (
    DECISION_CONTINUE,
    DECISION_STOP,
    ManagedSession,
    STATE_AWAITING,
    STATE_FINISHED,
    STATE_RUNNING,
    SessionManager,
)
from .store import SessionStore

__all__ = [
    "CreateSessionRequest",
    "DECISION_CONTINUE",
    "DECISION_STOP",
    "DecisionRequest",
    "ManagedSession",
    "STATE_AWAITING",
    "STATE_FINISHED",
    "STATE_RUNNING",
    "SessionManager",
    "SessionStore",
    "create_app",
]
