"""Agentic citation-search loop: prompts, actions, sessions, alternatives."""
from .actions import (
    ACTION_SPECS,
    ActionRequest,
    parse_turn,
    render_turn,
    validate_action,
)
from .alternatives import (
    AgentDecidesController,
    FixedRunsController,
    InteractiveController,
    STOP_AGENT,
    STOP_RUN_LIMIT,
    STOP_USER,
    StopController,
    SuggestionSet,
    run_alternatives,
)
from .prompts import (
    DEFAULT_ACTIONS,
    PromptConfig,
    READ_MODE_ACTIONS,
    assemble_system_prompt,
    build_task_message,
    exclusion_addendum,
)
from .session import (
    AgentTurn,
    ExcerptTask,
    Limits,
    Session,
    TERMINAL_ERROR,
    TERMINAL_GAVE_UP,
    TERMINAL_SELECTED,
    TERMINAL_STEP_LIMIT,
    Terminal,
    Trajectory,
    dispatch,
    load_trajectory,
    rebuild_messages,
    run_session,
    save_trajectory,
    trajectory_from_dict,
    trajectory_to_dict,
)

__all__ = [
    "ACTION_SPECS",
    "ActionRequest",
    "AgentDecidesController",
    "AgentTurn",
    "DEFAULT_ACTIONS",
    "ExcerptTask",
    "FixedRunsController",
    "InteractiveController",
    "Limits",
    "PromptConfig",
    "READ_MODE_ACTIONS",
    "STOP_AGENT",
    "STOP_RUN_LIMIT",
    "STOP_USER",
    "Session",
    "StopController",
    "SuggestionSet",
    "TERMINAL_ERROR",
    "TERMINAL_GAVE_UP",
    "TERMINAL_SELECTED",
    "TERMINAL_STEP_LIMIT",
    "Terminal",
    "Trajectory",
    "assemble_system_prompt",
    "build_task_message",
    "dispatch",
    "exclusion_addendum",
    "load_trajectory",
    "parse_turn",
    "rebuild_messages",
    "render_turn",
    "run_alternatives",
    "run_session",
    "save_trajectory",
    "trajectory_from_dict",
    "trajectory_to_dict",
    "validate_action",
]
