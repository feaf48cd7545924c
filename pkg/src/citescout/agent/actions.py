"""Typed agent actions and one-action-per-turn response parsing.

A response carries free-text reasoning plus exactly one JSON object of the
form {"reason": ..., "action": {"name": ..., <arguments>}}. Prose outside
the JSON is folded into the reason. A bare action object ({"name": ...})
is tolerated. Parsing never guesses: zero candidates, several candidates,
or a wrong argument set each raise a distinct error so the loop can feed
a corrective observation back to the model.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..errors import MalformedArguments, MultipleActions, NoAction

SEARCH_RELEVANCE = "search_relevance"
SEARCH_CITATION_COUNT = "search_citation_count"
SELECT = "select"
FIND_IN_TEXT = "find_in_text"
ASK_FOR_MORE_CONTEXT = "ask_for_more_context"
SEARCH_TEXT_SNIPPET = "search_text_snippet"
READ = "read"
GIVE_UP = "give_up"

# Exact argument set each action requires.
ACTION_SPECS: dict[str, frozenset[str]] = {
    SEARCH_RELEVANCE: frozenset({"query"}),
    SEARCH_CITATION_COUNT: frozenset({"query"}),
    SELECT: frozenset({"paper_id"}),
    FIND_IN_TEXT: frozenset({"paper_id", "query"}),
    ASK_FOR_MORE_CONTEXT: frozenset({"query", "paper_title"}),
    SEARCH_TEXT_SNIPPET: frozenset({"query"}),
    READ: frozenset({"paper_id"}),
    GIVE_UP: frozenset(),
}

_QUERY_ARGS = ("query",)


@dataclass(frozen=True)
class ActionRequest:
    name: str
    arguments: dict[str, str] = field(default_factory=dict)

    def __getitem__(self, key: str) -> str:
        return self.arguments[key]


def validate_action(name: str, arguments: dict) -> ActionRequest:
    """Check the action name and its exact argument set."""
    spec = ACTION_SPECS.get(name)
    if spec is None:
        known = ", ".join(sorted(ACTION_SPECS))
        raise NoAction(f"unknown action {name!r}; known actions: {known}")
    provided = set(arguments)
    missing = sorted(spec - provided)
    unexpected = sorted(provided - spec)
    if missing or unexpected:
        parts = []
        if missing:
            parts.append(f"missing {missing}")
        if unexpected:
            parts.append(f"unexpected {unexpected}")
        raise MalformedArguments(f"{name}: {'; '.join(parts)}")
    for key, value in arguments.items():
        if not isinstance(value, str):
            raise MalformedArguments(f"{name}: argument {key!r} must be a string")
        if key in _QUERY_ARGS and not value.strip():
            raise MalformedArguments(f"{name}: query must be non-empty")
    return ActionRequest(name=name, arguments=dict(arguments))


def parse_turn(raw: str) -> tuple[str, ActionRequest]:
    """Extract (reason, action) from a raw model response."""
    candidates: list[tuple[dict, int, int]] = []
    decoder = json.JSONDecoder()
    i = 0
    while True:
        start = raw.find("{", i)
        if start < 0:
            break
        try:
            value, offset = decoder.raw_decode(raw[start:])
        except json.JSONDecodeError:
            i = start + 1
            continue
        end = start + offset
        if isinstance(value, dict) and ("action" in value or "name" in value):
            candidates.append((value, start, end))
        i = end

    if not candidates:
        raise NoAction("no action object found in the response")
    if len(candidates) > 1:
        raise MultipleActions(
            f"found {len(candidates)} action objects; responses must include exactly one"
        )

    obj, start, end = candidates[0]
    if "action" in obj:
        action_obj = obj["action"]
        json_reason = obj.get("reason", "")
    else:
        action_obj = obj
        json_reason = ""
    if not isinstance(action_obj, dict) or not isinstance(action_obj.get("name"), str):
        raise NoAction('the "action" object must carry a string "name"')

    arguments = {k: v for k, v in action_obj.items() if k != "name"}
    action = validate_action(action_obj["name"], arguments)

    prose = [raw[:start].strip(), raw[end:].strip()]
    reason_parts = [prose[0], str(json_reason).strip(), prose[1]]
    reason = "\n".join(part for part in reason_parts if part)
    return reason, action


def render_turn(reason: str, action: ActionRequest) -> str:
    """Canonical response text for an action; inverse of parse_turn."""
    return json.dumps(
        {"reason": reason, "action": {"name": action.name, **action.arguments}},
        ensure_ascii=False,
    )
