"""Deterministic gateway that replays a fixed queue of responses.

Responses are matched on call index, not content. Optional expectations
(one regex per call) pattern-check the last user message, for tests that
want strict replay. A fail plan can raise a chosen error at a given call
number to exercise retry and truncation paths.
"""
from __future__ import annotations

import json
import re
import threading
from pathlib import Path

from ..errors import EndpointError, ScriptMismatch
from .tokens import estimate_tokens
from .types import ChatMessage, CompletionUsage, ModelProfile, ROLE_USER, validate_messages


class ScriptedGateway:
    def __init__(
        self,
        responses: list[str],
        expectations: list[str | None] | None = None,
        fail_plan: dict[int, Exception] | None = None,
    ):
        self.responses = list(responses)
        self.expectations = list(expectations) if expectations else []
        self.fail_plan = dict(fail_plan) if fail_plan else {}
        self.calls = 0
        self._cursor = 0
        self._lock = threading.Lock()

    @classmethod
    def from_file(cls, path: str | Path) -> "ScriptedGateway":
        """JSON file: either a bare list of strings or {"responses": [...]}."""
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        responses = raw["responses"] if isinstance(raw, dict) else raw
        return cls(responses)

    def complete(
        self, profile: ModelProfile, messages: list[ChatMessage]
    ) -> tuple[str, CompletionUsage]:
        validate_messages(messages)
        with self._lock:
            self.calls += 1
            planned = self.fail_plan.pop(self.calls, None)
            if planned is not None:
                raise planned
            if self._cursor >= len(self.responses):
                raise EndpointError("scripted response queue exhausted")
            index = self._cursor
            self._cursor += 1
        if index < len(self.expectations) and self.expectations[index]:
            last_user = next(
                (m.content for m in reversed(messages) if m.role == ROLE_USER), ""
            )
            if not re.search(self.expectations[index], last_user, re.DOTALL):
                raise ScriptMismatch(
                    f"call {index}: last user message does not match "
                    f"{self.expectations[index]!r}"
                )
        text = self.responses[index]
        usage = CompletionUsage(
            input_tokens=sum(estimate_tokens(m.content) for m in messages),
            output_tokens=estimate_tokens(text),
            provider_reported=False,
        )
        return text, usage
