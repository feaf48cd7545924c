"""Uniform chat-completion interface with per-call token accounting."""
from __future__ import annotations

from typing import Protocol, runtime_checkable

from .http import HttpGateway
from .scripted import ScriptedGateway
from .tokens import estimate_tokens
from .types import (
    ROLE_ASSISTANT,
    ROLE_SYSTEM,
    ROLE_USER,
    ChatMessage,
    CompletionUsage,
    EndpointConfig,
    ModelProfile,
    load_endpoint_configs,
    validate_messages,
)


@runtime_checkable
class Gateway(Protocol):
    def complete(
        self, profile: ModelProfile, messages: list[ChatMessage]
    ) -> tuple[str, CompletionUsage]: ...


__all__ = [
    "ChatMessage",
    "CompletionUsage",
    "EndpointConfig",
    "Gateway",
    "HttpGateway",
    "ModelProfile",
    "ROLE_ASSISTANT",
    "ROLE_SYSTEM",
    "ROLE_USER",
    "ScriptedGateway",
    "estimate_tokens",
    "load_endpoint_configs",
    "validate_messages",
]
