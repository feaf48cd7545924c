"""Chat-completion message, usage, and profile types."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from ..errors import SchemaError

ROLE_SYSTEM = "system"
ROLE_USER = "user"
ROLE_ASSISTANT = "assistant"


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str


@dataclass(frozen=True)
class CompletionUsage:
    """Token counts for one call; estimator-derived when not provider_reported."""

    input_tokens: int = 0
    output_tokens: int = 0
    provider_reported: bool = False

    def __add__(self, other: "CompletionUsage") -> "CompletionUsage":
        return CompletionUsage(
            input_tokens=self.input_tokens + other.input_tokens,
            output_tokens=self.output_tokens + other.output_tokens,
            provider_reported=self.provider_reported and other.provider_reported,
        )


@dataclass(frozen=True)
class ModelProfile:
    """Named model configuration; `endpoint` keys into the endpoint config file."""

    name: str
    endpoint: str = "scripted"
    temperature: float = 0.0
    max_output_tokens: int = 2048
    reasoning: bool = False

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")


@dataclass(frozen=True)
class EndpointConfig:
    name: str
    base_url_env: str
    api_key_env: str
    model_id: str
    temperature: float = 0.0
    max_output_tokens: int = 2048


def load_endpoint_configs(path: str | Path) -> dict[str, EndpointConfig]:
    """One JSON file keyed by profile name."""
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    configs = {}
    for name, row in raw.items():
        try:
            configs[name] = EndpointConfig(
                name=name,
                base_url_env=row["base_url_env"],
                api_key_env=row["api_key_env"],
                model_id=row["model_id"],
                temperature=row.get("temperature", 0.0),
                max_output_tokens=row.get("max_output_tokens", 2048),
            )
        except KeyError as exc:
            raise SchemaError(f"endpoint {name!r} is missing {exc}") from None
    return configs


def validate_messages(messages: list[ChatMessage]) -> None:
    if not messages:
        raise ValueError("messages must be non-empty")
    if messages[0].role != ROLE_SYSTEM:
        raise ValueError("first message must have role=system")
    for message in messages:
        if not message.content:
            raise ValueError("message content must be non-empty")
