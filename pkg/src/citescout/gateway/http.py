"""Chat-completions client for OpenAI-compatible endpoints."""
from __future__ import annotations

import os
import time

import requests

from ..errors import ContextOverflow, EndpointError
from .tokens import estimate_tokens
from .types import (
    ChatMessage,
    CompletionUsage,
    EndpointConfig,
    ModelProfile,
    validate_messages,
)

_OVERFLOW_MARKERS = ("context_length", "maximum context", "context window")


class HttpGateway:
    """POSTs to {base_url}/chat/completions with retry on transient failures."""

    RETRYABLE = {429, 500, 502, 503, 504}

    def __init__(
        self,
        configs: dict[str, EndpointConfig],
        retries: int = 3,
        backoff: float = 0.5,
        session: requests.Session | None = None,
    ):
        self.configs = configs
        self.retries = retries
        self.backoff = backoff
        self.session = session or requests.Session()

    def complete(
        self, profile: ModelProfile, messages: list[ChatMessage]
    ) -> tuple[str, CompletionUsage]:
        validate_messages(messages)
        config = self.configs.get(profile.endpoint)
        if config is None:
            raise EndpointError(f"no endpoint config named {profile.endpoint!r}")
        base_url = os.environ.get(config.base_url_env)
        if not base_url:
            raise EndpointError(f"{config.base_url_env} is not set")
        headers = {}
        api_key = os.environ.get(config.api_key_env)
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        payload = {
            "model": config.model_id,
            "messages": [{"role": m.role, "content": m.content} for m in messages],
            "temperature": profile.temperature,
            "max_tokens": profile.max_output_tokens,
        }
        url = base_url.rstrip("/") + "/chat/completions"
        last_error = "unreachable"
        for attempt in range(self.retries + 1):
            if attempt:
                time.sleep(self.backoff * 2 ** (attempt - 1))
            try:
                response = self.session.post(
                    url, json=payload, headers=headers, timeout=120
                )
            except requests.RequestException as exc:
                last_error = str(exc)
                continue
            if response.status_code in self.RETRYABLE:
                last_error = f"HTTP {response.status_code}"
                continue
            body = response.json()
            if response.status_code != 200:
                message = str(body.get("error", {}).get("message", body))
                if any(marker in message.lower() for marker in _OVERFLOW_MARKERS):
                    raise ContextOverflow(message)
                raise EndpointError(f"HTTP {response.status_code}: {message}")
            return self._extract(body, messages)
        raise EndpointError(f"{url}: {last_error} after {self.retries} retries")

    @staticmethod
    def _extract(
        body: dict, messages: list[ChatMessage]
    ) -> tuple[str, CompletionUsage]:
        try:
            text = body["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError):
            raise EndpointError(f"malformed completion body: {body!r}") from None
        usage = body.get("usage") or {}
        if "prompt_tokens" in usage and "completion_tokens" in usage:
            return text, CompletionUsage(
                input_tokens=int(usage["prompt_tokens"]),
                output_tokens=int(usage["completion_tokens"]),
                provider_reported=True,
            )
        return text, CompletionUsage(
            input_tokens=sum(estimate_tokens(m.content) for m in messages),
            output_tokens=estimate_tokens(text),
            provider_reported=False,
        )
