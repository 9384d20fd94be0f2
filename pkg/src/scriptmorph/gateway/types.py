"""Request/response types shared by all chat-completion providers."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import ScriptMorphError


class GatewayError(ScriptMorphError):
    """Base class for gateway failures."""


class RequestValidationError(GatewayError):
    pass


class TransportError(GatewayError):
    """Retryable transport-level failure (network, 5xx, throttling)."""


class ProviderError(GatewayError):
    """Non-retryable provider failure (bad request, malformed reply)."""


@dataclass(frozen=True)
class ChatRequest:
    system_text: str
    user_text: str
    completions_requested: int = 1
    max_output_tokens: int = 1024
    temperature: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.completions_requested < 1:
            raise RequestValidationError("completions_requested must be >= 1")
        if self.max_output_tokens < 1:
            raise RequestValidationError("max_output_tokens must be >= 1")
        if not 0.0 <= self.temperature <= 2.0:
            raise RequestValidationError("temperature must be within [0, 2]")


@dataclass(frozen=True)
class TokenUsage:
    input_tokens: int
    output_tokens_per_choice: tuple[int, ...]


@dataclass(frozen=True)
class ChatResponse:
    choices: tuple[str, ...]
    usage: TokenUsage
    provider_id: str
    request_id: str


@dataclass(frozen=True)
class TokenEstimate:
    count: int
    method: str


ESTIMATE_METHOD = "ceil-bytes/4"


def estimate_tokens(text: str) -> TokenEstimate:
    """Deterministic length functional: ceil(utf-8 bytes / 4).

    Good enough for budget arithmetic; the method label travels with every
    prompt bundle so downstream reports can state how lengths were measured.
    """
    count = math.ceil(len(text.encode("utf-8")) / 4)
    return TokenEstimate(count=count, method=ESTIMATE_METHOD)
