"""Chat-completion gateway: providers, rate limiting, event log."""

from .client import Gateway
from .eventlog import EventLog
from .providers import HttpProvider, MockProvider, Provider
from .ratelimit import RateLimiter
from .types import (
    ChatRequest,
    ChatResponse,
    GatewayError,
    ProviderError,
    RequestValidationError,
    TokenEstimate,
    TokenUsage,
    TransportError,
    estimate_tokens,
)

__all__ = [
    "ChatRequest",
    "ChatResponse",
    "EventLog",
    "Gateway",
    "GatewayError",
    "HttpProvider",
    "MockProvider",
    "Provider",
    "ProviderError",
    "RateLimiter",
    "RequestValidationError",
    "TokenEstimate",
    "TokenUsage",
    "TransportError",
    "estimate_tokens",
]
