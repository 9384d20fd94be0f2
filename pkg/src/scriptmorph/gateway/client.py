"""Uniform gateway in front of any provider: validation, retry with capped
exponential backoff, rate limiting, and mandatory event logging."""

from __future__ import annotations

import logging
import time
from typing import Optional

from .eventlog import EventLog, make_record
from .providers import Provider
from .ratelimit import RateLimiter
from .types import ChatRequest, ChatResponse, ProviderError, TransportError, estimate_tokens

logger = logging.getLogger(__name__)

MAX_ATTEMPTS = 3
BACKOFF_BASE = 0.5
BACKOFF_CAP = 4.0


class Gateway:
    """Runs requests against one provider and logs every exchange.

    Request ids are client-generated and sequential, so retries are
    idempotent and a resumed campaign reproduces the id stream of an
    uninterrupted one (``next_seq`` restores the counter).
    """

    def __init__(
        self,
        provider: Provider,
        event_log: EventLog,
        rate_limiter: Optional[RateLimiter] = None,
        sleep=time.sleep,
        next_seq: int = 0,
    ):
        self.provider = provider
        self.event_log = event_log
        self.rate_limiter = rate_limiter
        self._sleep = sleep
        self._seq = next_seq

    @property
    def next_seq(self) -> int:
        return self._seq

    def complete(self, request: ChatRequest, meta: Optional[dict] = None) -> ChatResponse:
        # the sequence number advances only after the exchange is logged, so
        # a failed request is re-issued under the same id (by a retry now or
        # by a resumed campaign later)
        request_id = f"r{self._seq:06d}"
        if self.rate_limiter is not None:
            self.rate_limiter.acquire()
        last_error: Optional[Exception] = None
        response = None
        attempts = 0
        for attempt in range(MAX_ATTEMPTS):
            attempts = attempt + 1
            try:
                response = self.provider.send(request, request_id)
                break
            except TransportError as exc:
                last_error = exc
                if attempt + 1 < MAX_ATTEMPTS:
                    delay = min(BACKOFF_BASE * (2**attempt), BACKOFF_CAP)
                    logger.warning(
                        "transport failure on %s (attempt %d/%d), retrying in %.1fs: %s",
                        request_id,
                        attempts,
                        MAX_ATTEMPTS,
                        delay,
                        exc,
                    )
                    self._sleep(delay)
        if response is None:
            raise TransportError(
                f"request {request_id} failed after {attempts} attempts: {last_error}"
            )
        if len(response.choices) != request.completions_requested:
            raise ProviderError(
                f"provider returned {len(response.choices)} choices, "
                f"requested {request.completions_requested}"
            )
        truncated = [
            i
            for i, choice in enumerate(response.choices)
            if estimate_tokens(choice).count > request.max_output_tokens
        ]
        for i in truncated:
            logger.warning(
                "choice %d of %s exceeds the output budget (%d tokens allowed)",
                i,
                request_id,
                request.max_output_tokens,
            )
        self.event_log.append(
            make_record(
                request,
                response,
                provider_id=self.provider.provider_id,
                request_id=request_id,
                attempts=attempts,
                truncated_choices=truncated,
                meta=meta,
            )
        )
        self._seq += 1
        return response
