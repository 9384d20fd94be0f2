"""Provider implementations: an HTTP chat-completions client and the
deterministic offline mock."""

from __future__ import annotations

import os
import random
from abc import ABC, abstractmethod
from typing import Optional

try:
    import requests
except ImportError:  # the offline mock stack works without an HTTP client
    requests = None

from ..promptfmt import (
    PromptFormatError,
    extract_example_originals,
    extract_vote_candidates,
    fence_block,
    find_fenced_blocks,
    parse_header,
)
from ..seeding import derive_seed
from ..transforms import apply_transform
from .types import (
    ChatRequest,
    ChatResponse,
    ProviderError,
    TokenUsage,
    TransportError,
    estimate_tokens,
)


class Provider(ABC):
    provider_id: str

    @abstractmethod
    def send(self, request: ChatRequest, request_id: str) -> ChatResponse:
        """Perform one completion call; may raise TransportError (retryable)
        or ProviderError (fatal)."""


class HttpProvider(Provider):
    """OpenAI-style chat-completions endpoint.

    The API key is read from the environment variable named in the config
    and never written anywhere.  Multi-completion requests use the
    endpoint's native ``n`` parameter.
    """

    def __init__(
        self,
        endpoint: str,
        model: str,
        api_key_env: str,
        provider_id: str = "http",
        timeout: float = 60.0,
        session=None,
    ):
        if requests is None and session is None:
            raise ProviderError(
                "the requests package is required for the HTTP provider"
            )
        self.provider_id = provider_id
        self.endpoint = endpoint
        self.model = model
        self.api_key_env = api_key_env
        self.timeout = timeout
        self.session = session if session is not None else requests.Session()

    def _api_key(self) -> str:
        key = os.environ.get(self.api_key_env, "")
        if not key:
            raise ProviderError(
                f"environment variable {self.api_key_env} is empty or unset"
            )
        return key

    def send(self, request: ChatRequest, request_id: str) -> ChatResponse:
        payload = {
            "model": self.model,
            "messages": [
                {"role": "system", "content": request.system_text},
                {"role": "user", "content": request.user_text},
            ],
            "n": request.completions_requested,
            "max_tokens": request.max_output_tokens,
            "temperature": request.temperature,
            "seed": request.seed,
        }
        transport_errors = (requests.RequestException,) if requests else (OSError,)
        try:
            resp = self.session.post(
                self.endpoint,
                json=payload,
                headers={"Authorization": f"Bearer {self._api_key()}"},
                timeout=self.timeout,
            )
        except transport_errors as exc:
            raise TransportError(f"transport failure: {exc}") from exc
        if resp.status_code == 429 or resp.status_code >= 500:
            raise TransportError(f"provider returned HTTP {resp.status_code}")
        if resp.status_code != 200:
            raise ProviderError(
                f"provider returned HTTP {resp.status_code}: {resp.text[:200]}"
            )
        try:
            doc = resp.json()
            choices = tuple(c["message"]["content"] for c in doc["choices"])
        except (ValueError, KeyError, TypeError) as exc:
            raise ProviderError(f"malformed provider reply: {exc}") from exc
        return ChatResponse(
            choices=choices,
            usage=TokenUsage(
                input_tokens=estimate_tokens(
                    request.system_text + request.user_text
                ).count,
                output_tokens_per_choice=tuple(
                    estimate_tokens(c).count for c in choices
                ),
            ),
            provider_id=self.provider_id,
            request_id=request_id,
        )


class MockProvider(Provider):
    """Offline stand-in for a code-capable chat model.

    It communicates through the same prompt text a real provider sees: the
    ``#HP`` header names the strategy module, mode, candidate count and
    seed.  Generate mode applies the module's reference rewrite to the last
    fenced block of the prompt, producing pairwise-distinct variants whose
    positions and content depend only on the seed.  Vote mode scores every
    ballot entry by its minimum edit distance from the worked-example
    originals embedded in the prompt and elects the farthest entry, lowest
    index winning ties.
    """

    provider_id = "mock"

    # scoring inputs are capped so pathological candidates cannot make the
    # quadratic distance computation crawl
    SCORE_PREFIX = 1000

    def send(self, request: ChatRequest, request_id: str) -> ChatResponse:
        header = parse_header(request.user_text)
        if header["mode"] == "generate":
            choices = self._generate(request, header)
        else:
            choices = self._vote(request, header)
        return ChatResponse(
            choices=tuple(choices),
            usage=TokenUsage(
                input_tokens=estimate_tokens(
                    request.system_text + request.user_text
                ).count,
                output_tokens_per_choice=tuple(
                    estimate_tokens(c).count for c in choices
                ),
            ),
            provider_id=self.provider_id,
            request_id=request_id,
        )

    def _generate(self, request: ChatRequest, header: dict) -> list[str]:
        blocks = find_fenced_blocks(request.user_text)
        if not blocks:
            raise PromptFormatError("generation prompt carries no fenced input code")
        code = blocks[-1]
        module_id = header["module"]
        p = header["p"]
        variants: list[str] = []
        for i in range(p):
            rng = random.Random(derive_seed(header["seed"], module_id, i))
            out = apply_transform(module_id, code, rng)
            if out in variants or out == code:
                salt = rng.randrange(1000, 10000)
                out = out + f"\n// alt {i} {salt}"
            variants.append(out)
        rendered = [
            f"DESC: Variant {i}: applied {module_id} rewrite, take {i}.\n"
            + fence_block(v)
            for i, v in enumerate(variants)
        ]
        if request.completions_requested == 1:
            return ["\n".join(rendered)]
        if request.completions_requested != p:
            raise PromptFormatError(
                "generation request wants neither 1 nor p completions"
            )
        return rendered

    def _vote(self, request: ChatRequest, header: dict) -> list[str]:
        entries, _kind = extract_vote_candidates(request.user_text)
        originals = extract_example_originals(request.user_text)
        scores = [self._score(entry, originals) for entry in entries]
        best = max(range(len(entries)), key=lambda i: (scores[i], -i))
        line = (
            f"BEST: {best} — farthest from the worked examples "
            f"(distance {scores[best]})"
        )
        return [line] * request.completions_requested

    def _score(self, entry: str, originals: list[str]) -> int:
        from ..minilang import levenshtein

        entry = entry[: self.SCORE_PREFIX]
        if not originals:
            return len(entry)
        return min(
            levenshtein(entry, orig[: self.SCORE_PREFIX]) for orig in originals
        )
