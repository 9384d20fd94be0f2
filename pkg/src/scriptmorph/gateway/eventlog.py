"""Append-only JSON-lines log of every gateway request/response pair."""

from __future__ import annotations

import json
import threading
import time
from pathlib import Path
from typing import Iterator, Optional


class EventLog:
    """One record per completed gateway call, behind a single writer lock."""

    def __init__(self, path: Path):
        self.path = Path(path)
        self._lock = threading.Lock()

    def append(self, record: dict):
        line = json.dumps(record, ensure_ascii=False, sort_keys=True)
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")

    def records(self) -> Iterator[dict]:
        if not self.path.exists():
            return
        with open(self.path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    yield json.loads(line)

    def count(self) -> int:
        return sum(1 for _ in self.records())


def make_record(
    request,
    response,
    *,
    provider_id: str,
    request_id: str,
    attempts: int,
    truncated_choices: list[int],
    meta: Optional[dict] = None,
) -> dict:
    return {
        "ts": time.time(),
        "provider_id": provider_id,
        "request_id": request_id,
        "attempts": attempts,
        "request": {
            "system_text": request.system_text,
            "user_text": request.user_text,
            "completions_requested": request.completions_requested,
            "max_output_tokens": request.max_output_tokens,
            "temperature": request.temperature,
            "seed": request.seed,
        },
        "response": {
            "choices": list(response.choices),
            "usage": {
                "input_tokens": response.usage.input_tokens,
                "output_tokens_per_choice": list(
                    response.usage.output_tokens_per_choice
                ),
            },
        },
        "truncated_choices": truncated_choices,
        "meta": meta or {},
    }
